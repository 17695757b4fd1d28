#pragma once

#include <algorithm>
#include <string>
#include <string_view>

namespace tkc {

// Global letter order: a..z then A..Z.
inline int letter_rank(char c) {
  if (c >= 'a' && c <= 'z') return c - 'a';
  if (c >= 'A' && c <= 'Z') return 26 + (c - 'A');
  return -1;
}

inline bool is_letter(char c) { return letter_rank(c) >= 0; }

inline bool letter_less(char a, char b) { return letter_rank(a) < letter_rank(b); }

inline bool letters_less(std::string_view a, std::string_view b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(), letter_less);
}

inline std::string sorted_letters(std::string s) {
  std::sort(s.begin(), s.end(), letter_less);
  return s;
}

inline bool has_letter(std::string_view s, char c) { return s.find(c) != std::string_view::npos; }

inline bool same_letter_set(std::string_view a, std::string_view b) {
  return a.size() == b.size() && sorted_letters(std::string(a)) == sorted_letters(std::string(b));
}

// Letters of a, in a's order, that also occur in b.
inline std::string letters_in(std::string_view a, std::string_view b) {
  std::string r;
  for (char c : a)
    if (has_letter(b, c)) r += c;
  return r;
}

inline std::string letters_not_in(std::string_view a, std::string_view b) {
  std::string r;
  for (char c : a)
    if (!has_letter(b, c)) r += c;
  return r;
}

// Sorted union without duplicates.
inline std::string letter_union(std::string_view a, std::string_view b) {
  std::string r(a);
  for (char c : b)
    if (!has_letter(r, c)) r += c;
  return sorted_letters(r);
}

inline bool has_repeats(std::string_view s) {
  for (size_t i = 0; i < s.size(); ++i)
    for (size_t j = i + 1; j < s.size(); ++j)
      if (s[i] == s[j]) return true;
  return false;
}

// Bit mask over the 52-letter alphabet.
using LetterMask = unsigned long long;

inline LetterMask letter_mask(std::string_view s) {
  LetterMask m = 0;
  for (char c : s) m |= 1ULL << letter_rank(c);
  return m;
}

inline std::string mask_letters(LetterMask m) {
  std::string r;
  for (int i = 0; i < 52; ++i)
    if (m >> i & 1ULL) r += static_cast<char>(i < 26 ? 'a' + i : 'A' + i - 26);
  return r;
}

}  // namespace tkc
