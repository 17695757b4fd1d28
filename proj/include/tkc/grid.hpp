#pragma once

#include <cmath>
#include <vector>

#include "tkc/spp.hpp"

namespace tkc {

// Dense value grid, column-major.
template <class T>
class Grid {
public:
  Grid() = default;
  explicit Grid(Extents ext, T fill = T(0)) : ext_(std::move(ext)), data_(volume(ext_), fill) {}

  int rank() const { return static_cast<int>(ext_.size()); }
  const Extents& extents() const { return ext_; }
  long size() const { return static_cast<long>(data_.size()); }

  T& operator()(const MultiIndex& idx) { return data_[linear_index(ext_, idx)]; }
  const T& operator()(const MultiIndex& idx) const { return data_[linear_index(ext_, idx)]; }
  T& operator[](long i) { return data_[i]; }
  const T& operator[](long i) const { return data_[i]; }
  std::vector<T>& data() { return data_; }
  const std::vector<T>& data() const { return data_; }

  Grid masked(const SparsityPattern& p) const {
    Grid r(*this);
    for (long i = 0; i < size(); ++i)
      if (!p.lin(i)) r.data_[i] = T(0);
    return r;
  }

  template <class U>
  Grid<U> cast() const {
    Grid<U> r(ext_);
    for (long i = 0; i < size(); ++i) r[i] = static_cast<U>(data_[i]);
    return r;
  }

  SparsityPattern pattern() const {
    SparsityPattern p(ext_);
    for (long i = 0; i < size(); ++i) p.set_lin(i, data_[i] != T(0));
    return p;
  }

private:
  Extents ext_;
  std::vector<T> data_;
};

template <class T>
double frobenius(const Grid<T>& g) {
  double s = 0;
  for (long i = 0; i < g.size(); ++i) s += double(g[i]) * double(g[i]);
  return std::sqrt(s);
}

// ||a-b|| / max(||b||, tiny); 0 when both vanish.
template <class T, class U>
double relative_error(const Grid<T>& a, const Grid<U>& b) {
  double d = 0, n = 0;
  for (long i = 0; i < a.size(); ++i) {
    double x = double(a[i]) - double(b[i]);
    d += x * x;
    n += double(b[i]) * double(b[i]);
  }
  if (n == 0) return std::sqrt(d);
  return std::sqrt(d / n);
}

}  // namespace tkc
