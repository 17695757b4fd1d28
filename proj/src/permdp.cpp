#include "tkc/permdp.hpp"

#include <algorithm>

#include "tkc/einsum.hpp"
#include "tkc/letters.hpp"

namespace tkc {

std::vector<std::string> candidate_orders(const NodePtr& n) {
  if (n->kind == NodeKind::Indexed) return {n->idx};
  if (n->kind == NodeKind::Assign) return {n->kids[0]->idx};
  std::string s = sorted_letters(n->idx);
  std::vector<std::string> out;
  do out.push_back(s);
  while (std::next_permutation(s.begin(), s.end(), letter_less));
  return out;
}

MemoryLayout node_layout(const NodePtr& n, const std::string& order, const PermContext& ctx) {
  if (n->kind == NodeKind::Indexed) return ctx.layouts->at(n->tensor);
  SparsityPattern p = transpose(n->spp, n->idx, order);
  return assign_layout(p.extents(), p, LayoutPolicy::Aligned, ctx.align);
}

CostTuple node_cost(const NodePtr& n, const std::string& y, const std::vector<std::string>& kids,
                    const PermContext& ctx, LogPlan* plan) {
  switch (n->kind) {
    case NodeKind::Assign:
      return kids[1] == n->kids[0]->idx ? CostTuple{} : CostTuple::infinite();
    case NodeKind::Add:
      for (const auto& k : kids)
        if (k != y) return CostTuple::infinite();
      return {};
    case NodeKind::ScalarMul:
      return kids[0] == y ? CostTuple{} : CostTuple::infinite();
    case NodeKind::Contraction: {
      MemoryLayout la = node_layout(n->kids[0], kids[0], ctx);
      MemoryLayout lb = node_layout(n->kids[1], kids[1], ctx);
      MemoryLayout lc = node_layout(n, y, ctx);
      SparsityPattern p = transpose(n->spp, n->idx, y);
      return min_log({kids[0], &la}, {kids[1], &lb}, {y, &lc}, n->summed, region_of(y, p), plan);
    }
    default:
      return {};
  }
}

namespace {

CostTuple config_cost(const NodePtr& n, const Configuration& c, const PermContext& ctx) {
  std::vector<std::string> kids;
  CostTuple sum;
  for (const auto& k : n->kids) {
    kids.push_back(c.at(k.get()));
    sum = sum + config_cost(k, c, ctx);
  }
  return sum + node_cost(n, c.at(n.get()), kids, ctx);
}

struct Entry {
  CostTuple cost = CostTuple::infinite();
  std::vector<int> choice;
};

class Dp {
public:
  explicit Dp(const PermContext& ctx) : ctx_(ctx) {}

  const std::vector<Entry>& solve(const NodePtr& n) {
    auto it = memo_.find(n.get());
    if (it != memo_.end()) return it->second;
    for (const auto& k : n->kids) solve(k);
    const std::vector<std::string>& ys = orders(n);
    std::vector<Entry> table(ys.size());
    const size_t nk = n->kids.size();
    for (size_t yi = 0; yi < ys.size(); ++yi) {
      Entry& e = table[yi];
      if (n->kind == NodeKind::Contraction) {
        const auto& o0 = orders(n->kids[0]);
        const auto& o1 = orders(n->kids[1]);
        const auto& f0 = memo_.at(n->kids[0].get());
        const auto& f1 = memo_.at(n->kids[1].get());
        for (size_t i = 0; i < o0.size(); ++i) {
          if (f0[i].cost.inf) continue;
          for (size_t j = 0; j < o1.size(); ++j) {
            if (f1[j].cost.inf) continue;
            CostTuple c = node_cost(n, ys[yi], {o0[i], o1[j]}, ctx_) + f0[i].cost + f1[j].cost;
            if (c < e.cost) {
              e.cost = c;
              e.choice = {static_cast<int>(i), static_cast<int>(j)};
            }
          }
        }
        continue;
      }
      bool constrained = n->kind == NodeKind::Add || n->kind == NodeKind::ScalarMul || n->kind == NodeKind::Assign;
      CostTuple total;
      std::vector<int> choice(nk, -1);
      for (size_t k = 0; k < nk; ++k) {
        const auto& ok = orders(n->kids[k]);
        const auto& fk = memo_.at(n->kids[k].get());
        std::string want;
        if (constrained) want = n->kind == NodeKind::Assign ? n->kids[0]->idx : ys[yi];
        if (constrained && !(n->kind == NodeKind::Assign && k == 0)) {
          auto pos = std::find(ok.begin(), ok.end(), want);
          if (pos == ok.end()) {
            total = CostTuple::infinite();
            break;
          }
          choice[k] = static_cast<int>(pos - ok.begin());
        } else {
          CostTuple best = CostTuple::infinite();
          for (size_t i = 0; i < ok.size(); ++i)
            if (fk[i].cost < best) {
              best = fk[i].cost;
              choice[k] = static_cast<int>(i);
            }
          if (choice[k] < 0) {
            total = CostTuple::infinite();
            break;
          }
        }
        total = total + fk[choice[k]].cost;
      }
      if (!total.inf) {
        e.cost = total;
        e.choice = choice;
      }
    }
    return memo_.emplace(n.get(), std::move(table)).first->second;
  }

  void extract(const NodePtr& n, int yi, Configuration& c) {
    c[n.get()] = orders(n)[yi];
    const Entry& e = memo_.at(n.get())[yi];
    for (size_t k = 0; k < n->kids.size(); ++k) extract(n->kids[k], e.choice[k], c);
  }

  const std::vector<std::string>& orders(const NodePtr& n) {
    auto it = orders_.find(n.get());
    if (it != orders_.end()) return it->second;
    return orders_.emplace(n.get(), candidate_orders(n)).first->second;
  }

private:
  const PermContext& ctx_;
  std::map<const Node*, std::vector<Entry>> memo_;
  std::map<const Node*, std::vector<std::string>> orders_;
};

}  // namespace

CostTuple configuration_cost(const NodePtr& root, const Configuration& c, const PermContext& ctx) {
  return config_cost(root, c, ctx);
}

PermResult optimize_permutations(const NodePtr& root, const PermContext& ctx) {
  Dp dp(ctx);
  const auto& table = dp.solve(root);
  PermResult r;
  r.cost = CostTuple::infinite();
  int best = -1;
  for (size_t i = 0; i < table.size(); ++i)
    if (table[i].cost < r.cost) {
      r.cost = table[i].cost;
      best = static_cast<int>(i);
    }
  if (best >= 0) dp.extract(root, best, r.config);
  return r;
}

void apply_configuration(const NodePtr& root, const Configuration& c, const PermContext& ctx) {
  visit_postorder(root, [&](const NodePtr& n) {
    const std::string& y = c.at(n.get());
    if (n->kind == NodeKind::Contraction) {
      LogPlan plan;
      std::vector<std::string> kids{n->kids[0]->idx, n->kids[1]->idx};
      node_cost(n, y, kids, ctx, &plan);
      plan.cost = node_cost(n, y, kids, ctx);
      if (n->idx != y) {
        n->spp = transpose(n->spp, n->idx, y);
        n->idx = y;
      }
      n->plan = std::make_shared<LogPlan>(plan);
      return;
    }
    if (n->kind == NodeKind::Indexed || n->kind == NodeKind::Assign || n->idx == y) return;
    n->spp = transpose(n->spp, n->idx, y);
    n->idx = y;
  });
}

}  // namespace tkc
