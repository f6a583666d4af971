#pragma once

#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "rankenum/core.hpp"
#include "rankenum/join_tree.hpp"
#include "rankenum/reduce.hpp"

namespace rankenum {

// Lexicographic enumeration without priority queues. Attributes are fixed one
// by one in the requested order; the candidate values for the next attribute
// are exactly those surviving a two-pass semi-join sweep of the instance
// filtered by the current prefix. Sweeps rerun per prefix; between two
// answers the work is bounded by a constant times (#attrs * instance size).

class LexiStream final : public OutputStream {
 public:
  LexiStream(const JoinTree& jt, const ReducedInstance& inst, RankingFunction rf,
             WeightMap wm)
      : tree_(jt), inst_(inst), rf_(std::move(rf)), wm_(std::move(wm)) {
    if (rf_.kind != RankingFunction::Kind::Lex)
      throw PlanError("lexicographic engine needs a lex ranking");
    {
      std::unordered_set<std::string> p(tree_.project.begin(), tree_.project.end());
      if (rf_.lex.size() != p.size())
        throw PlanError("lex order must cover the projection list");
      for (const auto& la : rf_.lex)
        if (!p.count(la.attr))
          throw PlanError("lex attr not projected: " + la.attr);
    }
    for (const auto& la : rf_.lex) attrs_.push_back(la.attr);
    for (const auto& p : tree_.project) {
      for (size_t i = 0; i < attrs_.size(); ++i)
        if (attrs_[i] == p) out_perm_.push_back(static_cast<int>(i));
    }
    build_node_contexts();
    if (inst_.total_tuples() > 0) {
      Frame f;
      f.values = candidates(0);
      stack_.push_back(std::move(f));
    }
  }

  const std::vector<std::string>& output_attrs() const override { return tree_.project; }
  const OpCounters& counters() const override { return counters_; }

  std::optional<OutputTuple> next() override {
    while (!stack_.empty()) {
      Frame& f = stack_.back();
      if (f.cursor >= f.values.size()) {
        stack_.pop_back();
        if (!bound_.empty()) bound_.pop_back();
        continue;
      }
      Value v = f.values[f.cursor++];
      size_t depth = stack_.size() - 1;
      if (depth + 1 == attrs_.size()) {
        bound_.push_back(std::move(v));
        Tuple out(bound_.size());
        for (size_t j = 0; j < out_perm_.size(); ++j) out[j] = bound_[out_perm_[j]];
        bound_.pop_back();
        double rank = sum_rank(out, tree_.project, wm_);
        return OutputTuple{std::move(out), rank};
      }
      bound_.push_back(std::move(v));
      Frame nf;
      nf.values = candidates(depth + 1);
      if (nf.values.empty())
        throw std::logic_error("lexi: bound prefix has no extension");
      stack_.push_back(std::move(nf));
    }
    return std::nullopt;
  }

 private:
  struct Frame {
    std::vector<Value> values;  // already in iteration order for the attr's dir
    size_t cursor = 0;
  };

  struct NodeCtx {
    std::vector<std::pair<int, int>> bound_cols;  // (column, lex depth)
    std::vector<int> anchor_cols;
    std::vector<std::vector<int>> child_anchor_cols;
  };

  void build_node_contexts() {
    ctxs_.resize(tree_.nodes.size());
    for (size_t u = 0; u < tree_.nodes.size(); ++u) {
      const Relation& rel = inst_.nodes[u];
      NodeCtx& ctx = ctxs_[u];
      for (size_t d = 0; d < attrs_.size(); ++d) {
        int c = rel.col(attrs_[d]);
        if (c >= 0) ctx.bound_cols.emplace_back(c, static_cast<int>(d));
      }
      for (const auto& a : tree_.nodes[u].anchor) ctx.anchor_cols.push_back(rel.col(a));
      for (int child : tree_.nodes[u].children) {
        std::vector<int> cols;
        for (const auto& a : tree_.nodes[child].anchor) cols.push_back(rel.col(a));
        ctx.child_anchor_cols.push_back(std::move(cols));
      }
    }
    holder_.resize(attrs_.size(), {-1, -1});
    for (size_t d = 0; d < attrs_.size(); ++d)
      for (size_t u = 0; u < inst_.nodes.size() && holder_[d].first < 0; ++u) {
        int c = inst_.nodes[u].col(attrs_[d]);
        if (c >= 0) holder_[d] = {static_cast<int>(u), c};
      }
  }

  // Values of attrs_[depth] consistent with bound_[0..depth), in iteration
  // order for that attribute's direction.
  std::vector<Value> candidates(size_t depth) {
    const std::string& attr = attrs_[depth];
    auto dom_it = inst_.domains.find(attr);
    if (dom_it == inst_.domains.end()) return {};
    const std::vector<Value>& domain = dom_it->second;
    std::vector<Value> out;

    if (depth == 0) {
      out = domain;  // the reduced instance guarantees every value extends
    } else {
      size_t n = inst_.nodes.size();
      std::vector<std::vector<char>> alive(n);
      for (size_t u = 0; u < n; ++u) {
        const auto& tuples = inst_.nodes[u].tuples;
        alive[u].assign(tuples.size(), 1);
        for (auto [col, d] : ctxs_[u].bound_cols) {
          if (static_cast<size_t>(d) >= depth) continue;
          for (size_t ti = 0; ti < tuples.size(); ++ti)
            if (alive[u][ti] && tuples[ti][col] != bound_[d]) alive[u][ti] = 0;
          counters_.elementary_ops += tuples.size();
        }
      }
      auto order = detail::post_order(tree_);
      for (int u : order)
        for (size_t j = 0; j < tree_.nodes[u].children.size(); ++j)
          semi_filter(u, static_cast<int>(j), alive, true);
      for (auto it = order.rbegin(); it != order.rend(); ++it)
        for (size_t j = 0; j < tree_.nodes[*it].children.size(); ++j)
          semi_filter(*it, static_cast<int>(j), alive, false);

      auto [hu, hc] = holder_[depth];
      std::vector<char> mark(domain.size(), 0);
      const auto& tuples = inst_.nodes[hu].tuples;
      for (size_t ti = 0; ti < tuples.size(); ++ti) {
        if (!alive[hu][ti]) continue;
        const Value& v = tuples[ti][hc];
        auto pos = std::lower_bound(domain.begin(), domain.end(), v,
                                    [](const Value& a, const Value& b) {
                                      return compare_values(a, b) < 0;
                                    });
        mark[pos - domain.begin()] = 1;
      }
      counters_.elementary_ops += tuples.size();
      for (size_t i = 0; i < domain.size(); ++i)
        if (mark[i]) out.push_back(domain[i]);
    }

    if (dir_of(depth) == Dir::Desc) std::reverse(out.begin(), out.end());
    return out;
  }

  // One semi-join step between node u and its j-th child; direction picks
  // which side gets filtered.
  void semi_filter(int u, int j, std::vector<std::vector<char>>& alive, bool up) {
    int c = tree_.nodes[u].children[j];
    const auto& parent_cols = ctxs_[u].child_anchor_cols[j];
    const auto& child_cols = ctxs_[c].anchor_cols;
    int src = up ? c : u;
    int dst = up ? u : c;
    const auto& src_cols = up ? child_cols : parent_cols;
    const auto& dst_cols = up ? parent_cols : child_cols;
    std::unordered_set<Tuple, TupleHash> keys;
    const auto& src_tuples = inst_.nodes[src].tuples;
    for (size_t ti = 0; ti < src_tuples.size(); ++ti)
      if (alive[src][ti]) keys.insert(detail::project_cols(src_tuples[ti], src_cols));
    const auto& dst_tuples = inst_.nodes[dst].tuples;
    for (size_t ti = 0; ti < dst_tuples.size(); ++ti)
      if (alive[dst][ti] &&
          !keys.count(detail::project_cols(dst_tuples[ti], dst_cols)))
        alive[dst][ti] = 0;
    counters_.elementary_ops += src_tuples.size() + dst_tuples.size();
  }

  Dir dir_of(size_t depth) const { return rf_.lex[depth].dir; }

  JoinTree tree_;
  const ReducedInstance& inst_;
  RankingFunction rf_;
  WeightMap wm_;
  OpCounters counters_;
  std::vector<std::string> attrs_;  // lex order
  std::vector<int> out_perm_;       // project position -> lex depth
  std::vector<NodeCtx> ctxs_;
  std::vector<std::pair<int, int>> holder_;  // per depth: (node, col)
  std::vector<Frame> stack_;
  std::vector<Value> bound_;  // values for attrs_[0..bound_.size())
};

}  // namespace rankenum
