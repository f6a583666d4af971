#pragma once

#include <functional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "rankenum/core.hpp"
#include "rankenum/join_tree.hpp"

namespace rankenum {

// Node relations after the full reducer, parallel to JoinTree::nodes,
// plus the lookup structures the enumeration phases need.
struct ReducedInstance {
  std::vector<Relation> nodes;
  // anchor value -> indices of node tuples with that anchor, input order
  std::vector<std::unordered_map<Tuple, std::vector<uint32_t>, TupleHash>> anchor_groups;
  // sorted distinct values per attribute; identical across holder relations
  // once the instance is fully reduced
  std::unordered_map<std::string, std::vector<Value>> domains;

  uint64_t total_tuples() const {
    uint64_t n = 0;
    for (const auto& r : nodes) n += r.size();
    return n;
  }
};

namespace detail {

inline std::vector<int> cols_of(const Relation& r, const std::vector<std::string>& attrs) {
  std::vector<int> cols;
  cols.reserve(attrs.size());
  for (const auto& a : attrs) {
    int c = r.col(a);
    if (c < 0) throw PlanError("relation " + r.name + " lacks attribute " + a);
    cols.push_back(c);
  }
  return cols;
}

inline Tuple project_cols(const Tuple& t, const std::vector<int>& cols) {
  Tuple out;
  out.reserve(cols.size());
  for (int c : cols) out.push_back(t[c]);
  return out;
}

inline std::vector<int> post_order(const JoinTree& jt) {
  std::vector<int> order;
  std::function<void(int)> rec = [&](int u) {
    for (int c : jt.nodes[u].children) rec(c);
    order.push_back(u);
  };
  rec(jt.root);
  return order;
}

// rows of `target` keep only tuples whose anchor projection appears in `source`
inline void semi_join(Relation& target, const std::vector<int>& target_cols,
                      const Relation& source, const std::vector<int>& source_cols) {
  std::unordered_set<Tuple, TupleHash> keys;
  keys.reserve(source.tuples.size());
  for (const Tuple& t : source.tuples) keys.insert(project_cols(t, source_cols));
  std::vector<Tuple> kept;
  kept.reserve(target.tuples.size());
  for (Tuple& t : target.tuples)
    if (keys.count(project_cols(t, target_cols))) kept.push_back(std::move(t));
  target.tuples = std::move(kept);
}

}  // namespace detail

// Two semi-join sweeps (leaves-to-root, then root-to-leaves). Afterwards every
// remaining tuple participates in at least one full join result.
inline ReducedInstance full_reduce(const Database& db, const JoinTree& jt) {
  ReducedInstance inst;
  inst.nodes.reserve(jt.nodes.size());
  for (const auto& n : jt.nodes) {
    auto it = db.find(n.relation);
    if (it == db.end()) throw PlanError("relation not loaded: " + n.relation);
    Relation copy = it->second;
    // Node attr order is authoritative for the engine; align columns.
    if (copy.attrs != n.attrs) {
      std::vector<int> cols = detail::cols_of(copy, n.attrs);
      for (Tuple& t : copy.tuples) t = detail::project_cols(t, cols);
      copy.attrs = n.attrs;
    }
    inst.nodes.push_back(std::move(copy));
  }

  auto order = detail::post_order(jt);
  for (int u : order) {
    for (int c : jt.nodes[u].children) {
      const auto& anchor = jt.nodes[c].anchor;
      detail::semi_join(inst.nodes[u], detail::cols_of(inst.nodes[u], anchor),
                        inst.nodes[c], detail::cols_of(inst.nodes[c], anchor));
    }
  }
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    int u = *it;
    for (int c : jt.nodes[u].children) {
      const auto& anchor = jt.nodes[c].anchor;
      detail::semi_join(inst.nodes[c], detail::cols_of(inst.nodes[c], anchor),
                        inst.nodes[u], detail::cols_of(inst.nodes[u], anchor));
    }
  }
  return inst;
}

namespace detail {

inline void rebuild_derived(JoinTree& jt) {
  std::unordered_map<std::string, int> proj_pos;
  for (size_t i = 0; i < jt.project.size(); ++i)
    proj_pos[jt.project[i]] = static_cast<int>(i);
  for (int u : post_order(jt)) {
    std::unordered_set<std::string> acc;
    for (const auto& a : jt.nodes[u].attrs)
      if (proj_pos.count(a)) acc.insert(a);
    for (int c : jt.nodes[u].children)
      for (const auto& a : jt.nodes[c].subtree_proj) acc.insert(a);
    std::vector<std::string> ordered(acc.begin(), acc.end());
    std::sort(ordered.begin(), ordered.end(), [&](const auto& a, const auto& b) {
      return proj_pos[a] < proj_pos[b];
    });
    jt.nodes[u].subtree_proj = std::move(ordered);
  }
  jt.inorder_attrs.clear();
  std::unordered_set<std::string> emitted;
  std::function<void(int)> walk = [&](int u) {
    const auto& ch = jt.nodes[u].children;
    if (!ch.empty()) walk(ch[0]);
    for (const auto& a : jt.nodes[u].attrs)
      if (proj_pos.count(a) && emitted.insert(a).second)
        jt.inorder_attrs.push_back(a);
    for (size_t i = 1; i < ch.size(); ++i) walk(ch[i]);
  };
  walk(jt.root);
}

}  // namespace detail

// Repeatedly removes leaves whose projection attributes are all anchor
// attributes; the parent already carries those. Sound only after full_reduce.
// The delay bounds of the enumeration phase assume this ran.
inline void prune_projection_free_leaves(JoinTree& jt, ReducedInstance& inst) {
  std::unordered_set<std::string> proj(jt.project.begin(), jt.project.end());
  std::vector<bool> alive(jt.nodes.size(), true);
  bool changed = true;
  while (changed) {
    changed = false;
    for (size_t i = 0; i < jt.nodes.size(); ++i) {
      auto& n = jt.nodes[i];
      if (!alive[i] || n.parent < 0 || !n.children.empty()) continue;
      bool prunable = true;
      for (const auto& a : n.attrs) {
        if (!proj.count(a)) continue;
        if (std::find(n.anchor.begin(), n.anchor.end(), a) == n.anchor.end()) {
          prunable = false;
          break;
        }
      }
      if (!prunable) continue;
      alive[i] = false;
      auto& siblings = jt.nodes[n.parent].children;
      siblings.erase(std::find(siblings.begin(), siblings.end(), static_cast<int>(i)));
      changed = true;
    }
  }

  std::vector<int> remap(jt.nodes.size(), -1);
  JoinTree out;
  out.project = jt.project;
  ReducedInstance kept;
  for (size_t i = 0; i < jt.nodes.size(); ++i) {
    if (!alive[i]) continue;
    remap[i] = static_cast<int>(out.nodes.size());
    out.nodes.push_back(jt.nodes[i]);
    kept.nodes.push_back(std::move(inst.nodes[i]));
  }
  for (auto& n : out.nodes) {
    if (n.parent >= 0) n.parent = remap[n.parent];
    for (auto& c : n.children) c = remap[c];
  }
  out.root = remap[jt.root];
  detail::rebuild_derived(out);
  jt = std::move(out);
  inst = std::move(kept);
}

// Anchor-group lookup per node plus per-attribute sorted domains.
inline void build_indexes(const JoinTree& jt, ReducedInstance& inst) {
  inst.anchor_groups.assign(inst.nodes.size(), {});
  for (size_t i = 0; i < inst.nodes.size(); ++i) {
    auto cols = detail::cols_of(inst.nodes[i], jt.nodes[i].anchor);
    auto& groups = inst.anchor_groups[i];
    for (uint32_t ti = 0; ti < inst.nodes[i].tuples.size(); ++ti)
      groups[detail::project_cols(inst.nodes[i].tuples[ti], cols)].push_back(ti);
  }
  inst.domains.clear();
  std::unordered_map<std::string, std::unordered_set<Value, ValueHash>> raw;
  for (const auto& r : inst.nodes)
    for (size_t c = 0; c < r.attrs.size(); ++c)
      for (const Tuple& t : r.tuples) raw[r.attrs[c]].insert(t[c]);
  for (auto& [attr, vals] : raw) {
    std::vector<Value> sorted(vals.begin(), vals.end());
    std::sort(sorted.begin(), sorted.end(),
              [](const Value& a, const Value& b) { return compare_values(a, b) < 0; });
    inst.domains[attr] = std::move(sorted);
  }
}

// Convenience: reduce, prune, index in one call.
inline ReducedInstance prepare_instance(const Database& db, JoinTree& jt) {
  ReducedInstance inst = full_reduce(db, jt);
  prune_projection_free_leaves(jt, inst);
  build_indexes(jt, inst);
  return inst;
}

}  // namespace rankenum
