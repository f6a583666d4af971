#pragma once

#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "rankenum/core.hpp"

namespace rankenum {

struct PlanError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct JoinTreeNode {
  std::string relation;                   // alias of the relation at this node
  std::vector<std::string> attrs;
  int parent = -1;
  std::vector<int> children;
  std::vector<std::string> anchor;        // attrs shared with the parent
  std::vector<std::string> subtree_proj;  // projection attrs in this subtree,
                                          // ordered by the projection list
};

struct JoinTree {
  std::vector<JoinTreeNode> nodes;
  int root = -1;
  std::vector<std::string> project;        // the user's projection list
  std::vector<std::string> inorder_attrs;  // first-visit order of projection
                                           // attrs in an in-order walk

  int node_of(const std::string& alias) const {
    for (size_t i = 0; i < nodes.size(); ++i)
      if (nodes[i].relation == alias) return static_cast<int>(i);
    return -1;
  }
};

namespace detail {

using AttrSet = std::unordered_set<std::string>;

// GYO ear removal. Returns attachment links (removed edge -> witness) when
// the hypergraph is acyclic, or nullopt. Disconnected inputs reduce to empty
// edges that attach with empty intersections, which models cross products.
inline std::optional<std::vector<std::pair<int, int>>> gyo_reduce(
    std::vector<AttrSet> edges) {
  size_t n = edges.size();
  std::vector<bool> alive(n, true);
  std::vector<std::pair<int, int>> links;
  bool changed = true;
  while (changed) {
    changed = false;
    std::unordered_map<std::string, int> occur;
    for (size_t i = 0; i < n; ++i)
      if (alive[i])
        for (const auto& a : edges[i]) occur[a]++;
    for (size_t i = 0; i < n; ++i) {
      if (!alive[i]) continue;
      for (auto it = edges[i].begin(); it != edges[i].end();) {
        if (occur[*it] == 1) {
          it = edges[i].erase(it);
          changed = true;
        } else {
          ++it;
        }
      }
    }
    for (size_t i = 0; i < n; ++i) {
      if (!alive[i]) continue;
      for (size_t j = 0; j < n; ++j) {
        if (i == j || !alive[j]) continue;
        bool contained = true;
        for (const auto& a : edges[i])
          if (!edges[j].count(a)) { contained = false; break; }
        if (contained) {
          alive[i] = false;
          links.emplace_back(static_cast<int>(i), static_cast<int>(j));
          changed = true;
          break;
        }
      }
    }
  }
  size_t remaining = 0;
  for (size_t i = 0; i < n; ++i) remaining += alive[i] ? 1 : 0;
  if (remaining > 1) return std::nullopt;
  return links;
}

}  // namespace detail

inline bool is_acyclic(const std::vector<std::vector<std::string>>& edges) {
  std::vector<detail::AttrSet> sets;
  sets.reserve(edges.size());
  for (const auto& e : edges) sets.emplace_back(e.begin(), e.end());
  return detail::gyo_reduce(std::move(sets)).has_value();
}

// A query is free-connex acyclic when it stays acyclic after adding the
// projection list as one extra hyperedge.
inline bool is_free_connex(const std::vector<std::vector<std::string>>& edges,
                           const std::vector<std::string>& project) {
  if (!is_acyclic(edges)) return false;
  auto extended = edges;
  extended.push_back(project);
  return is_acyclic(extended);
}

// Builds a rooted join tree for an acyclic query. `rels` carries
// (alias, attrs) pairs; `root_alias` empty picks the first relation.
inline JoinTree build_join_tree(
    const std::vector<std::pair<std::string, std::vector<std::string>>>& rels,
    const std::vector<std::string>& project, const std::string& root_alias = "") {
  if (rels.empty()) throw PlanError("query has no relations");

  std::vector<detail::AttrSet> edges;
  for (const auto& [alias, attrs] : rels) {
    detail::AttrSet s(attrs.begin(), attrs.end());
    if (s.size() != attrs.size())
      throw PlanError("relation " + alias + " repeats an attribute");
    edges.push_back(std::move(s));
  }
  for (const auto& p : project) {
    bool found = false;
    for (const auto& e : edges)
      if (e.count(p)) { found = true; break; }
    if (!found) throw PlanError("projection attribute not bound: " + p);
  }

  auto links = detail::gyo_reduce(edges);
  if (!links) throw PlanError("query is cyclic; supply a decomposition");

  int root = 0;
  if (!root_alias.empty()) {
    root = -1;
    for (size_t i = 0; i < rels.size(); ++i)
      if (rels[i].first == root_alias) root = static_cast<int>(i);
    if (root < 0) throw PlanError("root is not a relation of the query: " + root_alias);
  }

  std::vector<std::vector<int>> adj(rels.size());
  for (auto [a, b] : *links) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }

  JoinTree jt;
  jt.project = project;
  jt.root = root;
  jt.nodes.resize(rels.size());
  for (size_t i = 0; i < rels.size(); ++i) {
    jt.nodes[i].relation = rels[i].first;
    jt.nodes[i].attrs = rels[i].second;
  }
  std::vector<bool> seen(rels.size(), false);
  std::vector<int> order{root};
  seen[root] = true;
  for (size_t k = 0; k < order.size(); ++k) {
    int u = order[k];
    std::vector<int> nbrs = adj[u];
    std::sort(nbrs.begin(), nbrs.end());
    for (int v : nbrs) {
      if (seen[v]) continue;
      seen[v] = true;
      jt.nodes[v].parent = u;
      jt.nodes[u].children.push_back(v);
      order.push_back(v);
    }
  }
  for (size_t i = 0; i < rels.size(); ++i)
    if (!seen[i]) throw PlanError("join tree construction left a detached relation");

  for (auto& node : jt.nodes) {
    if (node.parent < 0) continue;
    const auto& pa = jt.nodes[node.parent].attrs;
    for (const auto& a : node.attrs)
      if (std::find(pa.begin(), pa.end(), a) != pa.end()) node.anchor.push_back(a);
  }

  // Subtree projection attrs, ordered by projection-list position.
  std::unordered_map<std::string, int> proj_pos;
  for (size_t i = 0; i < project.size(); ++i) proj_pos[project[i]] = static_cast<int>(i);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    int u = *it;
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

  // In-order walk: first child subtree, this node's unseen projection attrs,
  // then the remaining child subtrees.
  std::unordered_set<std::string> emitted;
  std::vector<int> stack;
  std::function<void(int)> walk = [&](int u) {
    const auto& ch = jt.nodes[u].children;
    if (!ch.empty()) walk(ch[0]);
    for (const auto& a : jt.nodes[u].attrs)
      if (proj_pos.count(a) && emitted.insert(a).second)
        jt.inorder_attrs.push_back(a);
    for (size_t i = 1; i < ch.size(); ++i) walk(ch[i]);
  };
  walk(root);

  return jt;
}

// Structural checks: parent/child symmetry, anchor definition, and the
// connected-subtree property for every attribute.
inline void validate_join_tree(const JoinTree& jt) {
  if (jt.root < 0 || jt.root >= static_cast<int>(jt.nodes.size()))
    throw PlanError("join tree root out of range");
  if (jt.nodes[jt.root].parent != -1) throw PlanError("root has a parent");
  if (!jt.nodes[jt.root].anchor.empty()) throw PlanError("root anchor not empty");
  for (size_t i = 0; i < jt.nodes.size(); ++i) {
    const auto& n = jt.nodes[i];
    for (int c : n.children)
      if (jt.nodes[c].parent != static_cast<int>(i))
        throw PlanError("parent/child links disagree");
    if (n.parent >= 0) {
      const auto& pa = jt.nodes[n.parent].attrs;
      for (const auto& a : n.anchor) {
        if (std::find(n.attrs.begin(), n.attrs.end(), a) == n.attrs.end() ||
            std::find(pa.begin(), pa.end(), a) == pa.end())
          throw PlanError("anchor attr not shared with parent");
      }
      for (const auto& a : n.attrs)
        if (std::find(pa.begin(), pa.end(), a) != pa.end() &&
            std::find(n.anchor.begin(), n.anchor.end(), a) == n.anchor.end())
          throw PlanError("shared attr missing from anchor");
    }
  }
  std::unordered_set<std::string> all_attrs;
  for (const auto& n : jt.nodes) all_attrs.insert(n.attrs.begin(), n.attrs.end());
  for (const auto& a : all_attrs) {
    std::vector<int> holders;
    for (size_t i = 0; i < jt.nodes.size(); ++i) {
      const auto& at = jt.nodes[i].attrs;
      if (std::find(at.begin(), at.end(), a) != at.end())
        holders.push_back(static_cast<int>(i));
    }
    std::unordered_set<int> holder_set(holders.begin(), holders.end());
    std::unordered_set<int> reached{holders[0]};
    std::vector<int> stack{holders[0]};
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      std::vector<int> nbrs = jt.nodes[u].children;
      if (jt.nodes[u].parent >= 0) nbrs.push_back(jt.nodes[u].parent);
      for (int v : nbrs)
        if (holder_set.count(v) && reached.insert(v).second) stack.push_back(v);
    }
    if (reached.size() != holders.size())
      throw PlanError("attribute " + a + " does not span a connected subtree");
  }
}

}  // namespace rankenum
