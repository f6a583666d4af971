#pragma once

#include <memory>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "rankenum/acyclic.hpp"
#include "rankenum/baseline.hpp"
#include "rankenum/composite.hpp"
#include "rankenum/core.hpp"
#include "rankenum/join_tree.hpp"
#include "rankenum/lexi.hpp"
#include "rankenum/query.hpp"
#include "rankenum/reduce.hpp"
#include "rankenum/star.hpp"

namespace rankenum {

// Planner: validates a query against its data, picks an engine, and returns
// a ready stream. Modes: auto (lexi for lex orders, otherwise the
// priority-queue engine), or an explicit engine name.

struct PlanOptions {
  std::string mode = "auto";  // auto | acyclic | lexi | star | baseline
  double epsilon = 0.0;       // star heavy/light knob
  AcyclicOptions acyclic;
};

struct PlanInfo {
  std::string engine;
  std::string root;        // chosen root alias (tree engines)
  size_t nodes = 0;        // join tree nodes after pruning
  size_t pruned = 0;       // projection-free leaves removed
  size_t bags = 0;         // decomposition bags materialized
  bool free_connex = false;
  bool is_union = false;
  uint64_t delta = 0;      // star threshold, 0 when unused
  std::vector<std::string> branch_engines;
};

namespace detail {

inline void apply_filters(Relation& r, const std::vector<FilterPred>& filters) {
  if (filters.empty()) return;
  for (const auto& f : filters)
    for (const auto& a : f.attrs())
      if (r.col(a) < 0)
        throw QueryError("filter attribute " + a + " not in relation " + r.name);
  std::vector<Tuple> kept;
  kept.reserve(r.tuples.size());
  for (Tuple& t : r.tuples) {
    bool ok = true;
    for (const auto& f : filters)
      if (!filter_pass(f, r.attrs, t)) { ok = false; break; }
    if (ok) kept.push_back(std::move(t));
  }
  r.tuples = std::move(kept);
}

// resolve aliases, apply per-occurrence filters, then push every global
// filter into the first relation covering it (remainder goes to the bags)
inline std::vector<Relation> resolve_relations(const QuerySpec& q, const Database& db,
                                               std::vector<FilterPred>* unplaced) {
  std::vector<Relation> rels;
  std::unordered_set<std::string> aliases;
  for (const auto& ref : q.relations) {
    if (!aliases.insert(ref.alias()).second)
      throw QueryError("duplicate relation alias: " + ref.alias());
    auto it = db.find(ref.alias());
    if (it == db.end()) throw QueryError("no data for relation " + ref.alias());
    Relation r = it->second;
    apply_filters(r, ref.filters);
    rels.push_back(std::move(r));
  }
  for (const auto& f : q.filters) {
    bool placed = false;
    for (auto& r : rels) {
      bool fits = true;
      for (const auto& a : f.attrs())
        if (r.col(a) < 0) { fits = false; break; }
      if (fits) {
        apply_filters(r, {f});
        placed = true;
        break;
      }
    }
    if (!placed) {
      if (q.ghd.empty())
        throw QueryError("filter on " + f.lhs +
                         " spans relations; supply a decomposition with a covering bag");
      if (unplaced) unplaced->push_back(f);
    }
  }
  return rels;
}

inline void check_projection(const std::vector<Relation>& rels,
                             const std::vector<std::string>& project) {
  if (project.empty()) throw QueryError("projection list is empty");
  std::unordered_set<std::string> seen;
  for (const auto& a : project) {
    if (!seen.insert(a).second) throw QueryError("projection repeats attribute " + a);
    bool found = false;
    for (const auto& r : rels)
      if (r.col(a) >= 0) { found = true; break; }
    if (!found) throw QueryError("projected attribute " + a + " not in any relation");
  }
}

inline void check_lex_order(const RankingFunction& rf,
                            const std::vector<std::string>& project) {
  if (rf.kind != RankingFunction::Kind::Lex) return;
  std::unordered_set<std::string> proj(project.begin(), project.end());
  std::unordered_set<std::string> seen;
  for (const LexAttr& la : rf.lex) {
    if (!proj.count(la.attr))
      throw QueryError("lex attribute " + la.attr + " is not projected");
    if (!seen.insert(la.attr).second)
      throw QueryError("lex order repeats attribute " + la.attr);
  }
  if (seen.size() != proj.size())
    throw QueryError("lex order must cover every projected attribute");
}

struct TreeHolder {
  JoinTree tree;
  ReducedInstance inst;
};

class OwnedStream final : public OutputStream {
 public:
  OwnedStream(std::unique_ptr<TreeHolder> hold, std::unique_ptr<OutputStream> inner)
      : hold_(std::move(hold)), inner_(std::move(inner)) {}
  const std::vector<std::string>& output_attrs() const override {
    return inner_->output_attrs();
  }
  const OpCounters& counters() const override { return inner_->counters(); }
  std::optional<OutputTuple> next() override { return inner_->next(); }

 private:
  std::unique_ptr<TreeHolder> hold_;
  std::unique_ptr<OutputStream> inner_;
};

inline std::vector<std::pair<std::string, std::vector<std::string>>> shapes_of(
    const std::vector<Relation>& rels) {
  std::vector<std::pair<std::string, std::vector<std::string>>> s;
  s.reserve(rels.size());
  for (const auto& r : rels) s.emplace_back(r.name, r.attrs);
  return s;
}

inline std::unique_ptr<OutputStream> tree_stream(const std::vector<Relation>& rels,
                                                 const std::vector<std::string>& project,
                                                 const RankingFunction& rf,
                                                 const WeightMap& wm,
                                                 const std::string& root, bool lexi,
                                                 const AcyclicOptions& opt,
                                                 PlanInfo* info) {
  auto hold = std::make_unique<TreeHolder>();
  hold->tree = build_join_tree(shapes_of(rels), project, root);
  Database db;
  for (const auto& r : rels) db[r.name] = r;
  size_t before = hold->tree.nodes.size();
  hold->inst = prepare_instance(db, hold->tree);
  if (info) {
    info->root = hold->tree.nodes[hold->tree.root].relation;
    info->nodes = hold->tree.nodes.size();
    info->pruned = before - hold->tree.nodes.size();
    std::vector<std::vector<std::string>> edges;
    for (const auto& r : rels) edges.push_back(r.attrs);
    info->free_connex = is_free_connex(edges, project);
  }
  std::unique_ptr<OutputStream> inner;
  if (lexi)
    inner = std::make_unique<LexiStream>(hold->tree, hold->inst, rf, wm);
  else
    inner = std::make_unique<AcyclicStream>(hold->tree, hold->inst, rf, wm, opt);
  return std::make_unique<OwnedStream>(std::move(hold), std::move(inner));
}

}  // namespace detail

inline std::unique_ptr<OutputStream> plan_query(const QuerySpec& q, const Database& db,
                                                const WeightMap& wm,
                                                const PlanOptions& opt = {},
                                                PlanInfo* info = nullptr) {
  if (q.is_union()) {
    const QuerySpec& first = q.branches.front();
    std::vector<std::string> project =
        q.project.empty() ? first.project : q.project;
    for (const auto& b : q.branches) {
      if (b.project != project)
        throw QueryError("union branches must share one projection list");
      if (b.order.kind != first.order.kind)
        throw QueryError("union branches must share one ranking");
      if (b.order.kind == RankingFunction::Kind::Lex) {
        if (b.order.lex.size() != first.order.lex.size())
          throw QueryError("union branches must share one ranking");
        for (size_t i = 0; i < b.order.lex.size(); ++i)
          if (b.order.lex[i].attr != first.order.lex[i].attr ||
              b.order.lex[i].dir != first.order.lex[i].dir)
            throw QueryError("union branches must share one ranking");
      }
    }
    std::vector<std::unique_ptr<OutputStream>> streams;
    if (info) info->is_union = true;
    for (const auto& b : q.branches) {
      PlanInfo bi;
      streams.push_back(plan_query(b, db, wm, opt, info ? &bi : nullptr));
      if (info) info->branch_engines.push_back(bi.engine);
    }
    if (info) info->engine = "union";
    return std::make_unique<UnionStream>(std::move(streams), project, first.order, wm);
  }

  std::vector<FilterPred> for_bags;
  std::vector<Relation> rels = detail::resolve_relations(q, db, &for_bags);
  detail::check_projection(rels, q.project);
  detail::check_lex_order(q.order, q.project);

  std::string mode = opt.mode.empty() ? "auto" : opt.mode;
  if (mode == "star") {
    if (!q.ghd.empty()) throw QueryError("star engine does not take a decomposition");
    auto stream = std::make_unique<StarStream>(rels, q.project, q.order, wm,
                                               StarConfig{opt.epsilon});
    if (info) {
      info->engine = "star";
      info->delta = stream->delta();
    }
    return stream;
  }
  if (mode == "baseline") {
    if (!q.ghd.empty()) throw QueryError("baseline engine does not take a decomposition");
    if (info) info->engine = "baseline";
    return std::make_unique<BaselineStream>(rels, q.project, q.order, wm, q.root);
  }

  bool lexi = mode == "lexi" ||
              (mode == "auto" && q.order.kind == RankingFunction::Kind::Lex);
  if (lexi && q.order.kind != RankingFunction::Kind::Lex)
    throw QueryError("lexi engine requires a lex order");
  if (mode != "auto" && mode != "acyclic" && mode != "lexi")
    throw QueryError("unknown mode: " + mode);

  if (!q.ghd.empty()) {
    validate_ghd(q.ghd, q.relations, q.project);
    Database filtered;
    for (const auto& r : rels) filtered[r.name] = r;
    std::vector<Relation> bags = materialize_ghd(filtered, q.ghd, for_bags);
    if (info) {
      info->bags = bags.size();
      info->engine = lexi ? "lexi" : "acyclic";
    }
    return detail::tree_stream(bags, q.project, q.order, wm, "", lexi, opt.acyclic,
                               info);
  }
  if (info) info->engine = lexi ? "lexi" : "acyclic";
  return detail::tree_stream(rels, q.project, q.order, wm, q.root, lexi, opt.acyclic,
                             info);
}

// Planning-only pass for the validate subcommand: checks schema, projection,
// ranking, decomposition and filter placement without reducing or
// materializing anything.
inline PlanInfo validate_query(const QuerySpec& q, const Database& db,
                               const PlanOptions& opt = {}) {
  PlanInfo info;
  if (q.is_union()) {
    info.is_union = true;
    info.engine = "union";
    const QuerySpec& first = q.branches.front();
    std::vector<std::string> project = q.project.empty() ? first.project : q.project;
    for (const auto& b : q.branches) {
      if (b.project != project)
        throw QueryError("union branches must share one projection list");
      PlanInfo bi = validate_query(b, db, opt);
      info.branch_engines.push_back(bi.engine);
    }
    return info;
  }
  std::vector<FilterPred> for_bags;
  std::vector<Relation> rels = detail::resolve_relations(q, db, &for_bags);
  detail::check_projection(rels, q.project);
  detail::check_lex_order(q.order, q.project);
  std::string mode = opt.mode.empty() ? "auto" : opt.mode;
  std::vector<std::vector<std::string>> edges;
  for (const auto& r : rels) edges.push_back(r.attrs);
  if (mode == "star") {
    if (!detect_star(rels, q.project))
      throw PlanError("star engine requires m binary relations over one join attribute with every other attribute projected");
    info.engine = "star";
    return info;
  }
  if (mode == "baseline") {
    info.engine = "baseline";
    std::vector<std::string> all;
    std::unordered_set<std::string> seen;
    for (const auto& r : rels)
      for (const auto& a : r.attrs)
        if (seen.insert(a).second) all.push_back(a);
    build_join_tree(detail::shapes_of(rels), all, q.root);
    return info;
  }
  bool lexi = mode == "lexi" ||
              (mode == "auto" && q.order.kind == RankingFunction::Kind::Lex);
  info.engine = lexi ? "lexi" : "acyclic";
  if (!q.ghd.empty()) {
    validate_ghd(q.ghd, q.relations, q.project);
    for (const auto& f : for_bags) {
      bool fits = false;
      for (const auto& b : q.ghd) {
        std::unordered_set<std::string> bag(b.attrs.begin(), b.attrs.end());
        bool all_in = true;
        for (const auto& a : f.attrs())
          if (!bag.count(a)) { all_in = false; break; }
        if (all_in) { fits = true; break; }
      }
      if (!fits)
        throw QueryError("filter on " + f.lhs + " fits no decomposition bag");
    }
    info.bags = q.ghd.size();
    std::vector<std::pair<std::string, std::vector<std::string>>> bag_shapes;
    for (size_t i = 0; i < q.ghd.size(); ++i)
      bag_shapes.emplace_back("bag" + std::to_string(i), q.ghd[i].attrs);
    JoinTree jt = build_join_tree(bag_shapes, q.project, "");
    info.nodes = jt.nodes.size();
    return info;
  }
  JoinTree jt = build_join_tree(detail::shapes_of(rels), q.project, q.root);
  info.root = jt.nodes[jt.root].relation;
  info.nodes = jt.nodes.size();
  info.free_connex = is_free_connex(edges, q.project);
  return info;
}

}  // namespace rankenum
