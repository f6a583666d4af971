#pragma once

#include <memory>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "rankenum/core.hpp"
#include "rankenum/join_tree.hpp"
#include "rankenum/oracle.hpp"
#include "rankenum/query.hpp"

namespace rankenum {

// Cyclic queries run over a user-supplied decomposition: each bag joins a
// subset of the relations and projects to the bag's attributes, and the bags
// themselves must form an acyclic query. Enumeration then runs on the bags.

inline void validate_ghd(const std::vector<GhdBag>& bags,
                         const std::vector<RelationRef>& rels,
                         const std::vector<std::string>& project) {
  if (bags.empty()) throw QueryError("decomposition has no bags");
  std::unordered_map<std::string, std::vector<std::string>> attrs_of;
  for (const auto& r : rels) attrs_of[r.alias()] = r.attrs;
  std::unordered_set<std::string> covered;
  for (size_t bi = 0; bi < bags.size(); ++bi) {
    const GhdBag& b = bags[bi];
    if (b.attrs.empty()) throw QueryError("bag " + std::to_string(bi) + " has no attributes");
    if (b.relations.empty()) throw QueryError("bag " + std::to_string(bi) + " joins no relations");
    std::unordered_set<std::string> bag_attrs(b.attrs.begin(), b.attrs.end());
    if (bag_attrs.size() != b.attrs.size())
      throw QueryError("bag " + std::to_string(bi) + " repeats an attribute");
    std::unordered_set<std::string> from_rels;
    for (const auto& alias : b.relations) {
      auto it = attrs_of.find(alias);
      if (it == attrs_of.end())
        throw QueryError("bag " + std::to_string(bi) + " names unknown relation " + alias);
      // a relation inside a bag must be fully covered, else its join
      // constraint would leak attributes the bag cannot represent
      for (const auto& a : it->second) {
        if (!bag_attrs.count(a))
          throw QueryError("relation " + alias + " has attribute " + a +
                           " outside bag " + std::to_string(bi));
        from_rels.insert(a);
      }
      covered.insert(alias);
    }
    for (const auto& a : b.attrs)
      if (!from_rels.count(a))
        throw QueryError("bag " + std::to_string(bi) + " attribute " + a +
                         " comes from none of its relations");
  }
  for (const auto& r : rels)
    if (!covered.count(r.alias()))
      throw QueryError("relation " + r.alias() + " appears in no bag");
  std::vector<std::vector<std::string>> edges;
  for (const auto& b : bags) edges.push_back(b.attrs);
  if (!is_acyclic(edges))
    throw QueryError("decomposition bags do not form an acyclic query");
  std::unordered_set<std::string> all;
  for (const auto& b : bags) all.insert(b.attrs.begin(), b.attrs.end());
  for (const auto& a : project)
    if (!all.count(a)) throw QueryError("projected attribute " + a + " not in any bag");
}

// Joins each bag's relations, applies the filters that fit the bag, projects
// to the bag attributes, dedupes. Every filter must fit some bag. Returns the
// bag relations named bag0, bag1, ...
inline std::vector<Relation> materialize_ghd(const Database& db,
                                             const std::vector<GhdBag>& bags,
                                             const std::vector<FilterPred>& filters,
                                             uint64_t guard = 10ull * 1000 * 1000) {
  std::vector<bool> placed(filters.size(), false);
  std::vector<Relation> out;
  for (size_t bi = 0; bi < bags.size(); ++bi) {
    const GhdBag& b = bags[bi];
    std::unordered_set<std::string> bag_attrs(b.attrs.begin(), b.attrs.end());
    std::vector<Relation> parts;
    for (const auto& alias : b.relations) parts.push_back(db.at(alias));
    std::vector<FilterPred> local;
    for (size_t fi = 0; fi < filters.size(); ++fi) {
      bool fits = true;
      for (const auto& a : filters[fi].attrs())
        if (!bag_attrs.count(a)) { fits = false; break; }
      if (fits) {
        local.push_back(filters[fi]);
        placed[fi] = true;
      }
    }
    detail::JoinState js = oracle_join(parts, local, guard);
    std::vector<int> cols;
    for (const auto& a : b.attrs) cols.push_back(detail::pos_of(js.attrs, a));
    Relation r;
    r.name = "bag" + std::to_string(bi);
    r.attrs = b.attrs;
    r.tuples.reserve(js.rows.size());
    for (const Tuple& t : js.rows) {
      Tuple p;
      p.reserve(cols.size());
      for (int c : cols) p.push_back(t[c]);
      r.tuples.push_back(std::move(p));
    }
    r.dedupe();
    out.push_back(std::move(r));
  }
  for (size_t fi = 0; fi < filters.size(); ++fi)
    if (!placed[fi])
      throw QueryError("filter on " + filters[fi].lhs +
                       " fits no decomposition bag");
  return out;
}

// Disjunction of branches sharing one projection list and ranking: merge the
// per-branch streams, dropping an answer equal to the previous one. Branch
// streams are already duplicate-free and ordered, so one remembered value
// suffices.
class UnionStream final : public OutputStream {
 public:
  UnionStream(std::vector<std::unique_ptr<OutputStream>> branches,
              std::vector<std::string> project, RankingFunction rf, WeightMap wm)
      : branches_(std::move(branches)), project_(std::move(project)),
        rf_(std::move(rf)), wm_(std::move(wm)) {
    for (size_t i = 0; i < branches_.size(); ++i) {
      auto n = branches_[i]->next();
      if (n) push_entry(Entry{std::move(*n), i});
    }
  }

  const std::vector<std::string>& output_attrs() const override { return project_; }

  const OpCounters& counters() const override {
    agg_ = own_;
    for (const auto& b : branches_) {
      const OpCounters& c = b->counters();
      agg_.pq_push += c.pq_push;
      agg_.pq_pop += c.pq_pop;
      agg_.topdown_calls += c.topdown_calls;
      agg_.nontrivial_topdown += c.nontrivial_topdown;
      agg_.cells_created += c.cells_created;
      agg_.elementary_ops += c.elementary_ops;
    }
    return agg_;
  }

  std::optional<OutputTuple> next() override {
    while (!merge_.empty()) {
      Entry e = pop_entry();
      auto n = branches_[e.source]->next();
      if (n) push_entry(Entry{std::move(*n), e.source});
      if (!has_last_ || e.out.values != last_) {
        has_last_ = true;
        last_ = e.out.values;
        return e.out;
      }
    }
    return std::nullopt;
  }

 private:
  struct Entry {
    OutputTuple out;
    size_t source;
  };

  auto entry_after() {
    return [this](const Entry& a, const Entry& b) {
      int c = compare_outputs(a.out.values, b.out.values, project_, rf_, wm_);
      if (c != 0) return c > 0;
      return a.source > b.source;  // stable preference keeps dedup adjacent
    };
  }

  void push_entry(Entry e) {
    merge_.push_back(std::move(e));
    std::push_heap(merge_.begin(), merge_.end(), entry_after());
    own_.pq_push++;
  }

  Entry pop_entry() {
    std::pop_heap(merge_.begin(), merge_.end(), entry_after());
    Entry e = std::move(merge_.back());
    merge_.pop_back();
    own_.pq_pop++;
    return e;
  }

  std::vector<std::unique_ptr<OutputStream>> branches_;
  std::vector<std::string> project_;
  RankingFunction rf_;
  WeightMap wm_;
  std::vector<Entry> merge_;
  bool has_last_ = false;
  Tuple last_;
  OpCounters own_;
  mutable OpCounters agg_;
};

}  // namespace rankenum
