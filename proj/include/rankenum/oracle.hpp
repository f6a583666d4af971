#pragma once

#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "rankenum/core.hpp"

namespace rankenum {

// Reference evaluator: materialize the full join, filter, project, dedupe,
// sort. Deliberately independent of the streaming engines; the only shared
// piece is compare_outputs, which defines the answer order for both.

struct OracleGuardExceeded : std::runtime_error {
  OracleGuardExceeded(uint64_t guard)
      : std::runtime_error("oracle: materialized join exceeds guard of " +
                           std::to_string(guard) + " rows") {}
};

namespace detail {

struct JoinState {
  std::vector<std::string> attrs;
  std::vector<Tuple> rows;
};

inline int pos_of(const std::vector<std::string>& attrs, const std::string& a) {
  for (size_t i = 0; i < attrs.size(); ++i)
    if (attrs[i] == a) return static_cast<int>(i);
  return -1;
}

inline bool filter_ready(const FilterPred& f, const std::vector<std::string>& attrs) {
  if (pos_of(attrs, f.lhs) < 0) return false;
  return f.is_const || pos_of(attrs, f.rhs_attr) >= 0;
}

inline bool filter_pass(const FilterPred& f, const std::vector<std::string>& attrs,
                        const Tuple& t) {
  const Value& a = t[pos_of(attrs, f.lhs)];
  if (f.is_const) return f.eval(a, f.rhs_const);
  return f.eval(a, t[pos_of(attrs, f.rhs_attr)]);
}

}  // namespace detail

// Full join of `rels` in order with hash joins, applying each filter as soon
// as its attributes are all bound. Aborts if any intermediate exceeds `guard`.
inline detail::JoinState oracle_join(const std::vector<Relation>& rels,
                                     const std::vector<FilterPred>& filters = {},
                                     uint64_t guard = 10'000'000) {
  if (rels.empty()) throw std::invalid_argument("oracle: no relations");
  detail::JoinState st;
  std::vector<bool> applied(filters.size(), false);

  auto apply_new_filters = [&]() {
    for (size_t i = 0; i < filters.size(); ++i) {
      if (applied[i] || !detail::filter_ready(filters[i], st.attrs)) continue;
      applied[i] = true;
      std::vector<Tuple> kept;
      kept.reserve(st.rows.size());
      for (auto& t : st.rows)
        if (detail::filter_pass(filters[i], st.attrs, t)) kept.push_back(std::move(t));
      st.rows = std::move(kept);
    }
  };

  st.attrs = rels[0].attrs;
  st.rows = rels[0].tuples;
  apply_new_filters();

  for (size_t r = 1; r < rels.size(); ++r) {
    const Relation& right = rels[r];
    std::vector<int> shared_left, shared_right, new_right;
    for (size_t i = 0; i < right.attrs.size(); ++i) {
      int lp = detail::pos_of(st.attrs, right.attrs[i]);
      if (lp >= 0) {
        shared_left.push_back(lp);
        shared_right.push_back(static_cast<int>(i));
      } else {
        new_right.push_back(static_cast<int>(i));
      }
    }
    std::unordered_map<Tuple, std::vector<const Tuple*>, TupleHash> index;
    for (const Tuple& t : right.tuples) {
      Tuple key;
      key.reserve(shared_right.size());
      for (int i : shared_right) key.push_back(t[i]);
      index[key].push_back(&t);
    }
    std::vector<Tuple> joined;
    for (const Tuple& lt : st.rows) {
      Tuple key;
      key.reserve(shared_left.size());
      for (int i : shared_left) key.push_back(lt[i]);
      auto it = index.find(key);
      if (it == index.end()) continue;
      for (const Tuple* rt : it->second) {
        Tuple t = lt;
        for (int i : new_right) t.push_back((*rt)[i]);
        joined.push_back(std::move(t));
        if (joined.size() > guard) throw OracleGuardExceeded(guard);
      }
    }
    for (int i : new_right) st.attrs.push_back(right.attrs[i]);
    st.rows = std::move(joined);
    apply_new_filters();
  }
  for (size_t i = 0; i < filters.size(); ++i)
    if (!applied[i])
      throw std::invalid_argument("oracle: filter references unbound attribute " +
                                  filters[i].lhs);
  return st;
}

inline std::vector<OutputTuple> oracle_enumerate(
    const std::vector<Relation>& rels, const std::vector<std::string>& project,
    const RankingFunction& rf, const WeightMap& wm,
    const std::vector<FilterPred>& filters = {}, uint64_t guard = 10'000'000) {
  auto st = oracle_join(rels, filters, guard);
  std::vector<int> proj_pos;
  for (const auto& p : project) {
    int i = detail::pos_of(st.attrs, p);
    if (i < 0) throw std::invalid_argument("oracle: projection attr unbound: " + p);
    proj_pos.push_back(i);
  }
  std::unordered_set<Tuple, TupleHash> seen;
  std::vector<Tuple> distinct;
  for (const Tuple& row : st.rows) {
    Tuple t;
    t.reserve(proj_pos.size());
    for (int i : proj_pos) t.push_back(row[i]);
    if (seen.insert(t).second) distinct.push_back(std::move(t));
  }
  std::sort(distinct.begin(), distinct.end(), [&](const Tuple& a, const Tuple& b) {
    return compare_outputs(a, b, project, rf, wm) < 0;
  });
  std::vector<OutputTuple> out;
  out.reserve(distinct.size());
  for (auto& t : distinct) {
    double r = sum_rank(t, project, wm);
    out.push_back(OutputTuple{std::move(t), r});
  }
  return out;
}

// Union oracle: branch results concatenated, deduped, re-sorted.
inline std::vector<OutputTuple> oracle_enumerate_union(
    const std::vector<std::vector<Relation>>& branch_rels,
    const std::vector<std::vector<FilterPred>>& branch_filters,
    const std::vector<std::string>& project, const RankingFunction& rf,
    const WeightMap& wm, uint64_t guard = 10'000'000) {
  std::unordered_set<Tuple, TupleHash> seen;
  std::vector<Tuple> distinct;
  for (size_t b = 0; b < branch_rels.size(); ++b) {
    const auto& filters = b < branch_filters.size() ? branch_filters[b]
                                                    : std::vector<FilterPred>{};
    for (auto& ot : oracle_enumerate(branch_rels[b], project, rf, wm, filters, guard))
      if (seen.insert(ot.values).second) distinct.push_back(std::move(ot.values));
  }
  std::sort(distinct.begin(), distinct.end(), [&](const Tuple& a, const Tuple& b) {
    return compare_outputs(a, b, project, rf, wm) < 0;
  });
  std::vector<OutputTuple> out;
  out.reserve(distinct.size());
  for (auto& t : distinct) {
    double r = sum_rank(t, project, wm);
    out.push_back(OutputTuple{std::move(t), r});
  }
  return out;
}

}  // namespace rankenum
