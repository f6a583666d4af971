#pragma once

#include <cmath>
#include <memory>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "rankenum/acyclic.hpp"
#include "rankenum/core.hpp"
#include "rankenum/join_tree.hpp"
#include "rankenum/reduce.hpp"

namespace rankenum {

// Star queries: m binary relations R_i(A_i, B) joined on B with every A_i
// projected. An A_i value is heavy when its degree in R_i reaches the
// threshold delta = ceil(|D|^(1-epsilon)); answers whose coordinates are all
// heavy are few enough to materialize sorted up front, every other answer is
// owned by the stream whose index is the first light coordinate, and
// enumeration is an (m+1)-way merge. Larger epsilon trades preprocessing
// space for cheaper enumeration.

struct StarShape {
  std::string b_attr;
  std::vector<std::string> a_attrs;  // per relation, in relation order
};

inline std::optional<StarShape> detect_star(const std::vector<Relation>& rels,
                                            const std::vector<std::string>& project) {
  if (rels.empty()) return std::nullopt;
  for (const auto& r : rels)
    if (r.attrs.size() != 2) return std::nullopt;
  // the join attribute is the one every relation carries
  std::string b;
  for (const auto& cand : rels[0].attrs) {
    bool everywhere = true;
    for (const auto& r : rels)
      if (!r.has_attr(cand)) { everywhere = false; break; }
    if (everywhere) { b = cand; break; }
  }
  if (b.empty()) return std::nullopt;
  StarShape shape;
  shape.b_attr = b;
  std::unordered_set<std::string> seen;
  for (const auto& r : rels) {
    std::string a = r.attrs[0] == b ? r.attrs[1] : r.attrs[0];
    if (a == b || !seen.insert(a).second) return std::nullopt;
    shape.a_attrs.push_back(a);
  }
  std::unordered_set<std::string> proj(project.begin(), project.end());
  if (proj.size() != shape.a_attrs.size()) return std::nullopt;
  for (const auto& a : shape.a_attrs)
    if (!proj.count(a)) return std::nullopt;
  return shape;
}

struct StarConfig {
  double epsilon = 0.0;  // 0: nothing materialized beyond degree-|D| values
};

class StarStream final : public OutputStream {
 public:
  StarStream(std::vector<Relation> rels, std::vector<std::string> project,
             RankingFunction rf, WeightMap wm, StarConfig cfg = {})
      : project_(std::move(project)), rf_(std::move(rf)), wm_(std::move(wm)) {
    auto shape = detect_star(rels, project_);
    if (!shape) throw PlanError("star engine requires m binary relations over one join attribute with every other attribute projected");
    if (cfg.epsilon < 0.0 || cfg.epsilon > 1.0)
      throw PlanError("epsilon must lie in [0,1]");
    shape_ = *shape;
    preprocess(std::move(rels), cfg.epsilon);
  }

  const std::vector<std::string>& output_attrs() const override { return project_; }

  const OpCounters& counters() const override {
    agg_ = own_;
    for (const auto& h : lights_)
      if (h) {
        const OpCounters& c = h->stream->counters();
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
    if (merge_.empty()) return std::nullopt;
    Entry e = pop_entry();
    int src = source_of(e.out.values);
    if (src != e.source)
      throw std::logic_error("star merge: source index rule disagrees with origin");
    if (src < 0) {
      if (heavy_cursor_ < heavy_out_.size())
        push_entry(Entry{heavy_out_[heavy_cursor_++], -1});
    } else {
      auto n = lights_[src]->stream->next();
      if (n) push_entry(Entry{std::move(*n), src});
    }
    return e.out;
  }

  uint64_t delta() const { return delta_; }
  uint64_t d_size() const { return d_size_; }
  size_t heavy_output_size() const { return heavy_out_.size(); }

 private:
  struct Entry {
    OutputTuple out;
    int source;  // -1: materialized heavy output, else light stream index
  };

  struct LightHolder {
    JoinTree tree;
    ReducedInstance inst;
    std::unique_ptr<AcyclicStream> stream;
  };

  // first index whose coordinate is light; -1 when every coordinate is heavy
  int source_of(const Tuple& t) const {
    for (size_t i = 0; i < shape_.a_attrs.size(); ++i)
      if (!heavy_[i].count(t[proj_pos_[i]])) return static_cast<int>(i);
    return -1;
  }

  static JoinTree star_tree(const std::vector<Relation>& rels, int root,
                            const std::vector<std::string>& project) {
    JoinTree jt;
    jt.project = project;
    jt.root = 0;
    JoinTreeNode rn;
    rn.relation = rels[root].name;
    rn.attrs = rels[root].attrs;
    jt.nodes.push_back(rn);
    for (size_t i = 0; i < rels.size(); ++i) {
      if (static_cast<int>(i) == root) continue;
      JoinTreeNode n;
      n.relation = rels[i].name;
      n.attrs = rels[i].attrs;
      n.parent = 0;
      jt.nodes[0].children.push_back(static_cast<int>(jt.nodes.size()));
      jt.nodes.push_back(std::move(n));
    }
    for (size_t i = 1; i < jt.nodes.size(); ++i) {
      for (const auto& a : jt.nodes[i].attrs) {
        const auto& ra = jt.nodes[0].attrs;
        if (std::find(ra.begin(), ra.end(), a) != ra.end())
          jt.nodes[i].anchor.push_back(a);
      }
    }
    detail::rebuild_derived(jt);
    return jt;
  }

  void preprocess(std::vector<Relation> rels, double epsilon) {
    size_t m = rels.size();
    for (size_t i = 0; i < m; ++i) proj_pos_.push_back(pos_in_project(shape_.a_attrs[i]));

    // full reduce over the star's own tree, so degrees ignore dangling tuples
    {
      Database db;
      for (auto& r : rels) db[r.name] = r;
      JoinTree jt = star_tree(rels, 0, project_);
      ReducedInstance red = full_reduce(db, jt);
      for (size_t i = 0; i < m; ++i) {
        int node = jt.node_of(rels[i].name);
        rels[i] = std::move(red.nodes[node]);
      }
    }

    d_size_ = 0;
    for (const auto& r : rels) d_size_ += r.size();
    if (d_size_ == 0) return;
    delta_ = static_cast<uint64_t>(
        std::ceil(std::pow(static_cast<double>(d_size_), 1.0 - epsilon)));
    if (delta_ < 1) delta_ = 1;

    // split by A_i-value degree
    heavy_.resize(m);
    std::vector<Relation> heavy_rel(m), light_rel(m);
    for (size_t i = 0; i < m; ++i) {
      int ac = rels[i].col(shape_.a_attrs[i]);
      std::unordered_map<Value, uint64_t, ValueHash> deg;
      for (const Tuple& t : rels[i].tuples) deg[t[ac]]++;
      own_.elementary_ops += rels[i].size();
      heavy_rel[i].name = rels[i].name + "#H";
      heavy_rel[i].attrs = rels[i].attrs;
      light_rel[i].name = rels[i].name + "#L";
      light_rel[i].attrs = rels[i].attrs;
      for (Tuple& t : rels[i].tuples) {
        if (deg[t[ac]] >= delta_) {
          heavy_[i].insert(t[ac]);
          heavy_rel[i].tuples.push_back(t);
        } else {
          light_rel[i].tuples.push_back(t);
        }
      }
      own_.elementary_ops += rels[i].size();
    }

    materialize_heavy(heavy_rel);
    if (heavy_cursor_ < heavy_out_.size())
      push_entry(Entry{heavy_out_[heavy_cursor_++], -1});

    lights_.resize(m);
    for (size_t i = 0; i < m; ++i) {
      std::vector<Relation> qrels;
      qrels.reserve(m);
      bool feasible = true;
      for (size_t j = 0; j < m; ++j) {
        const Relation& pick = j < i ? heavy_rel[j] : (j == i ? light_rel[j] : rels[j]);
        if (pick.tuples.empty()) { feasible = false; break; }
        qrels.push_back(pick);
      }
      if (!feasible) continue;
      std::rotate(qrels.begin(), qrels.begin() + i, qrels.end());  // root first
      auto holder = std::make_unique<LightHolder>();
      holder->tree = star_tree(qrels, 0, project_);
      Database db;
      for (auto& r : qrels) db[r.name] = std::move(r);
      holder->inst = full_reduce(db, holder->tree);
      build_indexes(holder->tree, holder->inst);
      holder->stream =
          std::make_unique<AcyclicStream>(holder->tree, holder->inst, rf_, wm_);
      auto n = holder->stream->next();
      lights_[i] = std::move(holder);
      if (n) push_entry(Entry{std::move(*n), static_cast<int>(i)});
    }
  }

  // heavy answers: per shared B value, the cartesian product of the heavy
  // A-lists, deduped globally and sorted by the ranking
  void materialize_heavy(const std::vector<Relation>& heavy_rel) {
    size_t m = heavy_rel.size();
    std::vector<std::unordered_map<Value, std::vector<Value>, ValueHash>> by_b(m);
    for (size_t i = 0; i < m; ++i) {
      int ac = heavy_rel[i].col(shape_.a_attrs[i]);
      int bc = heavy_rel[i].col(shape_.b_attr);
      for (const Tuple& t : heavy_rel[i].tuples) by_b[i][t[bc]].push_back(t[ac]);
      own_.elementary_ops += heavy_rel[i].size();
    }
    std::unordered_set<Tuple, TupleHash> seen;
    for (const auto& [b, first_list] : by_b[0]) {
      bool common = true;
      for (size_t i = 1; i < m; ++i)
        if (!by_b[i].count(b)) { common = false; break; }
      if (!common) continue;
      std::vector<const std::vector<Value>*> lists;
      lists.reserve(m);
      lists.push_back(&first_list);
      for (size_t i = 1; i < m; ++i) lists.push_back(&by_b[i].at(b));
      std::vector<size_t> idx(m, 0);
      while (true) {
        Tuple t(m);
        for (size_t i = 0; i < m; ++i) t[proj_pos_[i]] = (*lists[i])[idx[i]];
        own_.elementary_ops++;
        seen.insert(std::move(t));
        size_t k = m;
        while (k > 0) {
          if (++idx[k - 1] < lists[k - 1]->size()) break;
          idx[k - 1] = 0;
          --k;
        }
        if (k == 0) break;
      }
    }
    heavy_out_.reserve(seen.size());
    for (const Tuple& t : seen)
      heavy_out_.push_back(OutputTuple{t, sum_rank(t, project_, wm_)});
    std::sort(heavy_out_.begin(), heavy_out_.end(),
              [&](const OutputTuple& a, const OutputTuple& b) {
                return compare_outputs(a.values, b.values, project_, rf_, wm_) < 0;
              });
  }

  int pos_in_project(const std::string& a) const {
    for (size_t i = 0; i < project_.size(); ++i)
      if (project_[i] == a) return static_cast<int>(i);
    throw PlanError("star attribute not projected: " + a);
  }

  auto entry_after() {
    return [this](const Entry& a, const Entry& b) {
      return compare_outputs(a.out.values, b.out.values, project_, rf_, wm_) > 0;
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

  std::vector<std::string> project_;
  RankingFunction rf_;
  WeightMap wm_;
  StarShape shape_;
  std::vector<int> proj_pos_;  // relation index -> position in project
  uint64_t d_size_ = 0;
  uint64_t delta_ = 1;
  std::vector<std::unordered_set<Value, ValueHash>> heavy_;
  std::vector<OutputTuple> heavy_out_;
  size_t heavy_cursor_ = 0;
  std::vector<std::unique_ptr<LightHolder>> lights_;
  std::vector<Entry> merge_;
  OpCounters own_;
  mutable OpCounters agg_;
};

}  // namespace rankenum
