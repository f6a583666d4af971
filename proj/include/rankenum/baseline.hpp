#pragma once

#include <memory>
#include <string>
#include <unordered_set>
#include <vector>

#include "rankenum/acyclic.hpp"
#include "rankenum/core.hpp"
#include "rankenum/join_tree.hpp"
#include "rankenum/reduce.hpp"

namespace rankenum {

// Reference strategy that skips the projection machinery: enumerate the full
// query with non-projected attributes forced to weight zero, project each
// answer, and drop adjacent duplicates. Order-correct, but the gap between
// distinct answers is unbounded; internal_emissions counts the full-query
// answers consumed, which the projection-aware engine never produces.
class BaselineStream final : public OutputStream {
 public:
  BaselineStream(const std::vector<Relation>& rels, std::vector<std::string> project,
                 RankingFunction rf, WeightMap wm, const std::string& root = "")
      : project_(std::move(project)), wm_(wm) {
    std::vector<std::string> full = project_;
    std::unordered_set<std::string> seen(full.begin(), full.end());
    std::vector<std::pair<std::string, std::vector<std::string>>> shapes;
    for (const auto& r : rels) {
      shapes.emplace_back(r.name, r.attrs);
      for (const auto& a : r.attrs)
        if (seen.insert(a).second) full.push_back(a);
    }
    RankingFunction full_rf = rf;
    WeightMap full_wm = wm;
    if (rf.kind == RankingFunction::Kind::Sum) {
      for (size_t i = project_.size(); i < full.size(); ++i) full_wm.zero_attr(full[i]);
    } else {
      for (size_t i = project_.size(); i < full.size(); ++i)
        full_rf.lex.push_back(LexAttr{full[i], Dir::Asc});
    }
    tree_ = build_join_tree(shapes, full, root);
    Database db;
    for (const auto& r : rels) db[r.name] = r;
    inst_ = prepare_instance(db, tree_);
    inner_ = std::make_unique<AcyclicStream>(tree_, inst_, full_rf, full_wm);
  }

  const std::vector<std::string>& output_attrs() const override { return project_; }

  const OpCounters& counters() const override {
    agg_ = inner_->counters();
    agg_.internal_emissions = internal_;
    return agg_;
  }

  std::optional<OutputTuple> next() override {
    while (auto n = inner_->next()) {
      internal_++;
      Tuple t(n->values.begin(), n->values.begin() + project_.size());
      if (!has_last_ || t != last_) {
        has_last_ = true;
        last_ = t;
        double rank = sum_rank(t, project_, wm_);
        return OutputTuple{std::move(t), rank};
      }
    }
    return std::nullopt;
  }

 private:
  std::vector<std::string> project_;
  WeightMap wm_;
  JoinTree tree_;
  ReducedInstance inst_;
  std::unique_ptr<AcyclicStream> inner_;
  uint64_t internal_ = 0;
  bool has_last_ = false;
  Tuple last_;
  mutable OpCounters agg_;
};

}  // namespace rankenum
