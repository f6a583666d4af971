#pragma once

// Shared instances and helpers for the test suites.

#include <string>
#include <vector>

#include "rankenum/rankenum.hpp"

namespace fixtures {

using namespace rankenum;

// The worked 4-path example: R1(A,B) R2(B,C) R3(C,D) R4(D,E), project {A,E}.
// Reduction must drop exactly R3's tuple (1,2); the SUM drain is
// (1,1),(1,2),(2,1),(2,2),(3,1),(3,2).
inline std::vector<Relation> golden_relations() {
  Relation r1{"R1", {"A", "B"}, {{Value(1), Value(1)},
                                 {Value(2), Value(1)},
                                 {Value(1), Value(2)},
                                 {Value(3), Value(2)}}};
  Relation r2{"R2", {"B", "C"}, {{Value(1), Value(1)}, {Value(2), Value(1)}}};
  Relation r3{"R3", {"C", "D"}, {{Value(1), Value(1)}, {Value(1), Value(2)}}};
  Relation r4{"R4", {"D", "E"}, {{Value(1), Value(1)}, {Value(1), Value(2)}}};
  return {r1, r2, r3, r4};
}

inline std::vector<std::string> golden_project() { return {"A", "E"}; }

inline std::vector<std::pair<int64_t, int64_t>> golden_drain() {
  return {{1, 1}, {1, 2}, {2, 1}, {2, 2}, {3, 1}, {3, 2}};
}

inline Database to_db(const std::vector<Relation>& rels) {
  Database db;
  for (const auto& r : rels) db[r.name] = r;
  return db;
}

inline std::vector<std::pair<std::string, std::vector<std::string>>> shapes(
    const std::vector<Relation>& rels) {
  std::vector<std::pair<std::string, std::vector<std::string>>> s;
  for (const auto& r : rels) s.emplace_back(r.name, r.attrs);
  return s;
}

// one query shape of the random sweep matrix
struct TestQuery {
  std::string name;
  std::vector<Relation> rels;
  std::vector<std::string> project;
  bool star_shaped = false;  // eligible for the heavy/light engine
  bool full = false;         // projection covers every attribute
};

inline TestQuery make_shape(const std::string& kind, size_t d_total, Dist dist,
                            uint64_t seed) {
  TestQuery q;
  q.name = kind;
  double zipf_s = 1.1;
  auto path_attrs = [](size_t k) {
    std::vector<std::string> p;
    for (size_t i = 1; i <= k + 1; ++i) p.push_back("A" + std::to_string(i));
    return p;
  };
  if (kind == "path2" || kind == "path3" || kind == "path4" ||
      kind == "free_connex" || kind == "full2" || kind == "full3") {
    size_t k = kind == "path2" || kind == "free_connex" || kind == "full2" ? 2
               : kind == "path3" || kind == "full3"                        ? 3
                                                                           : 4;
    size_t per = std::max<size_t>(1, d_total / k);
    int64_t domain = std::max<int64_t>(2, static_cast<int64_t>(per) / 3);
    q.rels = gen_path(k, per, domain, dist, zipf_s, seed);
    auto attrs = path_attrs(k);
    if (kind == "free_connex") {
      q.project = {attrs[0], attrs[1]};  // head covers a subtree prefix
    } else if (kind == "full2" || kind == "full3") {
      q.project = attrs;
      q.full = true;
    } else {
      q.project = {attrs.front(), attrs.back()};
    }
  } else if (kind == "star3") {
    size_t per = std::max<size_t>(1, d_total / 3);
    int64_t domain = std::max<int64_t>(2, static_cast<int64_t>(per) / 3);
    q.rels = gen_star(3, per, domain, dist, zipf_s, seed);
    q.project = {"A1", "A2", "A3"};
    q.star_shaped = true;
  } else {
    throw std::invalid_argument("unknown shape: " + kind);
  }
  return q;
}

// alternating-direction lex order over the projection
inline RankingFunction mixed_lex(const std::vector<std::string>& project) {
  std::vector<LexAttr> lex;
  for (size_t i = 0; i < project.size(); ++i)
    lex.push_back({project[i], i % 2 ? Dir::Desc : Dir::Asc});
  return RankingFunction::lex_order(std::move(lex));
}

inline std::vector<OutputTuple> drain(OutputStream& s,
                                      std::optional<uint64_t> limit = std::nullopt) {
  std::vector<OutputTuple> out;
  while (!limit || out.size() < *limit) {
    auto o = s.next();
    if (!o) break;
    out.push_back(std::move(*o));
  }
  return out;
}

inline bool same_outputs(const std::vector<OutputTuple>& a,
                         const std::vector<OutputTuple>& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i].values != b[i].values) return false;
    double tol = 1e-9 * std::max(1.0, std::max(std::abs(a[i].rank),
                                               std::abs(b[i].rank)));
    if (std::abs(a[i].rank - b[i].rank) > tol) return false;
  }
  return true;
}

inline std::string first_difference(const std::vector<OutputTuple>& got,
                                    const std::vector<OutputTuple>& want) {
  size_t n = std::min(got.size(), want.size());
  auto show = [](const OutputTuple& o) {
    std::string s = "(";
    for (size_t i = 0; i < o.values.size(); ++i)
      s += (i ? "," : "") + o.values[i].to_string();
    return s + ")#" + std::to_string(o.rank);
  };
  for (size_t i = 0; i < n; ++i)
    if (got[i].values != want[i].values)
      return "row " + std::to_string(i) + ": got " + show(got[i]) + " want " +
             show(want[i]);
  return "sizes: got " + std::to_string(got.size()) + " want " +
         std::to_string(want.size());
}

}  // namespace fixtures
