#include <catch2/catch_amalgamated.hpp>

#include "fixtures.hpp"

using namespace rankenum;
using fixtures::drain;
using fixtures::golden_relations;
using fixtures::shapes;
using fixtures::to_db;

namespace {

struct Prepared {
  JoinTree jt;
  ReducedInstance inst;
};

Prepared prepare(const std::vector<Relation>& rels,
                 const std::vector<std::string>& project,
                 const std::string& root = "") {
  Prepared p;
  p.jt = build_join_tree(shapes(rels), project, root);
  p.inst = prepare_instance(to_db(rels), p.jt);
  return p;
}

}  // namespace

TEST_CASE("lexicographic drain of the worked example uses no priority queue") {
  auto rels = golden_relations();
  auto p = prepare(rels, {"A", "E"}, "R3");
  WeightMap wm;
  RankingFunction rf =
      RankingFunction::lex_order({{"A", Dir::Asc}, {"E", Dir::Asc}});
  LexiStream s(p.jt, p.inst, rf, wm);
  std::vector<std::pair<int64_t, int64_t>> got;
  while (auto o = s.next())
    got.emplace_back(o->values[0].as_int(), o->values[1].as_int());
  CHECK(got == fixtures::golden_drain());
  CHECK(s.counters().pq_ops() == 0);
  CHECK(s.counters().pq_push == 0);
  CHECK(s.counters().pq_pop == 0);
}

TEST_CASE("lexi equals oracle across shapes, distributions, directions") {
  const char* kinds[] = {"path2", "path3", "path4", "star3", "free_connex", "full2"};
  WeightMap wm;
  uint64_t seed = 300;
  for (const char* kind : kinds) {
    for (Dist dist : {Dist::Uniform, Dist::Zipf}) {
      auto q = fixtures::make_shape(kind, 80, dist, ++seed);
      RankingFunction rf = fixtures::mixed_lex(q.project);
      auto expected = oracle_enumerate(q.rels, q.project, rf, wm);
      auto p = prepare(q.rels, q.project);
      LexiStream s(p.jt, p.inst, rf, wm);
      auto got = drain(s);
      INFO(kind << " seed " << seed << ": "
                << fixtures::first_difference(got, expected));
      REQUIRE(fixtures::same_outputs(got, expected));
      CHECK(s.counters().pq_ops() == 0);
    }
  }
}

TEST_CASE("attribute order of the lex ranking drives the sequence") {
  auto rels = golden_relations();
  WeightMap wm;
  auto p = prepare(rels, {"A", "E"}, "R1");
  RankingFunction ea =
      RankingFunction::lex_order({{"E", Dir::Asc}, {"A", Dir::Asc}});
  LexiStream s(p.jt, p.inst, ea, wm);
  auto got = drain(s);
  auto expected = oracle_enumerate(rels, {"A", "E"}, ea, wm);
  REQUIRE(fixtures::same_outputs(got, expected));
  // E is the major key now
  CHECK(got[0].values[1] == Value(1));
  CHECK(got[1].values[1] == Value(1));
  CHECK(got[2].values[1] == Value(1));
  CHECK(got[3].values[1] == Value(2));
}

TEST_CASE("all-descending order reverses the ascending drain") {
  auto rels = golden_relations();
  WeightMap wm;
  auto p = prepare(rels, {"A", "E"}, "R2");
  RankingFunction asc =
      RankingFunction::lex_order({{"A", Dir::Asc}, {"E", Dir::Asc}});
  RankingFunction desc =
      RankingFunction::lex_order({{"A", Dir::Desc}, {"E", Dir::Desc}});
  LexiStream up(p.jt, p.inst, asc, wm);
  LexiStream down(p.jt, p.inst, desc, wm);
  auto got_up = drain(up);
  auto got_down = drain(down);
  REQUIRE(got_up.size() == got_down.size());
  for (size_t i = 0; i < got_up.size(); ++i)
    CHECK(got_up[i].values == got_down[got_down.size() - 1 - i].values);
}

TEST_CASE("lexi rejects non-lex rankings and partial covers") {
  auto rels = golden_relations();
  auto p = prepare(rels, {"A", "E"}, "R3");
  WeightMap wm;
  CHECK_THROWS_AS(LexiStream(p.jt, p.inst, RankingFunction::sum(), wm), PlanError);
  RankingFunction partial = RankingFunction::lex_order({{"A", Dir::Asc}});
  CHECK_THROWS_AS(LexiStream(p.jt, p.inst, partial, wm), PlanError);
}

TEST_CASE("empty instance exhausts immediately") {
  Relation r1{"R1", {"A", "B"}, {{Value(1), Value(1)}}};
  Relation r2{"R2", {"B", "C"}, {{Value(5), Value(5)}}};
  auto p = prepare({r1, r2}, {"A", "C"});
  WeightMap wm;
  RankingFunction rf =
      RankingFunction::lex_order({{"A", Dir::Asc}, {"C", Dir::Asc}});
  LexiStream s(p.jt, p.inst, rf, wm);
  CHECK_FALSE(s.next().has_value());
  CHECK_FALSE(s.next().has_value());
}

TEST_CASE("planner routes lex orders to the lexicographic engine") {
  auto rels = golden_relations();
  QuerySpec q;
  for (const auto& r : rels) {
    RelationRef ref;
    ref.name = r.name;
    ref.attrs = r.attrs;
    q.relations.push_back(ref);
  }
  q.project = {"A", "E"};
  q.order = RankingFunction::lex_order({{"A", Dir::Asc}, {"E", Dir::Asc}});
  WeightMap wm;
  PlanInfo info;
  auto s = plan_query(q, to_db(rels), wm, {}, &info);
  CHECK(info.engine == "lexi");
  auto got = drain(*s);
  CHECK(got.size() == 6);
  CHECK(s->counters().pq_ops() == 0);
}
