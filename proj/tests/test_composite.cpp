#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "fixtures.hpp"

using namespace rankenum;
using fixtures::drain;

namespace {

RelationRef ref_of(const Relation& r) {
  RelationRef ref;
  ref.name = r.name;
  ref.attrs = r.attrs;
  return ref;
}

QuerySpec spec_for(const std::vector<Relation>& rels,
                   std::vector<std::string> project, RankingFunction rf) {
  QuerySpec q;
  for (const auto& r : rels) q.relations.push_back(ref_of(r));
  q.project = std::move(project);
  q.order = std::move(rf);
  return q;
}

// R1(A,B), R2(B,C), R3(C,A) with random edges over a small domain
std::vector<Relation> random_triangle(uint64_t seed, int domain, int edges) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int64_t> pick(1, domain);
  auto edge_set = [&](std::string name, std::string x, std::string y) {
    Relation r{std::move(name), {std::move(x), std::move(y)}, {}};
    for (int i = 0; i < edges; ++i)
      r.tuples.push_back({Value(pick(rng)), Value(pick(rng))});
    r.dedupe();
    return r;
  };
  return {edge_set("R1", "A", "B"), edge_set("R2", "B", "C"),
          edge_set("R3", "C", "A")};
}

std::vector<Relation> random_four_cycle(uint64_t seed, int domain, int edges) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int64_t> pick(1, domain);
  auto edge_set = [&](std::string name, std::string x, std::string y) {
    Relation r{std::move(name), {std::move(x), std::move(y)}, {}};
    for (int i = 0; i < edges; ++i)
      r.tuples.push_back({Value(pick(rng)), Value(pick(rng))});
    r.dedupe();
    return r;
  };
  return {edge_set("R1", "A", "B"), edge_set("R2", "B", "C"),
          edge_set("R3", "C", "D"), edge_set("R4", "D", "A")};
}

std::vector<GhdBag> four_cycle_bags() {
  return {GhdBag{{"A", "B", "C"}, {"R1", "R2"}},
          GhdBag{{"A", "C", "D"}, {"R3", "R4"}}};
}

}  // namespace

TEST_CASE("decomposition validation rejects malformed bag sets") {
  auto rels = random_triangle(1, 4, 8);
  std::vector<RelationRef> refs;
  for (const auto& r : rels) refs.push_back(ref_of(r));
  std::vector<std::string> project{"A", "C"};

  CHECK_THROWS_AS(validate_ghd({}, refs, project), QueryError);

  GhdBag whole{{"A", "B", "C"}, {"R1", "R2", "R3"}};
  CHECK_NOTHROW(validate_ghd({whole}, refs, project));

  GhdBag unknown{{"A", "B", "C"}, {"R1", "RX"}};
  CHECK_THROWS_AS(validate_ghd({unknown}, refs, project), QueryError);

  GhdBag stray_attr{{"A", "B", "Z"}, {"R1"}};
  CHECK_THROWS_AS(validate_ghd({stray_attr, whole}, refs, project), QueryError);

  // R2 and R3 appear in no bag
  GhdBag only_r1{{"A", "B"}, {"R1"}};
  CHECK_THROWS_AS(validate_ghd({only_r1}, refs, project), QueryError);

  // bags themselves form a cycle
  std::vector<GhdBag> cyclic{GhdBag{{"A", "B"}, {"R1"}},
                             GhdBag{{"B", "C"}, {"R2"}},
                             GhdBag{{"C", "A"}, {"R3"}}};
  CHECK_THROWS_AS(validate_ghd(cyclic, refs, project), QueryError);

  CHECK_THROWS_AS(validate_ghd({whole}, refs, {"A", "E"}), QueryError);
}

TEST_CASE("single-bag materialization equals the flat join") {
  Relation r1{"R1", {"A", "B"}, {{Value(1), Value(1)}, {Value(1), Value(2)}, {Value(2), Value(1)}}};
  Relation r2{"R2", {"B", "C"}, {{Value(1), Value(1)}, {Value(2), Value(2)}}};
  Relation r3{"R3", {"C", "A"}, {{Value(1), Value(1)}, {Value(2), Value(1)}}};
  Database db = fixtures::to_db({r1, r2, r3});
  auto bags = materialize_ghd(db, {GhdBag{{"A", "B", "C"}, {"R1", "R2", "R3"}}}, {});
  REQUIRE(bags.size() == 1);
  CHECK(bags[0].name == "bag0");
  CHECK(bags[0].attrs == std::vector<std::string>{"A", "B", "C"});
  // only (1,1,1) and (1,2,2) close the cycle
  REQUIRE(bags[0].tuples.size() == 2);
}

TEST_CASE("triangle query over a decomposition equals oracle") {
  WeightMap wm;
  for (uint64_t seed : {11u, 12u, 13u}) {
    auto rels = random_triangle(seed, 5, 18);
    auto q = spec_for(rels, {"A", "C"}, RankingFunction::sum());
    q.ghd = {GhdBag{{"A", "B", "C"}, {"R1", "R2", "R3"}}};
    auto expected =
        oracle_enumerate(rels, q.project, q.order, wm);
    PlanInfo info;
    auto s = plan_query(q, fixtures::to_db(rels), wm, PlanOptions{}, &info);
    auto got = drain(*s);
    INFO("seed=" << seed << ": " << fixtures::first_difference(got, expected));
    REQUIRE(fixtures::same_outputs(got, expected));
    CHECK(info.bags == 1);
  }
}

TEST_CASE("four-cycle with two bags equals oracle in both orders") {
  WeightMap wm;
  for (uint64_t seed : {21u, 22u}) {
    auto rels = random_four_cycle(seed, 4, 22);
    for (bool lex : {false, true}) {
      std::vector<std::string> project{"A", "C"};
      RankingFunction rf =
          lex ? fixtures::mixed_lex(project) : RankingFunction::sum();
      auto q = spec_for(rels, project, rf);
      q.ghd = four_cycle_bags();
      auto expected = oracle_enumerate(rels, project, rf, wm);
      auto s = plan_query(q, fixtures::to_db(rels), wm, PlanOptions{});
      auto got = drain(*s);
      INFO("seed=" << seed << " lex=" << lex << ": "
                   << fixtures::first_difference(got, expected));
      REQUIRE(fixtures::same_outputs(got, expected));
    }
  }
}

TEST_CASE("six-cycle over a two-bag decomposition equals oracle") {
  std::mt19937_64 rng(61);
  std::uniform_int_distribution<int64_t> pick(1, 4);
  std::vector<std::string> corners{"A", "B", "C", "D", "E", "F"};
  std::vector<Relation> rels;
  for (int i = 0; i < 6; ++i) {
    Relation r{"R" + std::to_string(i + 1), {corners[i], corners[(i + 1) % 6]}, {}};
    for (int e = 0; e < 30; ++e)
      r.tuples.push_back({Value(pick(rng)), Value(pick(rng))});
    r.dedupe();
    rels.push_back(std::move(r));
  }
  std::vector<GhdBag> bags{GhdBag{{"A", "B", "C", "D"}, {"R1", "R2", "R3"}},
                           GhdBag{{"D", "E", "F", "A"}, {"R4", "R5", "R6"}}};
  WeightMap wm;

  // each bag stays within the product of its relations and the width bound
  Database db = fixtures::to_db(rels);
  auto mats = materialize_ghd(db, bags, {});
  uint64_t total = 0;
  for (const auto& r : rels) total += r.size();
  for (size_t bi = 0; bi < mats.size(); ++bi) {
    uint64_t prod = 1;
    for (const auto& alias : bags[bi].relations) prod *= db.at(alias).size();
    CHECK(mats[bi].size() <= prod);
    // opposite edges of the cycle cover all four bag attributes: width 2
    CHECK(mats[bi].size() <= total * total);
  }

  auto q = spec_for(rels, {"A", "D"}, RankingFunction::sum());
  q.ghd = bags;
  auto expected = oracle_enumerate(rels, q.project, q.order, wm);
  auto s = plan_query(q, db, wm, PlanOptions{});
  auto got = drain(*s);
  INFO(fixtures::first_difference(got, expected));
  REQUIRE(fixtures::same_outputs(got, expected));
}

TEST_CASE("filters confined to one bag are applied before enumeration") {
  WeightMap wm;
  auto rels = random_four_cycle(31, 4, 22);
  FilterPred f;
  f.lhs = "B";
  f.op = FilterOp::Le;
  f.is_const = true;
  f.rhs_const = Value(2);
  auto q = spec_for(rels, {"A", "C"}, RankingFunction::sum());
  q.ghd = four_cycle_bags();
  q.filters = {f};
  auto expected = oracle_enumerate(rels, q.project, q.order, wm, {f});
  auto s = plan_query(q, fixtures::to_db(rels), wm, PlanOptions{});
  auto got = drain(*s);
  INFO(fixtures::first_difference(got, expected));
  REQUIRE(fixtures::same_outputs(got, expected));
}

TEST_CASE("a filter spanning bags is a planning error") {
  auto rels = random_four_cycle(41, 4, 22);
  FilterPred f;
  f.lhs = "B";
  f.op = FilterOp::Lt;
  f.is_const = false;
  f.rhs_attr = "D";
  auto q = spec_for(rels, {"A", "C"}, RankingFunction::sum());
  q.ghd = four_cycle_bags();
  q.filters = {f};
  CHECK_THROWS_WITH(plan_query(q, fixtures::to_db(rels), WeightMap{}, PlanOptions{}),
                    Catch::Matchers::ContainsSubstring("fits no decomposition bag"));
}

TEST_CASE("union merge drops cross-branch duplicates once") {
  Relation u1{"U1", {"A"}, {{Value(1)}, {Value(3)}}};
  Relation u2{"U2", {"A"}, {{Value(1)}, {Value(2)}}};
  WeightMap wm;
  RankingFunction rf = RankingFunction::sum();
  PlanOptions opt;
  std::vector<std::unique_ptr<OutputStream>> branches;
  branches.push_back(plan_query(spec_for({u1}, {"A"}, rf), fixtures::to_db({u1}),
                                wm, opt));
  branches.push_back(plan_query(spec_for({u2}, {"A"}, rf), fixtures::to_db({u2}),
                                wm, opt));
  UnionStream u(std::move(branches), {"A"}, rf, wm);
  auto got = drain(u);
  REQUIRE(got.size() == 3);
  for (size_t i = 0; i < 3; ++i) {
    CHECK(got[i].values[0] == Value(int64_t(i + 1)));
    CHECK(got[i].rank == double(i + 1));
  }
  CHECK(u.counters().pq_pop >= 3);
}

TEST_CASE("planned union of two paths equals the union oracle") {
  WeightMap wm;
  auto a = gen_path(2, 30, 6, Dist::Uniform, 1.1, 51);
  auto b = gen_path(2, 30, 6, Dist::Zipf, 1.2, 52);
  for (auto& r : b) r.name = "S" + r.name.substr(1);  // S1, S2
  std::vector<std::string> project{"A1", "A3"};
  for (bool lex : {false, true}) {
    RankingFunction rf =
        lex ? fixtures::mixed_lex(project) : RankingFunction::sum();
    QuerySpec q;
    q.project = project;
    q.order = rf;
    q.branches = {spec_for(a, project, rf), spec_for(b, project, rf)};
    std::vector<Relation> all = a;
    all.insert(all.end(), b.begin(), b.end());
    PlanInfo info;
    auto s = plan_query(q, fixtures::to_db(all), wm, PlanOptions{}, &info);
    auto got = drain(*s);
    auto expected = oracle_enumerate_union({a, b}, {}, project, rf, wm);
    INFO("lex=" << lex << ": " << fixtures::first_difference(got, expected));
    REQUIRE(fixtures::same_outputs(got, expected));
    CHECK(info.is_union);
    CHECK(info.branch_engines.size() == 2);
  }
}

TEST_CASE("union of a path and a star equals the union oracle") {
  WeightMap wm;
  auto a = gen_path(2, 40, 7, Dist::Uniform, 1.1, 61);
  auto b = gen_star(3, 40, 7, Dist::Zipf, 1.2, 62);
  // rename the star so its spokes align with the path's endpoints
  b[0] = rename_relation(b[0], "S1", {"A1", "B"});
  b[1] = rename_relation(b[1], "S2", {"A3", "B"});
  b[2] = rename_relation(b[2], "S3", {"A5", "B"});
  std::vector<std::string> project{"A1", "A3"};
  RankingFunction rf = RankingFunction::sum();
  QuerySpec q;
  q.project = project;
  q.order = rf;
  q.branches = {spec_for(a, project, rf), spec_for(b, project, rf)};
  std::vector<Relation> all = a;
  all.insert(all.end(), b.begin(), b.end());
  auto s = plan_query(q, fixtures::to_db(all), wm, PlanOptions{});
  auto got = drain(*s);
  auto expected = oracle_enumerate_union({a, b}, {}, project, rf, wm);
  INFO(fixtures::first_difference(got, expected));
  REQUIRE(fixtures::same_outputs(got, expected));
}

TEST_CASE("an empty branch never contributes") {
  Relation u1{"U1", {"A"}, {{Value(5)}}};
  Relation u2{"U2", {"A"}, {}};
  WeightMap wm;
  RankingFunction rf = RankingFunction::sum();
  QuerySpec q;
  q.project = {"A"};
  q.order = rf;
  q.branches = {spec_for({u1}, {"A"}, rf), spec_for({u2}, {"A"}, rf)};
  auto s = plan_query(q, fixtures::to_db({u1, u2}), wm, PlanOptions{});
  auto got = drain(*s);
  REQUIRE(got.size() == 1);
  CHECK(got[0].values[0] == Value(5));
}
