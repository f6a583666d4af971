#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "rankenum/core.hpp"
#include "rankenum/csv.hpp"
#include "rankenum/query.hpp"

using namespace rankenum;

namespace {

// independent re-implementation used only to cross-check compare_outputs
int naive_compare(const Tuple& a, const Tuple& b, const std::vector<std::string>& attrs,
                  const RankingFunction& rf, const WeightMap& wm) {
  if (rf.kind == RankingFunction::Kind::Sum) {
    double ra = 0.0, rb = 0.0;
    for (size_t i = 0; i < attrs.size(); ++i) {
      ra += wm.resolve(attrs[i], a[i]);
      rb += wm.resolve(attrs[i], b[i]);
    }
    if (ra != rb) return ra < rb ? -1 : 1;
    for (size_t i = 0; i < attrs.size(); ++i) {
      int c = compare_values(a[i], b[i]);
      if (c != 0) return c;
    }
    return 0;
  }
  for (const auto& la : rf.lex) {
    size_t pos = 0;
    while (attrs[pos] != la.attr) ++pos;
    int c = compare_values(a[pos], b[pos]);
    if (c != 0) return la.dir == Dir::Asc ? c : -c;
  }
  return 0;
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / name;
}

}  // namespace

TEST_CASE("value ordering is total with ints before strings") {
  CHECK(compare_values(Value(1), Value(2)) < 0);
  CHECK(compare_values(Value(2), Value(2)) == 0);
  CHECK(compare_values(Value(3), Value(2)) > 0);
  CHECK(compare_values(Value(std::string("a")), Value(std::string("b"))) < 0);
  CHECK(compare_values(Value(99), Value(std::string("a"))) < 0);
  CHECK(compare_values(Value(std::string("a")), Value(99)) > 0);
  CHECK(Value(5) == Value(5));
  CHECK(Value(5) != Value(std::string("5")));
}

TEST_CASE("tuple comparison is lexicographic") {
  Tuple a{Value(1), Value(2)};
  Tuple b{Value(1), Value(3)};
  CHECK(compare_tuples(a, b) < 0);
  CHECK(compare_tuples(b, a) > 0);
  CHECK(compare_tuples(a, a) == 0);
}

TEST_CASE("relation dedupe keeps first occurrence order") {
  Relation r{"R", {"A"}, {{Value(2)}, {Value(1)}, {Value(2)}, {Value(3)}}};
  r.dedupe();
  REQUIRE(r.size() == 3);
  CHECK(r.tuples[0][0] == Value(2));
  CHECK(r.tuples[1][0] == Value(1));
  CHECK(r.tuples[2][0] == Value(3));
}

TEST_CASE("rename_relation validates arity") {
  Relation r{"R", {"A", "B"}, {{Value(1), Value(2)}}};
  Relation s = rename_relation(r, "S", {"X", "Y"});
  CHECK(s.name == "S");
  CHECK(s.attrs == std::vector<std::string>{"X", "Y"});
  CHECK(s.tuples == r.tuples);
  CHECK_THROWS_AS(rename_relation(r, "S", {"X"}), std::invalid_argument);
}

TEST_CASE("weights default to identity for ints and zero for strings") {
  WeightMap wm;
  CHECK(wm.resolve("A", Value(7)) == 7.0);
  CHECK(wm.resolve("A", Value(std::string("x"))) == 0.0);
  wm.set("A", Value(7), 100.0);
  CHECK(wm.resolve("A", Value(7)) == 100.0);
  CHECK(wm.resolve("B", Value(7)) == 7.0);
  wm.zero_attr("B");
  CHECK(wm.resolve("B", Value(7)) == 0.0);
  CHECK(wm.attr_zeroed("B"));
}

TEST_CASE("filters evaluate all six operators") {
  FilterPred f;
  f.lhs = "A";
  f.is_const = true;
  f.rhs_const = Value(5);
  auto eval = [&](FilterOp op, int64_t v) {
    f.op = op;
    return f.eval(Value(v), f.rhs_const);
  };
  CHECK(eval(FilterOp::Eq, 5));
  CHECK_FALSE(eval(FilterOp::Eq, 4));
  CHECK(eval(FilterOp::Ne, 4));
  CHECK(eval(FilterOp::Lt, 4));
  CHECK(eval(FilterOp::Le, 5));
  CHECK(eval(FilterOp::Gt, 6));
  CHECK(eval(FilterOp::Ge, 5));
}

TEST_CASE("compare_outputs matches a naive comparator on random tuples") {
  std::vector<std::string> attrs{"A", "B", "C"};
  WeightMap wm;
  wm.set("B", Value(3), -2.5);
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int64_t> d(1, 4);
  auto rand_tuple = [&] {
    return Tuple{Value(d(rng)), Value(d(rng)), Value(d(rng))};
  };
  RankingFunction sum = RankingFunction::sum();
  RankingFunction lex = RankingFunction::lex_order(
      {{"B", Dir::Desc}, {"A", Dir::Asc}, {"C", Dir::Asc}});
  for (int i = 0; i < 2000; ++i) {
    Tuple a = rand_tuple(), b = rand_tuple();
    CHECK(compare_outputs(a, b, attrs, sum, wm) == naive_compare(a, b, attrs, sum, wm));
    CHECK(compare_outputs(a, b, attrs, lex, wm) == naive_compare(a, b, attrs, lex, wm));
  }
}

TEST_CASE("csv round trip preserves schema, types, and rows") {
  auto path = temp_file("rankenum_core_roundtrip.csv");
  Relation r{"R", {"A", "name"}, {{Value(1), Value(std::string("x"))},
                                  {Value(2), Value(std::string("y"))}}};
  save_relation(path.string(), r);
  Relation back = load_relation(path.string(), "R");
  CHECK(back.attrs == r.attrs);
  REQUIRE(back.size() == 2);
  CHECK(back.tuples[0][0] == Value(1));
  CHECK(back.tuples[0][1] == Value(std::string("x")));
  std::filesystem::remove(path);
}

TEST_CASE("csv loader rejects ragged and mistyped rows") {
  auto path = temp_file("rankenum_core_bad.csv");
  {
    std::ofstream out(path);
    out << "A,B\n1,2\n3\n";
  }
  CHECK_THROWS_AS(load_relation(path.string(), "R"), LoadError);
  {
    std::ofstream out(path);
    out << "A,B\n1,2\nx,4\n";
  }
  CHECK_THROWS_AS(load_relation(path.string(), "R"), LoadError);
  CHECK_THROWS_AS(load_relation("/nonexistent/nope.csv", "R"), LoadError);
  std::filesystem::remove(path);
}

TEST_CASE("csv loader dedupes rows") {
  auto path = temp_file("rankenum_core_dup.csv");
  {
    std::ofstream out(path);
    out << "A,B\n1,2\n1,2\n2,3\n";
  }
  Relation r = load_relation(path.string(), "R");
  CHECK(r.size() == 2);
  std::filesystem::remove(path);
}

TEST_CASE("weight csv loads typed values") {
  auto path = temp_file("rankenum_core_weights.csv");
  {
    std::ofstream out(path);
    out << "attribute,value,weight\nA,3,9.5\nB,\"3\",1.5\n";
  }
  WeightMap wm;
  load_weights(path.string(), wm);
  CHECK(wm.resolve("A", Value(3)) == 9.5);
  CHECK(wm.resolve("B", Value(std::string("3"))) == 1.5);
  CHECK(wm.resolve("B", Value(3)) == 3.0);
  std::filesystem::remove(path);
}

TEST_CASE("query json parses relations, filters, order, ghd") {
  nlohmann::json j = {
      {"relations",
       {{{"name", "R1"}, {"file", "r1.csv"}, {"attrs", {"A", "B"}}},
        {{"name", "R1"},
         {"as", "R2"},
         {"file", "r1.csv"},
         {"attrs", {"B", "C"}},
         {"filters", {{{"lhs", "B"}, {"op", "le"}, {"rhs", {{"const", 5}}}}}}}}},
      {"project", {"A", "C"}},
      {"order",
       {{"type", "lex"},
        {"attrs", {{{"attr", "C"}, {"dir", "desc"}}, {{"attr", "A"}}}}}},
      {"limit", 7},
      {"root", "R2"},
      {"filters", {{{"lhs", "A"}, {"op", "lt"}, {"rhs", "C"}}}},
      {"ghd", {{{"attrs", {"A", "B", "C"}}, {"relations", {"R1", "R2"}}}}}};
  QuerySpec q = parse_query_json(j);
  REQUIRE(q.relations.size() == 2);
  CHECK(q.relations[1].alias() == "R2");
  REQUIRE(q.relations[1].filters.size() == 1);
  CHECK(q.relations[1].filters[0].op == FilterOp::Le);
  CHECK(q.relations[1].filters[0].is_const);
  CHECK(q.project == std::vector<std::string>{"A", "C"});
  CHECK(q.order.kind == RankingFunction::Kind::Lex);
  REQUIRE(q.order.lex.size() == 2);
  CHECK(q.order.lex[0].dir == Dir::Desc);
  CHECK(q.limit == 7);
  CHECK(q.root == "R2");
  REQUIRE(q.filters.size() == 1);
  CHECK_FALSE(q.filters[0].is_const);
  REQUIRE(q.ghd.size() == 1);
  CHECK(q.ghd[0].relations.size() == 2);
  CHECK_FALSE(q.is_union());
}

TEST_CASE("query json parses unions recursively") {
  nlohmann::json branch = {
      {"relations", {{{"name", "R1"}, {"file", "r1.csv"}, {"attrs", {"A", "B"}}}}},
      {"project", {"A"}}};
  nlohmann::json j = {{"union", {branch, branch}}};
  QuerySpec q = parse_query_json(j);
  CHECK(q.is_union());
  REQUIRE(q.branches.size() == 2);
  CHECK(q.branches[0].project == std::vector<std::string>{"A"});
}

TEST_CASE("query json rejects malformed input") {
  CHECK_THROWS_AS(parse_query_json({{"project", {"A"}}}), QueryError);
  nlohmann::json bad_op = {
      {"relations", {{{"name", "R"}, {"attrs", {"A"}}}}},
      {"project", {"A"}},
      {"filters", {{{"lhs", "A"}, {"op", "like"}, {"rhs", "A"}}}}};
  CHECK_THROWS_AS(parse_query_json(bad_op), QueryError);
  nlohmann::json bad_order = {{"relations", {{{"name", "R"}, {"attrs", {"A"}}}}},
                              {"project", {"A"}},
                              {"order", {{"type", "random"}}}};
  CHECK_THROWS_AS(parse_query_json(bad_order), QueryError);
  nlohmann::json empty_proj = {
      {"relations", {{{"name", "R"}, {"attrs", {"A"}}}}},
      {"project", nlohmann::json::array()}};
  CHECK_THROWS_AS(parse_query_json(empty_proj), QueryError);
}
