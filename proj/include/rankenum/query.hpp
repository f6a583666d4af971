#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rankenum/core.hpp"
#include "rankenum/csv.hpp"

namespace rankenum {

struct QueryError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RelationRef {
  std::string name;                // base relation / file identity
  std::string file;                // CSV path, may be empty for in-memory tests
  std::string as;                  // alias; empty means same as name
  std::vector<std::string> attrs;  // attribute names for this occurrence
  std::vector<FilterPred> filters; // must reference only this relation's attrs

  const std::string& alias() const { return as.empty() ? name : as; }
};

struct GhdBag {
  std::vector<std::string> attrs;
  std::vector<std::string> relations;  // aliases whose join materializes the bag
};

struct QuerySpec {
  std::vector<RelationRef> relations;
  std::vector<std::string> project;
  RankingFunction order;
  std::optional<uint64_t> limit;
  std::string root;                  // empty: first relation
  std::vector<GhdBag> ghd;
  std::vector<FilterPred> filters;   // may span relations; needs a covering site
  std::vector<QuerySpec> branches;   // non-empty: union query

  bool is_union() const { return !branches.empty(); }
};

namespace detail {

inline FilterOp parse_op(const std::string& s) {
  if (s == "eq" || s == "=" || s == "==") return FilterOp::Eq;
  if (s == "ne" || s == "!=" || s == "<>") return FilterOp::Ne;
  if (s == "lt" || s == "<") return FilterOp::Lt;
  if (s == "le" || s == "<=") return FilterOp::Le;
  if (s == "gt" || s == ">") return FilterOp::Gt;
  if (s == "ge" || s == ">=") return FilterOp::Ge;
  throw QueryError("unknown filter op: " + s);
}

inline FilterPred parse_filter(const nlohmann::json& j) {
  FilterPred f;
  f.lhs = j.at("lhs").get<std::string>();
  f.op = parse_op(j.at("op").get<std::string>());
  const auto& rhs = j.at("rhs");
  if (rhs.is_object() && rhs.contains("const")) {
    f.is_const = true;
    const auto& c = rhs["const"];
    if (c.is_number_integer())
      f.rhs_const = Value(c.get<int64_t>());
    else if (c.is_string())
      f.rhs_const = Value(c.get<std::string>());
    else
      throw QueryError("filter constant must be integer or string");
  } else if (rhs.is_string()) {
    f.rhs_attr = rhs.get<std::string>();
  } else {
    throw QueryError("filter rhs must be an attribute name or {\"const\": ...}");
  }
  return f;
}

inline RankingFunction parse_order(const nlohmann::json& j) {
  std::string type = j.value("type", "sum");
  if (type == "sum") return RankingFunction::sum();
  if (type != "lex") throw QueryError("order type must be sum or lex");
  std::vector<LexAttr> order;
  for (const auto& a : j.at("attrs")) {
    LexAttr la;
    la.attr = a.at("attr").get<std::string>();
    std::string dir = a.value("dir", "asc");
    if (dir != "asc" && dir != "desc") throw QueryError("dir must be asc or desc");
    la.dir = dir == "asc" ? Dir::Asc : Dir::Desc;
    order.push_back(la);
  }
  return RankingFunction::lex_order(std::move(order));
}

}  // namespace detail

inline QuerySpec parse_query_json(const nlohmann::json& j) {
  QuerySpec q;
  if (j.contains("union")) {
    for (const auto& sub : j["union"]) q.branches.push_back(parse_query_json(sub));
    if (j.contains("project")) q.project = j["project"].get<std::vector<std::string>>();
    if (j.contains("order")) q.order = detail::parse_order(j["order"]);
    if (j.contains("limit")) q.limit = j["limit"].get<uint64_t>();
    return q;
  }
  if (!j.contains("relations") || !j.contains("project"))
    throw QueryError("query needs relations and project");
  for (const auto& rj : j["relations"]) {
    RelationRef r;
    r.name = rj.at("name").get<std::string>();
    r.file = rj.value("file", "");
    r.as = rj.value("as", "");
    if (rj.contains("attrs")) r.attrs = rj["attrs"].get<std::vector<std::string>>();
    if (rj.contains("filters"))
      for (const auto& fj : rj["filters"]) r.filters.push_back(detail::parse_filter(fj));
    q.relations.push_back(std::move(r));
  }
  q.project = j["project"].get<std::vector<std::string>>();
  if (q.project.empty()) throw QueryError("projection list is empty");
  if (j.contains("order")) q.order = detail::parse_order(j["order"]);
  if (j.contains("limit")) q.limit = j["limit"].get<uint64_t>();
  if (j.contains("root")) q.root = j["root"].get<std::string>();
  if (j.contains("filters"))
    for (const auto& fj : j["filters"]) q.filters.push_back(detail::parse_filter(fj));
  if (j.contains("ghd")) {
    for (const auto& bj : j["ghd"]) {
      GhdBag b;
      b.attrs = bj.at("attrs").get<std::vector<std::string>>();
      b.relations = bj.at("relations").get<std::vector<std::string>>();
      q.ghd.push_back(std::move(b));
    }
  }
  return q;
}

inline QuerySpec load_query_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw QueryError("cannot open query file: " + path);
  nlohmann::json j;
  in >> j;
  return parse_query_json(j);
}

// Loads every referenced CSV, applying alias renames. Paths resolve
// relative to `base_dir` unless absolute.
inline Database load_query_data(const QuerySpec& q, const std::string& base_dir) {
  Database db;
  if (q.is_union()) {
    for (const auto& b : q.branches) {
      Database sub = load_query_data(b, base_dir);
      for (auto& [k, v] : sub) db[k] = std::move(v);
    }
    return db;
  }
  for (const auto& ref : q.relations) {
    if (ref.file.empty())
      throw QueryError("relation " + ref.alias() + " has no file");
    std::filesystem::path p(ref.file);
    if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
    Relation base = load_relation(p.string(), ref.name);
    if (!ref.attrs.empty())
      db[ref.alias()] = rename_relation(base, ref.alias(), ref.attrs);
    else {
      base.name = ref.alias();
      db[ref.alias()] = std::move(base);
    }
  }
  return db;
}

}  // namespace rankenum
