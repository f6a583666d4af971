#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace rankenum {

// Column values are int64 or string. Cross-kind comparisons order ints
// before strings so the value order is total even on mixed data.
class Value {
 public:
  Value() : kind_(Kind::Int), int_(0) {}
  explicit Value(int64_t v) : kind_(Kind::Int), int_(v) {}
  explicit Value(std::string v) : kind_(Kind::Str), int_(0), str_(std::move(v)) {}

  enum class Kind : uint8_t { Int, Str };

  Kind kind() const { return kind_; }
  bool is_int() const { return kind_ == Kind::Int; }
  int64_t as_int() const { return int_; }
  const std::string& as_str() const { return str_; }

  friend bool operator==(const Value& a, const Value& b) {
    if (a.kind_ != b.kind_) return false;
    return a.kind_ == Kind::Int ? a.int_ == b.int_ : a.str_ == b.str_;
  }
  friend bool operator!=(const Value& a, const Value& b) { return !(a == b); }

  std::string to_string() const {
    return kind_ == Kind::Int ? std::to_string(int_) : str_;
  }

 private:
  Kind kind_;
  int64_t int_;
  std::string str_;
};

inline int compare_values(const Value& a, const Value& b) {
  if (a.kind() != b.kind()) return a.is_int() ? -1 : 1;
  if (a.is_int()) {
    if (a.as_int() < b.as_int()) return -1;
    return a.as_int() == b.as_int() ? 0 : 1;
  }
  int c = a.as_str().compare(b.as_str());
  return c < 0 ? -1 : (c == 0 ? 0 : 1);
}

struct ValueHash {
  size_t operator()(const Value& v) const {
    size_t h = v.is_int() ? std::hash<int64_t>()(v.as_int())
                          : std::hash<std::string>()(v.as_str());
    return h ^ (static_cast<size_t>(v.kind()) << 1);
  }
};

using Tuple = std::vector<Value>;

struct TupleHash {
  size_t operator()(const Tuple& t) const {
    size_t h = 0x9e3779b97f4a7c15ull;
    ValueHash vh;
    for (const Value& v : t) h = h * 1099511628211ull + vh(v);
    return h;
  }
};

inline int compare_tuples(const Tuple& a, const Tuple& b) {
  size_t n = std::min(a.size(), b.size());
  for (size_t i = 0; i < n; ++i) {
    int c = compare_values(a[i], b[i]);
    if (c != 0) return c;
  }
  return a.size() == b.size() ? 0 : (a.size() < b.size() ? -1 : 1);
}

// A relation under set semantics: named attributes, distinct rows.
struct Relation {
  std::string name;
  std::vector<std::string> attrs;
  std::vector<Tuple> tuples;

  int col(const std::string& attr) const {
    for (size_t i = 0; i < attrs.size(); ++i)
      if (attrs[i] == attr) return static_cast<int>(i);
    return -1;
  }
  bool has_attr(const std::string& attr) const { return col(attr) >= 0; }
  size_t size() const { return tuples.size(); }

  // Drops duplicate rows, keeping first occurrence order.
  void dedupe() {
    std::unordered_set<Tuple, TupleHash> seen;
    std::vector<Tuple> out;
    out.reserve(tuples.size());
    for (auto& t : tuples)
      if (seen.insert(t).second) out.push_back(std::move(t));
    tuples = std::move(out);
  }
};

inline Relation rename_relation(const Relation& base, std::string new_name,
                                std::vector<std::string> new_attrs) {
  if (new_attrs.size() != base.attrs.size())
    throw std::invalid_argument("rename: attribute count mismatch for " + new_name);
  Relation r;
  r.name = std::move(new_name);
  r.attrs = std::move(new_attrs);
  r.tuples = base.tuples;
  return r;
}

using Database = std::unordered_map<std::string, Relation>;

// Per-attribute value weights. Unlisted integer values weigh themselves,
// unlisted strings weigh zero.
class WeightMap {
 public:
  void set(const std::string& attr, const Value& v, double w) {
    explicit_[attr][v] = w;
  }
  double weight(const std::string& attr, const Value& v) const {
    auto it = explicit_.find(attr);
    if (it != explicit_.end()) {
      auto jt = it->second.find(v);
      if (jt != it->second.end()) return jt->second;
    }
    return v.is_int() ? static_cast<double>(v.as_int()) : 0.0;
  }
  // Forces a whole attribute to weight zero regardless of value.
  void zero_attr(const std::string& attr) { zeroed_.insert(attr); }
  bool attr_zeroed(const std::string& attr) const { return zeroed_.count(attr) > 0; }
  double resolve(const std::string& attr, const Value& v) const {
    if (zeroed_.count(attr)) return 0.0;
    return weight(attr, v);
  }

 private:
  std::unordered_map<std::string, std::unordered_map<Value, double, ValueHash>> explicit_;
  std::unordered_set<std::string> zeroed_;
};

enum class FilterOp : uint8_t { Eq, Ne, Lt, Le, Gt, Ge };

// attr-vs-attr or attr-vs-constant predicate.
struct FilterPred {
  std::string lhs;
  FilterOp op = FilterOp::Eq;
  std::string rhs_attr;  // used when !is_const
  Value rhs_const;       // used when is_const
  bool is_const = false;

  std::vector<std::string> attrs() const {
    if (is_const) return {lhs};
    return {lhs, rhs_attr};
  }

  bool eval(const Value& a, const Value& b) const {
    int c = compare_values(a, b);
    switch (op) {
      case FilterOp::Eq: return c == 0;
      case FilterOp::Ne: return c != 0;
      case FilterOp::Lt: return c < 0;
      case FilterOp::Le: return c <= 0;
      case FilterOp::Gt: return c > 0;
      case FilterOp::Ge: return c >= 0;
    }
    return false;
  }
};

enum class Dir : uint8_t { Asc, Desc };

struct LexAttr {
  std::string attr;
  Dir dir = Dir::Asc;
};

// SUM orders by total attribute weight; LEX orders attribute-by-attribute.
struct RankingFunction {
  enum class Kind : uint8_t { Sum, Lex } kind = Kind::Sum;
  std::vector<LexAttr> lex;  // permutation of the projection list when Kind::Lex

  static RankingFunction sum() { return RankingFunction{}; }
  static RankingFunction lex_order(std::vector<LexAttr> order) {
    RankingFunction rf;
    rf.kind = Kind::Lex;
    rf.lex = std::move(order);
    return rf;
  }
};

struct OutputTuple {
  Tuple values;  // over the projection list, in its order
  double rank = 0.0;
};

inline double sum_rank(const Tuple& t, const std::vector<std::string>& attrs,
                       const WeightMap& wm) {
  double r = 0.0;
  for (size_t i = 0; i < attrs.size(); ++i) r += wm.resolve(attrs[i], t[i]);
  return r;
}

// The single comparator both the engines and the oracle order answers by.
// Tuples must share the projection attribute list `attrs`.
// SUM: by total weight, ties by value order along `attrs`.
// LEX: along rf.lex honoring per-attribute direction.
inline int compare_outputs(const Tuple& a, const Tuple& b,
                           const std::vector<std::string>& attrs,
                           const RankingFunction& rf, const WeightMap& wm) {
  if (rf.kind == RankingFunction::Kind::Sum) {
    double ra = sum_rank(a, attrs, wm);
    double rb = sum_rank(b, attrs, wm);
    if (ra < rb) return -1;
    if (ra > rb) return 1;
    return compare_tuples(a, b);
  }
  for (const LexAttr& la : rf.lex) {
    int pos = -1;
    for (size_t i = 0; i < attrs.size(); ++i)
      if (attrs[i] == la.attr) { pos = static_cast<int>(i); break; }
    if (pos < 0) throw std::invalid_argument("lex attr not projected: " + la.attr);
    int c = compare_values(a[pos], b[pos]);
    if (c != 0) return la.dir == Dir::Asc ? c : -c;
  }
  return 0;
}

// Counters every stream exposes; asserted against the delay bounds in tests.
struct OpCounters {
  uint64_t pq_push = 0;
  uint64_t pq_pop = 0;
  uint64_t topdown_calls = 0;
  uint64_t nontrivial_topdown = 0;
  uint64_t cells_created = 0;
  uint64_t elementary_ops = 0;
  uint64_t internal_emissions = 0;

  uint64_t pq_ops() const { return pq_push + pq_pop; }
};

// Pull-based answer stream in ranking order, no duplicates.
class OutputStream {
 public:
  virtual ~OutputStream() = default;
  virtual std::optional<OutputTuple> next() = 0;
  virtual const OpCounters& counters() const = 0;
  virtual const std::vector<std::string>& output_attrs() const = 0;
};

}  // namespace rankenum
