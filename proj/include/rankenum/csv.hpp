#pragma once

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "rankenum/core.hpp"

namespace rankenum {

struct LoadError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

inline bool parse_int(const std::string& s, int64_t& out) {
  if (s.empty()) return false;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [p, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && p == last;
}

}  // namespace detail

// Loads a relation from a headered CSV. Column types are inferred from the
// first data row: a column that starts integral must stay integral.
// Duplicate rows are dropped (set semantics).
inline Relation load_relation(const std::string& path, const std::string& name,
                              const std::vector<std::string>& schema = {}) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open relation file: " + path);

  std::string line;
  if (!std::getline(in, line)) throw LoadError("empty relation file: " + path);
  Relation r;
  r.name = name;
  r.attrs = detail::split_csv_line(line);
  if (!schema.empty() && r.attrs != schema) {
    std::ostringstream msg;
    msg << path << ": header does not match expected schema for " << name;
    throw LoadError(msg.str());
  }

  std::vector<int> kinds(r.attrs.size(), -1);  // -1 unset, 0 int, 1 str
  size_t row_no = 1;
  while (std::getline(in, line)) {
    ++row_no;
    if (line.empty()) continue;
    auto fields = detail::split_csv_line(line);
    if (fields.size() != r.attrs.size()) {
      std::ostringstream msg;
      msg << path << ": row " << row_no << " has " << fields.size()
          << " fields, expected " << r.attrs.size();
      throw LoadError(msg.str());
    }
    Tuple t;
    t.reserve(fields.size());
    for (size_t i = 0; i < fields.size(); ++i) {
      int64_t v;
      bool is_int = detail::parse_int(fields[i], v);
      if (kinds[i] < 0) kinds[i] = is_int ? 0 : 1;
      if (kinds[i] == 0 && !is_int) {
        std::ostringstream msg;
        msg << path << ": row " << row_no << " column " << r.attrs[i]
            << " is not integral in an integer column";
        throw LoadError(msg.str());
      }
      t.push_back(kinds[i] == 0 ? Value(v) : Value(fields[i]));
    }
    r.tuples.push_back(std::move(t));
  }
  r.dedupe();
  return r;
}

// Writes a relation back out in the load_relation format: header row of
// attribute names, one row per tuple, values verbatim.
inline void save_relation(const std::string& path, const Relation& r) {
  std::ofstream out(path);
  if (!out) throw LoadError("cannot write relation file: " + path);
  for (size_t i = 0; i < r.attrs.size(); ++i)
    out << (i ? "," : "") << r.attrs[i];
  out << "\n";
  for (const Tuple& t : r.tuples) {
    for (size_t i = 0; i < t.size(); ++i)
      out << (i ? "," : "") << t[i].to_string();
    out << "\n";
  }
}

// Weight CSV: header `attribute,value,weight`. The value field may be
// double-quoted to force string typing.
inline void load_weights(const std::string& path, WeightMap& wm) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open weight file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw LoadError("empty weight file: " + path);
  auto header = detail::split_csv_line(line);
  if (header.size() != 3 || header[0] != "attribute" || header[1] != "value" ||
      header[2] != "weight")
    throw LoadError(path + ": weight header must be attribute,value,weight");

  size_t row_no = 1;
  while (std::getline(in, line)) {
    ++row_no;
    if (line.empty()) continue;
    auto fields = detail::split_csv_line(line);
    if (fields.size() != 3) {
      std::ostringstream msg;
      msg << path << ": weight row " << row_no << " malformed";
      throw LoadError(msg.str());
    }
    Value v;
    std::string& raw = fields[1];
    if (raw.size() >= 2 && raw.front() == '"' && raw.back() == '"') {
      v = Value(raw.substr(1, raw.size() - 2));
    } else {
      int64_t iv;
      v = detail::parse_int(raw, iv) ? Value(iv) : Value(raw);
    }
    try {
      wm.set(fields[0], v, std::stod(fields[2]));
    } catch (const std::exception&) {
      std::ostringstream msg;
      msg << path << ": weight row " << row_no << " has non-numeric weight";
      throw LoadError(msg.str());
    }
  }
}

}  // namespace rankenum
