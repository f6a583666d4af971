#pragma once

// Command-line front end. Depends on CLI11.hpp (vendored), so only the tool
// target includes this header.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "rankenum/engine.hpp"
#include "rankenum/oracle.hpp"
#include "rankenum/profile.hpp"
#include "rankenum/synthetic.hpp"

namespace rankenum::cli {

namespace detail {

inline std::string format_rank(double r) {
  if (std::isfinite(r) && r == std::floor(r) && std::abs(r) < 9.0e15) {
    return std::to_string(static_cast<int64_t>(r));
  }
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", r);
  return buf;
}

inline void print_header_csv(std::ostream& out, const std::vector<std::string>& attrs) {
  for (const auto& a : attrs) out << a << ",";
  out << "rank\n";
}

inline void print_row_csv(std::ostream& out, const OutputTuple& o) {
  for (const Value& v : o.values) out << v.to_string() << ",";
  out << format_rank(o.rank) << "\n";
}

inline void print_row_jsonl(std::ostream& out, const std::vector<std::string>& attrs,
                            const OutputTuple& o) {
  nlohmann::json j;
  for (size_t i = 0; i < attrs.size(); ++i) {
    if (o.values[i].is_int())
      j[attrs[i]] = o.values[i].as_int();
    else
      j[attrs[i]] = o.values[i].as_str();
  }
  j["rank"] = o.rank;
  out << j.dump() << "\n";
}

struct QueryArgs {
  std::string query_file;
  std::string data_dir;
  std::string weights_file;
  std::string mode = "auto";
  double epsilon = 0.0;
  int64_t limit = -1;
  std::string format = "csv";
  bool stats = false;
};

inline void add_query_options(CLI::App* cmd, QueryArgs& a, bool with_engine_opts,
                              bool allow_oracle_mode = false) {
  cmd->add_option("query", a.query_file, "query JSON file")->required();
  cmd->add_option("--data-dir", a.data_dir,
                  "directory CSV paths resolve against (default: query file's)");
  cmd->add_option("--weights", a.weights_file, "attribute,value,weight CSV");
  cmd->add_option("--limit", a.limit, "stop after this many answers");
  cmd->add_option("--format", a.format, "csv or jsonl")
      ->check(CLI::IsMember({"csv", "jsonl"}));
  cmd->add_flag("--stats", a.stats, "print counters to stderr when done");
  if (with_engine_opts) {
    std::vector<std::string> modes{"auto", "acyclic", "lexi", "star", "baseline"};
    if (allow_oracle_mode) modes.push_back("oracle");
    cmd->add_option("--mode", a.mode, "engine selection")
        ->check(CLI::IsMember(modes));
    cmd->add_option("--epsilon", a.epsilon,
                    "star heavy/light tradeoff in [0,1]; 0 materializes least")
        ->check(CLI::Range(0.0, 1.0));
  }
}

struct LoadedQuery {
  QuerySpec spec;
  Database db;
  WeightMap wm;
};

inline LoadedQuery load(const QueryArgs& a) {
  LoadedQuery lq;
  lq.spec = load_query_file(a.query_file);
  std::string dir = a.data_dir;
  if (dir.empty()) {
    auto p = std::filesystem::path(a.query_file).parent_path();
    dir = p.empty() ? "." : p.string();
  }
  lq.db = load_query_data(lq.spec, dir);
  if (!a.weights_file.empty()) load_weights(a.weights_file, lq.wm);
  if (a.limit >= 0) lq.spec.limit = static_cast<uint64_t>(a.limit);
  return lq;
}

inline void print_stats(const std::string& engine, uint64_t answers,
                        const OpCounters& c) {
  std::cerr << "engine=" << engine << " answers=" << answers
            << " pq_push=" << c.pq_push << " pq_pop=" << c.pq_pop
            << " topdown=" << c.topdown_calls
            << " nontrivial_topdown=" << c.nontrivial_topdown
            << " cells=" << c.cells_created
            << " elementary=" << c.elementary_ops
            << " internal_emissions=" << c.internal_emissions << "\n";
}

// engine answers vs oracle answers, exact values and near-exact ranks
inline bool outputs_match(const OutputTuple& a, const OutputTuple& b) {
  if (a.values != b.values) return false;
  double tol = 1e-9 * std::max(1.0, std::max(std::abs(a.rank), std::abs(b.rank)));
  return std::abs(a.rank - b.rank) <= tol;
}

inline std::vector<OutputTuple> run_oracle(const LoadedQuery& lq) {
  const QuerySpec& q = lq.spec;
  auto resolve_branch = [&](const QuerySpec& b) {
    std::vector<Relation> rels;
    for (const auto& ref : b.relations) {
      Relation r = lq.db.at(ref.alias());
      rankenum::detail::apply_filters(r, ref.filters);
      rels.push_back(std::move(r));
    }
    return rels;
  };
  if (q.is_union()) {
    std::vector<std::vector<Relation>> branch_rels;
    std::vector<std::vector<FilterPred>> branch_filters;
    for (const auto& b : q.branches) {
      branch_rels.push_back(resolve_branch(b));
      branch_filters.push_back(b.filters);
    }
    const auto& project =
        q.project.empty() ? q.branches.front().project : q.project;
    const auto& order = q.branches.front().order;
    return oracle_enumerate_union(branch_rels, branch_filters, project, order, lq.wm);
  }
  return oracle_enumerate(resolve_branch(q), q.project, q.order, lq.wm, q.filters);
}

inline int cmd_run(const QueryArgs& a) {
  LoadedQuery lq = load(a);
  PlanOptions opt;
  opt.mode = a.mode;
  opt.epsilon = a.epsilon;
  PlanInfo info;
  auto stream = plan_query(lq.spec, lq.db, lq.wm, opt, &info);
  uint64_t n = 0;
  if (a.format == "csv") print_header_csv(std::cout, stream->output_attrs());
  while (!lq.spec.limit || n < *lq.spec.limit) {
    auto o = stream->next();
    if (!o) break;
    if (a.format == "csv")
      print_row_csv(std::cout, *o);
    else
      print_row_jsonl(std::cout, stream->output_attrs(), *o);
    ++n;
  }
  if (a.stats) print_stats(info.engine, n, stream->counters());
  return 0;
}

inline int cmd_oracle(const QueryArgs& a) {
  LoadedQuery lq = load(a);
  auto rows = run_oracle(lq);
  uint64_t max_n = lq.spec.limit ? *lq.spec.limit : rows.size();
  const auto& project = lq.spec.is_union() && lq.spec.project.empty()
                            ? lq.spec.branches.front().project
                            : lq.spec.project;
  if (a.format == "csv") print_header_csv(std::cout, project);
  uint64_t n = 0;
  for (const auto& o : rows) {
    if (n >= max_n) break;
    if (a.format == "csv")
      print_row_csv(std::cout, o);
    else
      print_row_jsonl(std::cout, project, o);
    ++n;
  }
  if (a.stats) print_stats("oracle", n, OpCounters{});
  return 0;
}

inline int cmd_validate(const QueryArgs& a) {
  LoadedQuery lq = load(a);
  PlanOptions opt;
  opt.mode = a.mode;
  opt.epsilon = a.epsilon;
  auto stream = plan_query(lq.spec, lq.db, lq.wm, opt);
  auto expected = run_oracle(lq);
  uint64_t max_n = lq.spec.limit ? *lq.spec.limit : expected.size();
  uint64_t n = 0;
  while (n < max_n) {
    auto o = stream->next();
    if (!o) {
      if (n == expected.size()) break;
      std::cout << "MISMATCH at row " << n << ": engine exhausted, oracle has "
                << expected.size() << " rows\n";
      return 2;
    }
    if (n >= expected.size()) {
      std::cout << "MISMATCH at row " << n << ": oracle exhausted, engine continues\n";
      return 2;
    }
    if (!outputs_match(*o, expected[n])) {
      std::cout << "MISMATCH at row " << n << ": engine=(";
      for (size_t i = 0; i < o->values.size(); ++i)
        std::cout << (i ? "," : "") << o->values[i].to_string();
      std::cout << ") rank=" << format_rank(o->rank) << " oracle=(";
      for (size_t i = 0; i < expected[n].values.size(); ++i)
        std::cout << (i ? "," : "") << expected[n].values[i].to_string();
      std::cout << ") rank=" << format_rank(expected[n].rank) << "\n";
      return 2;
    }
    ++n;
  }
  if (!lq.spec.limit) {
    auto extra = stream->next();
    if (extra) {
      std::cout << "MISMATCH at row " << n << ": oracle exhausted, engine continues\n";
      return 2;
    }
  }
  std::cout << "MATCH (" << n << " rows)\n";
  return 0;
}

inline int cmd_profile(const QueryArgs& a) {
  LoadedQuery lq = load(a);
  PlanOptions opt;
  opt.mode = a.mode;
  opt.epsilon = a.epsilon;
  PlanInfo info;
  auto stream = plan_query(lq.spec, lq.db, lq.wm, opt, &info);
  std::optional<uint64_t> limit = lq.spec.limit;
  DelayProfile p = profile_delay(*stream, limit, true);
  std::map<uint64_t, uint64_t> hist;
  for (const auto& s : p.samples) hist[s.pq_ops]++;
  std::cout << "pq_ops,answers\n";
  for (const auto& [ops, count] : hist) std::cout << ops << "," << count << "\n";
  if (a.stats) {
    std::cerr << "engine=" << info.engine << " answers=" << p.answers
              << " total_ms=" << p.total_ns / 1e6 << " mean_ns=" << p.mean_ns
              << " p50_ns=" << p.p50_ns << " p95_ns=" << p.p95_ns
              << " max_ns=" << p.max_ns << " max_pq_ops=" << p.max_pq_ops
              << " mean_pq_ops=" << p.mean_pq_ops << "\n";
  }
  return 0;
}

inline int cmd_bench(const QueryArgs& a) {
  using clock = std::chrono::steady_clock;
  LoadedQuery lq = load(a);
  std::string qid = std::filesystem::path(a.query_file).stem().string();
  std::cout << "query,mode,k,answers,wall_ms,peak_live_cells,pq_push,pq_pop,"
               "topdown_calls,nontrivial_topdown,elementary_ops,internal_emissions\n";
  uint64_t answers = 0;
  OpCounters c;
  std::string mode_label = a.mode;
  auto t0 = clock::now();
  if (a.mode == "oracle") {
    auto rows = run_oracle(lq);
    answers = lq.spec.limit ? std::min<uint64_t>(*lq.spec.limit, rows.size())
                            : rows.size();
  } else {
    PlanOptions opt;
    opt.mode = a.mode;
    opt.epsilon = a.epsilon;
    PlanInfo info;
    auto stream = plan_query(lq.spec, lq.db, lq.wm, opt, &info);
    while (!lq.spec.limit || answers < *lq.spec.limit) {
      auto o = stream->next();
      if (!o) break;
      ++answers;
    }
    c = stream->counters();
    mode_label = info.engine;
    if (info.engine == "star") mode_label += " " + std::to_string(a.epsilon);
  }
  auto t1 = clock::now();
  double ms = std::chrono::duration_cast<std::chrono::microseconds>(t1 - t0).count() / 1000.0;
  std::cout << qid << "," << mode_label << ","
            << (lq.spec.limit ? std::to_string(*lq.spec.limit) : std::string("all"))
            << "," << answers << "," << ms << "," << c.cells_created << ","
            << c.pq_push << "," << c.pq_pop << "," << c.topdown_calls << ","
            << c.nontrivial_topdown << "," << c.elementary_ops << ","
            << c.internal_emissions << "\n";
  return 0;
}

struct GenArgs {
  std::string kind = "path";
  int64_t k = 2;
  int64_t n = 100;
  int64_t domain = 50;
  std::string dist = "uniform";
  double zipf_s = 1.2;
  uint64_t seed = 42;
  std::string out = ".";
};

inline int cmd_gen(const GenArgs& g) {
  uint64_t seed = effective_seed(g.seed);
  Dist dist = g.dist == "zipf" ? Dist::Zipf : Dist::Uniform;
  std::vector<Relation> rels;
  if (g.kind == "path") {
    rels = gen_path(g.k, g.n, g.domain, dist, g.zipf_s, seed);
  } else if (g.kind == "star") {
    rels = gen_star(g.k, g.n, g.domain, dist, g.zipf_s, seed);
  } else if (g.kind == "bipartite") {
    rels.push_back(gen_bipartite(g.n));
  } else if (g.kind == "adversarial") {
    rels = adversarial_star_instance(g.n, g.k);
  } else {
    throw QueryError("unknown kind: " + g.kind);
  }
  std::filesystem::create_directories(g.out);
  for (const auto& r : rels) {
    std::string path = (std::filesystem::path(g.out) / (r.name + ".csv")).string();
    save_relation(path, r);
    std::cout << path << " (" << r.size() << " rows)\n";
  }
  return 0;
}

}  // namespace detail

inline int run_main(int argc, char** argv) {
  CLI::App app{"ranked enumeration over join-project queries"};
  app.require_subcommand(1);

  detail::QueryArgs run_args, oracle_args, validate_args, profile_args, bench_args;
  detail::GenArgs gen_args;

  auto* run_cmd = app.add_subcommand("run", "enumerate answers in ranking order");
  detail::add_query_options(run_cmd, run_args, true);
  auto* oracle_cmd =
      app.add_subcommand("oracle", "brute-force reference enumeration");
  detail::add_query_options(oracle_cmd, oracle_args, false);
  auto* validate_cmd =
      app.add_subcommand("validate", "compare engine against the oracle");
  detail::add_query_options(validate_cmd, validate_args, true);
  auto* profile_cmd =
      app.add_subcommand("profile", "per-answer cost histogram");
  detail::add_query_options(profile_cmd, profile_args, true);
  auto* bench_cmd = app.add_subcommand("bench", "timed drain, one report row");
  detail::add_query_options(bench_cmd, bench_args, true, true);

  auto* gen_cmd = app.add_subcommand("gen", "write synthetic instances as CSV");
  gen_cmd->add_option("--kind", gen_args.kind, "path, star, bipartite, or adversarial")
      ->check(CLI::IsMember({"path", "star", "bipartite", "adversarial"}));
  gen_cmd->add_option("--relations", gen_args.k, "relation count (path/star/adversarial)");
  gen_cmd->add_option("--tuples", gen_args.n,
                      "tuples per relation (bipartite/adversarial: per-side values)");
  gen_cmd->add_option("--domain", gen_args.domain, "values are drawn from 1..domain");
  gen_cmd->add_option("--dist", gen_args.dist, "uniform or zipf")
      ->check(CLI::IsMember({"uniform", "zipf"}));
  gen_cmd->add_option("--zipf-s", gen_args.zipf_s, "zipf exponent");
  gen_cmd->add_option("--seed", gen_args.seed, "rng seed (RANKENUM_SEED overrides)");
  gen_cmd->add_option("--out", gen_args.out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (*run_cmd) return detail::cmd_run(run_args);
    if (*oracle_cmd) return detail::cmd_oracle(oracle_args);
    if (*validate_cmd) return detail::cmd_validate(validate_args);
    if (*profile_cmd) return detail::cmd_profile(profile_args);
    if (*bench_cmd) return detail::cmd_bench(bench_args);
    if (*gen_cmd) return detail::cmd_gen(gen_args);
  } catch (const std::logic_error& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace rankenum::cli
