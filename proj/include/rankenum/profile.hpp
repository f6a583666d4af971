#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <optional>
#include <vector>

#include "rankenum/core.hpp"

namespace rankenum {

// Per-answer cost observation: wall time plus counter deltas since the
// previous answer. The first sample covers the gap from stream creation, so
// preprocessing shows up there unless the caller snapshots separately.

struct DelaySample {
  uint64_t ns = 0;
  uint64_t pq_ops = 0;
  uint64_t nontrivial = 0;
  uint64_t elementary = 0;
};

struct DelayProfile {
  uint64_t answers = 0;
  uint64_t total_ns = 0;
  uint64_t max_ns = 0;
  uint64_t p50_ns = 0;
  uint64_t p95_ns = 0;
  double mean_ns = 0.0;
  uint64_t max_pq_ops = 0;
  double mean_pq_ops = 0.0;
  uint64_t max_nontrivial = 0;
  std::vector<DelaySample> samples;  // filled only when keep_samples
};

inline DelayProfile profile_delay(OutputStream& s,
                                  std::optional<uint64_t> limit = std::nullopt,
                                  bool keep_samples = false) {
  using clock = std::chrono::steady_clock;
  DelayProfile p;
  std::vector<uint64_t> ns;
  std::vector<uint64_t> pq;
  OpCounters prev = s.counters();
  auto t0 = clock::now();
  while (!limit || p.answers < *limit) {
    auto before = clock::now();
    auto n = s.next();
    auto after = clock::now();
    if (!n) break;
    const OpCounters& now = s.counters();
    DelaySample d;
    d.ns = std::chrono::duration_cast<std::chrono::nanoseconds>(after - before).count();
    d.pq_ops = now.pq_ops() - prev.pq_ops();
    d.nontrivial = now.nontrivial_topdown - prev.nontrivial_topdown;
    d.elementary = now.elementary_ops - prev.elementary_ops;
    prev = now;
    p.answers++;
    ns.push_back(d.ns);
    pq.push_back(d.pq_ops);
    p.max_ns = std::max(p.max_ns, d.ns);
    p.max_pq_ops = std::max(p.max_pq_ops, d.pq_ops);
    p.max_nontrivial = std::max(p.max_nontrivial, d.nontrivial);
    if (keep_samples) p.samples.push_back(d);
  }
  auto t1 = clock::now();
  p.total_ns = std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count();
  if (p.answers > 0) {
    uint64_t sum_ns = 0, sum_pq = 0;
    for (uint64_t v : ns) sum_ns += v;
    for (uint64_t v : pq) sum_pq += v;
    p.mean_ns = static_cast<double>(sum_ns) / p.answers;
    p.mean_pq_ops = static_cast<double>(sum_pq) / p.answers;
    std::sort(ns.begin(), ns.end());
    p.p50_ns = ns[ns.size() / 2];
    p.p95_ns = ns[std::min(ns.size() - 1, (ns.size() * 95) / 100)];
  }
  return p;
}

}  // namespace rankenum
