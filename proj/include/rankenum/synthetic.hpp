#pragma once

#include <cmath>
#include <cstdlib>
#include <random>
#include <string>
#include <vector>

#include "rankenum/core.hpp"

namespace rankenum {

// Deterministic instance generators for tests and benchmarks. All randomness
// flows through one seed; RANKENUM_SEED overrides it when set.

inline uint64_t effective_seed(uint64_t requested) {
  if (const char* env = std::getenv("RANKENUM_SEED")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end && *end == '\0') return static_cast<uint64_t>(v);
  }
  return requested;
}

enum class Dist { Uniform, Zipf };

class ValueSampler {
 public:
  // domain values are 1..domain_size; zipf weight of value v is v^-s
  ValueSampler(int64_t domain_size, Dist dist, double zipf_s, std::mt19937_64& rng)
      : domain_(domain_size), dist_(dist), rng_(rng) {
    if (domain_ < 1) domain_ = 1;
    if (dist_ == Dist::Zipf) {
      cdf_.reserve(domain_);
      double acc = 0.0;
      for (int64_t v = 1; v <= domain_; ++v) {
        acc += std::pow(static_cast<double>(v), -zipf_s);
        cdf_.push_back(acc);
      }
      for (double& c : cdf_) c /= acc;
    }
  }

  int64_t draw() {
    if (dist_ == Dist::Uniform)
      return std::uniform_int_distribution<int64_t>(1, domain_)(rng_);
    double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng_);
    auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
    return 1 + static_cast<int64_t>(it - cdf_.begin());
  }

 private:
  int64_t domain_;
  Dist dist_;
  std::mt19937_64& rng_;
  std::vector<double> cdf_;
};

// n random tuples (deduped, so the result may be slightly smaller) over the
// given attribute list, every column drawn from the same sampler parameters
inline Relation gen_relation(const std::string& name,
                             const std::vector<std::string>& attrs, size_t n,
                             int64_t domain, Dist dist, double zipf_s,
                             std::mt19937_64& rng) {
  Relation r;
  r.name = name;
  r.attrs = attrs;
  ValueSampler sampler(domain, dist, zipf_s, rng);
  r.tuples.reserve(n);
  for (size_t i = 0; i < n; ++i) {
    Tuple t;
    t.reserve(attrs.size());
    for (size_t c = 0; c < attrs.size(); ++c) t.push_back(Value(sampler.draw()));
    r.tuples.push_back(std::move(t));
  }
  r.dedupe();
  return r;
}

// path of k binary relations R1(A1,A2), ..., Rk(Ak,Ak+1)
inline std::vector<Relation> gen_path(size_t k, size_t n_per_rel, int64_t domain,
                                      Dist dist, double zipf_s, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Relation> rels;
  for (size_t i = 1; i <= k; ++i) {
    std::string a = "A" + std::to_string(i);
    std::string b = "A" + std::to_string(i + 1);
    rels.push_back(gen_relation("R" + std::to_string(i), {a, b}, n_per_rel, domain,
                                dist, zipf_s, rng));
  }
  return rels;
}

// star of m binary relations R1(A1,B), ..., Rm(Am,B)
inline std::vector<Relation> gen_star(size_t m, size_t n_per_rel, int64_t domain,
                                      Dist dist, double zipf_s, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Relation> rels;
  for (size_t i = 1; i <= m; ++i) {
    std::string a = "A" + std::to_string(i);
    rels.push_back(gen_relation("R" + std::to_string(i), {a, "B"}, n_per_rel,
                                domain, dist, zipf_s, rng));
  }
  return rels;
}

// complete bipartite relation: every pair over 1..n on both columns
inline Relation gen_bipartite(int64_t n, const std::string& name = "R1",
                              const std::vector<std::string>& attrs = {"A", "B"}) {
  Relation r;
  r.name = name;
  r.attrs = attrs;
  r.tuples.reserve(static_cast<size_t>(n) * n);
  for (int64_t a = 1; a <= n; ++a)
    for (int64_t b = 1; b <= n; ++b) r.tuples.push_back({Value(a), Value(b)});
  return r;
}

// Worst case for the full-query baseline: ell relations Ri(Xi, Y) sharing a
// single Y value, N distinct Xi values each. The smallest projected answer
// has N^(ell-1) witnesses, so the baseline consumes that many full answers
// between consecutive outputs while the reduced instance stays tiny.
inline std::vector<Relation> adversarial_star_instance(int64_t n, size_t ell) {
  std::vector<Relation> rels;
  for (size_t i = 1; i <= ell; ++i) {
    Relation r;
    r.name = "R" + std::to_string(i);
    r.attrs = {"X" + std::to_string(i), "Y"};
    for (int64_t x = 1; x <= n; ++x) r.tuples.push_back({Value(x), Value(1)});
    rels.push_back(std::move(r));
  }
  return rels;
}

}  // namespace rankenum
