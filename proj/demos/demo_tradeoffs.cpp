// Generates a skewed star instance and contrasts the heavy/light engine at
// several epsilon settings against the plain tree engine: same output,
// different preprocessing space and per-answer cost.

#include <iostream>

#include "rankenum/rankenum.hpp"

using namespace rankenum;

int main() {
  auto rels = gen_star(2, 2000, 300, Dist::Zipf, 1.2, 7);
  std::vector<std::string> project{"A1", "A2"};
  RankingFunction rf = RankingFunction::sum();
  WeightMap wm;

  std::cout << "epsilon,delta,heavy_answers,answers,pq_ops_per_answer\n";
  for (double eps : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    StarStream s(rels, project, rf, wm, StarConfig{eps});
    OpCounters pre = s.counters();
    uint64_t answers = 0;
    while (s.next()) ++answers;
    const OpCounters& post = s.counters();
    double per = answers ? double(post.pq_ops() - pre.pq_ops()) / answers : 0.0;
    std::cout << eps << "," << s.delta() << "," << s.heavy_output_size() << ","
              << answers << "," << per << "\n";
  }
  return 0;
}
