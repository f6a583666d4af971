// Builds a four-relation path instance in memory, runs the ranked
// enumeration engine, and prints every answer with its rank.

#include <iostream>

#include "rankenum/rankenum.hpp"

using namespace rankenum;

int main() {
  Relation r1{"R1", {"A", "B"}, {{Value(1), Value(1)},
                                 {Value(2), Value(1)},
                                 {Value(1), Value(2)},
                                 {Value(3), Value(2)}}};
  Relation r2{"R2", {"B", "C"}, {{Value(1), Value(1)}, {Value(2), Value(1)}}};
  Relation r3{"R3", {"C", "D"}, {{Value(1), Value(1)}, {Value(1), Value(2)}}};
  Relation r4{"R4", {"D", "E"}, {{Value(1), Value(1)}, {Value(1), Value(2)}}};

  QuerySpec q;
  for (const auto& r : {r1, r2, r3, r4}) {
    RelationRef ref;
    ref.name = r.name;
    ref.attrs = r.attrs;
    q.relations.push_back(ref);
  }
  q.project = {"A", "E"};
  q.order = RankingFunction::sum();

  Database db{{"R1", r1}, {"R2", r2}, {"R3", r3}, {"R4", r4}};
  WeightMap wm;
  auto stream = plan_query(q, db, wm);

  std::cout << "A,E,rank\n";
  while (auto o = stream->next()) {
    std::cout << o->values[0].to_string() << "," << o->values[1].to_string()
              << "," << o->rank << "\n";
  }
  const OpCounters& c = stream->counters();
  std::cout << "pq ops: " << c.pq_ops() << ", cells: " << c.cells_created << "\n";
  return 0;
}
