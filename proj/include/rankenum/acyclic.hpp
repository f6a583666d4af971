#pragma once

#include <cassert>
#include <string>
#include <unordered_map>
#include <vector>

#include "rankenum/core.hpp"
#include "rankenum/join_tree.hpp"
#include "rankenum/reduce.hpp"

namespace rankenum {

// Ranked enumeration over an acyclic join with projection.
//
// Every node keeps one priority queue per anchor value, holding cells. A cell
// is (tuple, one child-cell ref per child, next). output(cell) is the partial
// answer over the node's subtree projection attrs, read off by following the
// child refs. Queues order cells by (partial rank, value order); equal partial
// answers are popped together so each queue yields a duplicate-free ranked
// sequence, and `next` memoizes the hand-off to the following distinct answer
// so later visitors skip the popping entirely.

struct AcyclicOptions {
  bool memoize_outputs = false;  // cache reconstructed partials per cell
};

class AcyclicStream final : public OutputStream {
 public:
  AcyclicStream(const JoinTree& jt, const ReducedInstance& inst,
                RankingFunction rf, WeightMap wm, AcyclicOptions opt = {})
      : tree_(jt), inst_(inst), rf_(std::move(rf)), wm_(std::move(wm)), opt_(opt) {
    build_node_contexts();
    preprocess();
  }

  const std::vector<std::string>& output_attrs() const override { return tree_.project; }
  const OpCounters& counters() const override { return counters_; }

  std::optional<OutputTuple> next() override {
    auto* q = root_queue();
    while (q && !q->empty()) {
      uint32_t o = q->front();
      Tuple out = reconstruct(tree_.root, o);
      bool fresh = !has_last_ || out != last_;
      topdown(o, tree_.root);
      if (fresh) {
        has_last_ = true;
        last_ = out;
        double rank = sum_rank(out, tree_.project, wm_);
        return OutputTuple{std::move(out), rank};
      }
    }
    return std::nullopt;
  }

  // --- introspection (used by the test suite) ---

  size_t queue_size(int node, const Tuple& anchor) const {
    auto it = queues_[node].find(anchor);
    return it == queues_[node].end() ? 0 : it->second.size();
  }

  std::vector<Tuple> queue_outputs(int node, const Tuple& anchor) const {
    std::vector<Tuple> out;
    auto it = queues_[node].find(anchor);
    if (it == queues_[node].end()) return out;
    for (uint32_t c : it->second) out.push_back(reconstruct(node, c));
    return out;
  }

  uint64_t cells_live() const {
    uint64_t n = 0;
    for (const auto& a : arenas_) n += a.rank.size();
    return n;
  }

  int64_t cell_next(int node, uint32_t cell) const { return arenas_[node].next[cell]; }

  // Partial answer of a cell over the node's subtree projection attrs,
  // in projection-list order.
  Tuple reconstruct(int node, uint32_t cell) const {
    const NodeCtx& ctx = ctxs_[node];
    if (opt_.memoize_outputs) return arenas_[node].outputs[cell];
    Tuple out;
    out.reserve(ctx.recon_slots.size());
    for (const Slot& s : ctx.recon_slots) out.push_back(resolve(node, cell, s));
    return out;
  }

 private:
  static constexpr int64_t kUnset = -1;
  static constexpr int64_t kNone = -2;

  struct Slot {
    std::vector<int> chain;  // child positions to descend through
    int col = 0;             // column in the final node's relation
    Dir dir = Dir::Asc;
  };

  struct NodeCtx {
    std::vector<int> anchor_cols;                // in this node's relation
    std::vector<std::vector<int>> child_anchor_cols;  // per child, in this relation
    std::vector<int> scored_cols;                // attrs scored at this node
    std::vector<std::string> scored_attrs;
    std::vector<Slot> cmp_slots;    // comparison order (rank ties / lex)
    std::vector<Slot> recon_slots;  // projection-list order
  };

  struct Arena {
    std::vector<double> rank;
    std::vector<uint32_t> tuple;
    std::vector<int64_t> next;
    std::vector<uint32_t> childrefs;  // stride = #children
    std::vector<Tuple> outputs;       // only with memoize_outputs
    size_t stride = 0;

    uint32_t ref(uint32_t cell, int j) const { return childrefs[cell * stride + j]; }
  };

  using Heap = std::vector<uint32_t>;
  using QueueMap = std::unordered_map<Tuple, Heap, TupleHash>;

  // ---- setup ----

  void build_node_contexts() {
    size_t n = tree_.nodes.size();
    ctxs_.resize(n);
    arenas_.resize(n);
    queues_.resize(n);
    for (size_t u = 0; u < n; ++u) {
      const JoinTreeNode& node = tree_.nodes[u];
      const Relation& rel = inst_.nodes[u];
      NodeCtx& ctx = ctxs_[u];
      arenas_[u].stride = node.children.size();
      for (const auto& a : node.anchor) ctx.anchor_cols.push_back(rel.col(a));
      for (int c : node.children) {
        std::vector<int> cols;
        for (const auto& a : tree_.nodes[c].anchor) cols.push_back(rel.col(a));
        ctx.child_anchor_cols.push_back(std::move(cols));
      }
      std::unordered_set<std::string> proj(tree_.project.begin(), tree_.project.end());
      for (size_t col = 0; col < node.attrs.size(); ++col) {
        const std::string& a = node.attrs[col];
        if (!proj.count(a)) continue;
        bool parent_has = false;
        if (node.parent >= 0) {
          const auto& pa = tree_.nodes[node.parent].attrs;
          parent_has = std::find(pa.begin(), pa.end(), a) != pa.end();
        }
        if (!parent_has) {
          ctx.scored_cols.push_back(static_cast<int>(col));
          ctx.scored_attrs.push_back(a);
        }
      }
      for (const auto& a : node.subtree_proj)
        ctx.recon_slots.push_back(make_slot(static_cast<int>(u), a, Dir::Asc));
      if (rf_.kind == RankingFunction::Kind::Sum) {
        ctx.cmp_slots = ctx.recon_slots;
      } else {
        std::unordered_set<std::string> here(node.subtree_proj.begin(),
                                             node.subtree_proj.end());
        for (const LexAttr& la : rf_.lex)
          if (here.count(la.attr))
            ctx.cmp_slots.push_back(make_slot(static_cast<int>(u), la.attr, la.dir));
      }
    }
  }

  Slot make_slot(int node, const std::string& attr, Dir dir) const {
    Slot s;
    s.dir = dir;
    int u = node;
    while (true) {
      int col = inst_.nodes[u].col(attr);
      if (col >= 0) {
        s.col = col;
        return s;
      }
      const auto& ch = tree_.nodes[u].children;
      bool found = false;
      for (size_t j = 0; j < ch.size(); ++j) {
        const auto& sp = tree_.nodes[ch[j]].subtree_proj;
        if (std::find(sp.begin(), sp.end(), attr) != sp.end()) {
          s.chain.push_back(static_cast<int>(j));
          u = ch[j];
          found = true;
          break;
        }
      }
      if (!found) throw PlanError("attribute " + attr + " unreachable in subtree");
    }
  }

  void preprocess() {
    for (int u : detail::post_order(tree_)) {
      const Relation& rel = inst_.nodes[u];
      const NodeCtx& ctx = ctxs_[u];
      const auto& children = tree_.nodes[u].children;
      std::vector<uint32_t> refs(children.size());
      for (uint32_t ti = 0; ti < rel.tuples.size(); ++ti) {
        const Tuple& t = rel.tuples[ti];
        double rank = 0.0;
        if (rf_.kind == RankingFunction::Kind::Sum)
          for (size_t k = 0; k < ctx.scored_cols.size(); ++k)
            rank += wm_.resolve(ctx.scored_attrs[k], t[ctx.scored_cols[k]]);
        for (size_t j = 0; j < children.size(); ++j) {
          Tuple key = detail::project_cols(t, ctx.child_anchor_cols[j]);
          auto it = queues_[children[j]].find(key);
          if (it == queues_[children[j]].end() || it->second.empty())
            throw std::logic_error("instance not fully reduced: dangling tuple");
          refs[j] = it->second.front();
          rank += arenas_[children[j]].rank[refs[j]];
        }
        uint32_t cell = add_cell(u, rank, ti, refs);
        push_cell(u, queues_[u][detail::project_cols(t, ctx.anchor_cols)], cell);
      }
    }
  }

  uint32_t add_cell(int u, double rank, uint32_t tuple, const std::vector<uint32_t>& refs) {
    Arena& a = arenas_[u];
    uint32_t id = static_cast<uint32_t>(a.rank.size());
    a.rank.push_back(rank);
    a.tuple.push_back(tuple);
    a.next.push_back(kUnset);
    for (uint32_t r : refs) a.childrefs.push_back(r);
    counters_.cells_created++;
    if (opt_.memoize_outputs) {
      a.outputs.emplace_back();
      a.outputs[id].reserve(ctxs_[u].recon_slots.size());
      for (const Slot& s : ctxs_[u].recon_slots)
        a.outputs[id].push_back(resolve_uncached(u, id, s));
    }
    return id;
  }

  // ---- cell comparison ----

  const Value& resolve_uncached(int node, uint32_t cell, const Slot& s) const {
    int u = node;
    uint32_t c = cell;
    for (int j : s.chain) {
      uint32_t child_cell = arenas_[u].ref(c, j);
      u = tree_.nodes[u].children[j];
      c = child_cell;
    }
    return inst_.nodes[u].tuples[arenas_[u].tuple[c]][s.col];
  }

  const Value& resolve(int node, uint32_t cell, const Slot& s) const {
    return resolve_uncached(node, cell, s);
  }

  int compare_cells(int u, uint32_t a, uint32_t b) const {
    if (rf_.kind == RankingFunction::Kind::Sum) {
      double ra = arenas_[u].rank[a];
      double rb = arenas_[u].rank[b];
      if (ra < rb) return -1;
      if (ra > rb) return 1;
    }
    if (opt_.memoize_outputs && rf_.kind == RankingFunction::Kind::Sum) {
      return compare_tuples(arenas_[u].outputs[a], arenas_[u].outputs[b]);
    }
    for (const Slot& s : ctxs_[u].cmp_slots) {
      int c = compare_values(resolve(u, a, s), resolve(u, b, s));
      if (c != 0) return s.dir == Dir::Asc ? c : -c;
    }
    return 0;
  }

  bool cells_equal(int u, uint32_t a, uint32_t b) const {
    return compare_cells(u, a, b) == 0;
  }

  // ---- heap plumbing (binary heap, min at front) ----

  void push_cell(int u, Heap& h, uint32_t cell) {
    h.push_back(cell);
    std::push_heap(h.begin(), h.end(),
                   [&](uint32_t a, uint32_t b) { return compare_cells(u, a, b) > 0; });
    counters_.pq_push++;
  }

  uint32_t pop_cell(int u, Heap& h) {
    std::pop_heap(h.begin(), h.end(),
                  [&](uint32_t a, uint32_t b) { return compare_cells(u, a, b) > 0; });
    uint32_t c = h.back();
    h.pop_back();
    counters_.pq_pop++;
    return c;
  }

  Heap* root_queue() {
    auto it = queues_[tree_.root].find(Tuple{});
    return it == queues_[tree_.root].end() ? nullptr : &it->second;
  }

  // ---- the enumeration core ----

  // Advances the per-anchor queue past cell c's answer: pops every cell whose
  // partial answer equals c's (each pop re-inserts its successors, one child
  // advanced apiece), then memoizes the next distinct cell in c.next.
  // Returns that cell id, or kNone if the queue emptied. O(1) when memoized.
  int64_t topdown(uint32_t c, int u) {
    counters_.topdown_calls++;
    Arena& arena = arenas_[u];
    if (arena.next[c] != kUnset)
      return arena.next[c];
    counters_.nontrivial_topdown++;

    const NodeCtx& ctx = ctxs_[u];
    const Tuple& t = inst_.nodes[u].tuples[arena.tuple[c]];
    Tuple key = detail::project_cols(t, ctx.anchor_cols);
    Heap& q = queues_[u][key];
    if (q.empty() || q.front() != c)
      throw std::logic_error("topdown on a cell that is not its queue's top");

    const auto& children = tree_.nodes[u].children;
    std::vector<uint32_t> refs(children.size());
    while (true) {
      uint32_t temp = pop_cell(u, q);
      for (size_t j = 0; j < children.size(); ++j) refs[j] = arena.ref(temp, j);
      for (size_t j = 0; j < children.size(); ++j) {
        int64_t adv = topdown(refs[j], children[j]);
        if (adv == kNone) continue;
        double rank = arena.rank[temp] -
                      arenas_[children[j]].rank[refs[j]] +
                      arenas_[children[j]].rank[static_cast<uint32_t>(adv)];
        std::vector<uint32_t> nrefs = refs;
        nrefs[j] = static_cast<uint32_t>(adv);
        uint32_t nc = add_cell(u, rank, arena.tuple[temp], nrefs);
        push_cell(u, q, nc);
      }
      if (q.empty() || !cells_equal(u, temp, q.front())) break;
    }

    int64_t result = q.empty() ? kNone : static_cast<int64_t>(q.front());
    if (u != tree_.root) {
      assert(arena.next[c] == kUnset);
      arena.next[c] = result;
    }
    return result;
  }

  JoinTree tree_;
  const ReducedInstance& inst_;
  RankingFunction rf_;
  WeightMap wm_;
  AcyclicOptions opt_;
  OpCounters counters_;
  std::vector<NodeCtx> ctxs_;
  std::vector<Arena> arenas_;
  std::vector<QueueMap> queues_;
  Tuple last_;
  bool has_last_ = false;
};

}  // namespace rankenum
