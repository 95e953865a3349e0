#pragma once

#include <cassert>
#include <algorithm>
#include <cstdint>
#include <vector>

#include "redrem/circuit.hpp"
#include "redrem/implication.hpp"

namespace redrem {

enum class UnobservabilityPolicy : std::uint8_t {
  Overapproximate,  // count an output as unobservable without checking the stem
  CheckStems,       // confirm each stem before propagating through it
};

/// Marks lines that are unobservable under the implied values of one run.
///
/// Results live in the RunState: unobservable_outputs(v,i) counts how many of
/// v's fanout edges are unobservable, and master(v,i) becomes ALL once every
/// output of v is.
class UnobservabilityAnalysis {
 public:
  UnobservabilityAnalysis(const Circuit& c, RunState& st, UnobservabilityPolicy policy)
      : c_(c), st_(st), policy_(policy) {}

  /// Starts the propagation from every gate held at its controlled value by a
  /// controlling input.
  void seed(bool run) {
    begin(run);
    for (std::size_t k = 0; k < st_.queue(run).entries.size(); ++k) {
      auto [v, val] = st_.queue(run).entries[k];
      auto kind = c_.kind(v);
      if (!has_controlling_value(kind) || val != *controlled_value(kind)) continue;
      if (st_.master(run, v).is_null()) continue;
      overapprox_init(v, run);
    }
  }

  /// Resets the visited marks for a fresh propagation in `run`.
  void begin(bool run) {
    run_ = run;
    prepare(visited_, visit_epoch_);
  }

  /// Inputs of v other than its master are masked.
  void overapprox_init(VertexId v, bool run) {
    run_ = run;
    fit();
    if (mark(visited_, visit_epoch_, v)) return;
    auto m = st_.master(run, v);
    auto in = c_.fanin(v);
    for (auto k = in.size(); k-- > 0;)
      if (!(m.is_vertex() && m.vertex() == in[k])) pending_.push_back(in[k]);
    drain();
  }

  /// One more output of v became unobservable.
  void check_outputs(VertexId v, bool run) {
    run_ = run;
    fit();
    pending_.push_back(v);
    drain();
  }

  /// v's own output is unobservable: propagate to its inputs, or to its master
  /// if v was already visited.
  void overapprox_propagate(VertexId v, bool run) {
    run_ = run;
    fit();
    propagate(v, st_.master(run, v));
    drain();
  }

  /// Exact test that edge (v,u) is unobservable in `run`.
  bool check_unobservability(VertexId v, VertexId u, bool run) {
    run_ = run;
    ++checks_;
    if (auto ctl = controlling_value(c_.kind(u))) {
      for (auto w : c_.fanin(u))
        if (w != v && st_.value(run, w) == to_ternary(*ctl)) return true;
    }
    if (st_.unobservable_outputs(run, u) != c_.out_degree(u)) return false;
    prepare(check_visited_, check_epoch_);
    return confirm(u);
  }

  /// Exact test that the output of v is unobservable in `run`, sharing the
  /// visited marks of the current check.
  bool unobservability_rec(VertexId v, bool run) {
    run_ = run;
    prepare(check_visited_, check_epoch_);
    return confirm(v);
  }

  bool visited(VertexId v) const { return v < visited_.size() && visited_[v] == visit_epoch_; }
  std::uint64_t checks() const { return checks_; }

 private:
  void fit() {
    if (visited_.size() < c_.capacity()) visited_.resize(c_.capacity(), 0);
    if (check_visited_.size() < c_.capacity()) check_visited_.resize(c_.capacity(), 0);
  }

  void prepare(std::vector<std::uint32_t>& marks, std::uint32_t& epoch) {
    fit();
    if (++epoch == 0) {
      std::fill(marks.begin(), marks.end(), 0);
      epoch = 1;
    }
  }

  // Returns the previous state and marks v.
  bool mark(std::vector<std::uint32_t>& marks, std::uint32_t epoch, VertexId v) {
    if (marks[v] == epoch) return true;
    marks[v] = epoch;
    return false;
  }

  void propagate(VertexId v, MasterRef previous) {
    if (mark(visited_, visit_epoch_, v)) {
      if (previous.is_vertex()) pending_.push_back(previous.vertex());
      assert(!previous.is_null());
      return;
    }
    auto in = c_.fanin(v);
    for (auto k = in.size(); k-- > 0;) pending_.push_back(in[k]);
  }

  // Processes pending check_outputs calls in the order recursion would.
  void drain() {
    while (!pending_.empty()) {
      auto v = pending_.back();
      pending_.pop_back();
      auto n = st_.bump_unobservable(run_, v);
      assert(n <= c_.out_degree(v));
      if (n != c_.out_degree(v)) continue;
      if (policy_ == UnobservabilityPolicy::CheckStems) {
        ++checks_;
        prepare(check_visited_, check_epoch_);
        if (!confirm(v)) continue;
      }
      auto previous = st_.master(run_, v);
      st_.set_master(run_, v, MasterRef::all());
      propagate(v, previous);
    }
  }

  // Depth-first search over the transitive fanout of start. Succeeds when every
  // reached gate is either masked by a side input that the search never reaches,
  // or has all its outputs counted unobservable and no primary output.
  bool confirm(VertexId start) {
    if (c_.drives_output(start)) return false;
    if (mark(check_visited_, check_epoch_, start)) return true;
    witnesses_.clear();
    frames_.clear();
    frames_.push_back({start, 0});
    while (!frames_.empty()) {
      auto& f = frames_.back();
      auto out = c_.fanout(f.v);
      if (f.next == out.size()) {
        frames_.pop_back();
        continue;
      }
      auto u = out[f.next++];
      if (auto w = masking_input(u); w != kNoVertex) {
        witnesses_.push_back(w);
        continue;
      }
      if (st_.unobservable_outputs(run_, u) != c_.out_degree(u)) return false;
      if (mark(check_visited_, check_epoch_, u)) continue;
      frames_.push_back({u, 0});
    }
    for (auto w : witnesses_)
      if (check_visited_[w] == check_epoch_) return false;
    return true;
  }

  VertexId masking_input(VertexId u) const {
    auto ctl = controlling_value(c_.kind(u));
    if (!ctl) return kNoVertex;
    for (auto w : c_.fanin(u))
      if (check_visited_[w] != check_epoch_ && st_.value(run_, w) == to_ternary(*ctl)) return w;
    return kNoVertex;
  }

  const Circuit& c_;
  RunState& st_;
  UnobservabilityPolicy policy_;
  bool run_ = false;
  std::vector<std::uint32_t> visited_;
  std::vector<std::uint32_t> check_visited_;
  std::uint32_t visit_epoch_ = 1;
  std::uint32_t check_epoch_ = 1;
  std::uint64_t checks_ = 0;
  std::vector<VertexId> pending_;
  std::vector<VertexId> witnesses_;
  struct Frame {
    VertexId v;
    std::size_t next;
  };
  std::vector<Frame> frames_;
};

}  // namespace redrem
