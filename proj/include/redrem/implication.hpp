#pragma once

#include <array>
#include <cassert>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "redrem/circuit.hpp"
#include "redrem/topo_index.hpp"

namespace redrem {

/// Pin index used for the gate output in direct implications.
inline constexpr int kOutputPin = -1;

struct PinAssignment {
  int pin = kOutputPin;
  bool value = false;

  friend constexpr bool operator==(const PinAssignment&, const PinAssignment&) = default;
};

/// Values forced on the pins of one gate by the values already present.
struct DirectImplications {
  std::vector<PinAssignment> forced;
  std::optional<int> contradiction;  // pin whose existing value conflicts
};

namespace detail {

// Calls sink(pin, value) for every unassigned pin whose value is forced.
// Returns false when the assigned values are inconsistent; the conflict is
// always reported on the output pin.
template <class Sink>
bool imply_gate(GateKind kind, Ternary out, std::span<const Ternary> in, Sink&& sink) {
  auto settle_output = [&](bool expected) {
    if (!is_assigned(out)) {
      sink(kOutputPin, expected);
      return true;
    }
    return to_bool(out) == expected;
  };

  switch (kind) {
    case GateKind::Input: return true;
    case GateKind::Const0: return settle_output(false);
    case GateKind::Const1: return settle_output(true);
    case GateKind::Buf:
    case GateKind::Not: {
      bool inv = kind == GateKind::Not;
      if (is_assigned(in[0])) return settle_output(to_bool(in[0]) != inv);
      if (is_assigned(out)) sink(0, to_bool(out) != inv);
      return true;
    }
    case GateKind::Xor:
    case GateKind::Xnor: {
      bool parity = kind == GateKind::Xnor;
      int open = -1;
      int n_open = 0;
      for (int k = 0; k < static_cast<int>(in.size()); ++k) {
        if (is_assigned(in[k]))
          parity ^= to_bool(in[k]);
        else {
          open = k;
          ++n_open;
        }
      }
      if (n_open == 0) return settle_output(parity);
      if (n_open == 1 && is_assigned(out)) sink(open, to_bool(out) != parity);
      return true;
    }
    default: break;
  }

  bool c = *controlling_value(kind);
  bool cv = *controlled_value(kind);
  int open = -1;
  int n_open = 0;
  for (int k = 0; k < static_cast<int>(in.size()); ++k) {
    if (!is_assigned(in[k])) {
      open = k;
      ++n_open;
    } else if (to_bool(in[k]) == c) {
      return settle_output(cv);
    }
  }
  if (n_open == 0) return settle_output(!cv);
  if (!is_assigned(out)) return true;
  if (to_bool(out) != cv) {
    for (int k = 0; k < static_cast<int>(in.size()); ++k)
      if (!is_assigned(in[k])) sink(k, !c);
  } else if (n_open == 1) {
    sink(open, c);
  }
  return true;
}

}  // namespace detail

/// Forward and backward implications of a single gate.
inline DirectImplications direct_implications(GateKind kind, Ternary out, std::span<const Ternary> in) {
  DirectImplications r;
  if (!detail::imply_gate(kind, out, in, [&](int pin, bool value) { r.forced.push_back({pin, value}); }))
    r.contradiction = kOutputPin;
  return r;
}

/// Assignments of one run in discovery order.
struct RunQueue {
  bool run = false;
  std::vector<Assignment> entries;
};

/// master(v,i): which input of v is responsible for v's controlled value.
class MasterRef {
 public:
  constexpr MasterRef() = default;
  static constexpr MasterRef null() { return MasterRef(kNoVertex); }
  static constexpr MasterRef all() { return MasterRef(kAllRaw); }
  static constexpr MasterRef of(VertexId v) { return MasterRef(v); }

  constexpr bool is_null() const { return raw_ == kNoVertex; }
  constexpr bool is_all() const { return raw_ == kAllRaw; }
  constexpr bool is_vertex() const { return !is_null() && !is_all(); }
  constexpr VertexId vertex() const { return raw_; }

  friend constexpr bool operator==(MasterRef, MasterRef) = default;

 private:
  static constexpr VertexId kAllRaw = kNoVertex - 1;
  constexpr explicit MasterRef(VertexId raw) : raw_(raw) {}
  VertexId raw_ = kNoVertex;
};

/// Learned implications (v,j) -> (x,k) plus the per-vertex "do not use as a
/// target" flag.
class ImplicationStore {
 public:
  void ensure(std::size_t capacity) {
    if (lists_.size() < capacity) {
      lists_.resize(capacity);
      invalid_.resize(capacity, 0);
    }
  }

  void reset(std::size_t capacity) {
    lists_.assign(capacity, {});
    invalid_.assign(capacity, 0);
    size_ = 0;
  }

  std::span<const Assignment> implications(VertexId v, bool j) const {
    if (v >= lists_.size()) return {};
    return lists_[v][j];
  }

  bool empty(VertexId v) const { return v >= lists_.size() || (lists_[v][0].empty() && lists_[v][1].empty()); }

  bool invalid(VertexId v) const { return v < invalid_.size() && invalid_[v]; }

  /// Returns true if the flag was newly set.
  bool set_invalid(VertexId v) {
    ensure(v + 1);
    if (invalid_[v]) return false;
    invalid_[v] = 1;
    return true;
  }

  /// Appends (v,j) -> target unless the same implication sits among the
  /// trailing entries for target.vertex. Returns true if added.
  bool add(VertexId v, bool j, Assignment target) {
    ensure(v + 1);
    auto& list = lists_[v][j];
    for (auto it = list.rbegin(); it != list.rend() && it->vertex == target.vertex; ++it)
      if (it->value == target.value) return false;
    list.push_back(target);
    ++size_;
    return true;
  }

  /// Drops both implication lists of v; returns how many pairs were removed.
  std::size_t clear(VertexId v) {
    if (v >= lists_.size()) return 0;
    std::size_t n = lists_[v][0].size() + lists_[v][1].size();
    lists_[v][0].clear();
    lists_[v][1].clear();
    size_ -= n;
    return n;
  }

  /// Drops the trailing implications of v that target `target`.
  std::size_t forget_tail(VertexId v, VertexId target) {
    if (v >= lists_.size()) return 0;
    std::size_t n = 0;
    for (auto& list : lists_[v])
      while (!list.empty() && list.back().vertex == target) {
        list.pop_back();
        ++n;
      }
    size_ -= n;
    return n;
  }

  std::size_t size() const { return size_; }
  std::size_t capacity() const { return lists_.size(); }

 private:
  std::vector<std::array<std::vector<Assignment>, 2>> lists_;
  std::vector<std::uint8_t> invalid_;
  std::size_t size_ = 0;
};

/// Per-run scratch values: implied values, masters and unobservable-output
/// counters. Reset cost is proportional to what the last run touched.
class RunState {
 public:
  explicit RunState(std::size_t capacity = 0) { ensure(capacity); }

  void ensure(std::size_t capacity) {
    for (auto& r : runs_) {
      if (r.value.size() >= capacity) continue;
      r.value.resize(capacity, Ternary::Unassigned);
      r.master.resize(capacity, MasterRef::null());
      r.unobservable.resize(capacity, 0);
    }
  }

  Ternary value(bool run, VertexId v) const {
    const auto& r = runs_[run];
    return v < r.value.size() ? r.value[v] : Ternary::Unassigned;
  }

  MasterRef master(bool run, VertexId v) const {
    const auto& r = runs_[run];
    return v < r.master.size() ? r.master[v] : MasterRef::null();
  }

  void set_master(bool run, VertexId v, MasterRef m) {
    auto& r = runs_[run];
    if (r.master[v].is_null() && !m.is_null()) r.mastered.push_back(v);
    r.master[v] = m;
  }

  std::uint32_t unobservable_outputs(bool run, VertexId v) const {
    const auto& r = runs_[run];
    return v < r.unobservable.size() ? r.unobservable[v] : 0;
  }

  std::uint32_t bump_unobservable(bool run, VertexId v) {
    auto& r = runs_[run];
    if (r.unobservable[v]++ == 0) r.counted.push_back(v);
    return r.unobservable[v];
  }

  /// Assigns a value; false if v already carries the opposite value.
  bool assign(bool run, VertexId v, bool value) {
    auto& r = runs_[run];
    if (is_assigned(r.value[v])) return to_bool(r.value[v]) == value;
    r.value[v] = to_ternary(value);
    r.queue.entries.push_back({v, value});
    return true;
  }

  const RunQueue& queue(bool run) const { return runs_[run].queue; }
  bool contradiction(bool run) const { return runs_[run].contradiction; }
  void mark_contradiction(bool run) { runs_[run].contradiction = true; }

  /// True when a learned implication assigned some value in this run.
  bool used_learned(bool run) const { return runs_[run].used_learned; }
  void mark_used_learned(bool run) { runs_[run].used_learned = true; }

  void reset_run(bool run) {
    auto& r = runs_[run];
    for (auto a : r.queue.entries) r.value[a.vertex] = Ternary::Unassigned;
    for (auto v : r.mastered) r.master[v] = MasterRef::null();
    for (auto v : r.counted) r.unobservable[v] = 0;
    r.queue.entries.clear();
    r.queue.run = run;
    r.mastered.clear();
    r.counted.clear();
    r.contradiction = false;
    r.used_learned = false;
  }

  void reset() {
    reset_run(false);
    reset_run(true);
  }

 private:
  struct PerRun {
    std::vector<Ternary> value;
    std::vector<MasterRef> master;
    std::vector<std::uint32_t> unobservable;
    RunQueue queue;
    std::vector<VertexId> mastered;
    std::vector<VertexId> counted;
    bool contradiction = false;
    bool used_learned = false;
  };
  std::array<PerRun, 2> runs_;
};

/// Breadth-first implication of v_base = i. Direct implications are applied at
/// every dequeued vertex and its consumers; learned implications from `store`
/// (may be null) are applied unless their target is flagged invalid.
///
/// Returns false on a contradiction; the partial queue is then meaningless.
/// On success master(v,i) is set for every gate that carries its controlled value.
inline bool propagate_uncontrollability(const Circuit& c, const ImplicationStore* store, VertexId v_base, bool i,
                                        RunState& st) {
  st.ensure(c.capacity());
  st.reset_run(i);
  st.assign(i, v_base, i);

  std::vector<Ternary> pins;
  auto examine = [&](VertexId g) {
    auto fanin = c.fanin(g);
    pins.resize(fanin.size());
    for (std::size_t k = 0; k < fanin.size(); ++k) pins[k] = st.value(i, fanin[k]);
    bool ok = true;
    bool consistent = detail::imply_gate(c.kind(g), st.value(i, g), pins, [&](int pin, bool value) {
      ok = st.assign(i, pin == kOutputPin ? g : fanin[pin], value) && ok;
    });
    return consistent && ok;
  };

  const auto& entries = st.queue(i).entries;
  for (std::size_t head = 0; head < entries.size(); ++head) {
    auto [x, val] = entries[head];
    bool ok = examine(x);
    for (std::size_t k = 0; ok && k < c.fanout(x).size(); ++k) ok = examine(c.fanout(x)[k]);
    if (ok && store) {
      for (auto t : store->implications(x, val)) {
        if (!c.contains(t.vertex) || store->invalid(t.vertex)) continue;
        if (!is_assigned(st.value(i, t.vertex))) st.mark_used_learned(i);
        if (!st.assign(i, t.vertex, t.value)) {
          ok = false;
          break;
        }
      }
    }
    if (!ok) {
      st.mark_contradiction(i);
      return false;
    }
  }

  for (auto [v, val] : entries) {
    auto kind = c.kind(v);
    if (!has_controlling_value(kind) || val != *controlled_value(kind)) continue;
    bool ctl = *controlling_value(kind);
    MasterRef m = MasterRef::null();
    for (auto d : c.fanin(v)) {
      if (st.value(i, d) != to_ternary(ctl)) continue;
      if (!m.is_null()) {
        m = MasterRef::all();
        break;
      }
      m = MasterRef::of(d);
    }
    if (!m.is_null()) st.set_master(i, v, m);
  }
  return true;
}

/// Convenience form returning the queue, or nullopt on contradiction.
inline std::optional<RunQueue> propagate_uncontrollability(const Circuit& c, const ImplicationStore* store,
                                                           VertexId v_base, bool i) {
  RunState st(c.capacity());
  if (!propagate_uncontrollability(c, store, v_base, i, st)) return std::nullopt;
  return st.queue(i);
}

/// Records the contrapositives of v_base = i => x = j' as x = !j' => v_base = !i.
/// Returns the number of new implications.
inline std::size_t learn_contrapositives(ImplicationStore& store, const RunQueue& q, VertexId v_base) {
  std::size_t added = 0;
  for (auto [x, j] : q.entries) {
    if (x == v_base) continue;
    if (store.add(x, !j, {v_base, !q.run})) ++added;
  }
  return added;
}

struct ImplicationUpdate {
  std::size_t cleared_pairs = 0;
  std::size_t flagged_vertices = 0;
};

/// Invalidates learned implications that may no longer hold after the function
/// of v changes while v_base is being processed: lists of v and of its
/// transitive fanout are dropped (stopping at vertices with no lists), and every
/// vertex from v up to, but excluding, v_base in topological order is flagged as
/// an unusable target.
inline ImplicationUpdate update_implications(ImplicationStore& store, const Circuit& c, const TopoIndex& topo,
                                             VertexId v, VertexId v_base) {
  ImplicationUpdate r;
  if (!store.empty(v)) {
    std::vector<VertexId> stack{v};
    while (!stack.empty()) {
      auto x = stack.back();
      stack.pop_back();
      if (store.empty(x)) continue;
      r.cleared_pairs += store.clear(x);
      if (!c.contains(x)) continue;
      for (auto y : c.fanout(x)) stack.push_back(y);
    }
  }
  if (topo.has(v) && topo.has(v_base)) {
    for (auto slot = topo[v]; slot < topo[v_base]; ++slot) {
      auto u = topo.at(slot);
      if (c.contains(u) && store.set_invalid(u)) ++r.flagged_vertices;
    }
  }
  return r;
}

}  // namespace redrem
