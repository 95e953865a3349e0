#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "redrem/circuit.hpp"
#include "redrem/implication.hpp"
#include "redrem/oracle.hpp"
#include "redrem/topo_index.hpp"
#include "redrem/unobservability.hpp"

namespace redrem {

/// The four improvements over the FIRE baseline, numbered as on the command line.
struct Improvements {
  bool overapprox = true;                // 1
  bool skip_single_input = true;         // 2
  bool indirect_implications = true;     // 3
  bool duplicate_identification = true;  // 4

  static constexpr Improvements all() { return {}; }
  static constexpr Improvements none() { return {false, false, false, false}; }
  constexpr bool any() const { return overapprox || skip_single_input || indirect_implications || duplicate_identification; }

  /// Turns improvement `number` (1..4) off.
  void disable(int number) {
    switch (number) {
      case 1: overapprox = false; break;
      case 2: skip_single_input = false; break;
      case 3: indirect_implications = false; break;
      case 4: duplicate_identification = false; break;
      default: throw std::invalid_argument("improvement number must be 1..4");
    }
  }

  friend constexpr bool operator==(const Improvements&, const Improvements&) = default;
};

enum class RemovalMode : std::uint8_t { Presented, FireBaseline };

constexpr std::string_view to_string(RemovalMode m) { return m == RemovalMode::Presented ? "presented" : "fire"; }

enum class RemovalKind : std::uint8_t { RedundantEdge, ConstantVertex, Merge };

/// One structural edit, as seen by an observer.
struct RemovalEvent {
  RemovalKind kind = RemovalKind::RedundantEdge;
  VertexId v_base = kNoVertex;
  bool run = false;
  Line line;                    // the removed edge, or the stem of the constant vertex
  bool value = false;           // stuck-at value or constant value
  bool checked = false;         // edge confirmed by check_unobservability
  bool short_circuit = false;   // edge taken without any check (overapproximation only)
  VertexId survivor = kNoVertex;
  std::vector<VertexId> victims;
  Polarity polarity = Polarity::Same;
};

/// Hooks around every structural edit. The circuit passed to before_edit is the
/// state the edit is justified against.
class RemovalObserver {
 public:
  virtual ~RemovalObserver() = default;
  virtual void before_edit(const RemovalEvent&, const Circuit&) {}
  virtual void after_edit(const RemovalEvent&, const Circuit&, const ImplicationStore&) {}
};

struct RemovalConfig {
  Improvements improvements;
  bool verify_with_oracle = false;
  unsigned oracle_bound = kDefaultInputBound;
  unsigned passes = 1;
  RemovalObserver* observer = nullptr;

  static RemovalConfig presented() { return {}; }
  static RemovalConfig fire_baseline() {
    RemovalConfig c;
    c.improvements = Improvements::none();
    return c;
  }
  RemovalMode mode() const { return improvements.any() ? RemovalMode::Presented : RemovalMode::FireBaseline; }
};

struct RemovedEdge {
  std::string driver;
  std::string sink;
  bool stuck_value = false;
  std::string v_base;
  bool run = false;
};

struct ConstantVertex {
  std::string name;
  bool value = false;
};

struct MergeRecord {
  std::string survivor;
  std::vector<std::string> victims;
  Polarity polarity = Polarity::Same;
};

struct RemovalCounters {
  std::uint64_t unobservability_checks = 0;
  std::uint64_t incorrect_detections = 0;
  std::uint64_t implications_learned = 0;
  std::uint64_t implications_cleared_R1 = 0;
  std::uint64_t vertices_flagged_R2 = 0;
  std::uint64_t runs_skipped_single_input = 0;
};

struct RemovalReport {
  std::vector<RemovedEdge> removed_edges;
  std::vector<ConstantVertex> constants;
  std::vector<MergeRecord> merges;
  RemovalCounters counters;
  std::uint64_t short_circuit_removals = 0;
  std::uint64_t oracle_violations = 0;
  std::vector<std::string> diagnostics;
  double seconds = 0.0;

  /// Removed lines + constant vertices + merged-away vertices.
  std::size_t total_removals() const {
    std::size_t n = removed_edges.size() + constants.size();
    for (const auto& m : merges) n += m.victims.size();
    return n;
  }
};

inline std::vector<std::pair<std::string, std::uint64_t>> counters_snapshot(const RemovalReport& r) {
  const auto& k = r.counters;
  return {
      {"unobservability_checks", k.unobservability_checks},
      {"incorrect_detections", k.incorrect_detections},
      {"implications_learned", k.implications_learned},
      {"implications_cleared_R1", k.implications_cleared_R1},
      {"vertices_flagged_R2", k.vertices_flagged_R2},
      {"runs_skipped_single_input", k.runs_skipped_single_input},
  };
}

/// One redundancy-removal session over a circuit it edits in place.
class RemovalSession {
 public:
  RemovalSession(Circuit& c, RemovalConfig cfg)
      : c_(c),
        cfg_(std::move(cfg)),
        analysis_(c_, state_,
                  cfg_.improvements.overapprox ? UnobservabilityPolicy::Overapproximate
                                               : UnobservabilityPolicy::CheckStems) {
    if (cfg_.verify_with_oracle && c_.inputs().size() > cfg_.oracle_bound) {
      report_.diagnostics.push_back("oracle verification disabled: " + std::to_string(c_.inputs().size()) +
                                    " inputs exceed the bound of " + std::to_string(cfg_.oracle_bound));
      cfg_.verify_with_oracle = false;
    }
  }

  RemovalReport run() {
    auto t0 = std::chrono::steady_clock::now();
    for (unsigned pass = 0; pass < std::max(1u, cfg_.passes); ++pass) {
      auto before = report_.total_removals();
      begin_pass();
      for (std::size_t p = 0; p < topo_.size(); ++p) process(topo_.at(static_cast<std::uint32_t>(p)));
      if (report_.total_removals() == before) break;
    }
    report_.counters.unobservability_checks = analysis_.checks();
    report_.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report_;
  }

  /// Indexes the circuit and clears learned implications.
  void begin_pass() {
    topo_ = TopoIndex(c_);
    store_.reset(c_.capacity());
    state_.ensure(c_.capacity());
  }

  /// Runs the loop body for one v_base until no further edit applies.
  void process(VertexId v_base) {
    if (!eligible(v_base)) return;
    if (cfg_.improvements.skip_single_input && c_.fanin(v_base).size() == 1) {
      ++report_.counters.runs_skipped_single_input;
      return;
    }
    while (eligible(v_base)) {
      if (!implication_runs(v_base)) return;
      bool edited = false;
      if (cfg_.improvements.duplicate_identification)
        edited = eliminate_constants(v_base) || eliminate_duplicates(v_base);
      for (bool i : {false, true}) {
        if (edited) break;
        analysis_.seed(i);
        edited = find_redundant_edges(v_base, i);
      }
      if (!edited) return;
      forget_learned(v_base);
    }
  }

  /// Both runs for v_base. On a contradiction v_base becomes a constant and
  /// false is returned.
  bool implication_runs(VertexId v_base) {
    state_.ensure(c_.capacity());
    store_.ensure(c_.capacity());
    state_.reset();
    const ImplicationStore* learned = cfg_.improvements.indirect_implications ? &store_ : nullptr;
    for (bool i : {false, true}) {
      if (propagate_uncontrollability(c_, learned, v_base, i, state_)) {
        if (cfg_.improvements.indirect_implications)
          report_.counters.implications_learned += learn_contrapositives(store_, state_.queue(i), v_base);
        continue;
      }
      if (c_.kind(v_base) == GateKind::Input) {
        report_.diagnostics.push_back("contradiction on primary input " + c_.label(v_base));
        return false;
      }
      if (i && state_.contradiction(false)) report_.diagnostics.push_back("both runs contradict at " + c_.label(v_base));
      RemovalEvent ev;
      ev.kind = RemovalKind::ConstantVertex;
      ev.v_base = v_base;
      ev.run = i;
      ev.line = Line::stem(v_base);
      ev.value = !i;
      apply_constant(ev);
      return false;
    }
    return true;
  }

  /// Vertices implied to the same value in both runs become constants.
  bool eliminate_constants(VertexId v_base) {
    std::vector<Assignment> found;
    for (auto [v, j] : state_.queue(false).entries) {
      if (v == v_base || state_.value(true, v) != to_ternary(j)) continue;
      if (is_source(c_.kind(v))) continue;
      found.push_back({v, j});
    }
    bool edited = false;
    for (auto [v, j] : found) {
      if (!c_.contains(v) || is_source(c_.kind(v))) continue;
      RemovalEvent ev;
      ev.kind = RemovalKind::ConstantVertex;
      ev.v_base = v_base;
      ev.line = Line::stem(v);
      ev.value = j;
      apply_constant(ev);
      edited = true;
    }
    return edited;
  }

  /// Merges vertices that follow v_base (or its complement) in both runs.
  bool eliminate_duplicates(VertexId v_base) {
    std::vector<VertexId> same, compl_;
    for (auto [v, j] : state_.queue(false).entries) {
      auto other = state_.value(true, v);
      if (!is_assigned(other) || to_bool(other) == j || is_constant(c_.kind(v))) continue;
      (j ? compl_ : same).push_back(v);
    }
    if (same.size() < 2 && compl_.empty()) return false;

    if (levels_stale_) {
      levels_ = longest_path_levels(c_);
      levels_stale_ = false;
    }
    bool edited = false;
    auto u = merge_class(v_base, same, edited);
    auto w = merge_class(v_base, compl_, edited);
    if (u == kNoVertex || w == kNoVertex || !c_.contains(u) || !c_.contains(w)) return edited;
    if (is_inverter_of(w, u) || is_inverter_of(u, w)) return edited;

    auto nearer = u, farther = w;
    if (rank(farther) < rank(nearer)) std::swap(nearer, farther);
    bool reuse = false;
    auto feasible = [&](VertexId s, VertexId x) {
      if (c_.kind(x) == GateKind::Input) return false;
      auto inv = c_.existing_inverter(s, std::span<const VertexId>(&x, 1));
      reuse = inv != kNoVertex && topo_[inv] < min_consumer_index(x);
      return reuse || topo_[s] < topo_[x];
    };
    if (!feasible(nearer, farther)) {
      std::swap(nearer, farther);
      if (!feasible(nearer, farther)) return edited;
    }
    RemovalEvent ev;
    ev.kind = RemovalKind::Merge;
    ev.v_base = v_base;
    ev.survivor = nearer;
    ev.victims = {farther};
    ev.polarity = Polarity::Complemented;
    if (apply_merge(ev, reuse)) edited = true;
    return edited;
  }

  /// Redundant-edge search for run i. Returns true after the first removal.
  bool find_redundant_edges(VertexId v_base, bool i) {
    const auto& entries = state_.queue(!i).entries;
    for (std::size_t k = 0; k < entries.size(); ++k) {
      auto [v, j] = entries[k];
      if (!c_.contains(v) || state_.unobservable_outputs(i, v) == 0) continue;
      for (auto u : c_.fanout(v)) {
        auto m = state_.master(i, u);
        if (m.is_null() || (m.is_vertex() && m.vertex() == v)) continue;
        RemovalEvent ev;
        ev.kind = RemovalKind::RedundantEdge;
        ev.v_base = v_base;
        ev.run = i;
        ev.line = Line::branch(v, u);
        ev.value = j;
        if (cfg_.improvements.overapprox) {
          bool sc = !is_assigned(state_.value(i, v)) && !state_.used_learned(i) && !feeds(u, v_base);
          if (sc) {
            ev.short_circuit = true;
          } else if (analysis_.check_unobservability(v, u, i)) {
            ev.checked = true;
          } else {
            ++report_.counters.incorrect_detections;
            continue;
          }
        }
        apply_edge(ev);
        return true;
      }
    }
    return false;
  }

  const Circuit& circuit() const { return c_; }
  const ImplicationStore& store() const { return store_; }
  const RunState& state() const { return state_; }
  const TopoIndex& topo() const { return topo_; }
  const RemovalReport& report() const { return report_; }

 private:
  // The runs are repeated after an edit; what they taught may have gone stale.
  void forget_learned(VertexId v_base) {
    if (!cfg_.improvements.indirect_implications) return;
    for (bool i : {false, true})
      for (auto [x, j] : state_.queue(i).entries) store_.forget_tail(x, v_base);
  }

  bool eligible(VertexId v) const { return c_.contains(v) && !is_constant(c_.kind(v)); }

  // True when a change at u can reach v_base.
  bool feeds(VertexId u, VertexId v_base) const {
    if (topo_.has(u) && topo_.has(v_base) && topo_[u] > topo_[v_base]) return false;
    return c_.reaches(u, v_base);
  }

  void invalidate(VertexId v, VertexId v_base) {
    auto r = update_implications(store_, c_, topo_, v, v_base);
    report_.counters.implications_cleared_R1 += r.cleared_pairs;
    report_.counters.vertices_flagged_R2 += r.flagged_vertices;
  }

  void apply_constant(const RemovalEvent& ev) {
    auto v = ev.line.driver;
    notify_before(ev);
    auto name = c_.name(v);
    invalidate(v, ev.v_base);
    c_.replace_vertex_with_constant(v, ev.value);
    report_.constants.push_back({name, ev.value});
    notify_after(ev);
  }

  void apply_edge(const RemovalEvent& ev) {
    auto [v, u] = ev.line;
    notify_before(ev);
    report_.removed_edges.push_back({c_.name(v), c_.name(u), ev.value, c_.name(ev.v_base), ev.run});
    if (ev.short_circuit) ++report_.short_circuit_removals;
    invalidate(u, ev.v_base);
    c_.replace_edge_with_constant(v, u, ev.value);
    notify_after(ev);
  }

  bool apply_merge(const RemovalEvent& ev, bool reuse_inverter = true) {
    notify_before(ev);
    MergeRecord rec{c_.name(ev.survivor), {}, ev.polarity};
    for (auto x : ev.victims) rec.victims.push_back(c_.name(x));
    EditDelta delta;
    try {
      delta = c_.merge_vertices(ev.survivor, ev.victims, ev.polarity, reuse_inverter);
    } catch (const NetlistError& e) {
      report_.diagnostics.push_back(std::string("merge skipped: ") + e.what());
      return false;
    }
    for (auto x : delta.created) {
      if (c_.kind(x) == GateKind::Not && !ev.victims.empty())
        topo_.inherit(x, ev.victims.front());
      else
        topo_.append(x);
    }
    report_.merges.push_back(std::move(rec));
    notify_after(ev);
    return true;
  }

  // Survivor of one equivalence class; merges the rest into it.
  VertexId merge_class(VertexId v_base, std::vector<VertexId> members, bool& edited) {
    members.erase(std::remove_if(members.begin(), members.end(), [&](VertexId x) { return !c_.contains(x); }),
                  members.end());
    if (members.empty()) return kNoVertex;
    std::sort(members.begin(), members.end(), [&](VertexId a, VertexId b) { return rank(a) < rank(b); });
    if (members.size() == 1) return members.front();

    std::size_t n_inputs = std::count_if(members.begin(), members.end(),
                                         [&](VertexId x) { return c_.kind(x) == GateKind::Input; });
    if (n_inputs > 1) {
      report_.diagnostics.push_back("equivalent primary inputs at " + c_.label(v_base));
      return kNoVertex;
    }
    auto survivor = members.front();
    auto safe = [&](VertexId s) {
      for (auto x : members)
        if (x != s && !forward_safe(s, x)) return false;
      return true;
    };
    if (!safe(survivor)) {
      survivor = *std::min_element(members.begin(), members.end(),
                                   [&](VertexId a, VertexId b) { return topo_[a] < topo_[b]; });
      if (n_inputs == 1 && c_.kind(survivor) != GateKind::Input) return kNoVertex;
    }
    RemovalEvent ev;
    ev.kind = RemovalKind::Merge;
    ev.v_base = v_base;
    ev.survivor = survivor;
    for (auto x : members)
      if (x != survivor) ev.victims.push_back(x);
    ev.polarity = Polarity::Same;
    if (apply_merge(ev)) edited = true;
    return c_.contains(survivor) ? survivor : kNoVertex;
  }

  std::pair<std::uint32_t, std::uint32_t> rank(VertexId v) const { return {levels_[v], topo_[v]}; }

  bool is_inverter_of(VertexId x, VertexId y) const {
    return c_.kind(x) == GateKind::Not && c_.fanin(x).size() == 1 && c_.fanin(x)[0] == y;
  }

  std::uint32_t min_consumer_index(VertexId x) const {
    std::uint32_t m = TopoIndex::kUnindexed;
    for (auto y : c_.fanout(x)) m = std::min(m, topo_[y]);
    return m;
  }

  // Re-rooting x's consumers onto s keeps the index order forward.
  bool forward_safe(VertexId s, VertexId x) const { return topo_[s] < min_consumer_index(x); }

  void notify_before(const RemovalEvent& ev) {
    if (cfg_.verify_with_oracle) verify_before(ev);
    if (cfg_.observer) cfg_.observer->before_edit(ev, c_);
  }

  void notify_after(const RemovalEvent& ev) {
    levels_stale_ = true;
    if (cfg_.verify_with_oracle) {
      if (!equivalent(*reference_, c_, cfg_.oracle_bound).equivalent) {
        ++report_.oracle_violations;
        report_.diagnostics.push_back("edit at v_base " + reference_names_ + " changed the circuit function");
      }
    }
    if (cfg_.observer) cfg_.observer->after_edit(ev, c_, store_);
  }

  void verify_before(const RemovalEvent& ev) {
    if (!reference_) reference_ = c_;
    reference_names_ = c_.name(ev.v_base);
    if (ev.kind == RemovalKind::Merge) return;
    if (!is_undetectable(c_, {ev.line, ev.value}, cfg_.oracle_bound)) {
      ++report_.oracle_violations;
      report_.diagnostics.push_back("oracle: fault on " + describe(ev.line) + " stuck-at " +
                                    std::to_string(ev.value) + " is detectable");
    }
  }

  std::string describe(Line l) const {
    return l.is_stem() ? c_.name(l.driver) : c_.name(l.driver) + "->" + c_.name(l.sink);
  }

  Circuit& c_;
  RemovalConfig cfg_;
  RunState state_;
  ImplicationStore store_;
  TopoIndex topo_;
  UnobservabilityAnalysis analysis_;
  std::vector<std::uint32_t> levels_;
  bool levels_stale_ = true;
  RemovalReport report_;
  std::optional<Circuit> reference_;
  std::string reference_names_;
};

/// Removes redundancies from `c` in place.
inline RemovalReport remove_redundancy(Circuit& c, const RemovalConfig& cfg = {}) {
  RemovalSession s(c, cfg);
  return s.run();
}

}  // namespace redrem
