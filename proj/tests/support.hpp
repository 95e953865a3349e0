#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "redrem/redrem.hpp"

namespace redrem::testing {

inline constexpr unsigned kCorpusSize = 1000;

// Frozen corpus: at most 12 inputs and 60 gates.
inline Circuit corpus_circuit(unsigned seed) { return random_circuit(seed, 3 + seed % 10, 10 + (seed * 7) % 51); }

inline std::string data_path(std::string_view file) { return std::string(REDREM_TEST_DATA) + "/" + std::string(file); }

inline Circuit fixture(std::string_view stem) { return read_bench_file(data_path(std::string(stem) + ".bench")); }

inline const std::vector<std::string>& fixture_names() {
  static const std::vector<std::string> names = {"conflict", "demorgan", "stem_observable", "xor_tree"};
  return names;
}

// Truth value of vertex v for input vector x.
inline bool bit(const ExhaustiveSimulator& sim, VertexId v, std::uint64_t x) {
  return (sim.values(v)[x / 64] >> (x % 64)) & 1;
}

inline std::uint64_t vector_count(const ExhaustiveSimulator& sim) { return std::uint64_t{1} << sim.input_count(); }

// True when every input vector with v = j gives target = k (vacuous if v = j never happens).
inline bool implication_holds(const ExhaustiveSimulator& sim, VertexId v, bool j, VertexId target, bool k) {
  for (std::uint64_t x = 0; x < vector_count(sim); ++x)
    if (bit(sim, v, x) == j && bit(sim, target, x) != k) return false;
  return true;
}

// Stored implications over live vertices whose target is usable and that the
// circuit violates.
inline std::size_t invalid_implications(const Circuit& c, const ImplicationStore& store) {
  ExhaustiveSimulator sim(c);
  std::size_t bad = 0;
  for (VertexId v = 0; v < store.capacity(); ++v) {
    if (!c.contains(v)) continue;
    for (bool j : {false, true})
      for (auto t : store.implications(v, j)) {
        if (!c.contains(t.vertex) || store.invalid(t.vertex)) continue;
        if (!implication_holds(sim, v, j, t.vertex, t.value)) ++bad;
      }
  }
  return bad;
}

// Queue entries of one run that some input vector with v_base = i contradicts.
inline std::size_t unsound_entries(const Circuit& c, const RunQueue& q, VertexId v_base) {
  ExhaustiveSimulator sim(c);
  std::size_t bad = 0;
  for (auto [u, j] : q.entries)
    if (!implication_holds(sim, v_base, q.run, u, j)) ++bad;
  return bad;
}

// The fault on `line` as undetectable_faults() names it: a branch of a
// single-destination net is its stem.
inline FaultSite canonical_fault(const Circuit& c, Line line, bool value) {
  if (!line.is_stem() && c.out_degree(line.driver) == 1) line = Line::stem(line.driver);
  return {line, value};
}

// line_observable_under, false when no input vector meets the constraints.
inline bool observable_under(const Circuit& c, Line line, std::span<const Assignment> cond) {
  try {
    return line_observable_under(c, line, cond);
  } catch (const OracleError& e) {
    if (e.code() != OracleErrc::InconsistentAssignment) throw;
    return false;
  }
}

}  // namespace redrem::testing
