#pragma once

#include <cstdio>
#include <ostream>
#include <string>
#include <string_view>

#include "redrem/remover.hpp"

namespace redrem {

/// One line per edit, in the order the edits were made, then the counters.
inline void write_report_lines(std::ostream& os, const RemovalReport& r) {
  for (const auto& e : r.removed_edges)
    os << "removed " << e.driver << "->" << e.sink << " sa" << e.stuck_value << " vbase=" << e.v_base
       << " run=" << e.run << '\n';
  for (const auto& k : r.constants) os << "const " << k.name << '=' << k.value << '\n';
  for (const auto& m : r.merges)
    for (const auto& v : m.victims)
      os << "merge " << m.survivor << "<-" << v << " pol=" << (m.polarity == Polarity::Same ? "same" : "compl") << '\n';
  for (const auto& [key, value] : counters_snapshot(r)) os << "counter " << key << '=' << value << '\n';
}

inline void write_counter_lines(std::ostream& os, const RemovalReport& r) {
  for (const auto& [key, value] : counters_snapshot(r)) os << "counter " << key << '=' << value << '\n';
}

struct CircuitSize {
  std::size_t gates = 0;
  std::size_t edges = 0;

  static CircuitSize of(const Circuit& c) { return {c.gate_count(), c.edge_count()}; }
};

/// Human-readable summary: a "# red / t, sec" row followed by the records.
inline void write_report_text(std::ostream& os, const RemovalReport& r, std::string_view circuit_name,
                              RemovalMode mode, CircuitSize before, CircuitSize after) {
  char row[160];
  std::snprintf(row, sizeof row, "%-16s %-10s %8s %10s\n", "circuit", "mode", "# red", "t, sec");
  os << row;
  std::snprintf(row, sizeof row, "%-16.*s %-10.*s %8zu %10.3f\n", static_cast<int>(circuit_name.size()),
                circuit_name.data(), static_cast<int>(to_string(mode).size()), to_string(mode).data(),
                r.total_removals(), r.seconds);
  os << row;
  std::size_t victims = r.total_removals() - r.removed_edges.size() - r.constants.size();
  os << "lines " << r.removed_edges.size() << ", constants " << r.constants.size() << ", merged " << victims << '\n';
  os << "gates " << before.gates << " -> " << after.gates << ", edges " << before.edges << " -> " << after.edges
     << '\n';
  write_report_lines(os, r);
  for (const auto& d : r.diagnostics) os << "note: " << d << '\n';
}

}  // namespace redrem
