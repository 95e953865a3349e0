#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "redrem/circuit.hpp"

namespace redrem {

/// Relative frequencies of the gate kinds drawn by random_circuit().
struct GateWeights {
  unsigned and_ = 6;
  unsigned nand = 4;
  unsigned or_ = 6;
  unsigned nor = 4;
  unsigned xor_ = 1;
  unsigned xnor = 1;
  unsigned not_ = 2;
  unsigned buf = 1;
};

struct RandomCircuitShape {
  unsigned three_input_percent = 20;
  unsigned local_operand_percent = 50;  // operands drawn from the most recent vertices
  unsigned locality_window = 8;
  unsigned extra_output_percent = 10;   // internal gates that also become outputs
};

/// Deterministic random DAG: inputs i0.., gates g0.. in creation order. Every
/// gate without fanout drives a primary output of the same name.
inline Circuit random_circuit(std::uint64_t seed, unsigned n_inputs, unsigned n_gates, const GateWeights& weights = {},
                              const RandomCircuitShape& shape = {}) {
  if (n_inputs == 0) throw NetlistError(NetlistErrc::InvalidArgument, "random circuit needs at least one input");
  std::mt19937_64 rng(seed);
  auto below = [&](std::uint64_t n) { return rng() % n; };

  const std::array<std::pair<GateKind, unsigned>, 8> table = {{
      {GateKind::And, weights.and_},
      {GateKind::Nand, weights.nand},
      {GateKind::Or, weights.or_},
      {GateKind::Nor, weights.nor},
      {GateKind::Xor, weights.xor_},
      {GateKind::Xnor, weights.xnor},
      {GateKind::Not, weights.not_},
      {GateKind::Buf, weights.buf},
  }};
  unsigned total = 0;
  for (auto [k, w] : table) total += w;
  if (total == 0) throw NetlistError(NetlistErrc::InvalidArgument, "all gate weights are zero");

  Circuit c;
  std::vector<VertexId> pool;
  for (unsigned k = 0; k < n_inputs; ++k) pool.push_back(c.add_input("i" + std::to_string(k)));

  std::vector<VertexId> gates;
  std::vector<VertexId> operands;
  for (unsigned g = 0; g < n_gates; ++g) {
    auto pick = below(total);
    GateKind kind = table.back().first;
    for (auto [k, w] : table) {
      if (pick < w) {
        kind = k;
        break;
      }
      pick -= w;
    }
    std::size_t arity = is_single_input(kind) ? 1 : (below(100) < shape.three_input_percent ? 3 : 2);
    if (arity > pool.size()) {
      if (pool.size() < 2) {
        kind = below(2) ? GateKind::Not : GateKind::Buf;
        arity = 1;
      } else {
        arity = pool.size();
      }
    }
    operands.clear();
    while (operands.size() < arity) {
      VertexId d;
      if (below(100) < shape.local_operand_percent) {
        auto window = std::min<std::size_t>(shape.locality_window, pool.size());
        d = pool[pool.size() - 1 - below(window)];
      } else {
        d = pool[below(pool.size())];
      }
      if (std::find(operands.begin(), operands.end(), d) == operands.end()) operands.push_back(d);
    }
    auto v = c.add_gate(kind, "g" + std::to_string(g), operands);
    pool.push_back(v);
    gates.push_back(v);
  }

  if (gates.empty()) {
    for (auto v : c.inputs()) c.add_output(c.name(v), v);
    return c;
  }
  for (auto v : gates)
    if (c.fanout(v).empty() || below(100) < shape.extra_output_percent) c.add_output(c.name(v), v);
  return c;
}

}  // namespace redrem
