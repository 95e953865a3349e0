#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "redrem/circuit.hpp"
#include "redrem/topo_index.hpp"

namespace redrem {

/// Exhaustive simulation is refused above this many primary inputs by default.
inline constexpr unsigned kDefaultInputBound = 16;

enum class OracleErrc : std::uint8_t { LengthMismatch, InterfaceMismatch, TooManyInputs, InconsistentAssignment };

constexpr std::string_view to_string(OracleErrc code) {
  switch (code) {
    case OracleErrc::LengthMismatch: return "LengthMismatch";
    case OracleErrc::InterfaceMismatch: return "InterfaceMismatch";
    case OracleErrc::TooManyInputs: return "TooManyInputs";
    case OracleErrc::InconsistentAssignment: return "InconsistentAssignment";
  }
  return "?";
}

class OracleError : public std::runtime_error {
 public:
  OracleError(OracleErrc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}
  OracleErrc code() const noexcept { return code_; }

 private:
  OracleErrc code_;
};

/// A single stuck-at fault.
struct FaultSite {
  Line line;
  bool stuck_value = false;

  friend constexpr auto operator<=>(const FaultSite&, const FaultSite&) = default;
};

/// Primary-output values for one input vector (inputs in declaration order).
inline std::vector<bool> simulate(const Circuit& c, const std::vector<bool>& inputs) {
  if (inputs.size() != c.inputs().size())
    throw OracleError(OracleErrc::LengthMismatch, "expected " + std::to_string(c.inputs().size()) + " input values, got " +
                                                      std::to_string(inputs.size()));
  std::vector<std::uint8_t> value(c.capacity(), 0);
  for (std::size_t k = 0; k < inputs.size(); ++k) value[c.inputs()[k]] = inputs[k];
  std::vector<std::uint64_t> pins;
  const TopoIndex topo(c);
  for (auto v : topo.order()) {
    if (c.kind(v) == GateKind::Input) continue;
    pins.clear();
    for (auto d : c.fanin(v)) pins.push_back(value[d] ? ~std::uint64_t{0} : 0);
    value[v] = evaluate_words(c.kind(v), pins) & 1;
  }
  std::vector<bool> out;
  out.reserve(c.outputs().size());
  for (const auto& po : c.outputs()) out.push_back(value[po.driver]);
  return out;
}

/// Bit-parallel simulation of all 2^n input vectors. Vector number x assigns
/// input k (declaration order, or the order given) the bit n-1-k of x, so the
/// first input is the most significant.
class ExhaustiveSimulator {
 public:
  explicit ExhaustiveSimulator(const Circuit& c, unsigned bound = kDefaultInputBound) : c_(c) {
    init(c.inputs(), bound);
  }

  ExhaustiveSimulator(const Circuit& c, std::span<const VertexId> input_order, unsigned bound) : c_(c) {
    init(input_order, bound);
  }

  unsigned input_count() const { return n_; }
  std::size_t words() const { return words_; }
  std::uint64_t valid_mask(std::size_t w) const { return w + 1 == words_ ? last_mask_ : ~std::uint64_t{0}; }

  std::span<const std::uint64_t> values(VertexId v) const { return {good_.data() + v * words_, words_}; }

  /// Input vector number x in the simulator's input order.
  std::vector<bool> vector_at(std::uint64_t x) const {
    std::vector<bool> bits(n_);
    for (unsigned k = 0; k < n_; ++k) bits[k] = (x >> (n_ - 1 - k)) & 1;
    return bits;
  }

  /// Per word, the vectors on which some primary output differs when `line` is
  /// stuck at `stuck` (or complemented when stuck is nullopt).
  std::vector<std::uint64_t> output_difference(Line line, std::optional<bool> stuck) const {
    std::vector<std::uint64_t> diff(words_, 0);
    auto root = line.is_stem() ? line.driver : line.sink;

    // Transitive fanout of root in topological order.
    std::vector<std::uint8_t> in_cone(c_.capacity(), 0);
    std::vector<VertexId> cone;
    in_cone[root] = 1;
    for (auto v : order_) {
      if (!in_cone[v]) continue;
      cone.push_back(v);
      for (auto s : c_.fanout(v)) in_cone[s] = 1;
    }
    std::vector<std::uint64_t> faulty(c_.capacity(), 0);
    std::vector<std::uint64_t> pins;
    for (std::size_t w = 0; w < words_; ++w) {
      auto good = [&](VertexId v) { return good_[v * words_ + w]; };
      auto forced = [&](VertexId v) { return stuck ? (*stuck ? ~std::uint64_t{0} : 0) : ~good(v); };
      for (auto v : cone) {
        if (line.is_stem() && v == root) {
          faulty[v] = forced(v);
          continue;
        }
        auto in = c_.fanin(v);
        pins.resize(in.size());
        bool branch_done = false;
        for (std::size_t k = 0; k < in.size(); ++k) {
          auto d = in[k];
          if (!line.is_stem() && v == root && d == line.driver && !branch_done) {
            pins[k] = forced(d);
            branch_done = true;
          } else {
            pins[k] = in_cone[d] ? faulty[d] : good(d);
          }
        }
        faulty[v] = c_.kind(v) == GateKind::Input ? good(v) : evaluate_words(c_.kind(v), pins);
      }
      std::uint64_t d = 0;
      for (const auto& po : c_.outputs())
        if (in_cone[po.driver]) d |= faulty[po.driver] ^ good(po.driver);
      diff[w] = d & valid_mask(w);
    }
    return diff;
  }

 private:
  void init(std::span<const VertexId> input_order, unsigned bound) {
    n_ = static_cast<unsigned>(input_order.size());
    if (n_ > bound || n_ > 30)
      throw OracleError(OracleErrc::TooManyInputs,
                        std::to_string(n_) + " primary inputs exceed the bound of " + std::to_string(bound));
    std::uint64_t vectors = std::uint64_t{1} << n_;
    words_ = std::max<std::size_t>(1, vectors / 64);
    last_mask_ = vectors >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << vectors) - 1;

    static constexpr std::array<std::uint64_t, 6> kPattern = {
        0xAAAAAAAAAAAAAAAAull, 0xCCCCCCCCCCCCCCCCull, 0xF0F0F0F0F0F0F0F0ull,
        0xFF00FF00FF00FF00ull, 0xFFFF0000FFFF0000ull, 0xFFFFFFFF00000000ull,
    };
    good_.assign(c_.capacity() * words_, 0);
    for (unsigned k = 0; k < n_; ++k) {
      auto v = input_order[k];
      unsigned bit = n_ - 1 - k;
      for (std::size_t w = 0; w < words_; ++w)
        good_[v * words_ + w] = bit < 6 ? kPattern[bit] : (((w >> (bit - 6)) & 1) ? ~std::uint64_t{0} : 0);
    }
    order_ = TopoIndex(c_).order();
    std::vector<std::uint64_t> pins;
    for (auto v : order_) {
      if (c_.kind(v) == GateKind::Input) continue;
      auto in = c_.fanin(v);
      pins.resize(in.size());
      for (std::size_t w = 0; w < words_; ++w) {
        for (std::size_t k = 0; k < in.size(); ++k) pins[k] = good_[in[k] * words_ + w];
        good_[v * words_ + w] = evaluate_words(c_.kind(v), pins);
      }
    }
  }

  const Circuit& c_;
  unsigned n_ = 0;
  std::size_t words_ = 1;
  std::uint64_t last_mask_ = 0;
  std::vector<std::uint64_t> good_;
  std::vector<VertexId> order_;
};

struct EquivalenceResult {
  bool equivalent = true;
  std::vector<bool> counterexample;  // first differing vector, inputs in the first circuit's order
  std::string differing_output;
};

/// Exhaustive equivalence; inputs and outputs are matched by name.
inline EquivalenceResult equivalent(const Circuit& a, const Circuit& b, unsigned bound = kDefaultInputBound) {
  auto mismatch = [](const std::string& what) { throw OracleError(OracleErrc::InterfaceMismatch, what); };
  if (a.inputs().size() != b.inputs().size()) mismatch("different number of primary inputs");
  if (a.outputs().size() != b.outputs().size()) mismatch("different number of primary outputs");

  std::vector<VertexId> b_inputs;
  for (auto v : a.inputs()) {
    auto w = b.find(a.name(v));
    if (!w || b.kind(*w) != GateKind::Input) mismatch("input '" + a.name(v) + "' missing");
    b_inputs.push_back(*w);
  }
  std::unordered_map<std::string, VertexId> b_outputs;
  for (const auto& po : b.outputs()) b_outputs.emplace(po.name, po.driver);

  ExhaustiveSimulator sa(a, bound);
  ExhaustiveSimulator sb(b, b_inputs, bound);

  EquivalenceResult r;
  std::uint64_t first = ~std::uint64_t{0};
  for (const auto& po : a.outputs()) {
    auto it = b_outputs.find(po.name);
    if (it == b_outputs.end()) mismatch("output '" + po.name + "' missing");
    auto va = sa.values(po.driver);
    auto vb = sb.values(it->second);
    for (std::size_t w = 0; w < sa.words(); ++w) {
      auto d = (va[w] ^ vb[w]) & sa.valid_mask(w);
      if (!d) continue;
      std::uint64_t x = w * 64 + static_cast<std::uint64_t>(__builtin_ctzll(d));
      if (x < first) {
        first = x;
        r.differing_output = po.name;
      }
      break;
    }
  }
  if (first != ~std::uint64_t{0}) {
    r.equivalent = false;
    r.counterexample = sa.vector_at(first);
  }
  return r;
}

/// True when no input vector distinguishes the faulty circuit from the good one.
inline bool is_undetectable(const Circuit& c, const FaultSite& f, unsigned bound = kDefaultInputBound) {
  ExhaustiveSimulator sim(c, bound);
  auto d = sim.output_difference(f.line, f.stuck_value);
  return std::all_of(d.begin(), d.end(), [](auto w) { return w == 0; });
}

/// Every stem, plus every fanout branch of a stem with more than one
/// destination, at both stuck values, whose fault no input vector detects.
inline std::vector<FaultSite> undetectable_faults(const Circuit& c, unsigned bound = kDefaultInputBound) {
  ExhaustiveSimulator sim(c, bound);
  std::vector<FaultSite> out;
  auto probe = [&](Line line) {
    for (bool s : {false, true}) {
      auto d = sim.output_difference(line, s);
      if (std::all_of(d.begin(), d.end(), [](auto w) { return w == 0; })) out.push_back({line, s});
    }
  };
  const TopoIndex topo(c);
  for (auto v : topo.order()) {
    probe(Line::stem(v));
    if (c.out_degree(v) > 1)
      for (auto u : c.fanout(v)) probe(Line::branch(v, u));
  }
  return out;
}

/// True when complementing `line` changes some primary output on at least one
/// input vector whose good values satisfy every constraint.
inline bool line_observable_under(const Circuit& c, Line line, std::span<const Assignment> constraints,
                                  unsigned bound = kDefaultInputBound) {
  ExhaustiveSimulator sim(c, bound);
  std::vector<std::uint64_t> care(sim.words());
  bool satisfiable = false;
  for (std::size_t w = 0; w < sim.words(); ++w) {
    std::uint64_t m = sim.valid_mask(w);
    for (auto a : constraints) {
      auto v = sim.values(a.vertex)[w];
      m &= a.value ? v : ~v;
    }
    care[w] = m;
    satisfiable = satisfiable || m != 0;
  }
  if (!satisfiable) throw OracleError(OracleErrc::InconsistentAssignment, "no input vector satisfies the constraints");
  auto d = sim.output_difference(line, std::nullopt);
  for (std::size_t w = 0; w < d.size(); ++w)
    if (d[w] & care[w]) return true;
  return false;
}

}  // namespace redrem
