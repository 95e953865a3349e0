#pragma once

#include <algorithm>
#include <cassert>
#include <compare>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "redrem/gate.hpp"

namespace redrem {

using VertexId = std::uint32_t;
inline constexpr VertexId kNoVertex = std::numeric_limits<VertexId>::max();

enum class Polarity : std::uint8_t { Same, Complemented };

enum class NetlistErrc : std::uint8_t {
  CycleDetected,
  ArityMismatch,
  DuplicateName,
  InconsistentAdjacency,
  EdgeAbsent,
  IsPrimaryInput,
  WouldCreateCycle,
  EmptyVictimList,
  InvalidVertex,
  InvalidArgument,
};

constexpr std::string_view to_string(NetlistErrc code) {
  switch (code) {
    case NetlistErrc::CycleDetected: return "CycleDetected";
    case NetlistErrc::ArityMismatch: return "ArityMismatch";
    case NetlistErrc::DuplicateName: return "DuplicateName";
    case NetlistErrc::InconsistentAdjacency: return "InconsistentAdjacency";
    case NetlistErrc::EdgeAbsent: return "EdgeAbsent";
    case NetlistErrc::IsPrimaryInput: return "IsPrimaryInput";
    case NetlistErrc::WouldCreateCycle: return "WouldCreateCycle";
    case NetlistErrc::EmptyVictimList: return "EmptyVictimList";
    case NetlistErrc::InvalidVertex: return "InvalidVertex";
    case NetlistErrc::InvalidArgument: return "InvalidArgument";
  }
  return "?";
}

class NetlistError : public std::runtime_error {
 public:
  NetlistError(NetlistErrc code, const std::string& what, std::vector<VertexId> vertices = {})
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), vertices_(std::move(vertices)) {}

  NetlistErrc code() const noexcept { return code_; }
  const std::vector<VertexId>& vertices() const noexcept { return vertices_; }

 private:
  NetlistErrc code_;
  std::vector<VertexId> vertices_;
};

/// First violation reported by validate().
struct StructuralError {
  NetlistErrc code;
  std::vector<VertexId> vertices;
  std::string message;
};

/// A fault site: either the output (stem) of a vertex or one fanout edge (branch).
struct Line {
  VertexId driver = kNoVertex;
  VertexId sink = kNoVertex;  // kNoVertex for a stem

  static constexpr Line stem(VertexId v) { return {v, kNoVertex}; }
  static constexpr Line branch(VertexId v, VertexId u) { return {v, u}; }
  constexpr bool is_stem() const { return sink == kNoVertex; }

  friend constexpr auto operator<=>(const Line&, const Line&) = default;
};

/// A value on a vertex output, e.g. one entry of a propagation queue.
struct Assignment {
  VertexId vertex = kNoVertex;
  bool value = false;

  friend constexpr bool operator==(const Assignment&, const Assignment&) = default;
};

struct Vertex {
  GateKind kind = GateKind::Input;
  std::string name;
  std::vector<VertexId> fanin;
  std::vector<VertexId> fanout;  // one entry per edge, in adjacency order
  std::uint32_t output_refs = 0;
  bool alive = true;
};

struct PrimaryOutput {
  std::string name;
  VertexId driver = kNoVertex;
};

/// What a structural edit did to the vertex set.
struct EditDelta {
  std::vector<VertexId> created;
  std::vector<VertexId> removed;
  std::vector<VertexId> rewritten;  // surviving vertices whose kind or fanin changed

  bool empty() const { return created.empty() && removed.empty() && rewritten.empty(); }
};

/// Combinational netlist: a DAG of gates and primary inputs with explicit fanout
/// edges and named primary outputs.
///
/// Vertex ids are stable for the lifetime of the object. Removed vertices stay in
/// storage with `alive == false` so that ids handed out earlier never alias.
class Circuit {
 public:
  // -- construction --------------------------------------------------------

  VertexId add_input(std::string_view name) {
    auto v = add_vertex(GateKind::Input, name);
    inputs_.push_back(v);
    return v;
  }

  VertexId add_constant(bool value, std::string_view name) {
    return add_vertex(value ? GateKind::Const1 : GateKind::Const0, name);
  }

  VertexId add_gate(GateKind kind, std::string_view name, std::span<const VertexId> fanin = {}) {
    if (kind == GateKind::Input) return add_input(name);
    auto v = add_vertex(kind, name);
    for (auto d : fanin) connect(d, v);
    return v;
  }

  VertexId add_gate(GateKind kind, std::string_view name, std::initializer_list<VertexId> fanin) {
    return add_gate(kind, name, std::span<const VertexId>(fanin.begin(), fanin.size()));
  }

  /// Appends an input pin to `sink` fed by `driver`. Arity is checked by validate().
  void connect(VertexId driver, VertexId sink) {
    check_alive(driver);
    check_alive(sink);
    vertices_[sink].fanin.push_back(driver);
    vertices_[driver].fanout.push_back(sink);
  }

  void add_output(std::string_view name, VertexId driver) {
    check_alive(driver);
    for (const auto& po : outputs_)
      if (po.name == name) throw NetlistError(NetlistErrc::DuplicateName, "output '" + std::string(name) + "'");
    outputs_.push_back({std::string(name), driver});
    ++vertices_[driver].output_refs;
  }

  // -- queries -------------------------------------------------------------

  std::size_t capacity() const { return vertices_.size(); }
  bool contains(VertexId v) const { return v < vertices_.size() && vertices_[v].alive; }
  const Vertex& vertex(VertexId v) const { return vertices_.at(v); }
  GateKind kind(VertexId v) const { return vertices_[v].kind; }
  const std::string& name(VertexId v) const { return vertices_[v].name; }
  std::span<const VertexId> fanin(VertexId v) const { return vertices_[v].fanin; }
  std::span<const VertexId> fanout(VertexId v) const { return vertices_[v].fanout; }

  /// |OUT(v)| counting primary-output references as observation edges.
  std::size_t out_degree(VertexId v) const { return vertices_[v].fanout.size() + vertices_[v].output_refs; }
  bool drives_output(VertexId v) const { return vertices_[v].output_refs > 0; }

  const std::vector<VertexId>& inputs() const { return inputs_; }
  const std::vector<PrimaryOutput>& outputs() const { return outputs_; }

  std::optional<VertexId> find(std::string_view name) const {
    auto it = names_.find(std::string(name));
    if (it == names_.end()) return std::nullopt;
    return it->second;
  }

  VertexId at(std::string_view name) const {
    auto v = find(name);
    if (!v) throw NetlistError(NetlistErrc::InvalidVertex, "no vertex named '" + std::string(name) + "'");
    return *v;
  }

  bool has_edge(VertexId v, VertexId u) const {
    if (!contains(v) || !contains(u)) return false;
    const auto& in = vertices_[u].fanin;
    return std::find(in.begin(), in.end(), v) != in.end();
  }

  std::vector<VertexId> live_vertices() const {
    std::vector<VertexId> out;
    for (VertexId v = 0; v < vertices_.size(); ++v)
      if (vertices_[v].alive) out.push_back(v);
    return out;
  }

  /// Live vertices that are neither primary inputs nor constants.
  std::size_t gate_count() const {
    std::size_t n = 0;
    for (const auto& vx : vertices_)
      if (vx.alive && !is_source(vx.kind)) ++n;
    return n;
  }

  std::size_t edge_count() const {
    std::size_t n = 0;
    for (const auto& vx : vertices_)
      if (vx.alive) n += vx.fanin.size();
    return n;
  }

  /// True when `to` is reachable from `from` along fanout edges (from == to counts).
  bool reaches(VertexId from, VertexId to) const {
    std::vector<char> seen(vertices_.size(), 0);
    std::vector<VertexId> stack{from};
    seen[from] = 1;
    while (!stack.empty()) {
      auto x = stack.back();
      stack.pop_back();
      if (x == to) return true;
      for (auto y : vertices_[x].fanout)
        if (!seen[y]) {
          seen[y] = 1;
          stack.push_back(y);
        }
    }
    return false;
  }

  /// Returns a name not used by any live vertex or primary output.
  std::string fresh_name(std::string_view base) const {
    auto taken = [&](const std::string& n) {
      if (names_.count(n)) return true;
      return std::any_of(outputs_.begin(), outputs_.end(), [&](const auto& po) { return po.name == n; });
    };
    std::string candidate(base);
    for (std::size_t k = 1; taken(candidate); ++k) candidate = std::string(base) + "_" + std::to_string(k);
    return candidate;
  }

  // -- structural edits ----------------------------------------------------

  /// Removes edge (v,u) and simplifies u as if that pin were tied to `value`.
  EditDelta replace_edge_with_constant(VertexId v, VertexId u, bool value) {
    if (!has_edge(v, u)) throw NetlistError(NetlistErrc::EdgeAbsent, "edge " + label(v) + "->" + label(u), {v, u});
    Worklist wl;
    detach(v, u);
    wl.sweep.push_back(v);
    tie_pin(u, value, wl);
    return drain(wl);
  }

  /// Replaces v by CONST(value). Primary outputs driven by v keep their names and
  /// are driven by v, which becomes a constant vertex.
  EditDelta replace_vertex_with_constant(VertexId v, bool value) {
    check_alive(v);
    if (vertices_[v].kind == GateKind::Input)
      throw NetlistError(NetlistErrc::IsPrimaryInput, "cannot replace primary input " + label(v), {v});
    Worklist wl;
    make_constant(v, value, wl);
    return drain(wl);
  }

  /// Re-roots the fanout (and primary outputs) of every victim onto the survivor,
  /// or onto an inverter fed by the survivor for Polarity::Complemented. An existing
  /// NOT(survivor) is reused unless `reuse_inverter` is false.
  EditDelta merge_vertices(VertexId survivor, std::span<const VertexId> victims, Polarity polarity,
                           bool reuse_inverter = true) {
    if (victims.empty()) throw NetlistError(NetlistErrc::EmptyVictimList, "merge into " + label(survivor), {survivor});
    check_alive(survivor);
    for (std::size_t k = 0; k < victims.size(); ++k) {
      auto w = victims[k];
      check_alive(w);
      if (w == survivor || std::find(victims.begin(), victims.begin() + k, w) != victims.begin() + k)
        throw NetlistError(NetlistErrc::InvalidArgument, "merge operands must be pairwise distinct", {w});
      if (vertices_[w].kind == GateKind::Input)
        throw NetlistError(NetlistErrc::IsPrimaryInput, "cannot merge away primary input " + label(w), {w});
      if (reaches(w, survivor))
        throw NetlistError(NetlistErrc::WouldCreateCycle, label(survivor) + " is in the fanout cone of " + label(w),
                           {survivor, w});
    }

    EditDelta delta;
    VertexId target = survivor;
    if (polarity == Polarity::Complemented) {
      target = kNoVertex;
      if (reuse_inverter) target = existing_inverter(survivor, victims);
      if (target == kNoVertex) {
        target = add_vertex(GateKind::Not, fresh_name(vertices_[survivor].name + "_n"));
        connect(survivor, target);
        delta.created.push_back(target);
      }
    }

    Worklist wl;
    for (auto w : victims) {
      if (!vertices_[w].alive) continue;
      redirect(w, target, wl);
      wl.sweep.push_back(w);
    }
    auto rest = drain(wl);
    delta.removed = std::move(rest.removed);
    delta.rewritten = std::move(rest.rewritten);
    delta.created.insert(delta.created.end(), rest.created.begin(), rest.created.end());
    return delta;
  }

  /// First NOT gate fed by `v` that is not listed in `exclude`.
  VertexId existing_inverter(VertexId v, std::span<const VertexId> exclude = {}) const {
    for (auto x : vertices_[v].fanout)
      if (vertices_[x].alive && vertices_[x].kind == GateKind::Not &&
          std::find(exclude.begin(), exclude.end(), x) == exclude.end())
        return x;
    return kNoVertex;
  }

  /// Folds constant vertices into their consumers, collapses repeated gate inputs,
  /// and sweeps gates that reach no primary output.
  EditDelta canonicalize() {
    Worklist wl;
    for (VertexId v = 0; v < vertices_.size(); ++v) {
      auto& vx = vertices_[v];
      if (!vx.alive) continue;
      if (is_constant(vx.kind) && !vx.fanout.empty()) wl.constants.push_back(v);
      if (has_repeated_input(v)) collapse_repeated_inputs(v, wl);
      if (out_degree(v) == 0) wl.sweep.push_back(v);
    }
    return drain(wl);
  }

  /// Human-readable name for diagnostics.
  std::string label(VertexId v) const {
    if (v < vertices_.size()) return "'" + vertices_[v].name + "'";
    return "#" + std::to_string(v);
  }

 private:
  struct Worklist {
    std::vector<VertexId> constants;  // vertices that just became constant
    std::vector<VertexId> sweep;      // candidates for dead-cone removal
    std::vector<VertexId> rewritten;
  };

  VertexId add_vertex(GateKind kind, std::string_view name) {
    std::string n(name);
    if (n.empty()) throw NetlistError(NetlistErrc::InvalidArgument, "vertex names must be non-empty");
    if (names_.count(n)) throw NetlistError(NetlistErrc::DuplicateName, "'" + n + "'");
    auto v = static_cast<VertexId>(vertices_.size());
    vertices_.push_back(Vertex{kind, n, {}, {}, 0, true});
    names_.emplace(std::move(n), v);
    return v;
  }

  void check_alive(VertexId v) const {
    if (!contains(v)) throw NetlistError(NetlistErrc::InvalidVertex, "vertex " + label(v) + " is not live", {v});
  }

  static void erase_one(std::vector<VertexId>& xs, VertexId x) {
    auto it = std::find(xs.begin(), xs.end(), x);
    assert(it != xs.end());
    xs.erase(it);
  }

  void detach(VertexId v, VertexId u) {
    erase_one(vertices_[u].fanin, v);
    erase_one(vertices_[v].fanout, u);
  }

  void make_constant(VertexId v, bool value, Worklist& wl) {
    auto& vx = vertices_[v];
    auto drivers = std::move(vx.fanin);
    vx.fanin.clear();
    for (auto d : drivers) {
      erase_one(vertices_[d].fanout, v);
      wl.sweep.push_back(d);
    }
    vx.kind = value ? GateKind::Const1 : GateKind::Const0;
    wl.constants.push_back(v);
    wl.rewritten.push_back(v);
  }

  // Simplifies u after one of its input edges was removed and tied to `value`.
  void tie_pin(VertexId u, bool value, Worklist& wl) {
    auto& ux = vertices_[u];
    const auto kind = ux.kind;
    if (has_controlling_value(kind)) {
      if (value == *controlling_value(kind)) {
        make_constant(u, *controlled_value(kind), wl);
        return;
      }
      if (ux.fanin.size() == 1) ux.kind = is_inverting(kind) ? GateKind::Not : GateKind::Buf;
    } else if (is_parity(kind)) {
      if (value) ux.kind = complement(ux.kind);
      reduce_parity_arity(u, wl);
      if (!ux.alive || is_constant(ux.kind)) return;
    } else if (is_single_input(kind)) {
      make_constant(u, kind == GateKind::Buf ? value : !value, wl);
      return;
    } else {
      assert(false && "source vertices have no input pins");
    }
    wl.rewritten.push_back(u);
  }

  void reduce_parity_arity(VertexId u, Worklist& wl) {
    auto& ux = vertices_[u];
    if (ux.fanin.size() == 1)
      ux.kind = ux.kind == GateKind::Xor ? GateKind::Buf : GateKind::Not;
    else if (ux.fanin.empty())
      make_constant(u, ux.kind == GateKind::Xnor, wl);
  }

  bool has_repeated_input(VertexId u) const {
    const auto& in = vertices_[u].fanin;
    for (std::size_t a = 0; a < in.size(); ++a)
      for (std::size_t b = a + 1; b < in.size(); ++b)
        if (in[a] == in[b]) return true;
    return false;
  }

  // AND(a,a,b) -> AND(a,b); XOR(a,a,b) -> BUF(b).
  void collapse_repeated_inputs(VertexId u, Worklist& wl) {
    auto& ux = vertices_[u];
    std::vector<VertexId> kept;
    if (is_parity(ux.kind)) {
      for (auto d : ux.fanin) {
        auto it = std::find(kept.begin(), kept.end(), d);
        if (it != kept.end()) {
          kept.erase(it);
          erase_one(vertices_[d].fanout, u);
          erase_one(vertices_[d].fanout, u);
          wl.sweep.push_back(d);
        } else {
          kept.push_back(d);
        }
      }
      ux.fanin = std::move(kept);
      wl.rewritten.push_back(u);
      reduce_parity_arity(u, wl);
      return;
    }
    for (auto d : ux.fanin) {
      if (std::find(kept.begin(), kept.end(), d) != kept.end())
        erase_one(vertices_[d].fanout, u);
      else
        kept.push_back(d);
    }
    ux.fanin = std::move(kept);
    if (has_controlling_value(ux.kind) && ux.fanin.size() == 1)
      ux.kind = is_inverting(ux.kind) ? GateKind::Not : GateKind::Buf;
    wl.rewritten.push_back(u);
  }

  void redirect(VertexId from, VertexId to, Worklist& wl) {
    auto consumers = std::move(vertices_[from].fanout);
    vertices_[from].fanout.clear();
    for (auto x : consumers) {
      auto& in = vertices_[x].fanin;
      *std::find(in.begin(), in.end(), from) = to;
      vertices_[to].fanout.push_back(x);
      if (has_repeated_input(x)) collapse_repeated_inputs(x, wl);
      wl.rewritten.push_back(x);
    }
    if (vertices_[from].output_refs > 0) {
      for (auto& po : outputs_)
        if (po.driver == from) po.driver = to;
      vertices_[to].output_refs += vertices_[from].output_refs;
      vertices_[from].output_refs = 0;
    }
  }

  EditDelta drain(Worklist& wl) {
    EditDelta delta;
    while (!wl.constants.empty() || !wl.sweep.empty()) {
      while (!wl.constants.empty()) {
        auto c = wl.constants.back();
        wl.constants.pop_back();
        if (!vertices_[c].alive || !is_constant(vertices_[c].kind)) continue;
        const bool value = vertices_[c].kind == GateKind::Const1;
        auto consumers = vertices_[c].fanout;
        for (auto x : consumers) {
          if (!vertices_[x].alive || is_constant(vertices_[x].kind)) continue;
          detach(c, x);
          tie_pin(x, value, wl);
        }
        wl.sweep.push_back(c);
      }
      while (!wl.sweep.empty()) {
        auto v = wl.sweep.back();
        wl.sweep.pop_back();
        auto& vx = vertices_[v];
        if (!vx.alive || vx.kind == GateKind::Input || out_degree(v) != 0) continue;
        for (auto d : vx.fanin) {
          erase_one(vertices_[d].fanout, v);
          wl.sweep.push_back(d);
        }
        vx.fanin.clear();
        vx.alive = false;
        names_.erase(vx.name);
        delta.removed.push_back(v);
      }
    }
    std::sort(wl.rewritten.begin(), wl.rewritten.end());
    wl.rewritten.erase(std::unique(wl.rewritten.begin(), wl.rewritten.end()), wl.rewritten.end());
    for (auto v : wl.rewritten)
      if (vertices_[v].alive) delta.rewritten.push_back(v);
    wl.rewritten.clear();
    return delta;
  }

  std::vector<Vertex> vertices_;
  std::vector<VertexId> inputs_;
  std::vector<PrimaryOutput> outputs_;
  std::unordered_map<std::string, VertexId> names_;
};

/// Checks name uniqueness, gate arity, adjacency consistency and acyclicity.
/// Returns the first violation found.
inline std::optional<StructuralError> validate(const Circuit& c) {
  std::unordered_map<std::string_view, VertexId> seen;
  for (VertexId v = 0; v < c.capacity(); ++v) {
    if (!c.contains(v)) continue;
    auto [it, fresh] = seen.emplace(c.name(v), v);
    if (!fresh) return StructuralError{NetlistErrc::DuplicateName, {it->second, v}, "name '" + c.name(v) + "' reused"};
  }
  for (VertexId v = 0; v < c.capacity(); ++v) {
    if (!c.contains(v)) continue;
    if (!arity_ok(c.kind(v), c.fanin(v).size()))
      return StructuralError{NetlistErrc::ArityMismatch, {v},
                             std::string(to_string(c.kind(v))) + " " + c.label(v) + " has " +
                                 std::to_string(c.fanin(v).size()) + " inputs"};
  }
  for (VertexId v = 0; v < c.capacity(); ++v) {
    if (!c.contains(v)) continue;
    for (auto d : c.fanin(v)) {
      if (!c.contains(d)) return StructuralError{NetlistErrc::InconsistentAdjacency, {d, v}, "dead driver"};
      auto in_count = std::count(c.fanin(v).begin(), c.fanin(v).end(), d);
      auto out_count = std::count(c.fanout(d).begin(), c.fanout(d).end(), v);
      if (in_count != out_count)
        return StructuralError{NetlistErrc::InconsistentAdjacency, {d, v}, "fanin/fanout lists disagree"};
    }
    for (auto s : c.fanout(v))
      if (!c.contains(s)) return StructuralError{NetlistErrc::InconsistentAdjacency, {v, s}, "dead consumer"};
  }
  std::vector<std::uint32_t> refs(c.capacity(), 0);
  for (const auto& po : c.outputs()) {
    if (!c.contains(po.driver))
      return StructuralError{NetlistErrc::InconsistentAdjacency, {po.driver}, "output '" + po.name + "' has no driver"};
    ++refs[po.driver];
  }
  for (VertexId v = 0; v < c.capacity(); ++v)
    if (c.contains(v) && refs[v] != c.vertex(v).output_refs)
      return StructuralError{NetlistErrc::InconsistentAdjacency, {v}, "output reference count mismatch"};

  // Kahn's algorithm; whatever is left over lies on or behind a cycle.
  std::vector<std::uint32_t> pending(c.capacity(), 0);
  std::vector<VertexId> ready;
  std::size_t live = 0;
  for (VertexId v = 0; v < c.capacity(); ++v) {
    if (!c.contains(v)) continue;
    ++live;
    pending[v] = static_cast<std::uint32_t>(c.fanin(v).size());
    if (pending[v] == 0) ready.push_back(v);
  }
  std::size_t done = 0;
  while (!ready.empty()) {
    auto v = ready.back();
    ready.pop_back();
    ++done;
    for (auto s : c.fanout(v))
      if (--pending[s] == 0) ready.push_back(s);
  }
  if (done != live) {
    std::vector<VertexId> stuck;
    for (VertexId v = 0; v < c.capacity(); ++v)
      if (c.contains(v) && pending[v] != 0) stuck.push_back(v);
    return StructuralError{NetlistErrc::CycleDetected, stuck, "combinational cycle"};
  }
  return std::nullopt;
}

/// Throws NetlistError when validate() reports a violation.
inline void require_valid(const Circuit& c) {
  if (auto err = validate(c)) throw NetlistError(err->code, err->message, err->vertices);
}

}  // namespace redrem
