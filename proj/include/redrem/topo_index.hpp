#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <vector>

#include "redrem/circuit.hpp"

namespace redrem {

/// Longest path (in gates) from any source to each live vertex. Dead vertices get 0.
inline std::vector<std::uint32_t> longest_path_levels(const Circuit& c) {
  std::vector<std::uint32_t> level(c.capacity(), 0);
  std::vector<std::uint32_t> pending(c.capacity(), 0);
  std::vector<VertexId> ready;
  for (VertexId v = 0; v < c.capacity(); ++v) {
    if (!c.contains(v)) continue;
    pending[v] = static_cast<std::uint32_t>(c.fanin(v).size());
    if (pending[v] == 0) ready.push_back(v);
  }
  for (std::size_t head = 0; head < ready.size(); ++head) {
    auto v = ready[head];
    for (auto s : c.fanout(v)) {
      level[s] = std::max(level[s], level[v] + 1);
      if (--pending[s] == 0) ready.push_back(s);
    }
  }
  return level;
}

/// Forward topological numbering of the vertices of one removal session.
///
/// Vertices are ordered by longest-path level and, within a level, by creation
/// order, so every edge goes from a smaller to a larger index. Slots are never
/// renumbered: a removed vertex leaves a gap, and a replacement vertex may take
/// over the slot of the vertex it replaces.
class TopoIndex {
 public:
  static constexpr std::uint32_t kUnindexed = std::numeric_limits<std::uint32_t>::max();

  TopoIndex() = default;

  explicit TopoIndex(const Circuit& c) {
    auto level = longest_path_levels(c);
    order_ = c.live_vertices();
    std::stable_sort(order_.begin(), order_.end(), [&](VertexId a, VertexId b) { return level[a] < level[b]; });
    index_.assign(c.capacity(), kUnindexed);
    for (std::uint32_t k = 0; k < order_.size(); ++k) index_[order_[k]] = k;
  }

  bool has(VertexId v) const { return v < index_.size() && index_[v] != kUnindexed; }
  std::uint32_t operator[](VertexId v) const { return has(v) ? index_[v] : kUnindexed; }

  /// Vertex currently holding `slot` (may since have been removed from the circuit).
  VertexId at(std::uint32_t slot) const { return order_[slot]; }
  std::size_t size() const { return order_.size(); }
  const std::vector<VertexId>& order() const { return order_; }

  /// Gives `v` the slot previously held by `previous`.
  void inherit(VertexId v, VertexId previous) {
    grow(v);
    auto slot = index_[previous];
    index_[v] = slot;
    order_[slot] = v;
    index_[previous] = kUnindexed;
  }

  std::uint32_t append(VertexId v) {
    grow(v);
    index_[v] = static_cast<std::uint32_t>(order_.size());
    order_.push_back(v);
    return index_[v];
  }

 private:
  void grow(VertexId v) {
    if (v >= index_.size()) index_.resize(v + 1, kUnindexed);
  }

  std::vector<std::uint32_t> index_;
  std::vector<VertexId> order_;
};

inline TopoIndex topo_index(const Circuit& c) { return TopoIndex(c); }

/// True when every live edge (u,v) satisfies index(u) < index(v).
inline bool is_forward_order(const Circuit& c, const TopoIndex& idx) {
  for (VertexId v = 0; v < c.capacity(); ++v) {
    if (!c.contains(v)) continue;
    if (!idx.has(v)) return false;
    for (auto d : c.fanin(v))
      if (!(idx[d] < idx[v])) return false;
  }
  return true;
}

}  // namespace redrem
