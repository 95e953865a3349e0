#include <catch_amalgamated.hpp>

#include <algorithm>

#include "support.hpp"

using namespace redrem;

namespace {

constexpr Ternary U = Ternary::Unassigned;
constexpr Ternary Z = Ternary::Zero;
constexpr Ternary O = Ternary::One;

std::vector<PinAssignment> forced(GateKind k, Ternary out, std::vector<Ternary> in) {
  auto r = direct_implications(k, out, in);
  REQUIRE_FALSE(r.contradiction);
  return r.forced;
}

bool contains(const RunQueue& q, VertexId v, bool value) {
  return std::find(q.entries.begin(), q.entries.end(), Assignment{v, value}) != q.entries.end();
}

}  // namespace

TEST_CASE("direct implications of AND") {
  CHECK(forced(GateKind::And, U, {Z, U}) == std::vector<PinAssignment>{{kOutputPin, false}});
  CHECK(forced(GateKind::And, O, {U, U}) == std::vector<PinAssignment>{{0, true}, {1, true}});
  CHECK(forced(GateKind::And, U, {O, O}) == std::vector<PinAssignment>{{kOutputPin, true}});
  // Last open input of a controlled output must be controlling.
  CHECK(forced(GateKind::And, Z, {O, U, O}) == std::vector<PinAssignment>{{1, false}});
  CHECK(forced(GateKind::And, Z, {U, U}).empty());
}

TEST_CASE("direct implications of the other kinds") {
  CHECK(forced(GateKind::Nor, U, {U, O}) == std::vector<PinAssignment>{{kOutputPin, false}});
  CHECK(forced(GateKind::Nor, O, {U, U}) == std::vector<PinAssignment>{{0, false}, {1, false}});
  CHECK(forced(GateKind::Nand, O, {O, U}) == std::vector<PinAssignment>{{1, false}});
  CHECK(forced(GateKind::Not, U, {O}) == std::vector<PinAssignment>{{kOutputPin, false}});
  CHECK(forced(GateKind::Not, O, {U}) == std::vector<PinAssignment>{{0, false}});
  CHECK(forced(GateKind::Buf, Z, {U}) == std::vector<PinAssignment>{{0, false}});
  CHECK(forced(GateKind::Xor, O, {O, U}) == std::vector<PinAssignment>{{1, false}});
  CHECK(forced(GateKind::Xnor, U, {O, Z}) == std::vector<PinAssignment>{{kOutputPin, false}});
  CHECK(forced(GateKind::Xor, U, {O, U}).empty());
}

TEST_CASE("conflicting pins are a contradiction") {
  CHECK(direct_implications(GateKind::And, O, std::vector<Ternary>{Z, U}).contradiction);
  CHECK(direct_implications(GateKind::Xor, Z, std::vector<Ternary>{O, Z}).contradiction);
  CHECK(direct_implications(GateKind::Or, Z, std::vector<Ternary>{O, O}).contradiction);
}

TEST_CASE("direct implications agree with gate evaluation") {
  // Every forced value holds in every completion of the partial assignment.
  for (auto k : kAllGateKinds) {
    if (is_source(k)) continue;
    std::size_t n = is_single_input(k) ? 1 : 3;
    std::size_t pins = n + 1;
    std::size_t combos = 1;
    for (std::size_t p = 0; p < pins; ++p) combos *= 3;
    for (std::size_t code = 0; code < combos; ++code) {
      std::vector<Ternary> t(pins);
      for (std::size_t p = 0, x = code; p < pins; ++p, x /= 3) t[p] = static_cast<Ternary>(x % 3);
      std::vector<Ternary> in(t.begin() + 1, t.end());
      auto r = direct_implications(k, t[0], in);
      bool any_completion = false;
      for (unsigned full = 0; full < (1u << pins); ++full) {
        std::vector<bool> val(pins);
        bool fits = true;
        for (std::size_t p = 0; p < pins; ++p) {
          val[p] = (full >> p) & 1;
          if (is_assigned(t[p]) && to_bool(t[p]) != val[p]) fits = false;
        }
        bool ins[3] = {val.size() > 1 && val[1], val.size() > 2 && val[2], val.size() > 3 && val[3]};
        if (!fits || evaluate(k, std::span<const bool>(ins, n)) != val[0]) continue;
        any_completion = true;
        for (auto f : r.forced) CHECK(val[f.pin == kOutputPin ? 0 : f.pin + 1] == f.value);
      }
      if (r.contradiction) CHECK_FALSE(any_completion);
    }
  }
}

TEST_CASE("propagation justifies an AND output") {
  Circuit c;
  auto a = c.add_input("a");
  auto b = c.add_input("b");
  auto f = c.add_gate(GateKind::And, "f", {a, b});
  c.add_output("f", f);
  auto q = propagate_uncontrollability(c, nullptr, f, true);
  REQUIRE(q);
  CHECK(q->entries == std::vector<Assignment>{{f, true}, {a, true}, {b, true}});
}

TEST_CASE("propagation on a AND (a OR b) from the OR gate") {
  auto c = testing::fixture("conflict");
  auto o = c.at("o"), a = c.at("a"), b = c.at("b"), f = c.at("f");
  RunState st;
  REQUIRE(propagate_uncontrollability(c, nullptr, o, false, st));
  const auto& q = st.queue(false);
  CHECK(q.entries.front() == Assignment{o, false});
  CHECK(contains(q, a, false));
  CHECK(contains(q, b, false));
  CHECK(contains(q, f, false));
  CHECK(st.master(false, f) == MasterRef::all());  // both a and o are 0 at f

  // The enumerated forced set: every vertex fixed by o = 0 over the 4 vectors.
  ExhaustiveSimulator sim(c);
  std::size_t fixed = 0;
  for (auto v : c.live_vertices())
    for (bool j : {false, true})
      if (testing::implication_holds(sim, o, false, v, j)) ++fixed;
  CHECK(fixed == q.entries.size());
  CHECK(testing::unsound_entries(c, q, o) == 0);
}

TEST_CASE("master names the single controlling input") {
  auto c = testing::fixture("conflict");
  auto a = c.at("a"), f = c.at("f");
  RunState st;
  REQUIRE(propagate_uncontrollability(c, nullptr, a, false, st));
  CHECK(st.master(false, f) == MasterRef::of(a));
  REQUIRE(propagate_uncontrollability(c, nullptr, a, true, st));
  CHECK(st.master(true, f).is_null());
}

TEST_CASE("a contradiction empties the run") {
  // f = AND(a, NOT a) cannot be 1.
  Circuit c;
  auto a = c.add_input("a");
  auto n = c.add_gate(GateKind::Not, "n", {a});
  auto f = c.add_gate(GateKind::And, "f", {a, n});
  c.add_output("f", f);
  CHECK_FALSE(propagate_uncontrollability(c, nullptr, f, true));
  CHECK(propagate_uncontrollability(c, nullptr, f, false));
}

namespace {

// v = 0 forces u = w = x = 0, but x = 1 alone implies nothing directly.
struct LearningCircuit {
  Circuit c;
  VertexId v, u, w, x, y, z;
  LearningCircuit() {
    v = c.add_input("v");
    auto p = c.add_input("p");
    auto q = c.add_input("q");
    z = c.add_input("z");
    u = c.add_gate(GateKind::And, "u", {v, p});
    w = c.add_gate(GateKind::And, "w", {v, q});
    x = c.add_gate(GateKind::Or, "x", {u, w});
    y = c.add_gate(GateKind::And, "y", {x, z});
    c.add_output("y", y);
  }
};

}  // namespace

TEST_CASE("a learned implication assigns what direct implication cannot") {
  LearningCircuit lc;
  auto& c = lc.c;
  RunState st;
  REQUIRE(propagate_uncontrollability(c, nullptr, lc.v, false, st));
  CHECK(contains(st.queue(false), lc.x, false));

  ImplicationStore store;
  store.reset(c.capacity());
  CHECK(learn_contrapositives(store, st.queue(false), lc.v) == st.queue(false).entries.size() - 1);
  auto learned = store.implications(lc.x, true);
  CHECK(std::find(learned.begin(), learned.end(), Assignment{lc.v, true}) != learned.end());

  auto plain = propagate_uncontrollability(c, nullptr, lc.y, true);
  REQUIRE(plain);
  CHECK_FALSE(contains(*plain, lc.v, true));

  RunState st2;
  REQUIRE(propagate_uncontrollability(c, &store, lc.y, true, st2));
  CHECK(contains(st2.queue(true), lc.v, true));
  CHECK(st2.used_learned(true));
  CHECK(testing::unsound_entries(c, st2.queue(true), lc.y) == 0);

  SECTION("an invalid target is not used") {
    store.set_invalid(lc.v);
    auto q = propagate_uncontrollability(c, &store, lc.y, true);
    REQUIRE(q);
    CHECK_FALSE(contains(*q, lc.v, true));
  }
}

TEST_CASE("contrapositive learning") {
  RunQueue q{false, {{0, false}, {1, false}}};
  ImplicationStore store;
  store.reset(2);
  CHECK(learn_contrapositives(store, q, 0) == 1);
  CHECK(store.implications(1, true).size() == 1);
  CHECK(store.implications(1, true)[0] == Assignment{0, true});
  CHECK(store.implications(1, false).empty());
  // Learning the same run again adds nothing.
  CHECK(learn_contrapositives(store, q, 0) == 0);

  RunQueue single{true, {{0, true}}};
  ImplicationStore empty;
  empty.reset(2);
  CHECK(learn_contrapositives(empty, single, 0) == 0);
  CHECK(empty.size() == 0);
}

namespace {

// i -> g0 -> g1 -> ... -> g{n-1}, alternating NOT and BUF.
Circuit chain(unsigned n) {
  Circuit c;
  VertexId prev = c.add_input("i");
  for (unsigned k = 0; k < n; ++k)
    prev = c.add_gate(k % 2 ? GateKind::Buf : GateKind::Not, "g" + std::to_string(k), {prev});
  c.add_output("out", prev);
  return c;
}

}  // namespace

TEST_CASE("R1 stops at vertices without implications") {
  auto c = chain(4);
  TopoIndex topo(c);
  auto g0 = c.at("g0"), g1 = c.at("g1"), g2 = c.at("g2"), g3 = c.at("g3");
  ImplicationStore store;
  store.reset(c.capacity());

  SECTION("empty lists at v") {
    store.add(g1, true, {g3, false});
    auto r = update_implications(store, c, topo, g0, g0);
    CHECK(r.cleared_pairs == 0);
    CHECK(store.implications(g1, true).size() == 1);
  }
  SECTION("frontier") {
    store.add(g0, false, {g3, true});
    store.add(g1, true, {g3, false});
    store.add(g3, true, {g0, true});
    auto r = update_implications(store, c, topo, g0, g0);
    CHECK(r.cleared_pairs == 2);
    CHECK(store.empty(g0));
    CHECK(store.empty(g1));
    CHECK(store.empty(g2));
    CHECK(store.implications(g3, true).size() == 1);
  }
}

TEST_CASE("R2 flags the index interval below v_base") {
  auto c = chain(25);
  TopoIndex topo(c);
  auto v = topo.at(10);
  auto v_base = topo.at(25);
  ImplicationStore store;
  store.reset(c.capacity());
  auto r = update_implications(store, c, topo, v, v_base);
  for (std::uint32_t slot = 11; slot < 25; ++slot) CHECK(store.invalid(topo.at(slot)));
  // The edited vertex itself changes function too, so it is flagged as well.
  CHECK(store.invalid(v));
  CHECK_FALSE(store.invalid(v_base));
  CHECK_FALSE(store.invalid(topo.at(9)));
  CHECK(r.flagged_vertices == 15);

  ImplicationStore other;
  other.reset(c.capacity());
  CHECK(update_implications(other, c, topo, v_base, v).flagged_vertices == 0);
}

TEST_CASE("propagation is sound and deterministic on random circuits") {
  for (unsigned seed = 1; seed <= 150; ++seed) {
    auto c = testing::corpus_circuit(seed);
    for (auto v : c.live_vertices())
      for (bool i : {false, true}) {
        auto q1 = propagate_uncontrollability(c, nullptr, v, i);
        auto q2 = propagate_uncontrollability(c, nullptr, v, i);
        REQUIRE(q1.has_value() == q2.has_value());
        if (!q1) continue;
        CHECK(q1->entries == q2->entries);
        CHECK(q1->entries.front() == Assignment{v, i});
        REQUIRE(testing::unsound_entries(c, *q1, v) == 0);
      }
  }
}

TEST_CASE("learned implications hold when learned") {
  for (unsigned seed = 1; seed <= 100; ++seed) {
    auto c = testing::corpus_circuit(seed);
    ImplicationStore store;
    store.reset(c.capacity());
    RunState st;
    const TopoIndex topo(c);
    for (auto v : topo.order())
      for (bool i : {false, true})
        if (propagate_uncontrollability(c, &store, v, i, st)) learn_contrapositives(store, st.queue(i), v);
    CHECK(testing::invalid_implications(c, store) == 0);
  }
}
