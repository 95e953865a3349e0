// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "../support.hpp"

using namespace redrem;
using redrem::testing::corpus_circuit;
using redrem::testing::fixture;
using redrem::testing::kCorpusSize;

namespace {

constexpr double kEquivalenceBudgetSeconds = 60.0;
constexpr unsigned kOracleCorpusCircuits = 150;
constexpr unsigned kShortCircuitCircuits = 200;
constexpr unsigned kShortCircuitMaxInputs = 14;
constexpr unsigned kImplicationCircuits = 100;
constexpr unsigned kIrredundantPasses = 50;
constexpr double kC432Tolerance = 0.20;
constexpr double kC432Presented = 63;
constexpr double kC432Fire = 45;
constexpr double kSmallBudgetSeconds = 2.0;
constexpr double kLargeBudgetSeconds = 15.0;

struct Outcome {
  bool pass;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<Circuit> fixtures() {
  std::vector<Circuit> out;
  for (const auto& name : testing::fixture_names()) out.push_back(fixture(name));
  return out;
}

RemovalReport reduce(Circuit& c, RemovalConfig cfg, RemovalObserver* obs = nullptr) {
  cfg.observer = obs;
  return remove_redundancy(c, cfg);
}

const RemovalConfig kModes[] = {RemovalConfig::presented(), RemovalConfig::fire_baseline()};

Outcome equivalence_safety() {
  auto t0 = std::chrono::steady_clock::now();
  std::size_t runs = 0, ok = 0;
  auto one = [&](const Circuit& original) {
    for (const auto& cfg : kModes) {
      auto c = original;
      reduce(c, cfg);
      auto reread = parse_bench(write_bench(c));
      ++runs;
      ok += equivalent(original, reread).equivalent;
    }
  };
  for (const auto& f : fixtures()) one(f);
  for (unsigned s = 1; s <= kCorpusSize; ++s) one(corpus_circuit(s));
  double t = seconds_since(t0);
  char buf[160];
  std::snprintf(buf, sizeof buf, "%zu/%zu reduced netlists equivalent, %.1f s (budget %.0f s)", ok, runs, t,
                kEquivalenceBudgetSeconds);
  return {ok == runs && t < kEquivalenceBudgetSeconds, buf};
}

// Checks each removed line and constant against the oracle on the pre-edit circuit.
struct OracleAudit : RemovalObserver {
  std::size_t checked = 0, violations = 0;
  void before_edit(const RemovalEvent& e, const Circuit& c) override {
    if (e.kind == RemovalKind::Merge) return;
    auto fault = testing::canonical_fault(c, e.line, e.value);
    auto faults = undetectable_faults(c);
    ++checked;
    if (std::find(faults.begin(), faults.end(), fault) == faults.end()) ++violations;
  }
};

Outcome oracle_agreement() {
  OracleAudit audit;
  auto one = [&](Circuit c) {
    for (const auto& cfg : kModes) {
      auto d = c;
      reduce(d, cfg, &audit);
    }
  };
  for (const auto& f : fixtures()) one(f);
  for (unsigned s = 1; s <= kOracleCorpusCircuits; ++s) one(corpus_circuit(s));
  return {audit.violations == 0 && audit.checked > 0, std::to_string(audit.checked) + " removed lines checked on " +
                                                          std::to_string(kOracleCorpusCircuits) +
                                                          " corpus circuits + fixtures, " +
                                                          std::to_string(audit.violations) + " violations"};
}

Outcome improvement_dominance() {
  std::size_t presented = 0, fire = 0, failing = 0;
  for (unsigned s = 1; s <= kCorpusSize; ++s) {
    auto a = corpus_circuit(s), b = a;
    auto p = reduce(a, RemovalConfig::presented()).total_removals();
    auto f = reduce(b, RemovalConfig::fire_baseline()).total_removals();
    presented += p;
    fire += f;
    failing += p < f;
  }
  char buf[256];
  std::snprintf(buf, sizeof buf, "presented %zu vs fire %zu removals (%+.1f%%), presented < fire on %zu/%u circuits",
                presented, fire, 100.0 * (double(presented) - double(fire)) / double(fire), failing, kCorpusSize);
  std::string detail = buf;
  bool pass = failing == 0 && presented > fire;

  auto c432 = std::filesystem::path(REDREM_TEST_DATA) / "iscas" / "c432.bench";
  if (std::filesystem::exists(c432)) {
    auto a = read_bench_file(c432.string()), b = a;
    double p = reduce(a, RemovalConfig::presented()).total_removals();
    double f = reduce(b, RemovalConfig::fire_baseline()).total_removals();
    bool in = std::abs(p - kC432Presented) <= kC432Tolerance * kC432Presented &&
              std::abs(f - kC432Fire) <= kC432Tolerance * kC432Fire;
    std::snprintf(buf, sizeof buf, "; C432 presented %.0f fire %.0f", p, f);
    detail += buf;
    pass = pass && in;
  } else {
    detail += "; C432 skipped (no netlist)";
  }
  return {pass, detail};
}

struct ShortCircuitAudit : RemovalObserver {
  std::size_t taken = 0, wrong = 0, vacuous = 0;
  void before_edit(const RemovalEvent& e, const Circuit& c) override {
    if (!e.short_circuit) return;
    ++taken;
    std::vector<Assignment> cond{{e.v_base, e.run}};
    try {
      wrong += line_observable_under(c, e.line, cond);
    } catch (const OracleError& err) {
      if (err.code() != OracleErrc::InconsistentAssignment) throw;
      ++vacuous;
    }
  }
};

Outcome short_circuit_soundness() {
  ShortCircuitAudit audit;
  for (unsigned s = 1; s <= kShortCircuitCircuits; ++s) {
    auto c = random_circuit(s, 3 + s % (kShortCircuitMaxInputs - 2), 15 + (s * 11) % 66);
    reduce(c, RemovalConfig::presented(), &audit);
  }
  return {audit.wrong == 0 && audit.taken > 0,
          std::to_string(audit.taken) + " unchecked removals, " + std::to_string(audit.wrong) + " observable, " +
              std::to_string(audit.vacuous) + " vacuous"};
}

Outcome counter_comparison() {
  std::size_t failing = 0, irredundant = 0, irredundant_checks = 0;
  std::uint64_t presented = 0, fire = 0;
  for (unsigned s = 1; s <= kCorpusSize; ++s) {
    auto a = corpus_circuit(s), b = a;
    auto p = reduce(a, RemovalConfig::presented()).counters.unobservability_checks;
    auto f = reduce(b, RemovalConfig::fire_baseline()).counters.unobservability_checks;
    presented += p;
    fire += f;
    failing += p > f;

    // Reduce to a fixpoint; keep it if the oracle finds no undetectable fault.
    auto cfg = RemovalConfig::presented();
    cfg.passes = kIrredundantPasses;
    auto d = corpus_circuit(s);
    reduce(d, cfg);
    if (!undetectable_faults(d).empty()) continue;
    ++irredundant;
    irredundant_checks += reduce(d, RemovalConfig::presented()).counters.unobservability_checks;
  }
  auto x = fixture("xor_tree");
  if (undetectable_faults(x).empty()) {
    ++irredundant;
    irredundant_checks += reduce(x, RemovalConfig::presented()).counters.unobservability_checks;
  }
  return {failing == 0 && irredundant > 0 && irredundant_checks == 0,
          "checks presented " + std::to_string(presented) + " vs fire " + std::to_string(fire) +
              ", presented > fire on " + std::to_string(failing) + " circuits, " +
              std::to_string(irredundant_checks) + " checks on " + std::to_string(irredundant) +
              " certified irredundant circuits"};
}

Outcome beyond_atpg() {
  auto c = fixture("demorgan");
  auto undetectable = undetectable_faults(c).size();
  auto before = c.gate_count();
  auto d = c;
  auto p = reduce(c, RemovalConfig::presented());
  auto f = reduce(d, RemovalConfig::fire_baseline());
  bool pass = undetectable == 0 && !p.merges.empty() && c.gate_count() < before && f.total_removals() == 0 &&
              equivalent(fixture("demorgan"), c).equivalent;
  return {pass, std::to_string(undetectable) + " undetectable faults, presented merges " +
                    std::to_string(p.merges.size()) + " (gates " + std::to_string(before) + " -> " +
                    std::to_string(c.gate_count()) + "), fire removes " + std::to_string(f.total_removals())};
}

struct ImplicationAudit : RemovalObserver {
  std::size_t edits = 0, invalid = 0;
  void after_edit(const RemovalEvent&, const Circuit& c, const ImplicationStore& store) override {
    ++edits;
    invalid += testing::invalid_implications(c, store);
  }
};

Outcome implication_consistency() {
  ImplicationAudit audit;
  for (unsigned s = 1; s <= kImplicationCircuits; ++s) {
    auto c = corpus_circuit(s);
    reduce(c, RemovalConfig::presented(), &audit);
  }
  return {audit.invalid == 0 && audit.edits > 0, std::to_string(audit.edits) + " edits revalidated, " +
                                                     std::to_string(audit.invalid) + " invalid implications"};
}

Outcome throughput() {
  auto timed = [](unsigned inputs, unsigned gates) {
    auto c = random_circuit(7, inputs, gates);
    auto t0 = std::chrono::steady_clock::now();
    reduce(c, RemovalConfig::presented());
    return seconds_since(t0);
  };
  double small = timed(100, 5000), large = timed(250, 25000);
  char buf[160];
  std::snprintf(buf, sizeof buf, "5k gates %.2f s (budget %.0f), 25k gates %.2f s (budget %.0f)", small,
                kSmallBudgetSeconds, large, kLargeBudgetSeconds);
  return {small < kSmallBudgetSeconds && large < kLargeBudgetSeconds, buf};
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"AC1 equivalence safety", equivalence_safety},
      {"AC2 oracle agreement", oracle_agreement},
      {"AC3 improvement dominance", improvement_dominance},
      {"AC4 unchecked removals are unobservable", short_circuit_soundness},
      {"AC5 unobservability check counts", counter_comparison},
      {"AC6 duplicate merge beyond stuck-at", beyond_atpg},
      {"AC7 stored implications stay valid", implication_consistency},
      {"AC8 throughput", throughput},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", int(std::size(criteria)) - failed, std::size(criteria));
  return failed ? 1 : 0;
}
