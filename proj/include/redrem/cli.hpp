#pragma once

#include <filesystem>
#include <iostream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "redrem/bench_io.hpp"
#include "redrem/oracle.hpp"
#include "redrem/random_circuit.hpp"
#include "redrem/remover.hpp"
#include "redrem/report.hpp"

namespace redrem {

namespace detail {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline std::string bits(const std::vector<bool>& v) {
  std::string s;
  for (bool b : v) s += b ? '1' : '0';
  return s;
}

inline RemovalConfig make_config(const std::string& mode, const std::vector<int>& disabled) {
  if (mode == "fire") {
    if (!disabled.empty()) throw UsageError("--no-improvement cannot be combined with --mode fire");
    return RemovalConfig::fire_baseline();
  }
  RemovalConfig cfg;
  for (int k : disabled) cfg.improvements.disable(k);
  return cfg;
}

}  // namespace detail

/// Entry point of the command-line tool. argv[0] is the program name.
inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Redundancy identification and removal for combinational .bench netlists", "redrem"};
  app.require_subcommand(1);

  std::string input, output, other, mode = "presented", report = "text";
  std::vector<int> disabled;
  unsigned bound = kDefaultInputBound, passes = 1;
  bool verify = false;
  std::uint64_t seed = 0;
  unsigned n_inputs = 0, n_gates = 0;

  auto add_mode_options = [&](CLI::App* sub) {
    sub->add_option("--mode", mode, "presented or fire")->check(CLI::IsMember({"presented", "fire"}));
    sub->add_option("--no-improvement", disabled, "disable improvement 1..4 (repeatable)")
        ->check(CLI::Range(1, 4))
        ->expected(1)
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  };

  auto* reduce = app.add_subcommand("reduce", "remove redundancies and write the reduced netlist");
  reduce->add_option("input", input, "input .bench file")->required();
  reduce->add_option("-o,--output", output, "output .bench file");
  add_mode_options(reduce);
  reduce->add_option("--report", report, "text or lines")->check(CLI::IsMember({"text", "lines"}));
  reduce->add_option("--passes", passes, "maximum number of passes over the vertex list")->check(CLI::Range(1u, 1000u));
  reduce->add_flag("--verify-oracle", verify, "check every edit by exhaustive simulation");
  reduce->add_option("--oracle-bound", bound, "maximum primary inputs for exhaustive checks");

  auto* stats = app.add_subcommand("stats", "print the instrumentation counters of a reduction");
  stats->add_option("input", input, "input .bench file")->required();
  add_mode_options(stats);

  auto* verify_cmd = app.add_subcommand("verify", "check two netlists for equivalence");
  verify_cmd->add_option("first", input, "first .bench file")->required();
  verify_cmd->add_option("second", other, "second .bench file")->required();
  verify_cmd->add_option("--oracle-bound", bound, "maximum primary inputs for exhaustive checks");

  auto* gen = app.add_subcommand("gen", "write a seeded random netlist");
  gen->add_option("--seed", seed, "random seed")->required();
  gen->add_option("--inputs", n_inputs, "number of primary inputs")->required()->check(CLI::Range(1u, 1000000u));
  gen->add_option("--gates", n_gates, "number of gates")->required();
  gen->add_option("-o,--output", output, "output .bench file (default: standard output)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  }

  try {
    if (reduce->parsed() || stats->parsed()) {
      auto cfg = detail::make_config(mode, disabled);
      cfg.passes = passes;
      cfg.verify_with_oracle = verify;
      cfg.oracle_bound = bound;
      auto c = read_bench_file(input);
      const auto original = verify ? std::optional<Circuit>(c) : std::nullopt;
      auto before = CircuitSize::of(c);
      auto r = remove_redundancy(c, cfg);

      if (stats->parsed()) {
        write_counter_lines(out, r);
        return 0;
      }
      if (!output.empty()) write_bench_file(c, output);
      if (report == "lines")
        write_report_lines(out, r);
      else
        write_report_text(out, r, std::filesystem::path(input).stem().string(), cfg.mode(), before,
                          CircuitSize::of(c));

      int status = 0;
      if (verify) {
        if (r.oracle_violations > 0) {
          err << "oracle reported " << r.oracle_violations << " violation(s)\n";
          status = 1;
        }
        if (original && original->inputs().size() <= bound) {
          auto eq = equivalent(*original, c, bound);
          if (!eq.equivalent) {
            err << "reduced netlist differs on output " << eq.differing_output << " for input " << detail::bits(eq.counterexample)
                << '\n';
            status = 1;
          }
        }
      }
      return status;
    }

    if (verify_cmd->parsed()) {
      auto a = read_bench_file(input);
      auto b = read_bench_file(other);
      EquivalenceResult eq;
      try {
        eq = equivalent(a, b, bound);
      } catch (const OracleError& e) {
        if (e.code() != OracleErrc::InterfaceMismatch) throw;
        out << "not equivalent: " << e.what() << '\n';
        return 1;
      }
      if (eq.equivalent) {
        out << "equivalent\n";
        return 0;
      }
      out << "not equivalent: output " << eq.differing_output << " differs for input " << detail::bits(eq.counterexample)
          << '\n';
      return 1;
    }

    if (gen->parsed()) {
      auto c = random_circuit(seed, n_inputs, n_gates);
      if (output.empty())
        write_bench(c, out);
      else
        write_bench_file(c, output);
      return 0;
    }
  } catch (const std::exception& e) {
    err << "redrem: " << e.what() << '\n';
    return 2;
  }
  return 2;
}

inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"redrem"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace redrem
