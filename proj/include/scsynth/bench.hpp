#pragma once

// Benchmark targets with their correlation setups, reference figures and
// known hand-built circuits, plus SN-length sweeps.

#include "scsynth/cost.hpp"
#include "scsynth/synth.hpp"
#include "scsynth/validity.hpp"

#include <algorithm>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace scsynth {

/// Allowed excess over the reference error for a run to count as a pass.
inline constexpr double bench_tolerance = 0.05;

struct Benchmark {
  std::string name;
  TargetFunction function;
  std::vector<InputSpec> inputs;
  std::size_t default_length = 1;  // synthesized instruction count
  double reference_error = 0.0;
  std::optional<std::size_t> baseline_length;
  /// Known circuit for the target, netlist text; empty when none is known.
  std::string reference_netlist;

  TargetSpec target(std::size_t grid = 16, std::size_t length = 256) const {
    return TargetSpec{function, inputs, grid, length};
  }
};

namespace detail {

inline std::vector<InputSpec> correlated(SequenceKind kind, std::size_t n) {
  return std::vector<InputSpec>(n, InputSpec{kind, CorrelationClass{0}, std::nullopt});
}

inline std::vector<InputSpec> uncorrelated(SequenceKind kind, std::size_t n) {
  std::vector<InputSpec> out;
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back({kind, CorrelationClass{static_cast<std::uint32_t>(i)}, std::nullopt});
  }
  return out;
}

} // namespace detail

inline const std::vector<Benchmark>& benchmark_registry() {
  using K = SequenceKind;
  using detail::correlated;
  using detail::uncorrelated;
  namespace fn = functions;
  static const std::vector<Benchmark> registry = {
      {"scaled_adder", fn::scaled_sum(), uncorrelated(K::lfsr, 2), 3, 0.027, 3,
       // XOR marks disagreeing cycles; a TFF alternates which of them emit 1.
       "inputs 2\nXOR r0 r1 -> r2\nTFF r2 -> r3\nMUX r3 r0 r2 -> r4\noutput r4"},
      {"subtractor", fn::abs_diff(), correlated(K::van_der_corput, 2), 1, 0.0, 1,
       "inputs 2\nXOR r0 r1 -> r2\noutput r2"},
      {"uncorrelated_multiplier", fn::product(), uncorrelated(K::lfsr, 2), 2, 0.021, 1,
       "inputs 2\nDFF r1 -> r2\nAND r0 r2 -> r3\noutput r3"},
      {"division", fn::quotient(), correlated(K::van_der_corput, 2), 2, 0.038, 2,
       // Holds the last output sampled while Y was 1.
       "inputs 2\nDFF r3 -> r2\nMUX r0 r2 r1 -> r3\noutput r3"},
      {"scale_quarter", fn::scale_quarter(), correlated(K::van_der_corput, 1), 5, 0.0, 4,
       "inputs 1\nTFF r0 -> r1\nAND r0 r1 -> r2\nTFF r2 -> r3\nAND r2 r3 -> r4\noutput r4"},
      {"scale_third", fn::scale_third(), correlated(K::van_der_corput, 1), 5, 0.0, 4,
       // Modulo-3 counter over the 1s of X in (r2, r1); emits on every third.
       "inputs 1\nDFF r3 -> r1\nDFF r4 -> r2\nMUX r6 r1 r0 -> r3\nMUX r1 r2 r0 -> r4\n"
       "OR r1 r2 -> r5\nNOT r5 -> r6\nAND r0 r2 -> r7\noutput r7"},
      {"scale_half", fn::scale_half(), correlated(K::van_der_corput, 1), 2, 0.0, 2,
       "inputs 1\nTFF r0 -> r1\nAND r0 r1 -> r2\noutput r2"},
      {"scaled_relu", fn::relu_half(), correlated(K::van_der_corput, 1), 16, 0.0, 11,
       // OR with a stream that is 1 on even cycles, i.e. the lower half of
       // the Van der Corput thresholds.
       "inputs 1\nNOT r0 -> r1\nOR r0 r1 -> r2\nTFF r2 -> r3\nNOT r3 -> r4\nOR r0 r4 -> r5\noutput r5"},
      {"correlated_multiplier", fn::product(), correlated(K::van_der_corput, 2), 4, 0.035, std::nullopt, ""},
      {"sqrt", fn::square_root(), correlated(K::van_der_corput, 1), 5, 0.024, std::nullopt, ""},
      {"sine", fn::sine(), correlated(K::van_der_corput, 1), 8, 0.068, std::nullopt, ""},
      {"exponentiation", fn::power(), uncorrelated(K::van_der_corput, 2), 7, 0.031, std::nullopt, ""},
      {"cosine", fn::cosine(), correlated(K::van_der_corput, 1), 10, 0.15, std::nullopt, ""},
  };
  return registry;
}

inline const Benchmark* find_benchmark(std::string_view name) {
  for (const auto& b : benchmark_registry()) {
    if (b.name == name) {
      return &b;
    }
  }
  return nullptr;
}

struct BenchReport {
  std::string name;
  std::size_t length = 0;
  std::uint64_t budget = 0;
  Program best;  // dead slots stripped
  double best_cost = 1.0;
  double reference_error = 0.0;
  bool pass = false;
  SynthesisResult result;
};

/// Synthesizes against the benchmark's default suite. A zero
/// cfg.program_length selects the benchmark's default length; cfg.n_inputs
/// is taken from the benchmark.
inline BenchReport run_benchmark(std::string_view name, SynthConfig cfg) {
  const auto* b = find_benchmark(name);
  if (!b) {
    throw error("unknown benchmark '" + std::string(name) + "'");
  }
  const auto suite = make_test_suite(b->target());
  if (cfg.program_length == 0) {
    cfg.program_length = b->default_length;
  }
  cfg.n_inputs = b->inputs.size();

  BenchReport rep;
  rep.name = b->name;
  rep.length = cfg.program_length;
  rep.budget = cfg.budget;
  rep.result = synthesize(cfg, suite);
  rep.best_cost = rep.result.best_cost;
  rep.best = validate(rep.result.best).valid ? strip_dead(rep.result.best) : rep.result.best;
  rep.reference_error = b->reference_error;
  rep.pass = rep.best_cost <= b->reference_error + bench_tolerance;
  return rep;
}

inline std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << v;
  return os.str();
}

inline std::string bench_csv(const std::vector<BenchReport>& reports) {
  std::string out = "name,I,budget,best_cost,reference_error,pass\n";
  for (const auto& r : reports) {
    out += r.name + "," + std::to_string(r.length) + "," + std::to_string(r.budget) + "," +
           format_double(r.best_cost) + "," + format_double(r.reference_error) + "," +
           (r.pass ? "true" : "false") + "\n";
  }
  return out;
}

struct SweepRow {
  std::size_t length = 0;
  double error = 0.0;
};

/// Cost of the same circuit on suites regenerated at each SN length.
inline std::vector<SweepRow> sweep_lengths(const Program& p, const TargetSpec& spec,
                                           const std::vector<std::size_t>& lengths) {
  const auto rep = validate(p);
  if (!rep.valid) {
    throw invalid_program_error(*rep.loop_witness);
  }
  auto sorted = lengths;
  std::sort(sorted.begin(), sorted.end());
  std::vector<SweepRow> rows;
  for (auto n : sorted) {
    if (n < 8) {
      throw error("sweep lengths must be at least 8, got " + std::to_string(n));
    }
    TargetSpec s = spec;
    s.length = n;
    rows.push_back({n, evaluate_cost(p, make_test_suite(s))});
  }
  return rows;
}

inline std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = "N,error\n";
  for (const auto& r : rows) {
    out += std::to_string(r.length) + "," + format_double(r.error) + "\n";
  }
  return out;
}

} // namespace scsynth
