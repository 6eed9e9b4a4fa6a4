#pragma once

// Test suites and the program cost function.

#include "scsynth/bitgen.hpp"
#include "scsynth/ir.hpp"
#include "scsynth/simulator.hpp"
#include "scsynth/validity.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace scsynth {

/// A real function of the primary input probabilities. Returning nullopt
/// marks the point as outside the domain; such test cases are dropped.
struct TargetFunction {
  std::string name;
  std::size_t arity = 1;
  std::function<std::optional<double>(std::span<const double>)> eval;
  /// Drop samples whose nominal value on this primary input is below 2/grid.
  std::optional<std::size_t> divisor;
  /// Polynomial coefficients, lowest degree first, when name == "poly".
  std::vector<double> coefficients;
};

namespace functions {

inline TargetFunction unary(std::string name, double (*f)(double)) {
  return {std::move(name), 1, [f](std::span<const double> v) -> std::optional<double> { return f(v[0]); }, {}, {}};
}

inline TargetFunction binary(std::string name, double (*f)(double, double)) {
  return {std::move(name), 2,
          [f](std::span<const double> v) -> std::optional<double> { return f(v[0], v[1]); }, {}, {}};
}

inline TargetFunction identity() { return unary("identity", [](double x) { return x; }); }
inline TargetFunction scaled_sum() { return binary("scaled_sum", [](double x, double y) { return 0.5 * (x + y); }); }
inline TargetFunction abs_diff() { return binary("abs_diff", [](double x, double y) { return std::abs(x - y); }); }
inline TargetFunction product() { return binary("product", [](double x, double y) { return x * y; }); }
inline TargetFunction minimum() { return binary("min", [](double x, double y) { return std::min(x, y); }); }
inline TargetFunction maximum() { return binary("max", [](double x, double y) { return std::max(x, y); }); }
inline TargetFunction scale_half() { return unary("scale_half", [](double x) { return x / 2.0; }); }
inline TargetFunction scale_third() { return unary("scale_third", [](double x) { return x / 3.0; }); }
inline TargetFunction scale_quarter() { return unary("scale_quarter", [](double x) { return x / 4.0; }); }
inline TargetFunction relu_half() { return unary("relu_half", [](double x) { return std::max(0.5, x); }); }
inline TargetFunction square_root() { return unary("sqrt", [](double x) { return std::sqrt(x); }); }

inline TargetFunction sine() {
  return unary("sine", [](double x) { return (std::sin(2.0 * std::numbers::pi * x) + 1.0) / 2.0; });
}

inline TargetFunction cosine() {
  return unary("cosine", [](double x) { return (std::cos(2.0 * std::numbers::pi * x) + 1.0) / 2.0; });
}

/// x^y with 0^0 = 1.
inline TargetFunction power() {
  return binary("power", [](double x, double y) { return y == 0.0 ? 1.0 : std::pow(x, y); });
}

inline TargetFunction quotient() {
  TargetFunction f{"quotient", 2,
                   [](std::span<const double> v) -> std::optional<double> {
                     if (v[1] <= 0.0) {
                       return std::nullopt;
                     }
                     return v[0] / v[1];
                   },
                   1, {}};
  return f;
}

inline TargetFunction polynomial(std::vector<double> coefficients) {
  if (coefficients.empty()) {
    throw error("polynomial needs at least one coefficient");
  }
  TargetFunction f;
  f.name = "poly";
  f.arity = 1;
  f.coefficients = coefficients;
  f.eval = [c = std::move(coefficients)](std::span<const double> v) -> std::optional<double> {
    double acc = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) {
      acc = acc * v[0] + *it;
    }
    return acc;
  };
  return f;
}

inline const std::vector<std::string>& builtin_names() {
  static const std::vector<std::string> names = {
      "identity", "scaled_sum", "abs_diff", "product", "min", "max", "quotient", "scale_half",
      "scale_third", "scale_quarter", "relu_half", "sqrt", "sine", "cosine", "power"};
  return names;
}

inline std::optional<TargetFunction> builtin(std::string_view name) {
  if (name == "identity") return identity();
  if (name == "scaled_sum") return scaled_sum();
  if (name == "abs_diff") return abs_diff();
  if (name == "product") return product();
  if (name == "min") return minimum();
  if (name == "max") return maximum();
  if (name == "quotient") return quotient();
  if (name == "scale_half") return scale_half();
  if (name == "scale_third") return scale_third();
  if (name == "scale_quarter") return scale_quarter();
  if (name == "relu_half") return relu_half();
  if (name == "sqrt") return square_root();
  if (name == "sine") return sine();
  if (name == "cosine") return cosine();
  if (name == "power") return power();
  return std::nullopt;
}

} // namespace functions

struct InputSpec {
  SequenceKind kind = SequenceKind::van_der_corput;
  CorrelationClass cls{};
  /// Same nominal value as that input, generated under this input's own class.
  std::optional<std::size_t> duplicate_of;

  bool operator==(const InputSpec&) const = default;
};

struct TargetSpec {
  TargetFunction function;
  std::vector<InputSpec> inputs;
  std::size_t grid = 16;
  std::size_t length = 256;

  std::size_t n_inputs() const noexcept { return inputs.size(); }

  /// Indices of inputs that are not duplicates, in order.
  std::vector<std::size_t> primaries() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      if (!inputs[i].duplicate_of) {
        out.push_back(i);
      }
    }
    return out;
  }
};

struct TestCase {
  std::vector<Bitstream> inputs;
  double expected = 0.0;
};

class TestSuite {
public:
  TestSuite() = default;
  TestSuite(std::size_t n_inputs, std::size_t length, std::vector<TestCase> cases, std::size_t excluded = 0)
      : n_inputs_(n_inputs), length_(length), cases_(std::move(cases)), excluded_(excluded) {
    std::vector<std::vector<Bitstream>> bindings;
    bindings.reserve(cases_.size());
    for (const auto& c : cases_) {
      if (c.inputs.size() != n_inputs_) {
        throw error("test case input count does not match suite");
      }
      if (!(c.expected >= 0.0 && c.expected <= 1.0)) {
        throw error("expected value outside [0, 1]");
      }
      bindings.push_back(c.inputs);
    }
    packed_ = BatchInputs(n_inputs_, length_, bindings);
  }

  std::size_t n_inputs() const noexcept { return n_inputs_; }
  std::size_t length() const noexcept { return length_; }
  std::size_t size() const noexcept { return cases_.size(); }
  /// Grid points dropped because the target was undefined there.
  std::size_t excluded() const noexcept { return excluded_; }
  const std::vector<TestCase>& cases() const noexcept { return cases_; }
  const BatchInputs& packed() const noexcept { return packed_; }

private:
  std::size_t n_inputs_ = 0;
  std::size_t length_ = 0;
  std::vector<TestCase> cases_;
  std::size_t excluded_ = 0;
  BatchInputs packed_;
};

/// Clamps to [0, 1] and rounds down onto the output's representable values
/// k/N. A length-N stream can only show whole counts, so counter-style
/// circuits such as x/2 or x/3 emit floor(c * f) ones; targets on the same
/// lattice let those circuits score exactly zero.
inline double quantize_expected(double v, std::size_t length) {
  v = std::clamp(v, 0.0, 1.0);
  const double n = static_cast<double>(length);
  return std::floor(v * n + 1e-9) / n;
}

/// Cartesian grid of nominal values i/(grid-1) over the primary inputs, last
/// input varying fastest. Expected values use the realized input
/// probabilities.
inline TestSuite make_test_suite(const TargetSpec& spec) {
  if (spec.grid < 2) {
    throw error("grid must have at least 2 points per input");
  }
  if (spec.inputs.empty()) {
    throw error("target needs at least one input");
  }
  if (!spec.function.eval) {
    throw error("target function is not set");
  }
  const auto prim = spec.primaries();
  if (prim.size() != spec.function.arity) {
    throw error("function '" + spec.function.name + "' takes " + std::to_string(spec.function.arity) +
                " input(s) but the spec has " + std::to_string(prim.size()) + " primary input(s)");
  }
  std::vector<std::size_t> prim_pos(spec.inputs.size(), 0);
  for (std::size_t j = 0; j < prim.size(); ++j) {
    prim_pos[prim[j]] = j;
  }
  for (std::size_t i = 0; i < spec.inputs.size(); ++i) {
    if (auto d = spec.inputs[i].duplicate_of) {
      if (*d >= spec.inputs.size() || spec.inputs[*d].duplicate_of) {
        throw error("input " + std::to_string(i) + " duplicates input " + std::to_string(*d) +
                    ", which is not a primary input");
      }
    }
  }

  std::vector<std::vector<double>> seqs;
  seqs.reserve(spec.inputs.size());
  for (const auto& in : spec.inputs) {
    seqs.push_back(comparator_sequence(in.kind, in.cls, spec.length));
  }

  std::size_t total = 1;
  for (std::size_t j = 0; j < prim.size(); ++j) {
    total *= spec.grid;
  }

  std::vector<TestCase> cases;
  std::size_t excluded = 0;
  std::vector<std::size_t> digit(prim.size(), 0);
  std::vector<double> nominal(prim.size()), realized(prim.size());
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rem = idx;
    for (std::size_t j = prim.size(); j-- > 0;) {
      digit[j] = rem % spec.grid;
      rem /= spec.grid;
      nominal[j] = static_cast<double>(digit[j]) / static_cast<double>(spec.grid - 1);
    }
    if (spec.function.divisor && nominal[*spec.function.divisor] < 2.0 / static_cast<double>(spec.grid)) {
      ++excluded;
      continue;
    }
    TestCase tc;
    tc.inputs.reserve(spec.inputs.size());
    for (std::size_t i = 0; i < spec.inputs.size(); ++i) {
      const std::size_t source = spec.inputs[i].duplicate_of.value_or(i);
      tc.inputs.push_back(generate_sn(nominal[prim_pos[source]], seqs[i]));
    }
    for (std::size_t j = 0; j < prim.size(); ++j) {
      realized[j] = decode_unipolar(tc.inputs[prim[j]]);
    }
    auto y = spec.function.eval(realized);
    if (!y || !std::isfinite(*y)) {
      ++excluded;
      continue;
    }
    tc.expected = quantize_expected(*y, spec.length);
    cases.push_back(std::move(tc));
  }
  if (cases.empty()) {
    throw error("every grid point was excluded; the suite is empty");
  }
  return TestSuite(spec.inputs.size(), spec.length, std::move(cases), excluded);
}

/// Mean absolute error over the suite; exactly 1.0 for programs whose live
/// circuit has a combinational loop.
inline double evaluate_cost(const Program& p, const TestSuite& suite, BatchWorkspace& ws) {
  if (p.n_inputs() != suite.n_inputs()) {
    throw error("program and suite disagree on input count");
  }
  const auto live = dead_code_eliminate(p);
  const auto sched = make_schedule(p, live);
  if (!sched) {
    return 1.0;
  }
  const auto counts = count_output_ones(p, *sched, suite.packed(), ws);
  const double inv_n = 1.0 / static_cast<double>(suite.length());
  double total = 0.0;
  const auto& cases = suite.cases();
  for (std::size_t c = 0; c < cases.size(); ++c) {
    total += std::abs(static_cast<double>(counts[c]) * inv_n - cases[c].expected);
  }
  return total / static_cast<double>(cases.size());
}

inline double evaluate_cost(const Program& p, const TestSuite& suite) {
  BatchWorkspace ws;
  return evaluate_cost(p, suite, ws);
}

} // namespace scsynth
