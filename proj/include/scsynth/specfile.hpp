#pragma once

// Run specification files: flat `key = value` lines, one `input.<i>.<key>`
// namespace per input, `#` comments. Example:
//
//     function = abs_diff
//     inputs = 2
//     N = 256
//     grid = 16
//     length = 1
//     input.0.kind = vdc
//     input.0.class = 0
//     input.1.kind = vdc
//     input.1.class = 0
//
// Unknown keys are rejected. format_run_spec() writes every resolved key, and
// its output parses back to the same run.

#include "scsynth/cost.hpp"
#include "scsynth/synth.hpp"

#include <charconv>
#include <cstdint>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace scsynth {

struct RunSpec {
  TargetSpec target;
  SynthConfig synth;
  /// Program length is optional so that sweep/simulate specs can omit it.
  std::optional<std::size_t> length;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    auto next = s.find(sep, pos);
    out.emplace_back(trim(s.substr(pos, next == std::string_view::npos ? s.npos : next - pos)));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

inline std::uint64_t to_uint(std::string_view v, std::string_view key, std::size_t line) {
  std::uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    // Accept scientific shorthand such as 1e6 for budgets.
    double d = 0.0;
    std::istringstream is{std::string(v)};
    if ((is >> d) && is.eof() && d >= 0 && d == static_cast<double>(static_cast<std::uint64_t>(d))) {
      return static_cast<std::uint64_t>(d);
    }
    throw parse_error(line, "'" + std::string(key) + "' expects a non-negative integer, got '" + std::string(v) + "'");
  }
  return out;
}

inline double to_real(std::string_view v, std::string_view key, std::size_t line) {
  double d = 0.0;
  std::istringstream is{std::string(v)};
  if (!(is >> d) || !is.eof()) {
    throw parse_error(line, "'" + std::string(key) + "' expects a number, got '" + std::string(v) + "'");
  }
  return d;
}

inline std::string real_text(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

} // namespace detail

inline RunSpec parse_run_spec(std::string_view text) {
  struct Entry {
    std::string value;
    std::size_t line;
  };
  std::map<std::string, Entry> kv;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    auto line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (auto h = line.find('#'); h != std::string_view::npos) line = line.substr(0, h);
    line = detail::trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw parse_error(line_no, "expected 'key = value'");
    }
    std::string key(detail::trim(line.substr(0, eq)));
    std::string value(detail::trim(line.substr(eq + 1)));
    if (key.empty()) throw parse_error(line_no, "empty key");
    if (kv.count(key)) throw parse_error(line_no, "duplicate key '" + key + "'");
    kv[key] = {value, line_no};
  }

  auto take = [&](const std::string& key) -> std::optional<Entry> {
    auto it = kv.find(key);
    if (it == kv.end()) return std::nullopt;
    Entry e = it->second;
    kv.erase(it);
    return e;
  };
  auto require = [&](const std::string& key) -> Entry {
    auto e = take(key);
    if (!e) throw parse_error(line_no, "missing required field '" + key + "'");
    return *e;
  };

  RunSpec spec;
  auto fn = require("function");
  auto coeffs = take("coefficients");
  if (fn.value == "poly") {
    if (!coeffs) throw parse_error(fn.line, "function 'poly' needs 'coefficients'");
    std::vector<double> c;
    for (const auto& tok : detail::split(coeffs->value, ',')) {
      c.push_back(detail::to_real(tok, "coefficients", coeffs->line));
    }
    spec.target.function = functions::polynomial(std::move(c));
  } else {
    auto f = functions::builtin(fn.value);
    if (!f) throw parse_error(fn.line, "unknown function '" + fn.value + "'");
    if (coeffs) throw parse_error(coeffs->line, "'coefficients' only applies to function 'poly'");
    spec.target.function = std::move(*f);
  }

  auto n_in = require("inputs");
  const auto n_inputs = detail::to_uint(n_in.value, "inputs", n_in.line);
  if (n_inputs == 0 || n_inputs > 64) throw parse_error(n_in.line, "'inputs' must be in 1..64");
  auto n = require("N");
  spec.target.length = detail::to_uint(n.value, "N", n.line);
  if (spec.target.length == 0) throw parse_error(n.line, "'N' must be positive");
  if (auto g = take("grid")) spec.target.grid = detail::to_uint(g->value, "grid", g->line);

  spec.target.inputs.assign(n_inputs, InputSpec{});
  for (std::size_t i = 0; i < n_inputs; ++i) {
    const std::string prefix = "input." + std::to_string(i) + ".";
    if (auto k = take(prefix + "kind")) {
      auto kind = sequence_kind_from_string(k->value);
      if (!kind) throw parse_error(k->line, "unknown sequence kind '" + k->value + "' (lfsr, vdc, halton3)");
      spec.target.inputs[i].kind = *kind;
    }
    if (auto c = take(prefix + "class")) {
      spec.target.inputs[i].cls.id = static_cast<std::uint32_t>(detail::to_uint(c->value, prefix + "class", c->line));
    }
    if (auto d = take(prefix + "duplicate_of")) {
      const auto src = detail::to_uint(d->value, prefix + "duplicate_of", d->line);
      if (src >= n_inputs || src == i) throw parse_error(d->line, "'" + prefix + "duplicate_of' names a bad input");
      spec.target.inputs[i].duplicate_of = static_cast<std::size_t>(src);
    }
  }

  auto& cfg = spec.synth;
  cfg.n_inputs = n_inputs;
  if (auto e = take("length")) {
    spec.length = detail::to_uint(e->value, "length", e->line);
    if (*spec.length == 0) throw parse_error(e->line, "'length' must be positive");
    cfg.program_length = *spec.length;
  }
  if (auto e = take("budget")) cfg.budget = detail::to_uint(e->value, "budget", e->line);
  if (auto e = take("beta")) cfg.beta = detail::to_real(e->value, "beta", e->line);
  if (auto e = take("seed")) cfg.seed = detail::to_uint(e->value, "seed", e->line);
  if (auto e = take("chains")) cfg.chains = detail::to_uint(e->value, "chains", e->line);
  if (auto e = take("early_stop")) cfg.early_stop_cost = detail::to_real(e->value, "early_stop", e->line);
  if (auto e = take("restart")) {
    if (e->value == "metropolis") cfg.restart = RestartPolicy::metropolis;
    else if (e->value == "forced") cfg.restart = RestartPolicy::forced;
    else throw parse_error(e->line, "'restart' must be 'metropolis' or 'forced'");
  }
  if (auto e = take("rules")) {
    auto toks = detail::split(e->value, ',');
    if (toks.size() != rewrite_rule_count) {
      throw parse_error(e->line, "'rules' needs " + std::to_string(rewrite_rule_count) + " weights");
    }
    for (std::size_t i = 0; i < rewrite_rule_count; ++i) {
      cfg.mixture.weights[i] = detail::to_real(toks[i], "rules", e->line);
    }
  }

  if (!kv.empty()) {
    const auto& [key, entry] = *kv.begin();
    throw parse_error(entry.line, "unknown key '" + key + "'");
  }
  if (!(cfg.beta > 0.0)) throw error("'beta' must be positive");
  cfg.mixture.normalized();
  return spec;
}

inline std::string format_run_spec(const RunSpec& spec) {
  std::ostringstream os;
  const auto& t = spec.target;
  const auto& c = spec.synth;
  os << "function = " << t.function.name << '\n';
  if (t.function.name == "poly") {
    os << "coefficients = ";
    for (std::size_t i = 0; i < t.function.coefficients.size(); ++i) {
      os << (i ? ", " : "") << detail::real_text(t.function.coefficients[i]);
    }
    os << '\n';
  }
  os << "inputs = " << t.inputs.size() << '\n';
  os << "N = " << t.length << '\n';
  os << "grid = " << t.grid << '\n';
  if (spec.length) os << "length = " << *spec.length << '\n';
  os << "budget = " << c.budget << '\n';
  os << "beta = " << detail::real_text(c.beta) << '\n';
  os << "seed = " << c.seed << '\n';
  os << "chains = " << c.chains << '\n';
  os << "early_stop = " << detail::real_text(c.early_stop_cost) << '\n';
  os << "restart = " << (c.restart == RestartPolicy::forced ? "forced" : "metropolis") << '\n';
  os << "rules = ";
  for (std::size_t i = 0; i < rewrite_rule_count; ++i) {
    os << (i ? ", " : "") << detail::real_text(c.mixture.weights[i]);
  }
  os << '\n';
  for (std::size_t i = 0; i < t.inputs.size(); ++i) {
    const auto& in = t.inputs[i];
    os << "input." << i << ".kind = " << to_string(in.kind) << '\n';
    os << "input." << i << ".class = " << in.cls.id << '\n';
    if (in.duplicate_of) os << "input." << i << ".duplicate_of = " << *in.duplicate_of << '\n';
  }
  return os.str();
}

/// Field-wise equality of everything a spec file can express.
inline bool same_run(const RunSpec& a, const RunSpec& b) {
  const auto& x = a.synth;
  const auto& y = b.synth;
  return a.target.function.name == b.target.function.name &&
         a.target.function.coefficients == b.target.function.coefficients && a.target.inputs == b.target.inputs &&
         a.target.grid == b.target.grid && a.target.length == b.target.length && a.length == b.length &&
         x.beta == y.beta && x.budget == y.budget && x.program_length == y.program_length &&
         x.n_inputs == y.n_inputs && x.mixture == y.mixture && x.restart == y.restart && x.seed == y.seed &&
         x.early_stop_cost == y.early_stop_cost && x.chains == y.chains;
}

} // namespace scsynth
