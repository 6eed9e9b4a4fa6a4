#pragma once

// MCMC program search: propose a rewrite, score it, accept by the Metropolis
// ratio, remember the best proposal seen.

#include "scsynth/cost.hpp"
#include "scsynth/ir.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <string_view>
#include <thread>
#include <vector>

namespace scsynth {

enum class RewriteRule : std::uint8_t {
  replace_operand,
  replace_opcode,
  replace_instruction,
  swap_all_operands,
  random_restart,
};

inline constexpr std::size_t rewrite_rule_count = 5;

inline std::string_view to_string(RewriteRule r) noexcept {
  switch (r) {
  case RewriteRule::replace_operand: return "replace_operand";
  case RewriteRule::replace_opcode: return "replace_opcode";
  case RewriteRule::replace_instruction: return "replace_instruction";
  case RewriteRule::swap_all_operands: return "swap_all_operands";
  case RewriteRule::random_restart: return "random_restart";
  }
  return "?";
}

/// Selection weights per rule, indexed by RewriteRule. Normalized on use.
struct RuleMixture {
  std::array<double, rewrite_rule_count> weights{0.817, 0.091, 0.045, 0.045, 0.001};

  std::array<double, rewrite_rule_count> normalized() const {
    double sum = 0.0;
    for (auto w : weights) {
      if (!(w >= 0.0)) {
        throw error("rewrite rule weights must be non-negative");
      }
      sum += w;
    }
    if (!(sum > 0.0)) {
      throw error("rewrite rule weights must not all be zero");
    }
    auto out = weights;
    for (auto& w : out) {
      w /= sum;
    }
    return out;
  }

  bool operator==(const RuleMixture&) const = default;
};

enum class RestartPolicy : std::uint8_t {
  metropolis, // restart proposals are accepted like any other
  forced,     // restart proposals are always accepted
};

struct SynthConfig {
  double beta = 2.0;
  std::uint64_t budget = 1'000'000;
  std::size_t program_length = 1;
  std::size_t n_inputs = 1;
  RuleMixture mixture{};
  RestartPolicy restart = RestartPolicy::metropolis;
  std::uint64_t seed = 1;
  /// Stop as soon as the best cost is at or below this; negative disables.
  double early_stop_cost = 0.0;
  std::size_t chains = 1;
  /// Worker threads for multi-chain runs; 0 = hardware concurrency.
  std::size_t threads = 0;
};

enum class Termination : std::uint8_t { budget, exact_solution };

inline std::string_view to_string(Termination t) noexcept {
  return t == Termination::budget ? "budget" : "exact_solution";
}

struct TrajectoryPoint {
  std::uint64_t proposal = 0; // 0 = initial program
  double best_cost = 1.0;
  bool operator==(const TrajectoryPoint&) const = default;
};

struct SynthesisResult {
  Program best;
  double best_cost = 1.0;
  std::uint64_t proposals_evaluated = 0;
  std::uint64_t accepted = 0;
  std::uint64_t restarts = 0;
  Termination terminated_by = Termination::budget;
  std::vector<TrajectoryPoint> trajectory;
  std::size_t chain = 0;

  double acceptance_rate() const noexcept {
    return proposals_evaluated == 0 ? 0.0
                                    : static_cast<double>(accepted) / static_cast<double>(proposals_evaluated);
  }
  bool operator==(const SynthesisResult&) const = default;
};

struct Proposal {
  Program program;
  RewriteRule rule;
};

namespace detail {

inline std::span<const Opcode> same_arity_group(Opcode op) {
  static constexpr Opcode unary[] = {Opcode::NOT, Opcode::PASS, Opcode::DFF, Opcode::TFF};
  static constexpr Opcode binary[] = {Opcode::AND, Opcode::OR, Opcode::XOR};
  static constexpr Opcode ternary[] = {Opcode::MUX};
  switch (arity(op)) {
  case 1: return unary;
  case 2: return binary;
  default: return ternary;
  }
}

template <class Rng>
std::size_t pick(std::size_t n, Rng& rng) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

} // namespace detail

template <class Rng>
RewriteRule pick_rule(const std::array<double, rewrite_rule_count>& normalized, Rng& rng) {
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  double acc = 0.0;
  for (std::size_t i = 0; i < rewrite_rule_count; ++i) {
    acc += normalized[i];
    if (u < acc) {
      return static_cast<RewriteRule>(i);
    }
  }
  // u landed in the rounding gap above the last cumulative sum.
  for (std::size_t i = rewrite_rule_count; i-- > 0;) {
    if (normalized[i] > 0.0) {
      return static_cast<RewriteRule>(i);
    }
  }
  return RewriteRule::replace_operand;
}

/// Exchanges ra and rb at every input-operand position. Destinations stay put.
inline Program swap_operands(Program p, RegisterId ra, RegisterId rb) {
  for (std::size_t k = 0; k < p.size(); ++k) {
    auto& ins = p[k];
    for (std::size_t i = 0; i < ins.arity(); ++i) {
      if (ins.operands[i] == ra) {
        ins.operands[i] = rb;
      } else if (ins.operands[i] == rb) {
        ins.operands[i] = ra;
      }
    }
  }
  return p;
}

/// Applies `rule` to a copy of `p`. Destinations never change.
template <class Rng>
Program apply_rewrite(const Program& p, RewriteRule rule, Rng& rng) {
  Program q = p;
  const std::size_t pool = p.register_count();
  switch (rule) {
  case RewriteRule::replace_operand: {
    auto& ins = q[detail::pick(q.size(), rng)];
    ins.operands[detail::pick(ins.arity(), rng)] = random_register(pool, rng);
    break;
  }
  case RewriteRule::replace_opcode: {
    auto& ins = q[detail::pick(q.size(), rng)];
    const auto group = detail::same_arity_group(ins.opcode);
    ins.opcode = group[detail::pick(group.size(), rng)];
    break;
  }
  case RewriteRule::replace_instruction:
    q[detail::pick(q.size(), rng)] = random_instruction(pool, rng);
    break;
  case RewriteRule::swap_all_operands: {
    const auto ra = static_cast<std::uint32_t>(detail::pick(pool, rng));
    auto rb = static_cast<std::uint32_t>(detail::pick(pool - 1, rng));
    if (rb >= ra) {
      ++rb;
    }
    q = swap_operands(q, RegisterId{ra}, RegisterId{rb});
    break;
  }
  case RewriteRule::random_restart:
    q = random_program(p.n_inputs(), p.size(), rng);
    break;
  }
  return q;
}

template <class Rng>
Proposal propose(const Program& p, const RuleMixture& mixture, Rng& rng) {
  const auto rule = pick_rule(mixture.normalized(), rng);
  return {apply_rewrite(p, rule, rng), rule};
}

/// alpha = min(1, exp(-beta * (c_new - c_old))).
inline double metropolis_ratio(double c_old, double c_new, double beta) {
  const double delta = c_new - c_old;
  return delta <= 0.0 ? 1.0 : std::exp(-beta * delta);
}

template <class Rng>
bool metropolis_accept(double c_old, double c_new, double beta, Rng& rng) {
  const double alpha = metropolis_ratio(c_old, c_new, beta);
  if (alpha >= 1.0) {
    return true;
  }
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < alpha;
}

/// splitmix64 finalizer; chain i of a run seeded s draws from mix(s, i).
inline std::uint64_t chain_seed(std::uint64_t seed, std::uint64_t chain) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (chain + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// Called with every accepted (current) program; used by diagnostics.
using ChainObserver = std::function<void(const Program&)>;

inline void check_config(const SynthConfig& cfg, const TestSuite& suite) {
  if (!(cfg.beta > 0.0)) {
    throw error("beta must be positive");
  }
  if (cfg.budget < 1) {
    throw error("budget must be at least 1");
  }
  if (cfg.program_length < 1) {
    throw error("program length must be at least 1");
  }
  if (cfg.n_inputs != suite.n_inputs()) {
    throw error("config has " + std::to_string(cfg.n_inputs) + " inputs but the suite has " +
                std::to_string(suite.n_inputs()));
  }
  cfg.mixture.normalized();
}

/// One Markov chain seeded with chain_seed(cfg.seed, chain).
inline SynthesisResult run_chain(const SynthConfig& cfg, const TestSuite& suite, std::size_t chain = 0,
                                 const ChainObserver& observe = {}) {
  check_config(cfg, suite);
  std::mt19937_64 rng(chain_seed(cfg.seed, chain));
  const auto weights = cfg.mixture.normalized();
  BatchWorkspace ws;

  Program current = random_program(cfg.n_inputs, cfg.program_length, rng);
  double current_cost = evaluate_cost(current, suite, ws);

  SynthesisResult res;
  res.chain = chain;
  res.best = current;
  res.best_cost = current_cost;
  res.trajectory.push_back({0, current_cost});
  if (observe) {
    observe(current);
  }
  if (res.best_cost <= cfg.early_stop_cost) {
    res.terminated_by = Termination::exact_solution;
    return res;
  }

  for (std::uint64_t i = 1; i <= cfg.budget; ++i) {
    const auto rule = pick_rule(weights, rng);
    Program candidate = apply_rewrite(current, rule, rng);
    const double cost = evaluate_cost(candidate, suite, ws);
    ++res.proposals_evaluated;
    if (rule == RewriteRule::random_restart) {
      ++res.restarts;
    }

    const bool forced = rule == RewriteRule::random_restart && cfg.restart == RestartPolicy::forced;
    const bool improves_best = cost < res.best_cost;
    if (improves_best) {
      res.best = candidate;
      res.best_cost = cost;
      res.trajectory.push_back({i, cost});
    }
    if (forced || metropolis_accept(current_cost, cost, cfg.beta, rng)) {
      current = std::move(candidate);
      current_cost = cost;
      ++res.accepted;
      if (observe) {
        observe(current);
      }
    }
    if (improves_best && res.best_cost <= cfg.early_stop_cost) {
      res.terminated_by = Termination::exact_solution;
      break;
    }
  }
  return res;
}

/// Runs cfg.chains independent chains and returns the lowest-cost result
/// (ties go to the lower chain index), with proposal, acceptance and restart
/// totals summed over chains. Scheduling does not affect the outcome.
inline SynthesisResult synthesize(const SynthConfig& cfg, const TestSuite& suite,
                                  std::vector<SynthesisResult>* per_chain = nullptr) {
  check_config(cfg, suite);
  const std::size_t chains = std::max<std::size_t>(1, cfg.chains);
  std::vector<SynthesisResult> results(chains);
  std::size_t workers = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, chains);
  if (workers <= 1) {
    for (std::size_t c = 0; c < chains; ++c) {
      results[c] = run_chain(cfg, suite, c);
    }
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t c = w; c < chains; c += workers) {
          results[c] = run_chain(cfg, suite, c);
        }
      });
    }
    for (auto& t : pool) {
      t.join();
    }
  }

  std::size_t winner = 0;
  for (std::size_t c = 1; c < chains; ++c) {
    if (results[c].best_cost < results[winner].best_cost) {
      winner = c;
    }
  }
  SynthesisResult merged = results[winner];
  merged.proposals_evaluated = merged.accepted = merged.restarts = 0;
  for (const auto& r : results) {
    merged.proposals_evaluated += r.proposals_evaluated;
    merged.accepted += r.accepted;
    merged.restarts += r.restarts;
  }
  if (per_chain) {
    *per_chain = std::move(results);
  }
  return merged;
}

} // namespace scsynth
