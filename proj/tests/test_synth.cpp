#include "scsynth/bench.hpp"
#include "scsynth/exhaustive.hpp"
#include "scsynth/synth.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <set>

using namespace scsynth;

namespace {

TestSuite suite_for(const char* bench) { return make_test_suite(find_benchmark(bench)->target()); }

SynthConfig config(std::size_t n_inputs, std::size_t length, std::uint64_t seed, std::uint64_t budget = 200'000) {
  SynthConfig c;
  c.n_inputs = n_inputs;
  c.program_length = length;
  c.seed = seed;
  c.budget = budget;
  return c;
}

} // namespace

TEST(Rewrite, SwapOperandsExchangesEverywhere) {
  auto p = parse_netlist("inputs 2\nXOR r0 r1 -> r2\nAND r1 r2 -> r3\noutput r3");
  auto q = swap_operands(p, RegisterId{0}, RegisterId{1});
  EXPECT_EQ(format_netlist(q), "inputs 2\nXOR r1 r0 -> r2\nAND r0 r2 -> r3\noutput r3");
}

TEST(Rewrite, ReplaceOpcodeKeepsArity) {
  std::mt19937_64 rng(1);
  auto p = parse_netlist("inputs 2\nMUX r0 r1 r0 -> r2\nTFF r2 -> r3\nOR r0 r3 -> r4\noutput r4");
  for (int t = 0; t < 500; ++t) {
    auto q = apply_rewrite(p, RewriteRule::replace_opcode, rng);
    EXPECT_EQ(q[0].opcode, Opcode::MUX); // the only ternary opcode
    for (std::size_t k = 0; k < p.size(); ++k) {
      EXPECT_EQ(arity(q[k].opcode), arity(p[k].opcode));
      EXPECT_EQ(q[k].operands, p[k].operands);
    }
  }
}

TEST(Rewrite, ReplaceOperandChangesAtMostOneOperand) {
  std::mt19937_64 rng(2);
  auto p = random_program(2, 6, rng);
  for (int t = 0; t < 500; ++t) {
    auto q = apply_rewrite(p, RewriteRule::replace_operand, rng);
    int changed = 0;
    for (std::size_t k = 0; k < p.size(); ++k) {
      ASSERT_EQ(q[k].opcode, p[k].opcode);
      for (std::size_t i = 0; i < 3; ++i) changed += q[k].operands[i] != p[k].operands[i];
      for (std::size_t i = 0; i < q[k].arity(); ++i) ASSERT_LT(q[k].operands[i].index, p.register_count());
    }
    ASSERT_LE(changed, 1);
  }
}

TEST(Rewrite, RestartKeepsShape) {
  std::mt19937_64 rng(3);
  auto p = random_program(3, 5, rng);
  auto q = apply_rewrite(p, RewriteRule::random_restart, rng);
  EXPECT_EQ(q.n_inputs(), 3u);
  EXPECT_EQ(q.size(), 5u);
}

TEST(Rules, FrequenciesFollowMixture) {
  RuleMixture m;
  const auto w = m.normalized();
  std::mt19937_64 rng(4);
  std::array<int, rewrite_rule_count> hits{};
  const int draws = 100'000;
  auto p = random_program(2, 3, rng);
  for (int i = 0; i < draws; ++i) ++hits[static_cast<std::size_t>(propose(p, m, rng).rule)];
  for (std::size_t r = 0; r < rewrite_rule_count; ++r) {
    EXPECT_NEAR(hits[r] / double(draws), w[r], 0.01) << to_string(static_cast<RewriteRule>(r));
  }
}

TEST(Rules, MixtureNormalizes) {
  RuleMixture m{{2, 1, 1, 0, 0}};
  auto w = m.normalized();
  EXPECT_DOUBLE_EQ(w[0], 0.5);
  EXPECT_DOUBLE_EQ(w[3], 0.0);
  EXPECT_THROW((RuleMixture{{0, 0, 0, 0, 0}}.normalized()), error);
  EXPECT_THROW((RuleMixture{{1, -1, 0, 0, 0}}.normalized()), error);
  std::mt19937_64 rng(5);
  for (int i = 0; i < 1000; ++i) EXPECT_NE(pick_rule(w, rng), RewriteRule::swap_all_operands);
}

TEST(Metropolis, Ratio) {
  EXPECT_DOUBLE_EQ(metropolis_ratio(0.5, 0.3, 2.0), 1.0);
  EXPECT_DOUBLE_EQ(metropolis_ratio(0.5, 0.5, 2.0), 1.0);
  EXPECT_NEAR(metropolis_ratio(0.0, 1.0, 2.0), std::exp(-2.0), 1e-15);
}

TEST(Metropolis, AcceptanceFrequency) {
  std::mt19937_64 rng(6);
  int acc = 0;
  const int n = 100'000;
  for (int i = 0; i < n; ++i) acc += metropolis_accept(0.0, 1.0, 2.0, rng);
  EXPECT_NEAR(acc / double(n), std::exp(-2.0), 0.01);
}

TEST(Metropolis, ImprovementsDrawNoRandomness) {
  std::mt19937_64 a(7), b(7);
  EXPECT_TRUE(metropolis_accept(0.5, 0.1, 2.0, a));
  EXPECT_EQ(a(), b());
}

TEST(Chain, Deterministic) {
  auto s = suite_for("scaled_adder");
  auto c = config(2, 3, 99, 20'000);
  c.early_stop_cost = -1.0;
  EXPECT_EQ(run_chain(c, s), run_chain(c, s));
  auto d = c;
  d.seed = 100;
  EXPECT_NE(run_chain(c, s).trajectory, run_chain(d, s).trajectory);
}

TEST(Chain, TrajectoryIsDecreasingAndBestIsHonest) {
  auto s = suite_for("scaled_adder");
  auto c = config(2, 3, 5, 50'000);
  auto r = run_chain(c, s);
  ASSERT_FALSE(r.trajectory.empty());
  EXPECT_EQ(r.trajectory.front().proposal, 0u);
  for (std::size_t i = 1; i < r.trajectory.size(); ++i) {
    EXPECT_LT(r.trajectory[i].best_cost, r.trajectory[i - 1].best_cost);
    EXPECT_GT(r.trajectory[i].proposal, r.trajectory[i - 1].proposal);
  }
  EXPECT_EQ(r.trajectory.back().best_cost, r.best_cost);
  EXPECT_EQ(evaluate_cost(r.best, s), r.best_cost);
  EXPECT_TRUE(validate(r.best).valid);
  EXPECT_EQ(r.proposals_evaluated, c.budget);
  EXPECT_EQ(r.terminated_by, Termination::budget);
  EXPECT_GT(r.acceptance_rate(), 0.0);
  EXPECT_LT(r.acceptance_rate(), 1.0);
}

TEST(Chain, SubtractorAndScaleHalfReachZero) {
  for (const char* name : {"subtractor", "scale_half"}) {
    const auto* b = find_benchmark(name);
    auto s = suite_for(name);
    int solved = 0;
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
      auto r = run_chain(config(b->inputs.size(), b->default_length, seed), s);
      if (r.best_cost == 0.0) {
        ++solved;
        EXPECT_EQ(r.terminated_by, Termination::exact_solution);
        EXPECT_LT(r.proposals_evaluated, 200'000u);
      }
    }
    EXPECT_GE(solved, 3) << name;
  }
}

TEST(Chain, ForcedRestartsAreAlwaysAccepted) {
  auto s = suite_for("sqrt");
  auto c = config(1, 3, 8, 20'000);
  c.mixture = RuleMixture{{0, 0, 0, 0, 1}};
  c.restart = RestartPolicy::forced;
  c.early_stop_cost = -1.0;
  auto r = run_chain(c, s);
  EXPECT_EQ(r.restarts, c.budget);
  EXPECT_EQ(r.accepted, c.budget);
}

TEST(Chain, VisitsMostSingleInstructionPrograms) {
  // 2 inputs, 1 instruction: a pool of 3 registers gives 66 programs.
  auto s = suite_for("scaled_adder");
  auto c = config(2, 1, 9, 20'000);
  c.early_stop_cost = -1.0;
  ASSERT_EQ(count_candidates(2, 1), 66);
  std::set<std::string> seen;
  run_chain(c, s, 0, [&](const Program& p) { seen.insert(format_netlist(p)); });
  EXPECT_GE(seen.size(), 33u);
}

TEST(Synthesize, MergeIndependentOfThreads) {
  auto s = suite_for("scaled_adder");
  auto c = config(2, 3, 17, 10'000);
  c.chains = 4;
  c.early_stop_cost = -1.0;
  c.threads = 1;
  std::vector<SynthesisResult> per;
  auto one = synthesize(c, s, &per);
  c.threads = 3;
  auto three = synthesize(c, s);
  EXPECT_EQ(one, three);
  ASSERT_EQ(per.size(), 4u);
  std::uint64_t total = 0;
  double best = 2.0;
  for (std::size_t i = 0; i < per.size(); ++i) {
    EXPECT_EQ(per[i], run_chain(c, s, i));
    total += per[i].proposals_evaluated;
    best = std::min(best, per[i].best_cost);
  }
  EXPECT_EQ(one.proposals_evaluated, total);
  EXPECT_EQ(one.best_cost, best);
}

TEST(Synthesize, ConfigErrors) {
  auto s = suite_for("subtractor");
  auto c = config(1, 1, 1);
  EXPECT_THROW(synthesize(c, s), error);
  c.n_inputs = 2;
  c.beta = 0;
  EXPECT_THROW(synthesize(c, s), error);
  c.beta = 2;
  c.program_length = 0;
  EXPECT_THROW(synthesize(c, s), error);
}
