#include "scsynth/bench.hpp"

#include <gtest/gtest.h>

#include <set>

using namespace scsynth;

TEST(Registry, Entries) {
  const auto& reg = benchmark_registry();
  EXPECT_EQ(reg.size(), 13u);
  std::set<std::string> names;
  for (const auto& b : reg) {
    names.insert(b.name);
    EXPECT_EQ(b.target().primaries().size(), b.function.arity) << b.name;
    EXPECT_GE(b.default_length, 1u);
  }
  EXPECT_EQ(names.size(), 13u);

  const auto* sub = find_benchmark("subtractor");
  ASSERT_TRUE(sub);
  EXPECT_EQ(sub->default_length, 1u);
  EXPECT_EQ(sub->reference_error, 0.0);
  const auto* sq = find_benchmark("sqrt");
  ASSERT_TRUE(sq);
  EXPECT_EQ(sq->default_length, 5u);
  EXPECT_DOUBLE_EQ(sq->reference_error, 0.024);
  EXPECT_FALSE(find_benchmark("tanh"));
}

TEST(Registry, KnownCircuitsMeetTheirReference) {
  for (const auto& b : benchmark_registry()) {
    if (b.reference_netlist.empty()) continue;
    auto p = parse_netlist(b.reference_netlist);
    EXPECT_TRUE(validate(p).valid) << b.name;
    const double c = evaluate_cost(p, make_test_suite(b.target()));
    EXPECT_LE(c, b.reference_error + 0.02) << b.name;
  }
}

TEST(Registry, ScaleCircuitsAreExact) {
  for (const char* name : {"subtractor", "scale_half", "scale_third", "scale_quarter", "scaled_relu"}) {
    const auto* b = find_benchmark(name);
    EXPECT_EQ(evaluate_cost(parse_netlist(b->reference_netlist), make_test_suite(b->target())), 0.0) << name;
  }
}

TEST(Run, SubtractorPasses) {
  SynthConfig c;
  c.program_length = 0;
  c.budget = 200'000;
  c.seed = 3;
  auto rep = run_benchmark("subtractor", c);
  EXPECT_TRUE(rep.pass);
  EXPECT_EQ(rep.best_cost, 0.0);
  EXPECT_EQ(rep.length, 1u);
  EXPECT_EQ(format_netlist(rep.best).substr(0, 9), "inputs 2\n");
  EXPECT_THROW(run_benchmark("nope", c), error);
}

TEST(Csv, Format) {
  BenchReport r;
  r.name = "sqrt";
  r.length = 5;
  r.budget = 1000;
  r.best_cost = 0.0125;
  r.reference_error = 0.024;
  r.pass = true;
  EXPECT_EQ(bench_csv({r}), "name,I,budget,best_cost,reference_error,pass\nsqrt,5,1000,0.0125,0.024,true\n");
}

TEST(Sweep, ExactCircuitStaysExact) {
  const auto* b = find_benchmark("scale_half");
  auto rows = sweep_lengths(parse_netlist(b->reference_netlist), b->target(), {1024, 64, 256});
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0].length, 64u);
  EXPECT_EQ(rows[2].length, 1024u);
  for (const auto& r : rows) EXPECT_EQ(r.error, 0.0);
  EXPECT_EQ(sweep_csv(rows), "N,error\n64,0\n256,0\n1024,0\n");
}

TEST(Sweep, Errors) {
  const auto* b = find_benchmark("scale_half");
  auto p = parse_netlist(b->reference_netlist);
  EXPECT_THROW(sweep_lengths(p, b->target(), {4}), error);
  Program loop(1, {Instruction{Opcode::OR, {RegisterId{0}, RegisterId{1}}}});
  EXPECT_THROW(sweep_lengths(loop, b->target(), {64}), invalid_program_error);
}
