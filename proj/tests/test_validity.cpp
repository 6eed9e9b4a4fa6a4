#include "scsynth/bitgen.hpp"
#include "scsynth/ir.hpp"
#include "scsynth/simulator.hpp"
#include "scsynth/validity.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

using namespace scsynth;

namespace {

std::vector<std::size_t> slots(std::initializer_list<std::size_t> s) { return s; }

std::vector<Bitstream> random_streams(std::size_t n_inputs, std::size_t length, std::mt19937_64& rng) {
  std::vector<Bitstream> out;
  std::bernoulli_distribution coin(0.5);
  for (std::size_t i = 0; i < n_inputs; ++i) {
    Bitstream s(length);
    for (std::size_t n = 0; n < length; ++n) s.set(n, coin(rng));
    out.push_back(s);
  }
  return out;
}

// Independent cycle check: a program has a same-cycle loop iff repeatedly
// peeling gates whose combinational operands are all resolved gets stuck.
bool oracle_has_live_loop(const Program& p, const std::vector<std::size_t>& live) {
  std::set<std::size_t> unresolved;
  for (auto k : live) {
    if (!is_sequential(p[k].opcode)) unresolved.insert(k);
  }
  bool progress = true;
  while (progress && !unresolved.empty()) {
    progress = false;
    for (auto it = unresolved.begin(); it != unresolved.end();) {
      bool ready = true;
      const auto& ins = p[*it];
      for (std::size_t i = 0; i < ins.arity(); ++i) {
        auto d = p.driver(ins.operands[i]);
        if (d && unresolved.count(*d)) ready = false;
      }
      if (ready) {
        it = unresolved.erase(it);
        progress = true;
      } else {
        ++it;
      }
    }
  }
  return !unresolved.empty();
}

} // namespace

TEST(DeadCode, SubtractorIsFullyLive) {
  auto p = parse_netlist("inputs 2\nXOR r0 r1 -> r2\noutput r2");
  EXPECT_EQ(dead_code_eliminate(p), slots({0}));
}

TEST(DeadCode, UnusedGateIsDead) {
  auto p = parse_netlist("inputs 2\nAND r0 r1 -> r2\nXOR r0 r1 -> r3\noutput r3");
  EXPECT_EQ(dead_code_eliminate(p), slots({1}));
}

TEST(DeadCode, FlipFlopFeedingLiveGateIsLive) {
  auto p = parse_netlist("inputs 1\nTFF r0 -> r1\nAND r0 r1 -> r2\noutput r2");
  EXPECT_EQ(dead_code_eliminate(p), slots({0, 1}));
}

TEST(DeadCode, FollowsSequentialFeedback) {
  // slot1 is only reachable through the DFF in slot2.
  auto p = parse_netlist("inputs 1\nPASS r0 -> r1\nNOT r0 -> r2\nDFF r2 -> r3\nAND r0 r3 -> r4\noutput r4");
  EXPECT_EQ(dead_code_eliminate(p), slots({1, 2, 3}));
}

TEST(LoopCheck, MutualCombinationalDependence) {
  Program p(1, {Instruction{Opcode::AND, {RegisterId{0}, RegisterId{2}}},
                Instruction{Opcode::AND, {RegisterId{0}, RegisterId{1}}}});
  auto w = check_combinational_loops(p, dead_code_eliminate(p));
  ASSERT_TRUE(w);
  std::set<RegisterId> regs(w->begin(), w->end());
  EXPECT_EQ(regs, (std::set<RegisterId>{RegisterId{1}, RegisterId{2}}));
  EXPECT_EQ(w->size(), 2u);
}

TEST(LoopCheck, WitnessFollowsDataFlow) {
  // r1 -> r3 -> r2 -> r1 around the loop, entered from the output r4.
  Program p(1, {Instruction{Opcode::NOT, {RegisterId{2}}},
                Instruction{Opcode::PASS, {RegisterId{3}}},
                Instruction{Opcode::AND, {RegisterId{0}, RegisterId{1}}},
                Instruction{Opcode::OR, {RegisterId{1}, RegisterId{0}}}});
  auto w = check_combinational_loops(p, dead_code_eliminate(p));
  ASSERT_TRUE(w);
  ASSERT_EQ(w->size(), 3u);
  // Each register in the witness feeds the next one, cyclically.
  for (std::size_t i = 0; i < w->size(); ++i) {
    const auto consumer = *p.driver((*w)[(i + 1) % w->size()]);
    const auto& ins = p[consumer];
    bool reads = false;
    for (std::size_t j = 0; j < ins.arity(); ++j) reads |= ins.operands[j] == (*w)[i];
    EXPECT_TRUE(reads) << to_string((*w)[i]) << " does not feed " << to_string((*w)[(i + 1) % w->size()]);
  }
}

TEST(LoopCheck, DffBreaksTheCycle) {
  Program p(1, {Instruction{Opcode::DFF, {RegisterId{2}}},
                Instruction{Opcode::AND, {RegisterId{0}, RegisterId{1}}}});
  EXPECT_FALSE(check_combinational_loops(p, dead_code_eliminate(p)));
}

TEST(LoopCheck, TffFeedbackThroughPassIsNotCombinational) {
  Program p(1, {Instruction{Opcode::TFF, {RegisterId{2}}},
                Instruction{Opcode::PASS, {RegisterId{1}}}});
  EXPECT_FALSE(check_combinational_loops(p, dead_code_eliminate(p)));
  EXPECT_TRUE(validate(p).valid);
}

TEST(LoopCheck, SelfLoopOnGate) {
  Program p(1, {Instruction{Opcode::OR, {RegisterId{0}, RegisterId{1}}}});
  auto rep = validate(p);
  EXPECT_FALSE(rep.valid);
  ASSERT_TRUE(rep.loop_witness);
  EXPECT_EQ(*rep.loop_witness, std::vector<RegisterId>{RegisterId{1}});
}

TEST(Validate, Subtractor) {
  auto rep = validate(parse_netlist("inputs 2\nXOR r0 r1 -> r2\noutput r2"));
  EXPECT_TRUE(rep.valid);
  EXPECT_EQ(rep.live_slots, slots({0}));
  EXPECT_FALSE(rep.loop_witness);
}

TEST(Validate, DeadLoopDoesNotInvalidate) {
  // slots 0 and 1 form a combinational loop that never reaches the output.
  Program p(2, {Instruction{Opcode::AND, {RegisterId{0}, RegisterId{3}}},
                Instruction{Opcode::OR, {RegisterId{2}, RegisterId{1}}},
                Instruction{Opcode::XOR, {RegisterId{0}, RegisterId{1}}}});
  auto rep = validate(p);
  EXPECT_TRUE(rep.valid);
  EXPECT_EQ(rep.live_slots, slots({2}));

  // The live circuit is the plain XOR.
  auto xor_only = parse_netlist("inputs 2\nXOR r0 r1 -> r2\noutput r2");
  std::mt19937_64 rng(1);
  for (int t = 0; t < 20; ++t) {
    auto in = random_streams(2, 64, rng);
    EXPECT_EQ(simulate(p, in, 64), simulate(xor_only, in, 64));
  }
}

TEST(Validate, LiveLoopInvalidWithWitness) {
  Program p(1, {Instruction{Opcode::AND, {RegisterId{0}, RegisterId{2}}},
                Instruction{Opcode::AND, {RegisterId{0}, RegisterId{1}}}});
  auto rep = validate(p);
  EXPECT_FALSE(rep.valid);
  EXPECT_TRUE(rep.loop_witness);
}

TEST(Validate, AgreesWithPeelingOracleAndScheduler) {
  std::mt19937_64 rng(31);
  int invalid = 0;
  for (int t = 0; t < 5000; ++t) {
    auto p = random_program(1 + t % 3, 1 + t % 8, rng);
    auto rep = validate(p);
    ASSERT_EQ(validate(p).valid, rep.valid); // deterministic
    ASSERT_EQ(rep.valid, !oracle_has_live_loop(p, rep.live_slots)) << format_netlist(p);
    ASSERT_EQ(rep.valid, make_schedule(p, rep.live_slots).has_value());
    ASSERT_EQ(rep.valid, !rep.loop_witness.has_value());
    ASSERT_TRUE(std::is_sorted(rep.live_slots.begin(), rep.live_slots.end()));
    ASSERT_EQ(rep.live_slots.back(), p.size() - 1);
    invalid += !rep.valid;
  }
  EXPECT_GT(invalid, 100);
}

TEST(Validate, ScheduleRespectsSameCycleDependences) {
  std::mt19937_64 rng(37);
  for (int t = 0; t < 3000; ++t) {
    auto p = random_program(2, 1 + t % 8, rng);
    auto rep = validate(p);
    if (!rep.valid) continue;
    auto s = *make_schedule(p, rep.live_slots);
    std::vector<int> pos(p.size(), -1);
    for (std::size_t i = 0; i < s.combinational.size(); ++i) pos[s.combinational[i]] = static_cast<int>(i);
    for (auto k : s.combinational) {
      const auto& ins = p[k];
      for (std::size_t i = 0; i < ins.arity(); ++i) {
        auto d = p.driver(ins.operands[i]);
        if (d && !is_sequential(p[*d].opcode)) {
          ASSERT_GE(pos[*d], 0);
          ASSERT_LT(pos[*d], pos[k]);
        }
      }
    }
    ASSERT_EQ(s.sequential.size() + s.combinational.size(), rep.live_slots.size());
  }
}

TEST(StripDead, RemovingDeadSlotsKeepsOutput) {
  std::mt19937_64 rng(41);
  int stripped = 0;
  for (int t = 0; t < 500; ++t) {
    auto p = random_program(2, 2 + t % 7, rng);
    if (!validate(p).valid) continue;
    auto s = strip_dead(p);
    ASSERT_EQ(s.size(), validate(p).live_slots.size());
    ASSERT_EQ(dead_code_eliminate(s).size(), s.size());
    stripped += s.size() < p.size();
    for (int r = 0; r < 3; ++r) {
      auto in = random_streams(2, 48, rng);
      ASSERT_EQ(simulate(p, in, 48), simulate(s, in, 48)) << format_netlist(p);
    }
  }
  EXPECT_GT(stripped, 50);
}
