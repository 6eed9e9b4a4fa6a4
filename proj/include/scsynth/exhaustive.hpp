#pragma once

// Brute-force baseline over every program of a given length.
//
// Enumeration convention: each slot has a fixed destination and chooses one of
// the 8 opcodes plus arity(op) operands from the full register pool
// (n_inputs + length registers, own destination included). The per-slot
// choice count is therefore 3p^2 + 4p + p^3 for pool size p, and the space is
// that count raised to the program length. For two inputs this gives 16384
// candidates at length 2 and about 3.73e13 at length 5.

#include "scsynth/cost.hpp"
#include "scsynth/ir.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cstdint>
#include <limits>
#include <thread>
#include <vector>

namespace scsynth {

using big_count = boost::multiprecision::cpp_int;

class space_too_large_error : public error {
public:
  space_too_large_error(big_count count, std::uint64_t limit)
      : error("search space has " + count.str() + " candidates, above the limit of " + std::to_string(limit)),
        count_(std::move(count)) {}
  const big_count& count() const noexcept { return count_; }

private:
  big_count count_;
};

inline big_count instructions_per_slot(std::size_t pool) {
  big_count total = 0;
  for (auto op : all_opcodes) {
    big_count term = 1;
    for (std::size_t i = 0; i < arity(op); ++i) {
      term *= pool;
    }
    total += term;
  }
  return total;
}

inline big_count count_candidates(std::size_t n_inputs, std::size_t length) {
  if (length < 1) {
    throw error("length must be at least 1");
  }
  const auto per_slot = instructions_per_slot(n_inputs + length);
  big_count total = 1;
  for (std::size_t k = 0; k < length; ++k) {
    total *= per_slot;
  }
  return total;
}

struct EnumSpace {
  std::size_t n_inputs = 0;
  std::size_t length = 0;
  big_count total_candidates = 0;
};

inline EnumSpace enum_space(std::size_t n_inputs, std::size_t length) {
  return {n_inputs, length, count_candidates(n_inputs, length)};
}

namespace detail {

/// Instruction number `code` in [0, instructions_per_slot(pool)): opcodes in
/// declaration order, operands as base-`pool` digits, first operand most
/// significant.
inline Instruction decode_instruction(std::uint64_t code, std::size_t pool) {
  for (auto op : all_opcodes) {
    std::uint64_t span = 1;
    for (std::size_t i = 0; i < arity(op); ++i) {
      span *= pool;
    }
    if (code < span) {
      Instruction ins;
      ins.opcode = op;
      for (std::size_t i = arity(op); i-- > 0;) {
        ins.operands[i] = RegisterId{static_cast<std::uint32_t>(code % pool)};
        code /= pool;
      }
      return ins;
    }
    code -= span;
  }
  throw error("instruction code out of range");
}

} // namespace detail

/// Candidate number `index` in enumeration order (last slot varies fastest).
inline Program candidate_at(std::size_t n_inputs, std::size_t length, std::uint64_t index) {
  const std::size_t pool = n_inputs + length;
  const auto per_slot = static_cast<std::uint64_t>(instructions_per_slot(pool));
  std::vector<Instruction> body(length);
  for (std::size_t k = length; k-- > 0;) {
    body[k] = detail::decode_instruction(index % per_slot, pool);
    index /= per_slot;
  }
  return Program(n_inputs, std::move(body));
}

struct EnumResult {
  Program best;
  double cost = 1.0;
  std::uint64_t index = 0;
  std::uint64_t evaluated = 0;
};

/// Scores every candidate and returns the first one of minimum cost.
/// Throws space_too_large_error when the space exceeds `limit`.
inline EnumResult enumerate_best(const TestSuite& suite, std::size_t n_inputs, std::size_t length,
                                 std::uint64_t limit, std::size_t threads = 0) {
  if (n_inputs != suite.n_inputs()) {
    throw error("suite has " + std::to_string(suite.n_inputs()) + " inputs, enumeration asked for " +
                std::to_string(n_inputs));
  }
  const auto count = count_candidates(n_inputs, length);
  if (count > limit) {
    throw space_too_large_error(count, limit);
  }
  const auto total = static_cast<std::uint64_t>(count);
  const std::size_t pool = n_inputs + length;
  const auto per_slot = static_cast<std::uint64_t>(instructions_per_slot(pool));
  std::vector<Instruction> table;
  table.reserve(per_slot);
  for (std::uint64_t c = 0; c < per_slot; ++c) {
    table.push_back(detail::decode_instruction(c, pool));
  }

  if (threads == 0) {
    threads = std::max(1u, std::thread::hardware_concurrency());
  }
  threads = static_cast<std::size_t>(std::min<std::uint64_t>(threads, std::max<std::uint64_t>(1, total / 1024)));

  struct Best {
    double cost = std::numeric_limits<double>::infinity();
    std::uint64_t index = 0;
  };
  std::vector<Best> partial(threads);

  auto scan = [&](std::size_t t) {
    const std::uint64_t begin = total / threads * t;
    const std::uint64_t end = t + 1 == threads ? total : total / threads * (t + 1);
    BatchWorkspace ws;
    std::vector<std::uint64_t> digits(length);
    std::uint64_t rem = begin;
    for (std::size_t k = length; k-- > 0;) {
      digits[k] = rem % per_slot;
      rem /= per_slot;
    }
    std::vector<Instruction> body(length);
    for (std::size_t k = 0; k < length; ++k) {
      body[k] = table[digits[k]];
    }
    Program p(n_inputs, body);
    Best best;
    for (std::uint64_t idx = begin; idx < end; ++idx) {
      const double c = evaluate_cost(p, suite, ws);
      if (c < best.cost) {
        best = {c, idx};
      }
      for (std::size_t k = length; k-- > 0;) {
        if (++digits[k] < per_slot) {
          p[k] = table[digits[k]];
          break;
        }
        digits[k] = 0;
        p[k] = table[0];
      }
    }
    partial[t] = best;
  };

  if (threads == 1) {
    scan(0);
  } else {
    std::vector<std::thread> pool_threads;
    for (std::size_t t = 0; t < threads; ++t) {
      pool_threads.emplace_back(scan, t);
    }
    for (auto& th : pool_threads) {
      th.join();
    }
  }

  Best best = partial[0];
  for (const auto& b : partial) {
    if (b.cost < best.cost || (b.cost == best.cost && b.index < best.index)) {
      best = b;
    }
  }
  return {candidate_at(n_inputs, length, best.index), best.cost, best.index, total};
}

} // namespace scsynth
