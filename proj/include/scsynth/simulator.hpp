#pragma once

// Cycle-accurate simulation.
//
// Per cycle n: flip-flops publish dst[n] from their cycle n-1 latch, live
// gates evaluate in topological order, then the latches capture
//   DFF: src[n]            (so dst[n+1] = src[n])
//   TFF: dst[n] ^ src[n]   (so dst[n+1] = dst[n] ^ src[n])
// All latches power on at 0.

#include "scsynth/bitgen.hpp"
#include "scsynth/ir.hpp"
#include "scsynth/validity.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace scsynth {

class invalid_program_error : public error {
public:
  explicit invalid_program_error(std::vector<RegisterId> witness)
      : error(describe(witness)), witness_(std::move(witness)) {}
  const std::vector<RegisterId>& witness() const noexcept { return witness_; }

private:
  static std::string describe(const std::vector<RegisterId>& w) {
    std::string s = "combinational loop:";
    for (auto r : w) {
      s += " " + to_string(r);
    }
    if (!w.empty()) {
      s += " -> " + to_string(w.front());
    }
    return s;
  }
  std::vector<RegisterId> witness_;
};

namespace detail {

template <class Word>
Word apply_gate(Opcode op, Word a, Word b, Word c) noexcept {
  switch (op) {
  case Opcode::AND: return a & b;
  case Opcode::OR: return a | b;
  case Opcode::XOR: return a ^ b;
  case Opcode::NOT: return ~a;
  case Opcode::PASS: return a;
  case Opcode::MUX: return (c & a) | (~c & b);
  default: return a; // sequential opcodes never reach here
  }
}

inline Schedule require_schedule(const Program& p) {
  const auto rep = validate(p);
  if (!rep.valid) {
    throw invalid_program_error(*rep.loop_witness);
  }
  auto s = make_schedule(p, rep.live_slots);
  return *s;
}

} // namespace detail

/// Reference simulator. `inputs[i]` binds input register ri.
inline Bitstream simulate(const Program& p, std::span<const Bitstream> inputs, std::size_t length) {
  if (inputs.size() != p.n_inputs()) {
    throw error("program has " + std::to_string(p.n_inputs()) + " inputs, " +
                std::to_string(inputs.size()) + " bound");
  }
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (inputs[i].size() != length) {
      throw error("input r" + std::to_string(i) + " has length " + std::to_string(inputs[i].size()) +
                  ", expected " + std::to_string(length));
    }
  }
  const auto sched = detail::require_schedule(p);

  std::vector<std::uint8_t> reg(p.register_count(), 0);
  std::vector<std::uint8_t> latch(p.size(), 0);
  Bitstream out(length);
  const auto out_reg = p.output().index;

  for (std::size_t n = 0; n < length; ++n) {
    for (std::size_t i = 0; i < p.n_inputs(); ++i) {
      reg[i] = inputs[i][n];
    }
    for (auto k : sched.sequential) {
      reg[p.destination(k).index] = latch[k];
    }
    for (auto k : sched.combinational) {
      const auto& ins = p[k];
      const std::uint8_t a = reg[ins.operands[0].index];
      const std::uint8_t b = reg[ins.operands[1].index];
      const std::uint8_t c = reg[ins.operands[2].index];
      reg[p.destination(k).index] = detail::apply_gate<std::uint8_t>(ins.opcode, a, b, c) & 1u;
    }
    for (auto k : sched.sequential) {
      const auto& ins = p[k];
      const std::uint8_t src = reg[ins.operands[0].index];
      latch[k] = ins.opcode == Opcode::DFF ? src : static_cast<std::uint8_t>(reg[p.destination(k).index] ^ src);
    }
    out.set(n, reg[out_reg] != 0);
  }
  return out;
}

/// Many equal-length input bindings simulated at once: bit j of every word
/// belongs to binding j, so one pass over the cycles evaluates up to 64
/// bindings per word. Bit-exact with simulate().
class BatchInputs {
public:
  BatchInputs() = default;

  /// bindings[c][i] is binding c's stream for input register i.
  BatchInputs(std::size_t n_inputs, std::size_t length, std::span<const std::vector<Bitstream>> bindings)
      : n_inputs_(n_inputs), length_(length), count_(bindings.size()), groups_((bindings.size() + 63) / 64) {
    words_.assign(length_ * n_inputs_ * groups_, 0);
    for (std::size_t c = 0; c < count_; ++c) {
      const auto& b = bindings[c];
      if (b.size() != n_inputs_) {
        throw error("binding " + std::to_string(c) + " has wrong input count");
      }
      const std::size_t g = c / 64;
      const std::uint64_t bit = std::uint64_t{1} << (c % 64);
      for (std::size_t i = 0; i < n_inputs_; ++i) {
        if (b[i].size() != length_) {
          throw error("binding " + std::to_string(c) + " has a stream of wrong length");
        }
        for (std::size_t n = 0; n < length_; ++n) {
          if (b[i][n]) {
            words_[index(n, i, g)] |= bit;
          }
        }
      }
    }
  }

  std::size_t n_inputs() const noexcept { return n_inputs_; }
  std::size_t length() const noexcept { return length_; }
  std::size_t count() const noexcept { return count_; }
  std::size_t groups() const noexcept { return groups_; }

  const std::uint64_t* cycle(std::size_t n) const noexcept { return &words_[n * n_inputs_ * groups_]; }

private:
  std::size_t index(std::size_t n, std::size_t i, std::size_t g) const noexcept {
    return (n * n_inputs_ + i) * groups_ + g;
  }

  std::size_t n_inputs_ = 0;
  std::size_t length_ = 0;
  std::size_t count_ = 0;
  std::size_t groups_ = 0;
  std::vector<std::uint64_t> words_; // [cycle][input][group]
};

/// Reusable scratch space for count_output_ones.
struct BatchWorkspace {
  std::vector<std::uint64_t> reg;
  std::vector<std::uint64_t> latch;
  std::vector<std::uint64_t> planes;
  std::vector<std::uint32_t> counts;
};

/// Number of 1s in the output stream for every binding. `sched` must come from
/// make_schedule on `p`.
inline std::span<const std::uint32_t> count_output_ones(const Program& p, const Schedule& sched,
                                                        const BatchInputs& in, BatchWorkspace& ws) {
  const std::size_t G = in.groups();
  const std::size_t n_in = p.n_inputs();
  ws.reg.assign(p.register_count() * G, 0);
  ws.latch.assign(p.size() * G, 0);
  const std::size_t n_planes = static_cast<std::size_t>(std::bit_width(in.length())) + 1;
  ws.planes.assign(n_planes * G, 0);

  struct Step {
    Opcode op;
    std::uint32_t a, b, c, dst, slot;
  };
  std::vector<Step> seq, comb;
  auto make_step = [&](std::size_t k) {
    const auto& ins = p[k];
    return Step{ins.opcode,
                static_cast<std::uint32_t>(ins.operands[0].index * G),
                static_cast<std::uint32_t>(ins.operands[1].index * G),
                static_cast<std::uint32_t>(ins.operands[2].index * G),
                static_cast<std::uint32_t>(p.destination(k).index * G),
                static_cast<std::uint32_t>(k * G)};
  };
  for (auto k : sched.sequential) seq.push_back(make_step(k));
  for (auto k : sched.combinational) comb.push_back(make_step(k));

  std::uint64_t* reg = ws.reg.data();
  std::uint64_t* latch = ws.latch.data();
  std::uint64_t* planes = ws.planes.data();
  const std::size_t out = p.output().index * G;

  for (std::size_t n = 0; n < in.length(); ++n) {
    const std::uint64_t* src = in.cycle(n);
    std::copy(src, src + n_in * G, reg);
    for (const auto& s : seq) {
      for (std::size_t g = 0; g < G; ++g) reg[s.dst + g] = latch[s.slot + g];
    }
    for (const auto& s : comb) {
      switch (s.op) {
      case Opcode::AND: for (std::size_t g = 0; g < G; ++g) reg[s.dst + g] = reg[s.a + g] & reg[s.b + g]; break;
      case Opcode::OR: for (std::size_t g = 0; g < G; ++g) reg[s.dst + g] = reg[s.a + g] | reg[s.b + g]; break;
      case Opcode::XOR: for (std::size_t g = 0; g < G; ++g) reg[s.dst + g] = reg[s.a + g] ^ reg[s.b + g]; break;
      case Opcode::NOT: for (std::size_t g = 0; g < G; ++g) reg[s.dst + g] = ~reg[s.a + g]; break;
      case Opcode::PASS: for (std::size_t g = 0; g < G; ++g) reg[s.dst + g] = reg[s.a + g]; break;
      case Opcode::MUX:
        for (std::size_t g = 0; g < G; ++g) {
          const auto sel = reg[s.c + g];
          reg[s.dst + g] = (sel & reg[s.a + g]) | (~sel & reg[s.b + g]);
        }
        break;
      default: break;
      }
    }
    for (const auto& s : seq) {
      if (s.op == Opcode::DFF) {
        for (std::size_t g = 0; g < G; ++g) latch[s.slot + g] = reg[s.a + g];
      } else {
        for (std::size_t g = 0; g < G; ++g) latch[s.slot + g] = reg[s.dst + g] ^ reg[s.a + g];
      }
    }
    // Vertical counter: plane b holds bit b of every lane's running count.
    for (std::size_t g = 0; g < G; ++g) {
      std::uint64_t carry = reg[out + g];
      for (std::size_t b = 0; carry != 0 && b < n_planes; ++b) {
        auto& plane = planes[b * G + g];
        const std::uint64_t next = plane & carry;
        plane ^= carry;
        carry = next;
      }
    }
  }

  ws.counts.assign(in.count(), 0);
  for (std::size_t c = 0; c < in.count(); ++c) {
    const std::size_t g = c / 64, lane = c % 64;
    std::uint32_t v = 0;
    for (std::size_t b = 0; b < n_planes; ++b) {
      v |= static_cast<std::uint32_t>((planes[b * G + g] >> lane) & 1u) << b;
    }
    ws.counts[c] = v;
  }
  return ws.counts;
}

} // namespace scsynth
