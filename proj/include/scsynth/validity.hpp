#pragma once

// Liveness (dead code elimination) and combinational loop detection.

#include "scsynth/ir.hpp"

#include <optional>
#include <vector>

namespace scsynth {

struct ValidityReport {
  bool valid = true;
  /// Ascending slot indices in the transitive fan-in of the output.
  std::vector<std::size_t> live_slots;
  /// Registers on a combinational cycle, in dependence order. Present iff !valid.
  std::optional<std::vector<RegisterId>> loop_witness;
};

/// Transitive fan-in of the output register through both combinational and
/// sequential edges. Returned ascending.
inline std::vector<std::size_t> dead_code_eliminate(const Program& p) {
  std::vector<char> live(p.size(), 0);
  std::vector<std::size_t> stack;
  if (p.size() == 0) {
    return {};
  }
  stack.push_back(p.size() - 1);
  live[p.size() - 1] = 1;
  while (!stack.empty()) {
    const auto k = stack.back();
    stack.pop_back();
    const auto& ins = p[k];
    for (std::size_t i = 0; i < ins.arity(); ++i) {
      if (auto d = p.driver(ins.operands[i]); d && !live[*d]) {
        live[*d] = 1;
        stack.push_back(*d);
      }
    }
  }
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (live[k]) {
      out.push_back(k);
    }
  }
  return out;
}

namespace detail {

// Same-cycle dependence: combinational consumers read their operands at cycle
// n. Flip-flops read only cycle n-1 values, so they have no incoming edges.
inline bool combinational_edge(const Program& p, std::size_t consumer) {
  return !is_sequential(p[consumer].opcode);
}

} // namespace detail

/// Looks for a cycle among same-cycle dependences of the given live slots.
inline std::optional<std::vector<RegisterId>>
check_combinational_loops(const Program& p, const std::vector<std::size_t>& live) {
  enum : char { unseen, on_path, done };
  std::vector<char> in_set(p.size(), 0);
  for (auto k : live) {
    in_set[k] = 1;
  }
  std::vector<char> state(p.size(), unseen);
  std::vector<std::size_t> parent(p.size(), 0);

  // Iterative DFS along reversed edges (consumer -> producer); a back edge
  // closes a cycle and the path between gives the witness.
  struct Frame {
    std::size_t slot;
    std::size_t next_operand;
  };
  for (auto root : live) {
    if (state[root] != unseen) {
      continue;
    }
    std::vector<Frame> stack{{root, 0}};
    state[root] = on_path;
    while (!stack.empty()) {
      auto& top = stack.back();
      const auto& ins = p[top.slot];
      if (!detail::combinational_edge(p, top.slot) || top.next_operand >= ins.arity()) {
        state[top.slot] = done;
        stack.pop_back();
        continue;
      }
      const auto r = ins.operands[top.next_operand++];
      auto d = p.driver(r);
      if (!d || !in_set[*d]) {
        continue;
      }
      if (state[*d] == on_path) {
        // parent[k] consumes k, so walking parents follows the data flow
        // from top.slot back around to *d, which in turn feeds top.slot.
        std::vector<RegisterId> cycle;
        for (auto k = top.slot;; k = parent[k]) {
          cycle.push_back(p.destination(k));
          if (k == *d) {
            break;
          }
        }
        return cycle;
      }
      if (state[*d] == unseen) {
        state[*d] = on_path;
        parent[*d] = top.slot;
        stack.push_back({*d, 0});
      }
    }
  }
  return std::nullopt;
}

inline ValidityReport validate(const Program& p) {
  ValidityReport rep;
  rep.live_slots = dead_code_eliminate(p);
  rep.loop_witness = check_combinational_loops(p, rep.live_slots);
  rep.valid = !rep.loop_witness.has_value();
  return rep;
}

/// Live slots only, renumbered densely in their original order. The output
/// slot has the highest index, so it stays last.
inline Program strip_dead(const Program& p) {
  const auto live = dead_code_eliminate(p);
  std::vector<std::uint32_t> remap(p.register_count(), 0);
  for (std::size_t r = 0; r < p.n_inputs(); ++r) {
    remap[r] = static_cast<std::uint32_t>(r);
  }
  for (std::size_t i = 0; i < live.size(); ++i) {
    remap[p.destination(live[i]).index] = static_cast<std::uint32_t>(p.n_inputs() + i);
  }
  std::vector<Instruction> body;
  body.reserve(live.size());
  for (auto k : live) {
    Instruction ins = p[k];
    for (std::size_t i = 0; i < ins.arity(); ++i) {
      ins.operands[i].index = remap[ins.operands[i].index];
    }
    body.push_back(ins);
  }
  return Program(p.n_inputs(), std::move(body));
}

/// Evaluation order for one clock cycle of a valid program.
struct Schedule {
  std::vector<std::size_t> sequential;    // live DFF/TFF slots, any order
  std::vector<std::size_t> combinational; // live gates, topologically ordered
};

/// Kahn ordering of the live combinational slots; nullopt when they contain a
/// cycle.
inline std::optional<Schedule> make_schedule(const Program& p, const std::vector<std::size_t>& live) {
  Schedule s;
  std::vector<char> in_set(p.size(), 0);
  for (auto k : live) {
    in_set[k] = 1;
  }
  std::vector<std::size_t> pending(p.size(), 0);
  std::vector<std::vector<std::size_t>> consumers(p.size());
  std::size_t n_comb = 0;
  for (auto k : live) {
    if (is_sequential(p[k].opcode)) {
      s.sequential.push_back(k);
      continue;
    }
    ++n_comb;
    const auto& ins = p[k];
    for (std::size_t i = 0; i < ins.arity(); ++i) {
      auto d = p.driver(ins.operands[i]);
      if (d && in_set[*d] && !is_sequential(p[*d].opcode)) {
        ++pending[k];
        consumers[*d].push_back(k);
      }
    }
  }
  std::vector<std::size_t> ready;
  for (auto k : live) {
    if (!is_sequential(p[k].opcode) && pending[k] == 0) {
      ready.push_back(k);
    }
  }
  while (!ready.empty()) {
    auto k = ready.back();
    ready.pop_back();
    s.combinational.push_back(k);
    for (auto c : consumers[k]) {
      if (--pending[c] == 0) {
        ready.push_back(c);
      }
    }
  }
  if (s.combinational.size() != n_comb) {
    return std::nullopt;
  }
  return s;
}

} // namespace scsynth
