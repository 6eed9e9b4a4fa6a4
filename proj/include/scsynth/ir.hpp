#pragma once

// Hardware program representation: opcodes, registers, instructions and
// SSA-shaped programs, plus the textual netlist format.

#include <algorithm>
#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace scsynth {

class error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed netlist or spec text. Carries the 1-based line number.
class parse_error : public error {
public:
  parse_error(std::size_t line, const std::string& what)
      : error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

enum class Opcode : std::uint8_t { AND, OR, XOR, NOT, PASS, DFF, TFF, MUX };

inline constexpr std::array<Opcode, 8> all_opcodes = {
    Opcode::AND, Opcode::OR,  Opcode::XOR, Opcode::NOT,
    Opcode::PASS, Opcode::DFF, Opcode::TFF, Opcode::MUX};

constexpr std::size_t arity(Opcode op) noexcept {
  switch (op) {
  case Opcode::AND:
  case Opcode::OR:
  case Opcode::XOR:
    return 2;
  case Opcode::MUX:
    return 3;
  default:
    return 1;
  }
}

constexpr bool is_sequential(Opcode op) noexcept {
  return op == Opcode::DFF || op == Opcode::TFF;
}

constexpr std::string_view to_string(Opcode op) noexcept {
  switch (op) {
  case Opcode::AND: return "AND";
  case Opcode::OR: return "OR";
  case Opcode::XOR: return "XOR";
  case Opcode::NOT: return "NOT";
  case Opcode::PASS: return "PASS";
  case Opcode::DFF: return "DFF";
  case Opcode::TFF: return "TFF";
  case Opcode::MUX: return "MUX";
  }
  return "?";
}

inline std::optional<Opcode> opcode_from_string(std::string_view s) {
  for (auto op : all_opcodes) {
    if (to_string(op) == s) {
      return op;
    }
  }
  return std::nullopt;
}

struct RegisterId {
  std::uint32_t index = 0;

  constexpr auto operator<=>(const RegisterId&) const = default;
};

inline std::string to_string(RegisterId r) { return "r" + std::to_string(r.index); }

/// One gate. Only the first `arity(opcode)` operands are meaningful; the rest
/// are kept at r0 so that structural equality ignores them. For MUX the
/// operand order is (src, trg, sel).
struct Instruction {
  Opcode opcode = Opcode::PASS;
  std::array<RegisterId, 3> operands{};

  std::size_t arity() const noexcept { return scsynth::arity(opcode); }

  bool operator==(const Instruction&) const = default;
};

/// A fixed-length list of instructions over a register file. Registers
/// [0, n_inputs) are inputs; slot k drives register n_inputs + k. The output is
/// the destination of the final slot.
class Program {
public:
  Program() = default;
  Program(std::size_t n_inputs, std::vector<Instruction> instructions)
      : n_inputs_(n_inputs), instructions_(std::move(instructions)) {}

  std::size_t n_inputs() const noexcept { return n_inputs_; }
  std::size_t size() const noexcept { return instructions_.size(); }
  std::size_t register_count() const noexcept { return n_inputs_ + instructions_.size(); }

  const std::vector<Instruction>& instructions() const noexcept { return instructions_; }
  const Instruction& operator[](std::size_t slot) const { return instructions_[slot]; }
  Instruction& operator[](std::size_t slot) { return instructions_[slot]; }

  RegisterId destination(std::size_t slot) const noexcept {
    return RegisterId{static_cast<std::uint32_t>(n_inputs_ + slot)};
  }
  RegisterId output() const noexcept { return destination(instructions_.size() - 1); }

  bool is_input(RegisterId r) const noexcept { return r.index < n_inputs_; }

  /// Slot driving `r`, or nullopt for input registers.
  std::optional<std::size_t> driver(RegisterId r) const noexcept {
    if (r.index < n_inputs_ || r.index >= register_count()) {
      return std::nullopt;
    }
    return r.index - n_inputs_;
  }

  bool operator==(const Program&) const = default;

private:
  std::size_t n_inputs_ = 0;
  std::vector<Instruction> instructions_;
};

template <class Rng>
RegisterId random_register(std::size_t pool, Rng& rng) {
  std::uniform_int_distribution<std::uint32_t> pick(0, static_cast<std::uint32_t>(pool - 1));
  return RegisterId{pick(rng)};
}

/// Uniform opcode, uniform operands drawn from the whole register pool.
template <class Rng>
Instruction random_instruction(std::size_t pool, Rng& rng) {
  std::uniform_int_distribution<std::size_t> pick_op(0, all_opcodes.size() - 1);
  Instruction ins;
  ins.opcode = all_opcodes[pick_op(rng)];
  for (std::size_t i = 0; i < ins.arity(); ++i) {
    ins.operands[i] = random_register(pool, rng);
  }
  return ins;
}

/// The result may contain combinational loops; legality is decided by
/// validate().
template <class Rng>
Program random_program(std::size_t n_inputs, std::size_t length, Rng& rng) {
  std::vector<Instruction> body;
  body.reserve(length);
  for (std::size_t k = 0; k < length; ++k) {
    body.push_back(random_instruction(n_inputs + length, rng));
  }
  return Program(n_inputs, std::move(body));
}

// -- netlist text ------------------------------------------------------------

/// Raised when a netlist assigns a register more than once, assigns an input,
/// or has a combinational gate reading its own destination.
class ssa_error : public parse_error {
public:
  ssa_error(std::size_t line, RegisterId reg, const std::string& what)
      : parse_error(line, what), reg_(reg) {}
  RegisterId reg() const noexcept { return reg_; }

private:
  RegisterId reg_;
};

inline std::string format_netlist(const Program& p) {
  std::ostringstream os;
  os << "inputs " << p.n_inputs() << '\n';
  for (std::size_t k = 0; k < p.size(); ++k) {
    const auto& ins = p[k];
    os << to_string(ins.opcode);
    for (std::size_t i = 0; i < ins.arity(); ++i) {
      os << ' ' << to_string(ins.operands[i]);
    }
    os << " -> " << to_string(p.destination(k)) << '\n';
  }
  os << "output " << to_string(p.output());
  return os.str();
}

namespace detail {

inline std::vector<std::string> split_ws(std::string_view line) {
  std::vector<std::string> out;
  std::istringstream is{std::string(line)};
  std::string tok;
  while (is >> tok) {
    out.push_back(tok);
  }
  return out;
}

inline std::optional<std::uint64_t> parse_count(std::string_view s) {
  if (s.empty() || s.size() > 9) {
    return std::nullopt;
  }
  std::uint64_t v = 0;
  for (char c : s) {
    if (c < '0' || c > '9') {
      return std::nullopt;
    }
    v = v * 10 + static_cast<std::uint64_t>(c - '0');
  }
  return v;
}

inline RegisterId parse_register(std::string_view tok, std::size_t line) {
  if (tok.size() < 2 || tok[0] != 'r') {
    throw parse_error(line, "expected register, got '" + std::string(tok) + "'");
  }
  auto v = parse_count(tok.substr(1));
  if (!v) {
    throw parse_error(line, "bad register '" + std::string(tok) + "'");
  }
  return RegisterId{static_cast<std::uint32_t>(*v)};
}

} // namespace detail

/// Parses the line-oriented netlist format:
///
///     inputs <n>
///     <OPCODE> <in0> [<in1> [<sel>]] -> <dst>
///     output r<k>
///
/// Instruction lines may appear in any order; each lands in the slot its
/// destination implies. `#` starts a comment.
inline Program parse_netlist(std::string_view text) {
  struct Pending {
    Instruction ins;
    RegisterId dst;
    std::size_t line;
  };

  std::optional<std::size_t> n_inputs;
  std::optional<std::pair<RegisterId, std::size_t>> output;
  std::vector<Pending> pending;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto eol = text.find('\n', pos);
    if (eol == std::string_view::npos) {
      eol = text.size();
    }
    auto line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;

    if (auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    auto toks = detail::split_ws(line);
    if (toks.empty()) {
      continue;
    }

    if (!n_inputs) {
      if (toks.size() != 2 || toks[0] != "inputs") {
        throw parse_error(line_no, "expected 'inputs <n>' header");
      }
      auto n = detail::parse_count(toks[1]);
      if (!n || *n == 0) {
        throw parse_error(line_no, "input count must be a positive integer");
      }
      n_inputs = static_cast<std::size_t>(*n);
      continue;
    }
    if (output) {
      throw parse_error(line_no, "content after 'output' line");
    }
    if (toks[0] == "output") {
      if (toks.size() != 2) {
        throw parse_error(line_no, "expected 'output r<k>'");
      }
      output = {detail::parse_register(toks[1], line_no), line_no};
      continue;
    }

    auto op = opcode_from_string(toks[0]);
    if (!op) {
      throw parse_error(line_no, "unknown opcode '" + toks[0] + "'");
    }
    const std::size_t want = arity(*op);
    if (toks.size() != want + 3 || toks[want + 1] != "->") {
      throw parse_error(line_no, std::string(to_string(*op)) + " takes " +
                                     std::to_string(want) + " operand(s): '" +
                                     std::string(to_string(*op)) + " <in>... -> <dst>'");
    }
    Pending pi{};
    pi.ins.opcode = *op;
    for (std::size_t i = 0; i < want; ++i) {
      pi.ins.operands[i] = detail::parse_register(toks[1 + i], line_no);
    }
    pi.dst = detail::parse_register(toks[want + 2], line_no);
    pi.line = line_no;
    pending.push_back(pi);
  }

  if (!n_inputs) {
    throw parse_error(line_no, "missing 'inputs <n>' header");
  }
  if (pending.empty()) {
    throw parse_error(line_no, "netlist has no instructions");
  }
  if (!output) {
    throw parse_error(line_no, "missing 'output' line");
  }

  const std::size_t n_in = *n_inputs;
  const std::size_t length = pending.size();
  const std::size_t pool = n_in + length;

  std::vector<std::optional<Instruction>> slots(length);
  for (const auto& pi : pending) {
    if (pi.dst.index < n_in) {
      throw ssa_error(pi.line, pi.dst, "input register " + to_string(pi.dst) + " is driven");
    }
    if (pi.dst.index >= pool) {
      throw parse_error(pi.line, "destination " + to_string(pi.dst) + " out of range (" +
                                     std::to_string(pool) + " registers)");
    }
    for (std::size_t i = 0; i < pi.ins.arity(); ++i) {
      const auto r = pi.ins.operands[i];
      if (r.index >= pool) {
        throw parse_error(pi.line, "operand " + to_string(r) + " out of range (" +
                                       std::to_string(pool) + " registers)");
      }
      if (r == pi.dst && !is_sequential(pi.ins.opcode)) {
        throw ssa_error(pi.line, r, "register " + to_string(r) + " is self-driven");
      }
    }
    auto& slot = slots[pi.dst.index - n_in];
    if (slot) {
      throw ssa_error(pi.line, pi.dst, "register " + to_string(pi.dst) + " is doubly driven");
    }
    slot = pi.ins;
  }

  std::vector<Instruction> body;
  body.reserve(length);
  for (auto& s : slots) {
    body.push_back(*s);
  }
  Program p(n_in, std::move(body));
  if (output->first != p.output()) {
    throw parse_error(output->second, "output must be the highest destination register " +
                                          to_string(p.output()));
  }
  return p;
}

} // namespace scsynth
