#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

namespace redrem {

enum class GateKind : std::uint8_t {
  And,
  Nand,
  Or,
  Nor,
  Not,
  Buf,
  Xor,
  Xnor,
  Input,
  Const0,
  Const1,
};

inline constexpr std::array kAllGateKinds = {
    GateKind::And, GateKind::Nand, GateKind::Or,    GateKind::Nor,    GateKind::Not,   GateKind::Buf,
    GateKind::Xor, GateKind::Xnor, GateKind::Input, GateKind::Const0, GateKind::Const1,
};

constexpr std::string_view to_string(GateKind kind) {
  switch (kind) {
    case GateKind::And: return "AND";
    case GateKind::Nand: return "NAND";
    case GateKind::Or: return "OR";
    case GateKind::Nor: return "NOR";
    case GateKind::Not: return "NOT";
    case GateKind::Buf: return "BUF";
    case GateKind::Xor: return "XOR";
    case GateKind::Xnor: return "XNOR";
    case GateKind::Input: return "INPUT";
    case GateKind::Const0: return "CONST0";
    case GateKind::Const1: return "CONST1";
  }
  return "?";
}

constexpr bool is_constant(GateKind kind) { return kind == GateKind::Const0 || kind == GateKind::Const1; }
constexpr bool is_source(GateKind kind) { return kind == GateKind::Input || is_constant(kind); }
constexpr bool is_single_input(GateKind kind) { return kind == GateKind::Not || kind == GateKind::Buf; }
constexpr bool is_parity(GateKind kind) { return kind == GateKind::Xor || kind == GateKind::Xnor; }

/// AND, NAND, OR and NOR: the kinds that have a controlling input value.
constexpr bool has_controlling_value(GateKind kind) {
  return kind == GateKind::And || kind == GateKind::Nand || kind == GateKind::Or || kind == GateKind::Nor;
}

/// Output polarity: true when the gate complements its "natural" function.
constexpr bool is_inverting(GateKind kind) {
  return kind == GateKind::Nand || kind == GateKind::Nor || kind == GateKind::Not || kind == GateKind::Xnor;
}

/// Input value whose presence alone fixes the output (0 for AND/NAND, 1 for OR/NOR).
constexpr std::optional<bool> controlling_value(GateKind kind) {
  switch (kind) {
    case GateKind::And:
    case GateKind::Nand: return false;
    case GateKind::Or:
    case GateKind::Nor: return true;
    default: return std::nullopt;
  }
}

/// Output value produced by a controlling input.
constexpr std::optional<bool> controlled_value(GateKind kind) {
  switch (kind) {
    case GateKind::And: return false;
    case GateKind::Nand: return true;
    case GateKind::Or: return true;
    case GateKind::Nor: return false;
    default: return std::nullopt;
  }
}

constexpr std::size_t min_arity(GateKind kind) {
  if (is_source(kind)) return 0;
  if (is_single_input(kind)) return 1;
  return 2;
}

constexpr std::optional<std::size_t> max_arity(GateKind kind) {
  if (is_source(kind)) return 0;
  if (is_single_input(kind)) return 1;
  return std::nullopt;
}

constexpr bool arity_ok(GateKind kind, std::size_t n) {
  auto hi = max_arity(kind);
  return n >= min_arity(kind) && (!hi || n <= *hi);
}

/// Gate kind with the output polarity flipped (AND <-> NAND, BUF <-> NOT, ...).
constexpr GateKind complement(GateKind kind) {
  switch (kind) {
    case GateKind::And: return GateKind::Nand;
    case GateKind::Nand: return GateKind::And;
    case GateKind::Or: return GateKind::Nor;
    case GateKind::Nor: return GateKind::Or;
    case GateKind::Not: return GateKind::Buf;
    case GateKind::Buf: return GateKind::Not;
    case GateKind::Xor: return GateKind::Xnor;
    case GateKind::Xnor: return GateKind::Xor;
    case GateKind::Const0: return GateKind::Const1;
    case GateKind::Const1: return GateKind::Const0;
    case GateKind::Input: return GateKind::Input;
  }
  return kind;
}

/// Evaluates a gate over words of packed input vectors.
inline std::uint64_t evaluate_words(GateKind kind, std::span<const std::uint64_t> in) {
  std::uint64_t acc = 0;
  switch (kind) {
    case GateKind::And:
    case GateKind::Nand:
      acc = ~std::uint64_t{0};
      for (auto w : in) acc &= w;
      break;
    case GateKind::Or:
    case GateKind::Nor:
      for (auto w : in) acc |= w;
      break;
    case GateKind::Xor:
    case GateKind::Xnor:
      for (auto w : in) acc ^= w;
      break;
    case GateKind::Not:
    case GateKind::Buf: acc = in.empty() ? 0 : in[0]; break;
    case GateKind::Const0: return 0;
    case GateKind::Const1: return ~std::uint64_t{0};
    case GateKind::Input: return 0;
  }
  return is_inverting(kind) ? ~acc : acc;
}

inline bool evaluate(GateKind kind, std::span<const bool> in) {
  bool acc = false;
  switch (kind) {
    case GateKind::And:
    case GateKind::Nand:
      acc = true;
      for (bool b : in) acc = acc && b;
      break;
    case GateKind::Or:
    case GateKind::Nor:
      for (bool b : in) acc = acc || b;
      break;
    case GateKind::Xor:
    case GateKind::Xnor:
      for (bool b : in) acc = acc != b;
      break;
    case GateKind::Not:
    case GateKind::Buf: acc = !in.empty() && in[0]; break;
    case GateKind::Const0: return false;
    case GateKind::Const1: return true;
    case GateKind::Input: return false;
  }
  return is_inverting(kind) ? !acc : acc;
}

/// Three-valued signal used during implication.
enum class Ternary : std::uint8_t { Zero = 0, One = 1, Unassigned = 2 };

constexpr Ternary to_ternary(bool b) { return b ? Ternary::One : Ternary::Zero; }
constexpr bool is_assigned(Ternary t) { return t != Ternary::Unassigned; }
constexpr bool to_bool(Ternary t) { return t == Ternary::One; }

}  // namespace redrem
