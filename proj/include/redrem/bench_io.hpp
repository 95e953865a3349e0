#pragma once

#include <cctype>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "redrem/circuit.hpp"
#include "redrem/topo_index.hpp"

namespace redrem {

enum class BenchErrc : std::uint8_t {
  Syntax,
  UndeclaredOperand,
  RedefinedName,
  UnknownKind,
  ArityMismatch,
  CycleDetected,
};

constexpr std::string_view to_string(BenchErrc code) {
  switch (code) {
    case BenchErrc::Syntax: return "SyntaxError";
    case BenchErrc::UndeclaredOperand: return "UndeclaredOperand";
    case BenchErrc::RedefinedName: return "RedefinedName";
    case BenchErrc::UnknownKind: return "UnknownKind";
    case BenchErrc::ArityMismatch: return "ArityMismatch";
    case BenchErrc::CycleDetected: return "CycleDetected";
  }
  return "?";
}

class BenchParseError : public std::runtime_error {
 public:
  BenchParseError(BenchErrc code, std::size_t line, std::size_t column, std::string name, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + " at " + std::to_string(line) + ":" +
                           std::to_string(column) + ": " + detail),
        code_(code),
        line_(line),
        column_(column),
        name_(std::move(name)) {}

  BenchErrc code() const noexcept { return code_; }
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }
  const std::string& name() const noexcept { return name_; }

 private:
  BenchErrc code_;
  std::size_t line_;
  std::size_t column_;
  std::string name_;
};

namespace detail {

inline bool is_name_char(char ch) {
  return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '.' || ch == '[' || ch == ']';
}

inline std::string upper(std::string_view s) {
  std::string out(s);
  for (auto& ch : out) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
  return out;
}

inline std::optional<GateKind> bench_kind(std::string_view token) {
  auto t = upper(token);
  if (t == "AND") return GateKind::And;
  if (t == "NAND") return GateKind::Nand;
  if (t == "OR") return GateKind::Or;
  if (t == "NOR") return GateKind::Nor;
  if (t == "XOR") return GateKind::Xor;
  if (t == "XNOR") return GateKind::Xnor;
  if (t == "NOT") return GateKind::Not;
  if (t == "BUF" || t == "BUFF") return GateKind::Buf;
  return std::nullopt;
}

struct Token {
  std::string text;
  std::size_t column = 0;  // 1-based
};

struct Declaration {
  enum class Type { Input, Output, Assign } type = Type::Assign;
  Token name;
  GateKind kind = GateKind::Buf;
  std::vector<Token> operands;
  std::size_t line = 0;
};

class LineScanner {
 public:
  LineScanner(std::string_view text, std::size_t line) : text_(text), line_(line) {}

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool at_end() {
    skip_space();
    return pos_ >= text_.size() || text_[pos_] == '#';
  }

  std::size_t column() const { return pos_ + 1; }

  bool accept(char ch) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == ch) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char ch) {
    if (!accept(ch)) fail(std::string("expected '") + ch + "'");
  }

  Token name() {
    skip_space();
    Token tok{{}, column()};
    while (pos_ < text_.size() && is_name_char(text_[pos_])) tok.text.push_back(text_[pos_++]);
    if (tok.text.empty()) fail("expected a net name");
    return tok;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw BenchParseError(BenchErrc::Syntax, line_, column(), {}, what);
  }

 private:
  std::string_view text_;
  std::size_t line_;
  std::size_t pos_ = 0;
};

// "# @const <name> <0|1>": marks an INPUT line as a tied-off constant net.
inline std::optional<std::pair<std::string, bool>> const_directive(std::string_view line) {
  std::istringstream in{std::string(line)};
  std::string hash, tag, name, value;
  if (!(in >> hash >> tag >> name >> value)) return std::nullopt;
  if (hash != "#" || tag != "@const" || (value != "0" && value != "1")) return std::nullopt;
  return std::make_pair(name, value == "1");
}

}  // namespace detail

/// Parses an ISCAS `.bench` netlist. The result is validated and canonical:
/// constants are folded, repeated gate inputs collapsed, dangling gates swept.
inline Circuit parse_bench(std::istream& in) {
  using detail::Declaration;
  std::vector<Declaration> decls;
  std::unordered_map<std::string, bool> constants;
  std::string raw;
  for (std::size_t lineno = 1; std::getline(in, raw); ++lineno) {
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    if (auto d = detail::const_directive(raw)) {
      constants[d->first] = d->second;
      continue;
    }
    detail::LineScanner sc(raw, lineno);
    if (sc.at_end()) continue;
    auto head = sc.name();
    auto keyword = detail::upper(head.text);
    if ((keyword == "INPUT" || keyword == "OUTPUT") && sc.accept('(')) {
      Declaration d;
      d.type = keyword == "INPUT" ? Declaration::Type::Input : Declaration::Type::Output;
      d.name = sc.name();
      d.line = lineno;
      sc.expect(')');
      if (!sc.at_end()) sc.fail("unexpected trailing text");
      decls.push_back(std::move(d));
      continue;
    }
    sc.expect('=');
    auto kind_tok = sc.name();
    auto kind = detail::bench_kind(kind_tok.text);
    if (!kind)
      throw BenchParseError(BenchErrc::UnknownKind, lineno, kind_tok.column, kind_tok.text,
                            "unknown gate kind '" + kind_tok.text + "'");
    Declaration d;
    d.type = Declaration::Type::Assign;
    d.name = head;
    d.kind = *kind;
    d.line = lineno;
    sc.expect('(');
    if (!sc.accept(')')) {
      do d.operands.push_back(sc.name());
      while (sc.accept(','));
      sc.expect(')');
    }
    if (!sc.at_end()) sc.fail("unexpected trailing text");
    if (!arity_ok(*kind, d.operands.size()))
      throw BenchParseError(BenchErrc::ArityMismatch, lineno, kind_tok.column, head.text,
                            std::string(to_string(*kind)) + " with " + std::to_string(d.operands.size()) + " operands");
    decls.push_back(std::move(d));
  }

  Circuit c;
  std::unordered_map<std::string, VertexId> defined;
  auto define = [&](const Declaration& d, VertexId v) { defined.emplace(d.name.text, v); };
  for (const auto& d : decls) {
    if (d.type == Declaration::Type::Output) continue;
    if (defined.count(d.name.text))
      throw BenchParseError(BenchErrc::RedefinedName, d.line, d.name.column, d.name.text,
                            "'" + d.name.text + "' defined twice");
    if (d.type == Declaration::Type::Input) {
      auto k = constants.find(d.name.text);
      define(d, k == constants.end() ? c.add_input(d.name.text) : c.add_constant(k->second, d.name.text));
    } else {
      define(d, c.add_gate(d.kind, d.name.text));
    }
  }
  auto lookup = [&](const detail::Token& tok, std::size_t line) {
    auto it = defined.find(tok.text);
    if (it == defined.end())
      throw BenchParseError(BenchErrc::UndeclaredOperand, line, tok.column, tok.text,
                            "'" + tok.text + "' is never defined");
    return it->second;
  };
  for (const auto& d : decls) {
    if (d.type == Declaration::Type::Assign) {
      auto v = defined.at(d.name.text);
      for (const auto& op : d.operands) c.connect(lookup(op, d.line), v);
    } else if (d.type == Declaration::Type::Output) {
      auto v = lookup(d.name, d.line);
      for (const auto& po : c.outputs())
        if (po.name == d.name.text)
          throw BenchParseError(BenchErrc::RedefinedName, d.line, d.name.column, d.name.text,
                                "output '" + d.name.text + "' declared twice");
      c.add_output(d.name.text, v);
    }
  }
  if (auto err = validate(c)) {
    std::string where = err->vertices.empty() ? std::string{} : c.name(err->vertices.front());
    auto code = err->code == NetlistErrc::CycleDetected ? BenchErrc::CycleDetected : BenchErrc::Syntax;
    throw BenchParseError(code, 0, 0, where, err->message + (where.empty() ? "" : " at '" + where + "'"));
  }
  c.canonicalize();
  return c;
}

inline Circuit parse_bench(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_bench(in);
}

inline Circuit read_bench_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return parse_bench(in);
}

/// Writes `.bench` text: INPUT lines, OUTPUT lines, then assignments in forward
/// topological order.
///
/// Plain `.bench` has no constant literal. A constant primary output is written
/// as `name = BUF(vdd)` (or `gnd`), where `vdd`/`gnd` are declared as INPUT lines
/// and tagged by `# @const` header comments; parse_bench() reads them back as
/// constants while other tools see ordinary inputs.
inline void write_bench(const Circuit& circuit, std::ostream& out) {
  const Circuit* c = &circuit;
  std::optional<Circuit> folded;
  for (VertexId v = 0; v < circuit.capacity(); ++v)
    if (circuit.contains(v) && is_constant(circuit.kind(v)) && !circuit.fanout(v).empty()) {
      folded = circuit;
      folded->canonicalize();
      c = &*folded;
      break;
    }

  // Net names: a gate driving outputs takes the name of one of them.
  std::vector<std::string> net(c->capacity());
  std::unordered_map<std::string, VertexId> net_owner;
  for (VertexId v = 0; v < c->capacity(); ++v)
    if (c->contains(v)) net_owner.emplace(c->name(v), v);
  for (VertexId v = 0; v < c->capacity(); ++v)
    if (c->contains(v)) net[v] = c->name(v);
  for (const auto& po : c->outputs()) {
    auto d = po.driver;
    if (is_source(c->kind(d)) || po.name == c->name(d)) continue;
    bool keeps_own = false;
    for (const auto& other : c->outputs())
      if (other.driver == d && other.name == c->name(d)) keeps_own = true;
    if (keeps_own || net[d] != c->name(d) || net_owner.count(po.name)) continue;
    net_owner.erase(net[d]);
    net[d] = po.name;
    net_owner.emplace(po.name, d);
  }

  bool need_one = false, need_zero = false;
  for (const auto& po : c->outputs()) {
    if (c->kind(po.driver) == GateKind::Const1) need_one = true;
    if (c->kind(po.driver) == GateKind::Const0) need_zero = true;
  }
  std::string vdd, gnd;
  auto pick = [&](std::string base) {
    auto name = c->fresh_name(base);
    while (net_owner.count(name)) name = c->fresh_name(name + "_");
    net_owner.emplace(name, kNoVertex);
    return name;
  };
  if (need_one) vdd = pick("vdd");
  if (need_zero) gnd = pick("gnd");
  if (need_one || need_zero) {
    out << "# Constant nets are declared as inputs so plain .bench readers accept this file:\n";
    if (need_one) out << "#   " << vdd << " is tied to logic 1\n";
    if (need_zero) out << "#   " << gnd << " is tied to logic 0\n";
    if (need_one) out << "# @const " << vdd << " 1\n";
    if (need_zero) out << "# @const " << gnd << " 0\n";
  }

  for (auto v : c->inputs()) out << "INPUT(" << net[v] << ")\n";
  if (need_one) out << "INPUT(" << vdd << ")\n";
  if (need_zero) out << "INPUT(" << gnd << ")\n";
  for (const auto& po : c->outputs()) out << "OUTPUT(" << po.name << ")\n";

  TopoIndex order(*c);
  for (auto v : order.order()) {
    if (is_source(c->kind(v))) continue;
    out << net[v] << " = " << to_string(c->kind(v)) << "(";
    bool first = true;
    for (auto d : c->fanin(v)) {
      out << (first ? "" : ", ") << net[d];
      first = false;
    }
    out << ")\n";
  }
  for (const auto& po : c->outputs()) {
    auto d = po.driver;
    if (c->kind(d) == GateKind::Const1)
      out << po.name << " = BUF(" << vdd << ")\n";
    else if (c->kind(d) == GateKind::Const0)
      out << po.name << " = BUF(" << gnd << ")\n";
    else if (po.name != net[d])
      out << po.name << " = BUF(" << net[d] << ")\n";
  }
}

inline std::string write_bench(const Circuit& c) {
  std::ostringstream out;
  write_bench(c, out);
  return out.str();
}

inline void write_bench_file(const Circuit& c, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  write_bench(c, out);
}

}  // namespace redrem
