#pragma once

// Closed-form scalar expressions over chart coordinates.
//
// An Expr is an immutable, reference-counted tree (in practice a DAG, since
// derivatives share subtrees). The vocabulary is closed: rational constants,
// coordinates, + - * /, integer powers, exp, log, sin and cos. Every
// expression therefore has an exact symbolic derivative.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "lcsgeom/rational.hpp"

namespace lcsgeom {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Syntax error, unknown function, undeclared coordinate or bad exponent.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : Error(what + " at position " + std::to_string(position)), position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

/// Raised by evaluation: log of a non-positive value, division by zero, or a
/// non-finite intermediate. subtree() is the printed offending node.
class DomainError : public Error {
 public:
  DomainError(const std::string& what, std::string subtree)
      : Error(what + " in `" + subtree + "`"), subtree_(std::move(subtree)) {}
  const std::string& subtree() const { return subtree_; }

 private:
  std::string subtree_;
};

enum class Op : std::uint8_t { constant, coord, neg, add, sub, mul, div, ipow, exp, log, sin, cos };

/// Interned coordinate names. Ids are stable for the lifetime of the process.
int intern_symbol(std::string_view name);
const std::string& symbol_name(int id);

struct Node;

class Expr {
 public:
  Expr();  // the constant 0
  Expr(int value);  // NOLINT(google-explicit-constructor)
  Expr(const Rational& value);  // NOLINT(google-explicit-constructor)

  static Expr coord(std::string_view name);

  /// Unsimplified node construction; the parser uses these so that the tree
  /// mirrors the input text exactly.
  static Expr raw_unary(Op op, Expr a);
  static Expr raw_binary(Op op, Expr a, Expr b);
  static Expr raw_pow(Expr base, int exponent);

  Op op() const;
  const Rational& value() const;  // constant nodes
  int symbol() const;             // coord nodes
  const std::string& name() const;
  int exponent() const;  // ipow nodes
  std::size_t arity() const;
  Expr arg(std::size_t i) const;

  bool is_constant() const { return op() == Op::constant; }
  bool is_zero() const;
  bool is_one() const;

  /// Identity of the underlying node; equal ids imply equal expressions.
  const Node* id() const { return node_.get(); }

 private:
  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
  friend struct Node;
};

struct Node {
  Op op = Op::constant;
  Rational value;
  double numeric = 0.0;
  int symbol = -1;
  int exponent = 0;
  std::shared_ptr<const Node> a;
  std::shared_ptr<const Node> b;

  static Expr wrap(Node n) { return Expr(std::make_shared<const Node>(std::move(n))); }
  static Expr view(std::shared_ptr<const Node> n) { return Expr(std::move(n)); }
  static const std::shared_ptr<const Node>& of(const Expr& e) { return e.node_; }
};

// Folding constructors. These apply the light rewrites (identity elements,
// zero absorption, exact constant folding, double negation) at build time.
Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr pow(const Expr& base, int exponent);
Expr exp(const Expr& a);
Expr log(const Expr& a);
Expr sin(const Expr& a);
Expr cos(const Expr& a);

/// Sum of a list; the empty sum is 0.
Expr sum(std::span<const Expr> terms);

/// Parse with the grammar: + - * / ^ (integer exponent), unary -, parentheses,
/// exp/log/sin/cos, decimal literals and identifiers. When `coordinates` is
/// non-empty every identifier must be one of them.
Expr parse(std::string_view text, std::span<const std::string> coordinates = {});

/// Exact partial derivative with respect to the named coordinate.
Expr diff(const Expr& e, std::string_view coordinate);
Expr diff(const Expr& e, int symbol);

/// Rewrites 0+e, 0*e, 1*e, e^0, e^1, --e and constant subtrees to fixpoint.
Expr simplify(const Expr& e);

/// Replaces coordinates by expressions (symbol id -> replacement).
Expr substitute(const Expr& e, const std::unordered_map<int, Expr>& replacements);
/// Same, over many expressions with shared subtrees rewritten once.
std::vector<Expr> substitute(std::span<const Expr> es, const std::unordered_map<int, Expr>& replacements);

/// Text that parse() reads back to an expression with the same values.
std::string to_string(const Expr& e);

/// Structural equality (same tree shape, same constants and coordinates).
bool structurally_equal(const Expr& a, const Expr& b);

/// Number of distinct nodes reachable from e.
std::size_t node_count(const Expr& e);

/// Coordinate ids occurring in e.
std::vector<int> symbols_of(const Expr& e);

/// Assignment of real values to coordinates.
class Point {
 public:
  Point() = default;
  Point(std::span<const std::string> names, std::span<const double> values);

  void set(std::string_view name, double value);
  void set(int symbol, double value);
  double at(std::string_view name) const;
  /// Value of a symbol; throws Error if unassigned.
  double at(int symbol) const;
  bool has(int symbol) const;
  std::size_t size() const { return symbols_.size(); }
  std::span<const int> symbols() const { return symbols_; }
  std::span<const double> values() const { return values_; }

 private:
  std::vector<int> symbols_;
  std::vector<double> values_;
};

/// IEEE double value of e at p. Throws DomainError or Error (unassigned coordinate).
double eval(const Expr& e, const Point& p);

/// A flattened, deduplicated instruction list for evaluating many
/// expressions at many points. Shared subexpressions run once per point.
class Tape {
 public:
  explicit Tape(std::span<const Expr> roots);

  std::size_t root_count() const { return roots_.size(); }
  std::size_t instruction_count() const { return code_.size(); }

  /// Writes one value per root into out. Throws DomainError.
  void evaluate(const Point& p, std::vector<double>& out) const;

 private:
  struct Instr {
    Op op;
    std::int32_t a;
    std::int32_t b;
    std::int32_t exponent;
    double value;
  };
  std::vector<Instr> code_;
  std::vector<std::int32_t> roots_;
  std::vector<int> symbols_;  // coord instructions store an index into this
  std::vector<Expr> nodes_;   // for error messages
};

}  // namespace lcsgeom
