#include <cmath>
#include <deque>
#include <functional>
#include <mutex>
#include <unordered_set>

#include "lcsgeom/expr.hpp"

namespace lcsgeom {

namespace {

struct SymbolTable {
  std::mutex mutex;
  std::deque<std::string> names;
  std::unordered_map<std::string, int> ids;
};

SymbolTable& symbols() {
  static SymbolTable table;
  return table;
}

const std::shared_ptr<const Node>& zero_node() {
  static const std::shared_ptr<const Node> z = std::make_shared<const Node>();
  return z;
}

using NodePtr = std::shared_ptr<const Node>;

Expr make_constant(const Rational& r) {
  Node n;
  n.op = Op::constant;
  n.value = r;
  n.numeric = r.to_double();
  return Node::wrap(std::move(n));
}

Expr make(Op op, const Expr& a, const Expr& b = Expr()) {
  Node n;
  n.op = op;
  n.a = Node::of(a);
  if (op == Op::add || op == Op::sub || op == Op::mul || op == Op::div) n.b = Node::of(b);
  return Node::wrap(std::move(n));
}

Expr make_pow(const Expr& base, int k) {
  Node n;
  n.op = Op::ipow;
  n.a = Node::of(base);
  n.exponent = k;
  return Node::wrap(std::move(n));
}

bool is_const_value(const Expr& e, std::int64_t v) {
  return e.is_constant() && e.value().is_integer() && e.value().num() == v;
}

}  // namespace

int intern_symbol(std::string_view name) {
  auto& t = symbols();
  std::lock_guard lock(t.mutex);
  auto it = t.ids.find(std::string(name));
  if (it != t.ids.end()) return it->second;
  int id = static_cast<int>(t.names.size());
  t.names.emplace_back(name);
  t.ids.emplace(std::string(name), id);
  return id;
}

const std::string& symbol_name(int id) {
  auto& t = symbols();
  std::lock_guard lock(t.mutex);
  return t.names.at(static_cast<std::size_t>(id));
}

Expr::Expr() : node_(zero_node()) {}
Expr::Expr(int value) : Expr(Rational(value)) {}
Expr::Expr(const Rational& value) {
  if (value.is_zero()) {
    node_ = zero_node();
  } else {
    node_ = Node::of(make_constant(value));
  }
}

Expr Expr::coord(std::string_view name) {
  Node n;
  n.op = Op::coord;
  n.symbol = intern_symbol(name);
  return Node::wrap(std::move(n));
}

Expr Expr::raw_unary(Op op, Expr a) { return make(op, a); }
Expr Expr::raw_binary(Op op, Expr a, Expr b) { return make(op, a, b); }
Expr Expr::raw_pow(Expr base, int exponent) { return make_pow(base, exponent); }

Op Expr::op() const { return node_->op; }
const Rational& Expr::value() const { return node_->value; }
int Expr::symbol() const { return node_->symbol; }
const std::string& Expr::name() const { return symbol_name(node_->symbol); }
int Expr::exponent() const { return node_->exponent; }

std::size_t Expr::arity() const {
  switch (node_->op) {
    case Op::constant:
    case Op::coord:
      return 0;
    case Op::add:
    case Op::sub:
    case Op::mul:
    case Op::div:
      return 2;
    default:
      return 1;
  }
}

Expr Expr::arg(std::size_t i) const { return Node::view(i == 0 ? node_->a : node_->b); }

bool Expr::is_zero() const { return is_constant() && value().is_zero(); }
bool Expr::is_one() const { return is_constant() && value().is_one(); }

// ---------------------------------------------------------------------------
// Folding constructors

Expr operator-(const Expr& a) {
  if (a.is_constant()) {
    if (auto r = Rational::neg(a.value())) return Expr(*r);
  }
  if (a.op() == Op::neg) return a.arg(0);
  if (a.op() == Op::mul && a.arg(0).is_constant()) {
    if (auto r = Rational::neg(a.arg(0).value())) return Expr(*r) * a.arg(1);
  }
  return make(Op::neg, a);
}

Expr operator+(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant()) {
    if (auto r = Rational::add(a.value(), b.value())) return Expr(*r);
  }
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  if (b.op() == Op::neg) return make(Op::sub, a, b.arg(0));
  return make(Op::add, a, b);
}

Expr operator-(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant()) {
    if (auto r = Rational::sub(a.value(), b.value())) return Expr(*r);
  }
  if (b.is_zero()) return a;
  if (a.is_zero()) return -b;
  if (b.op() == Op::neg) return make(Op::add, a, b.arg(0));
  return make(Op::sub, a, b);
}

Expr operator*(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant()) {
    if (auto r = Rational::mul(a.value(), b.value())) return Expr(*r);
  }
  if (a.is_zero() || b.is_zero()) return Expr();
  if (a.is_one()) return b;
  if (b.is_one()) return a;
  if (is_const_value(a, -1)) return -b;
  if (is_const_value(b, -1)) return -a;
  if (b.is_constant() && !a.is_constant()) return b * a;
  if (a.is_constant() && b.op() == Op::mul && b.arg(0).is_constant()) {
    if (auto r = Rational::mul(a.value(), b.arg(0).value())) return Expr(*r) * b.arg(1);
  }
  if (a.is_constant() && b.op() == Op::neg) {
    if (auto r = Rational::neg(a.value())) return Expr(*r) * b.arg(0);
  }
  return make(Op::mul, a, b);
}

Expr operator/(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant() && !b.is_zero()) {
    if (auto r = Rational::div(a.value(), b.value())) return Expr(*r);
  }
  if (a.is_zero() && !b.is_zero()) return Expr();
  if (b.is_one()) return a;
  if (is_const_value(b, -1)) return -a;
  if (b.is_constant() && !b.is_zero()) {
    if (auto r = Rational::div(Rational(1), b.value())) return Expr(*r) * a;
  }
  return make(Op::div, a, b);
}

Expr pow(const Expr& base, int k) {
  if (k == 0) return Expr(1);
  if (k == 1) return base;
  if (base.is_constant()) {
    if (auto r = Rational::pow(base.value(), k)) return Expr(*r);
  }
  if (base.op() == Op::ipow) {
    long long kk = static_cast<long long>(base.exponent()) * k;
    if (kk <= INT32_MAX && kk >= INT32_MIN) return pow(base.arg(0), static_cast<int>(kk));
  }
  return make_pow(base, k);
}

Expr exp(const Expr& a) {
  if (a.is_zero()) return Expr(1);
  return make(Op::exp, a);
}

Expr log(const Expr& a) {
  if (a.is_one()) return Expr();
  return make(Op::log, a);
}

Expr sin(const Expr& a) {
  if (a.is_zero()) return Expr();
  return make(Op::sin, a);
}

Expr cos(const Expr& a) {
  if (a.is_zero()) return Expr(1);
  return make(Op::cos, a);
}

Expr sum(std::span<const Expr> terms) {
  Expr s;
  for (const auto& t : terms) s = s + t;
  return s;
}

// ---------------------------------------------------------------------------
// Rebuilding traversals

namespace {

// Rebuild e bottom-up through the folding constructors. `leaf` maps
// constants/coordinates; internal nodes are reassembled from mapped children.
class Rebuilder {
 public:
  explicit Rebuilder(std::function<Expr(const Expr&)> leaf) : leaf_(std::move(leaf)) {}

  Expr operator()(const Expr& e) {
    auto it = memo_.find(e.id());
    if (it != memo_.end()) return it->second;
    Expr out;
    switch (e.op()) {
      case Op::constant:
      case Op::coord:
        out = leaf_(e);
        break;
      case Op::neg:
        out = -(*this)(e.arg(0));
        break;
      case Op::add:
        out = (*this)(e.arg(0)) + (*this)(e.arg(1));
        break;
      case Op::sub:
        out = (*this)(e.arg(0)) - (*this)(e.arg(1));
        break;
      case Op::mul:
        out = (*this)(e.arg(0)) * (*this)(e.arg(1));
        break;
      case Op::div:
        out = (*this)(e.arg(0)) / (*this)(e.arg(1));
        break;
      case Op::ipow:
        out = pow((*this)(e.arg(0)), e.exponent());
        break;
      case Op::exp:
        out = exp((*this)(e.arg(0)));
        break;
      case Op::log:
        out = log((*this)(e.arg(0)));
        break;
      case Op::sin:
        out = sin((*this)(e.arg(0)));
        break;
      case Op::cos:
        out = cos((*this)(e.arg(0)));
        break;
    }
    memo_.emplace(e.id(), out);
    keep_.push_back(e);
    return out;
  }

 private:
  std::function<Expr(const Expr&)> leaf_;
  std::unordered_map<const Node*, Expr> memo_;
  std::vector<Expr> keep_;  // pins keys so node addresses are not reused
};

class Differentiator {
 public:
  explicit Differentiator(int symbol) : symbol_(symbol) {}

  Expr operator()(const Expr& e) {
    auto it = memo_.find(e.id());
    if (it != memo_.end()) return it->second;
    Expr d = compute(e);
    memo_.emplace(e.id(), d);
    keep_.push_back(e);
    return d;
  }

 private:
  Expr compute(const Expr& e) {
    switch (e.op()) {
      case Op::constant:
        return Expr();
      case Op::coord:
        return e.symbol() == symbol_ ? Expr(1) : Expr();
      case Op::neg:
        return -(*this)(e.arg(0));
      case Op::add:
        return (*this)(e.arg(0)) + (*this)(e.arg(1));
      case Op::sub:
        return (*this)(e.arg(0)) - (*this)(e.arg(1));
      case Op::mul: {
        Expr a = e.arg(0), b = e.arg(1);
        return (*this)(a) * b + a * (*this)(b);
      }
      case Op::div: {
        Expr a = e.arg(0), b = e.arg(1);
        Expr da = (*this)(a), db = (*this)(b);
        if (db.is_zero()) return da / b;
        return (da * b - a * db) / pow(b, 2);
      }
      case Op::ipow: {
        Expr a = e.arg(0);
        int k = e.exponent();
        return Expr(k) * pow(a, k - 1) * (*this)(a);
      }
      case Op::exp:
        return (*this)(e.arg(0)).is_zero() ? Expr() : e * (*this)(e.arg(0));
      case Op::log:
        return (*this)(e.arg(0)) / e.arg(0);
      case Op::sin:
        return cos(e.arg(0)) * (*this)(e.arg(0));
      case Op::cos:
        return -(sin(e.arg(0)) * (*this)(e.arg(0)));
    }
    return Expr();
  }

  int symbol_;
  std::unordered_map<const Node*, Expr> memo_;
  std::vector<Expr> keep_;
};

template <class F>
void visit_unique(const Expr& root, F&& f) {
  std::unordered_set<const Node*> seen;
  std::vector<Expr> stack{root};
  while (!stack.empty()) {
    Expr e = stack.back();
    stack.pop_back();
    if (!seen.insert(e.id()).second) continue;
    f(e);
    for (std::size_t i = 0; i < e.arity(); ++i) stack.push_back(e.arg(i));
  }
}

}  // namespace

Expr diff(const Expr& e, int symbol) { return Differentiator(symbol)(e); }

Expr diff(const Expr& e, std::string_view coordinate) { return diff(e, intern_symbol(coordinate)); }

Expr simplify(const Expr& e) {
  Expr cur = e;
  for (int pass = 0; pass < 64; ++pass) {
    Rebuilder rb([](const Expr& leaf) { return leaf; });
    Expr next = rb(cur);
    if (structurally_equal(next, cur)) return next;
    cur = next;
  }
  return cur;
}

Expr substitute(const Expr& e, const std::unordered_map<int, Expr>& replacements) {
  Rebuilder rb([&](const Expr& leaf) {
    if (leaf.op() == Op::coord) {
      auto it = replacements.find(leaf.symbol());
      if (it != replacements.end()) return it->second;
    }
    return leaf;
  });
  return rb(e);
}

std::vector<Expr> substitute(std::span<const Expr> es, const std::unordered_map<int, Expr>& replacements) {
  Rebuilder rb([&](const Expr& leaf) {
    if (leaf.op() == Op::coord) {
      auto it = replacements.find(leaf.symbol());
      if (it != replacements.end()) return it->second;
    }
    return leaf;
  });
  std::vector<Expr> out;
  out.reserve(es.size());
  for (const auto& e : es) out.push_back(rb(e));
  return out;
}

bool structurally_equal(const Expr& a, const Expr& b) {
  if (a.id() == b.id()) return true;
  if (a.op() != b.op()) return false;
  switch (a.op()) {
    case Op::constant:
      return a.value() == b.value();
    case Op::coord:
      return a.symbol() == b.symbol();
    case Op::ipow:
      return a.exponent() == b.exponent() && structurally_equal(a.arg(0), b.arg(0));
    default:
      break;
  }
  for (std::size_t i = 0; i < a.arity(); ++i) {
    if (!structurally_equal(a.arg(i), b.arg(i))) return false;
  }
  return true;
}

std::size_t node_count(const Expr& e) {
  std::size_t n = 0;
  visit_unique(e, [&](const Expr&) { ++n; });
  return n;
}

std::vector<int> symbols_of(const Expr& e) {
  std::vector<int> out;
  visit_unique(e, [&](const Expr& x) {
    if (x.op() == Op::coord) out.push_back(x.symbol());
  });
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// Printing

namespace {

int precedence(const Expr& e) {
  switch (e.op()) {
    case Op::add:
    case Op::sub:
      return 1;
    case Op::mul:
    case Op::div:
      return 2;
    case Op::neg:
      return 3;
    case Op::ipow:
      return 4;
    case Op::constant:
      if (!e.value().is_integer()) return 2;
      if (e.value().is_negative()) return 3;
      return 5;
    default:
      return 5;
  }
}

void print(const Expr& e, std::string& out);

void print_wrapped(const Expr& e, bool parens, std::string& out) {
  if (parens) out += '(';
  print(e, out);
  if (parens) out += ')';
}

void print_function(const char* name, const Expr& e, std::string& out) {
  out += name;
  out += '(';
  print(e.arg(0), out);
  out += ')';
}

void print(const Expr& e, std::string& out) {
  switch (e.op()) {
    case Op::constant:
      out += e.value().str();
      return;
    case Op::coord:
      out += e.name();
      return;
    case Op::neg:
      out += '-';
      print_wrapped(e.arg(0), precedence(e.arg(0)) <= 3, out);
      return;
    case Op::add:
    case Op::sub:
      print_wrapped(e.arg(0), precedence(e.arg(0)) < 1, out);
      out += e.op() == Op::add ? " + " : " - ";
      print_wrapped(e.arg(1), precedence(e.arg(1)) <= 1, out);
      return;
    case Op::mul:
    case Op::div:
      print_wrapped(e.arg(0), precedence(e.arg(0)) < 2, out);
      out += e.op() == Op::mul ? "*" : "/";
      print_wrapped(e.arg(1), precedence(e.arg(1)) <= 2, out);
      return;
    case Op::ipow:
      print_wrapped(e.arg(0), precedence(e.arg(0)) < 5, out);
      out += '^';
      if (e.exponent() < 0) {
        out += "(" + std::to_string(e.exponent()) + ")";
      } else {
        out += std::to_string(e.exponent());
      }
      return;
    case Op::exp:
      print_function("exp", e, out);
      return;
    case Op::log:
      print_function("log", e, out);
      return;
    case Op::sin:
      print_function("sin", e, out);
      return;
    case Op::cos:
      print_function("cos", e, out);
      return;
  }
}

}  // namespace

std::string to_string(const Expr& e) {
  std::string out;
  print(e, out);
  return out;
}

// ---------------------------------------------------------------------------
// Points and evaluation

Point::Point(std::span<const std::string> names, std::span<const double> values) {
  if (names.size() != values.size()) throw Error("point: name/value count mismatch");
  for (std::size_t i = 0; i < names.size(); ++i) set(names[i], values[i]);
}

void Point::set(std::string_view name, double value) { set(intern_symbol(name), value); }

void Point::set(int symbol, double value) {
  for (std::size_t i = 0; i < symbols_.size(); ++i) {
    if (symbols_[i] == symbol) {
      values_[i] = value;
      return;
    }
  }
  symbols_.push_back(symbol);
  values_.push_back(value);
}

double Point::at(std::string_view name) const { return at(intern_symbol(name)); }

double Point::at(int symbol) const {
  for (std::size_t i = 0; i < symbols_.size(); ++i) {
    if (symbols_[i] == symbol) return values_[i];
  }
  throw Error("coordinate '" + symbol_name(symbol) + "' is not assigned by the point");
}

bool Point::has(int symbol) const {
  return std::find(symbols_.begin(), symbols_.end(), symbol) != symbols_.end();
}

double eval(const Expr& e, const Point& p) {
  if (e.is_constant()) return e.value().to_double();
  Tape tape(std::span<const Expr>(&e, 1));
  std::vector<double> out;
  tape.evaluate(p, out);
  return out[0];
}

}  // namespace lcsgeom
