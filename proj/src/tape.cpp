#include <cmath>

#include "lcsgeom/expr.hpp"

namespace lcsgeom {

namespace {

std::string excerpt(const Expr& e) {
  std::string s = to_string(e);
  if (s.size() > 160) s = s.substr(0, 157) + "...";
  return s;
}

double int_pow(double x, int k) {
  bool invert = k < 0;
  unsigned n = invert ? static_cast<unsigned>(-static_cast<long long>(k)) : static_cast<unsigned>(k);
  double result = 1.0;
  double base = x;
  while (n > 0) {
    if (n & 1U) result *= base;
    n >>= 1U;
    if (n > 0) base *= base;
  }
  return invert ? 1.0 / result : result;
}

}  // namespace

Tape::Tape(std::span<const Expr> roots) {
  std::unordered_map<const Node*, std::int32_t> slot;
  std::unordered_map<int, std::int32_t> symbol_slot;

  // Iterative post-order so deep trees do not exhaust the stack.
  struct Frame {
    Expr e;
    bool expanded;
  };
  for (const Expr& root : roots) {
    std::vector<Frame> stack{{root, false}};
    while (!stack.empty()) {
      Frame f = stack.back();
      stack.pop_back();
      if (slot.count(f.e.id())) continue;
      if (!f.expanded) {
        stack.push_back({f.e, true});
        for (std::size_t i = f.e.arity(); i-- > 0;) {
          Expr child = f.e.arg(i);
          if (!slot.count(child.id())) stack.push_back({child, false});
        }
        continue;
      }
      Instr ins{f.e.op(), -1, -1, 0, 0.0};
      switch (f.e.op()) {
        case Op::constant:
          ins.value = f.e.value().to_double();
          break;
        case Op::coord: {
          auto [it, fresh] = symbol_slot.emplace(f.e.symbol(), static_cast<std::int32_t>(symbols_.size()));
          if (fresh) symbols_.push_back(f.e.symbol());
          ins.a = it->second;
          break;
        }
        default:
          ins.a = slot.at(f.e.arg(0).id());
          if (f.e.arity() == 2) ins.b = slot.at(f.e.arg(1).id());
          ins.exponent = f.e.exponent();
          break;
      }
      slot.emplace(f.e.id(), static_cast<std::int32_t>(code_.size()));
      code_.push_back(ins);
      nodes_.push_back(f.e);
    }
    roots_.push_back(slot.at(root.id()));
  }
}

void Tape::evaluate(const Point& p, std::vector<double>& out) const {
  std::vector<double> coords(symbols_.size());
  for (std::size_t i = 0; i < symbols_.size(); ++i) coords[i] = p.at(symbols_[i]);

  std::vector<double> v(code_.size());
  for (std::size_t i = 0; i < code_.size(); ++i) {
    const Instr& ins = code_[i];
    double r = 0.0;
    switch (ins.op) {
      case Op::constant:
        r = ins.value;
        break;
      case Op::coord:
        r = coords[static_cast<std::size_t>(ins.a)];
        break;
      case Op::neg:
        r = -v[ins.a];
        break;
      case Op::add:
        r = v[ins.a] + v[ins.b];
        break;
      case Op::sub:
        r = v[ins.a] - v[ins.b];
        break;
      case Op::mul:
        r = v[ins.a] * v[ins.b];
        break;
      case Op::div:
        if (v[ins.b] == 0.0) throw DomainError("division by zero", excerpt(nodes_[i]));
        r = v[ins.a] / v[ins.b];
        break;
      case Op::ipow:
        if (ins.exponent < 0 && v[ins.a] == 0.0) throw DomainError("division by zero", excerpt(nodes_[i]));
        r = int_pow(v[ins.a], ins.exponent);
        break;
      case Op::exp:
        r = std::exp(v[ins.a]);
        break;
      case Op::log:
        if (!(v[ins.a] > 0.0)) throw DomainError("log of non-positive value", excerpt(nodes_[i]));
        r = std::log(v[ins.a]);
        break;
      case Op::sin:
        r = std::sin(v[ins.a]);
        break;
      case Op::cos:
        r = std::cos(v[ins.a]);
        break;
    }
    if (!std::isfinite(r)) throw DomainError("non-finite value", excerpt(nodes_[i]));
    v[i] = r;
  }
  out.resize(roots_.size());
  for (std::size_t i = 0; i < roots_.size(); ++i) out[i] = v[static_cast<std::size_t>(roots_[i])];
}

}  // namespace lcsgeom
