#include "hcolc/sexpr.hpp"

#include <map>

namespace hcolc::sym {

namespace {

const char* op_name(SOp op) {
  switch (op) {
    case SOp::Zero: return "SConstZero";
    case SOp::One: return "SConstOne";
    case SOp::Var: return "SVar";
    case SOp::Plus: return "SPlus";
    case SOp::Sub: return "SSub";
    case SOp::Mult: return "SMult";
    case SOp::Abs: return "SAbs";
    case SOp::Min: return "SMin";
    case SOp::Max: return "SMax";
    case SOp::ZLess: return "SZLess";
  }
  return "?";
}

bool is_binary(SOp op) {
  return op == SOp::Plus || op == SOp::Sub || op == SOp::Mult || op == SOp::Min ||
         op == SOp::Max || op == SOp::ZLess;
}

bool alpha_rec(const SexprArena& x, uint32_t i, const SexprArena& y, uint32_t j,
               std::map<uint32_t, uint32_t>& fwd, std::map<uint32_t, uint32_t>& bwd) {
  const SNode& a = x.at(i);
  const SNode& b = y.at(j);
  if (a.op != b.op) return false;
  if (a.op == SOp::Var) {
    auto f = fwd.find(a.var);
    auto g = bwd.find(b.var);
    if (f == fwd.end() && g == bwd.end()) {
      fwd[a.var] = b.var;
      bwd[b.var] = a.var;
      return true;
    }
    return f != fwd.end() && g != bwd.end() && f->second == b.var && g->second == a.var;
  }
  if (a.op == SOp::Zero || a.op == SOp::One) return true;
  if (a.op == SOp::Abs) return alpha_rec(x, a.a, y, b.a, fwd, bwd);
  return alpha_rec(x, a.a, y, b.a, fwd, bwd) && alpha_rec(x, a.b, y, b.b, fwd, bwd);
}

}  // namespace

std::string SexprArena::to_string(uint32_t i) const {
  const SNode& n = nodes_[i];
  switch (n.op) {
    case SOp::Zero:
    case SOp::One:
      return op_name(n.op);
    case SOp::Var:
      return std::string("(SVar ") + std::to_string(n.var) + ")";
    case SOp::Abs:
      return std::string("(SAbs ") + to_string(n.a) + ")";
    default:
      return std::string("(") + op_name(n.op) + " " + to_string(n.a) + " " + to_string(n.b) + ")";
  }
}

bool SexprArena::alpha_equivalent(const SexprArena& x, uint32_t i, const SexprArena& y, uint32_t j) {
  std::map<uint32_t, uint32_t> fwd, bwd;
  return alpha_rec(x, i, y, j, fwd, bwd);
}

bool SexprArena::equal(const SexprArena& x, uint32_t i, const SexprArena& y, uint32_t j) {
  const SNode& a = x.at(i);
  const SNode& b = y.at(j);
  if (a.op != b.op) return false;
  if (a.op == SOp::Var) return a.var == b.var;
  if (a.op == SOp::Zero || a.op == SOp::One) return true;
  if (a.op == SOp::Abs) return equal(x, a.a, y, b.a);
  if (is_binary(a.op)) return equal(x, a.a, y, b.a) && equal(x, a.b, y, b.b);
  return true;
}

}  // namespace hcolc::sym
