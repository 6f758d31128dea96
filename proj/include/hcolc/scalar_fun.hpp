#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "hcolc/carrier.hpp"

namespace hcolc {

// Compile-time index expression; FamVar(d) is the index of the d-th enclosing
// operator family (0 = innermost). Appears in Embed/Pick positions, inductor
// depths and parameter-vector subscripts so that families stay compilable.
struct IndexExpr {
  enum class Tag : uint8_t { Const, FamVar, Add, Mul } tag = Tag::Const;
  uint64_t k = 0;  // Const value or FamVar depth
  std::shared_ptr<const IndexExpr> a, b;

  static IndexExpr constant(uint64_t v) { return {Tag::Const, v, nullptr, nullptr}; }
  static IndexExpr fam(uint64_t depth = 0) { return {Tag::FamVar, depth, nullptr, nullptr}; }
  static IndexExpr add(IndexExpr x, IndexExpr y);
  static IndexExpr mul(IndexExpr x, IndexExpr y);

  uint64_t eval(std::span<const uint64_t> fam_stack) const;  // stack back = depth 0
  bool is_const() const { return tag == Tag::Const; }
  std::string to_string() const;
};

struct CTExpr;
using CTExprPtr = std::shared_ptr<const CTExpr>;

// First-order scalar expression over carrier values: literals, positional
// arguments, parameter-vector subscripts and the arithmetic of the carrier.
struct CTExpr {
  enum class Tag : uint8_t { Lit, Arg, ParamNth, Abs, Plus, Sub, Mult, Min, Max, ZLess } tag;
  CarrierLit lit;
  uint32_t arg = 0;
  std::string param;
  IndexExpr pidx;
  CTExprPtr a, b;
};

CTExprPtr ct_lit(CarrierLit v);
CTExprPtr ct_arg(uint32_t k);
CTExprPtr ct_param_nth(std::string param, IndexExpr idx);
CTExprPtr ct_unary(CTExpr::Tag t, CTExprPtr a);
CTExprPtr ct_binary(CTExpr::Tag t, CTExprPtr a, CTExprPtr b);

struct ScalarFun {
  uint32_t arity = 0;
  CTExprPtr body;
};

// stock functions used by breakdown rules and reductions
ScalarFun sf_plus();
ScalarFun sf_sub();
ScalarFun sf_mult();
ScalarFun sf_min();
ScalarFun sf_max();
ScalarFun sf_zless();
ScalarFun sf_abs();

// Bindings for named parameter vectors (compile-time operator parameters).
struct ParamEnv {
  std::map<std::string, std::vector<CarrierValue>> vectors;
};

struct ScalarEvalCtx {
  const ParamEnv* params = nullptr;
  std::span<const uint64_t> fam_stack = {};
  CarrierKind kind = CarrierKind::Rational;
  sym::SexprArena* arena = nullptr;
};

CarrierValue eval_scalar(const ScalarFun& f, std::span<const CarrierValue> args, const ScalarEvalCtx& ctx);

// Parameter names referenced anywhere in the expression body.
void collect_ct_params(const CTExprPtr& e, std::map<std::string, size_t>& out);

}  // namespace hcolc
