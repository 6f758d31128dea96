#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hcolc/result.hpp"
#include "hcolc/scalar_fun.hpp"

namespace hcolc::hcol {

// Constant-vector operand: a literal vector or a named compile-time parameter.
struct VecOperand {
  bool is_param = false;
  std::string name;
  std::vector<CarrierLit> lit;
  size_t param_size = 0;

  static VecOperand literal(std::vector<CarrierLit> v) { return {false, {}, std::move(v), 0}; }
  static VecOperand param(std::string n, size_t size) { return {true, std::move(n), {}, size}; }
  size_t length() const { return is_param ? param_size : lit.size(); }
};

enum class HOp : uint8_t {
  Pointwise,
  Atomic,
  ScalarProd,
  BinOp,
  Reduction,
  EvalPolynomial,
  Prepend,
  Append,
  MonomialEnumerator,
  Inductor,
  Induction,
  InfinityNorm,
  ChebyshevDistance,
  VMinus,
  Cross,
  Stack,
  Compose,
  TLess,
};

struct HExpr;
using HExprPtr = std::shared_ptr<const HExpr>;

struct HExpr {
  HOp op;
  size_t n = 0;     // size parameter (input size for Prepend/Append)
  ScalarFun fn;     // Pointwise/Atomic/BinOp/Reduction/Inductor/Induction
  CarrierLit z;     // fold initial for Reduction/Inductor/Induction
  VecOperand vec;   // EvalPolynomial/Prepend/Append
  HExprPtr f, g;    // higher-order children (f = outer for Compose)
};

HExprPtr h_pointwise(size_t n, ScalarFun f);
HExprPtr h_atomic(ScalarFun f);
HExprPtr h_scalarprod(size_t n);
HExprPtr h_binop(size_t n, ScalarFun f);
HExprPtr h_reduction(size_t n, ScalarFun f, CarrierLit z);
HExprPtr h_evalpolynomial(VecOperand a);
HExprPtr h_prepend(VecOperand a, size_t n);
HExprPtr h_append(VecOperand a, size_t n);
HExprPtr h_monomial_enumerator(size_t n);
HExprPtr h_inductor(size_t n, ScalarFun f, CarrierLit z);
HExprPtr h_induction(size_t n, ScalarFun f, CarrierLit z);
HExprPtr h_infinity_norm(size_t n);
HExprPtr h_chebyshev_distance(size_t n);
HExprPtr h_vminus(size_t n);
HExprPtr h_cross(HExprPtr f, HExprPtr g);
HExprPtr h_stack(HExprPtr f, HExprPtr g);
HExprPtr h_compose(HExprPtr f, HExprPtr g);
HExprPtr h_tless(HExprPtr f, HExprPtr g);

struct Dims {
  size_t in = 0;
  size_t out = 0;
  bool operator==(const Dims&) const = default;
};

Result<Dims> dims(const HExprPtr& e);

using DenseVector = std::vector<CarrierValue>;

Result<DenseVector> eval_hcol(const HExprPtr& e, std::span<const CarrierValue> x,
                              const ParamEnv& env, CarrierKind kind,
                              sym::SexprArena* arena = nullptr);

// Parameter vectors (name -> size) referenced by the expression.
std::map<std::string, size_t> collect_params(const HExprPtr& e);

// ---- breakdown rules ----------------------------------------------------

struct BreakdownRule {
  std::string name;
  // returns nullptr when the node does not match
  std::function<HExprPtr(const HExprPtr&)> apply;
};

std::vector<BreakdownRule> builtin_rules();

using Path = std::vector<size_t>;  // child indices, 0 = f, 1 = g

struct TraceStep {
  std::string rule;
  Path path;
};

Result<HExprPtr> apply_breakdown_trace(const HExprPtr& e, std::span<const TraceStep> trace,
                                       std::span<const BreakdownRule> rules);

// ---- extensional equivalence --------------------------------------------

struct Counterexample {
  DenseVector input;
  DenseVector lhs, rhs;
};

struct EquivVerdict {
  bool equal = true;
  std::optional<Counterexample> cex;
};

// Seeded differential evaluation over exact rationals; params are sampled too.
Result<EquivVerdict> check_extensional_equiv(const HExprPtr& e1, const HExprPtr& e2, size_t samples,
                                             uint64_t seed);

std::string to_string(const HExprPtr& e);

}  // namespace hcolc::hcol
