#pragma once

#include <set>
#include <string>
#include <vector>

#include "hcolc/hcol.hpp"

namespace hcolc::sigma {

// Sparse-vector cell: a carrier value plus structural and collision flags.
// Structural cells stand for not-yet-computed positions and carry the
// operator's svalue; collision flags are sticky once set.
struct Rtheta {
  CarrierValue value;
  bool is_struct = false;
  bool is_collision = false;

  static Rtheta val(CarrierValue v) { return {std::move(v), false, false}; }
  static Rtheta structural(CarrierValue s) { return {std::move(s), true, false}; }
};

using SparseVector = std::vector<Rtheta>;

// Safe tracks collisions when two non-structural cells combine; Unsafe never
// flags them (used inside computational reductions).
enum class FlagsKind : uint8_t { Safe, Unsafe };

// Explicit finite index map with eager injectivity check.
struct IndexMap {
  std::vector<size_t> image;  // image[j] = f(j)
  size_t codomain = 0;

  static Result<IndexMap> make(std::vector<size_t> image, size_t codomain);
};

enum class ShOp : uint8_t {
  Embed,
  Pick,
  Scatter,
  Gather,
  Lift,
  Pointwise,
  BinOp,
  Inductor,
  Apply2Union,
  SafeCast,
  UnSafeCast,
  Compose,
  IReduction,
  IUnion,
};

struct SHExpr;
using SHExprPtr = std::shared_ptr<const SHExpr>;

// Families are syntactic templates over an explicit index variable
// (IndexExpr::fam), instantiated eagerly for contracts and lazily during
// evaluation.
struct SHFamily {
  size_t size = 0;
  SHExprPtr body;
};

struct SHExpr {
  ShOp op;
  CarrierLit sval;      // svalue s; doubles as the IReduction initial
  size_t n = 0, m = 0;  // size parameters
  IndexExpr b;          // Embed/Pick position
  IndexMap map;         // Scatter/Gather
  hcol::HExprPtr h;     // Lift payload
  ScalarFun fn;         // Pointwise/BinOp/Inductor
  IndexExpr count;      // Inductor iteration count
  CarrierLit z;         // Inductor initial
  ScalarFun dot;        // Apply2Union/IReduction/IUnion
  SHExprPtr f, g;       // children (f = outer for Compose, cast payload)
  SHFamily fam;
};

SHExprPtr sh_embed(CarrierLit s, size_t n, IndexExpr b);
SHExprPtr sh_pick(CarrierLit s, size_t n, IndexExpr b);
SHExprPtr sh_scatter(CarrierLit s, size_t n, size_t m, IndexMap map);
SHExprPtr sh_gather(CarrierLit s, size_t n, size_t m, IndexMap map);
SHExprPtr sh_lift(hcol::HExprPtr h, CarrierLit s);
SHExprPtr sh_pointwise(CarrierLit s, size_t n, ScalarFun f);
SHExprPtr sh_binop(CarrierLit s, size_t n, ScalarFun f);
SHExprPtr sh_inductor(CarrierLit s, IndexExpr count, ScalarFun f, CarrierLit z);
SHExprPtr sh_apply2union(CarrierLit s, ScalarFun dot, SHExprPtr f, SHExprPtr g);
SHExprPtr sh_safecast(SHExprPtr f);
SHExprPtr sh_unsafecast(SHExprPtr f);
SHExprPtr sh_compose(SHExprPtr f, SHExprPtr g);
SHExprPtr sh_ireduction(CarrierLit s, ScalarFun dot, size_t size, SHExprPtr body);
SHExprPtr sh_iunion(CarrierLit s, ScalarFun dot, size_t size, SHExprPtr body);

Result<hcol::Dims> dims(const SHExprPtr& e);

struct EvalOpts {
  CarrierKind kind = CarrierKind::Rational;
  sym::SexprArena* arena = nullptr;
  FlagsKind ambient = FlagsKind::Safe;
};

Result<SparseVector> eval_shcol(const SHExprPtr& e, const SparseVector& x, const ParamEnv& env,
                                const EvalOpts& opts = {});

SparseVector vec2union(const ScalarFun& dot, const SparseVector& a, const SparseVector& b,
                       FlagsKind kind, const ParamEnv& env, const EvalOpts& opts = {});

// dense vector <-> sparse vector
SparseVector sparsify(const hcol::DenseVector& x);
hcol::DenseVector densify(const SparseVector& x);  // structural cells keep their svalue

struct SparsityContract {
  std::set<size_t> in, out;
};

Result<SparsityContract> sparsity_contract(const SHExprPtr& e);

struct FactsReport {
  std::vector<std::string> violations;
  bool pass() const { return violations.empty(); }
};

// Randomized structural-correctness check: on inputs dense exactly on the in
// index set, the output is non-structural exactly on the out index set, no
// collision flag is ever set, and union-style members have disjoint outs.
FactsReport facts_check(const SHExprPtr& e, size_t samples, uint64_t seed = 1,
                        const std::map<std::string, size_t>& params = {});

SHExprPtr lift_hcol(const hcol::HExprPtr& h, CarrierLit s);

// ---- rewriting ------------------------------------------------------------

struct ShRule {
  std::string name;
  std::function<SHExprPtr(const SHExprPtr&)> apply;
};

std::vector<ShRule> sh_builtin_rules();

Result<SHExprPtr> apply_sh_rewrites(const SHExprPtr& e, std::span<const hcol::TraceStep> trace,
                                    std::span<const ShRule> rules);

// Differential evaluation on dense rational inputs (params sampled from the
// given name -> size table).
Result<hcol::EquivVerdict> check_sh_equiv(const SHExprPtr& e1, const SHExprPtr& e2, size_t samples,
                                          uint64_t seed, const std::map<std::string, size_t>& params = {});

// densify(eval_shcol(sh, sparsify(x))) == eval_hcol(h, x) on random dense x
Result<hcol::EquivVerdict> check_sh_vs_hcol(const SHExprPtr& sh, const hcol::HExprPtr& h, size_t samples,
                                            uint64_t seed, const std::map<std::string, size_t>& params = {});

std::string to_string(const SHExprPtr& e);

}  // namespace hcolc::sigma
