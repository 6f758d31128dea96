#pragma once

#include "hcolc/dhcol.hpp"

namespace hcolc::lowering {

// De Bruijn index maps between the functional and imperative sides.
//   Id:        r -> r
//   Fake:      r -> parent(r) + n   (DHCOL-only binders, e.g. DSHAlloc temps)
//   Lambda:    r -> r for r < n, parent(r - n) + n otherwise (function args)
class VarResolver {
 public:
  static VarResolver id();
  static VarResolver fake(VarResolver parent, size_t n);
  static VarResolver lambda(VarResolver parent, size_t n);

  size_t resolve(size_t r) const;

 private:
  enum class Kind : uint8_t { Id, Fake, Lambda } kind_ = Kind::Id;
  size_t n_ = 0;
  std::shared_ptr<const VarResolver> parent_;
};

struct DSHType {
  enum class Kind : uint8_t { Ptr, CType, Nat } kind = Kind::Ptr;
  uint64_t size = 0;  // Ptr block size
};

struct GlobalVar {
  std::string name;   // synthesized "g0", "g1", ...
  std::string param;  // source parameter name
  DSHType type;
};

struct Globals {
  std::vector<GlobalVar> items;
};

// ---- Σ-HCOL -> MSHCOL -------------------------------------------------------

// Constructor-wise translation of the final Σ-HCOL subset; casts erase,
// Scatter/Gather/LiftHOperator must have been rewritten away.
Result<mshcol::MSHExprPtr> shcol_to_mshcol(const sigma::SHExprPtr& e);

// ---- MSHCOL -> DHCOL ---------------------------------------------------------

struct LoweredProgram {
  Globals globals;
  // evaluation context layout: [g0 .. g_{k-1}, X, Y] with g0 at index 0
  dhcol::DshPtr op;
  size_t input_dim = 0;
  size_t output_dim = 0;
};

Result<LoweredProgram> lower_mshcol_program(const mshcol::MSHExprPtr& e,
                                            const std::map<std::string, size_t>& param_sizes);

// ---- validators ----------------------------------------------------------------

struct PureVerdict {
  bool ok = true;
  std::string detail;
};

// Randomized check of memory stability (no net allocation) and write safety
// (only the block y_p resolves to changes).
PureVerdict check_dsh_pure(const dhcol::DshPtr& dop, dhcol::PExpr y_p,
                           const dhcol::EvalContext& ctx, const dhcol::Memory& mem_shape,
                           size_t samples, uint64_t seed = 1);

// MemOpDelta: both sides err together, or where the functional delta has a
// value the imperative after-block matches it, and elsewhere the after-block
// equals the before-block.
mshcol::CompatVerdict check_msh_dsh_compat(const mshcol::MSHExprPtr& mop, const LoweredProgram& prog,
                                           size_t samples, uint64_t seed = 1);

// Convenience setup shared by validators and the pipeline: memory and context
// for [g..., X, Y] with given parameter bindings.
struct ProgramInstance {
  dhcol::EvalContext ctx;
  dhcol::Memory mem;
  uint64_t x_addr = 0, y_addr = 0;
  std::vector<uint64_t> global_addrs;
};

ProgramInstance instantiate(const LoweredProgram& prog, const ParamEnv& params,
                            const mshcol::MemBlock& input, CarrierKind kind,
                            sym::SexprArena* arena = nullptr);

}  // namespace hcolc::lowering
