#pragma once

#include <functional>
#include <optional>

#include "hcolc/mshcol.hpp"

namespace hcolc::dhcol {

using mshcol::MemBlock;
using mshcol::Memory;

// One polymorphic AST for the whole language family. A "language instance"
// fixes the carrier and natural kinds at evaluation time; the RHCOL -> FHCOL
// translator validates that every constant survives the instance change.
struct LangKind {
  CarrierKind ct;
  NatKind nt;
};
inline constexpr LangKind kRhcolKind{CarrierKind::Rational, NatKind::BigNat};
inline constexpr LangKind kFhcolKind{CarrierKind::Binary64, NatKind::U64};
inline constexpr LangKind kSymbolicKind{CarrierKind::Symbolic, NatKind::U64};

// ---- expressions ----------------------------------------------------------

enum class NOp : uint8_t { Var, Const, Div, Mod, Plus, Minus, Mult, Min, Max };

struct NExpr;
using NExprPtr = std::shared_ptr<const NExpr>;

struct NExpr {
  NOp op;
  size_t var = 0;  // de Bruijn index
  BigInt value;    // Const, as a plain natural
  NExprPtr a, b;
};

NExprPtr n_var(size_t k);
NExprPtr n_const(BigInt v);
NExprPtr n_const_u(uint64_t v);
NExprPtr n_bin(NOp op, NExprPtr a, NExprPtr b);

struct PExpr {
  size_t var = 0;  // PVar
};

struct MExpr {
  bool is_const = false;
  PExpr p;                               // MPtrDeref
  std::map<uint64_t, CarrierLit> block;  // MConst cells
  BigInt size;                           // MConst declared size
};

MExpr m_deref(PExpr p);
MExpr m_const(std::map<uint64_t, CarrierLit> block, BigInt size);

enum class AOp : uint8_t { Var, Const, Nth, Abs, Plus, Minus, Mult, Min, Max, ZLess };

struct AExpr;
using AExprPtr = std::shared_ptr<const AExpr>;

struct AExpr {
  AOp op;
  size_t var = 0;
  CarrierLit lit;
  std::shared_ptr<const MExpr> mem;  // Nth
  NExprPtr idx;                      // Nth
  AExprPtr a, b;
};

AExprPtr a_var(size_t k);
AExprPtr a_const(CarrierLit v);
AExprPtr a_nth(MExpr m, NExprPtr idx);
AExprPtr a_abs(AExprPtr a);
AExprPtr a_bin(AOp op, AExprPtr a, AExprPtr b);

// ---- operators --------------------------------------------------------------

enum class DOp : uint8_t { Nop, Assign, IMap, BinOp, MemMap2, Power, Loop, Alloc, MemInit, Seq };

struct DSHOperator;
using DshPtr = std::shared_ptr<const DSHOperator>;

struct MemRef {
  PExpr p;
  NExprPtr idx;
};

struct DSHOperator {
  DOp op;
  BigInt bound;      // IMap/BinOp/MemMap2/Loop iteration count (plain natural)
  MemRef src, dst;   // Assign/Power
  PExpr x, x1, y;    // operand pointers
  AExprPtr fn;
  NExprPtr ne;       // Power iteration count
  CarrierLit init;   // Power initial / MemInit value
  BigInt size;       // Alloc block size
  DshPtr body;       // Loop/Alloc body
  DshPtr a, b;       // Seq
};

DshPtr d_nop();
DshPtr d_assign(MemRef src, MemRef dst);
DshPtr d_imap(BigInt n, PExpr x, PExpr y, AExprPtr f);
DshPtr d_binop(BigInt n, PExpr x, PExpr y, AExprPtr f);
DshPtr d_memmap2(BigInt n, PExpr x0, PExpr x1, PExpr y, AExprPtr f);
DshPtr d_power(NExprPtr n, MemRef src, MemRef dst, AExprPtr f, CarrierLit initial);
DshPtr d_loop(BigInt n, DshPtr body);
DshPtr d_alloc(BigInt size, DshPtr body);
DshPtr d_meminit(PExpr y, CarrierLit value);
DshPtr d_seq(DshPtr a, DshPtr b);

// ---- evaluation contexts ------------------------------------------------------

struct DSHVal {
  enum class Tag : uint8_t { Nat, CType, Ptr } tag = Tag::Nat;
  NatValue nat;         // Nat
  CarrierValue ct;      // CType
  uint64_t addr = 0;    // Ptr
  NatValue size;        // Ptr block size

  static DSHVal of_nat(NatValue v);
  static DSHVal of_ct(CarrierValue v);
  static DSHVal of_ptr(uint64_t addr, NatValue size);
};

// De Bruijn list; entry 0 is the most recently pushed. Protected entries are
// invisible to expression evaluation (lookup errors).
class EvalContext {
 public:
  void push(DSHVal v, bool protect = false) { items_.push_back({std::move(v), protect}); }
  void pop() { items_.pop_back(); }
  size_t size() const { return items_.size(); }
  struct Entry {
    DSHVal val;
    bool protected_ = false;
  };
  const Entry* at(size_t de_bruijn) const {
    if (de_bruijn >= items_.size()) return nullptr;
    return &items_[items_.size() - 1 - de_bruijn];
  }

 private:
  std::vector<Entry> items_;
};

// ---- evaluator ------------------------------------------------------------------

struct DEvalOpts {
  LangKind lang = kRhcolKind;
  sym::SexprArena* arena = nullptr;
  uint64_t* ct_op_counter = nullptr;  // counts carrier operations when set
  // debugging hook: observes (context, memory) after each DSHSeq component
  std::function<void(const EvalContext&, const Memory&)>* seq_hook = nullptr;
};

Result<std::pair<uint64_t, NatValue>> eval_pexpr(const PExpr& e, const EvalContext& ctx);
Result<std::pair<MemBlock, NatValue>> eval_mexpr(const MExpr& e, const EvalContext& ctx,
                                                 const Memory& mem, const DEvalOpts& opts);
Result<NatValue> eval_nexpr(const NExprPtr& e, const EvalContext& ctx, const DEvalOpts& opts);
Result<CarrierValue> eval_aexpr(const AExprPtr& e, const EvalContext& ctx, const Memory& mem,
                                const DEvalOpts& opts);

using Fuel = uint64_t;

// Outer optional is fuel exhaustion; inner Result is a semantic error.
std::optional<Result<Memory>> eval_dshoperator(const EvalContext& ctx, const DshPtr& op,
                                               const Memory& mem, Fuel fuel, const DEvalOpts& opts);

// Saturating; evaluation with this much fuel never exhausts.
Fuel estimate_fuel(const DshPtr& op);

// ---- RHCOL -> FHCOL translation ---------------------------------------------------

// Structure preserving; fails on carrier constants other than {0,1} and on
// naturals that do not fit 64 bits.
Result<DshPtr> translate_rhcol_to_fhcol(const DshPtr& op);

// ---- heterogeneous equivalence ----------------------------------------------------

struct RfVerdict {
  bool pass = true;
  std::string detail;
  Rational max_deviation;
};

// Runs the operator under both instances on paired inputs and compares every
// memory cell; per-cell |rational - double| must stay within the tolerance.
RfVerdict check_rf_equiv(const DshPtr& r_op, const DshPtr& f_op, const EvalContext& ctx_r,
                         const EvalContext& ctx_f, const Memory& mem_r, const Memory& mem_f,
                         const Rational& tolerance);

// Exact rational image of a binary64 memory (for building paired inputs).
Memory memory_to_rational(const Memory& m);

std::string to_string(const DshPtr& op);
std::string to_string(const NExprPtr& e);
std::string to_string(const AExprPtr& e);

}  // namespace hcolc::dhcol
