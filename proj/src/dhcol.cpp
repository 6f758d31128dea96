#include "hcolc/dhcol.hpp"

namespace hcolc::dhcol {

namespace {
NExprPtr mkn(NExpr e) { return std::make_shared<const NExpr>(std::move(e)); }
AExprPtr mka(AExpr e) { return std::make_shared<const AExpr>(std::move(e)); }
DshPtr mkd(DSHOperator e) { return std::make_shared<const DSHOperator>(std::move(e)); }
}  // namespace

NExprPtr n_var(size_t k) {
  NExpr e{};
  e.op = NOp::Var;
  e.var = k;
  return mkn(std::move(e));
}

NExprPtr n_const(BigInt v) {
  NExpr e{};
  e.op = NOp::Const;
  e.value = std::move(v);
  return mkn(std::move(e));
}

NExprPtr n_const_u(uint64_t v) { return n_const(BigInt::from_u64(v)); }

NExprPtr n_bin(NOp op, NExprPtr a, NExprPtr b) {
  NExpr e{};
  e.op = op;
  e.a = std::move(a);
  e.b = std::move(b);
  return mkn(std::move(e));
}

MExpr m_deref(PExpr p) {
  MExpr e{};
  e.p = p;
  return e;
}

MExpr m_const(std::map<uint64_t, CarrierLit> block, BigInt size) {
  MExpr e{};
  e.is_const = true;
  e.block = std::move(block);
  e.size = std::move(size);
  return e;
}

AExprPtr a_var(size_t k) {
  AExpr e{};
  e.op = AOp::Var;
  e.var = k;
  return mka(std::move(e));
}

AExprPtr a_const(CarrierLit v) {
  AExpr e{};
  e.op = AOp::Const;
  e.lit = std::move(v);
  return mka(std::move(e));
}

AExprPtr a_nth(MExpr m, NExprPtr idx) {
  AExpr e{};
  e.op = AOp::Nth;
  e.mem = std::make_shared<const MExpr>(std::move(m));
  e.idx = std::move(idx);
  return mka(std::move(e));
}

AExprPtr a_abs(AExprPtr a) {
  AExpr e{};
  e.op = AOp::Abs;
  e.a = std::move(a);
  return mka(std::move(e));
}

AExprPtr a_bin(AOp op, AExprPtr a, AExprPtr b) {
  AExpr e{};
  e.op = op;
  e.a = std::move(a);
  e.b = std::move(b);
  return mka(std::move(e));
}

DshPtr d_nop() {
  DSHOperator e{};
  e.op = DOp::Nop;
  return mkd(std::move(e));
}

DshPtr d_assign(MemRef src, MemRef dst) {
  DSHOperator e{};
  e.op = DOp::Assign;
  e.src = std::move(src);
  e.dst = std::move(dst);
  return mkd(std::move(e));
}

DshPtr d_imap(BigInt n, PExpr x, PExpr y, AExprPtr f) {
  DSHOperator e{};
  e.op = DOp::IMap;
  e.bound = std::move(n);
  e.x = x;
  e.y = y;
  e.fn = std::move(f);
  return mkd(std::move(e));
}

DshPtr d_binop(BigInt n, PExpr x, PExpr y, AExprPtr f) {
  DSHOperator e{};
  e.op = DOp::BinOp;
  e.bound = std::move(n);
  e.x = x;
  e.y = y;
  e.fn = std::move(f);
  return mkd(std::move(e));
}

DshPtr d_memmap2(BigInt n, PExpr x0, PExpr x1, PExpr y, AExprPtr f) {
  DSHOperator e{};
  e.op = DOp::MemMap2;
  e.bound = std::move(n);
  e.x = x0;
  e.x1 = x1;
  e.y = y;
  e.fn = std::move(f);
  return mkd(std::move(e));
}

DshPtr d_power(NExprPtr n, MemRef src, MemRef dst, AExprPtr f, CarrierLit initial) {
  DSHOperator e{};
  e.op = DOp::Power;
  e.ne = std::move(n);
  e.src = std::move(src);
  e.dst = std::move(dst);
  e.fn = std::move(f);
  e.init = std::move(initial);
  return mkd(std::move(e));
}

DshPtr d_loop(BigInt n, DshPtr body) {
  DSHOperator e{};
  e.op = DOp::Loop;
  e.bound = std::move(n);
  e.body = std::move(body);
  return mkd(std::move(e));
}

DshPtr d_alloc(BigInt size, DshPtr body) {
  DSHOperator e{};
  e.op = DOp::Alloc;
  e.size = std::move(size);
  e.body = std::move(body);
  return mkd(std::move(e));
}

DshPtr d_meminit(PExpr y, CarrierLit value) {
  DSHOperator e{};
  e.op = DOp::MemInit;
  e.y = y;
  e.init = std::move(value);
  return mkd(std::move(e));
}

DshPtr d_seq(DshPtr a, DshPtr b) {
  DSHOperator e{};
  e.op = DOp::Seq;
  e.a = std::move(a);
  e.b = std::move(b);
  return mkd(std::move(e));
}

DSHVal DSHVal::of_nat(NatValue v) {
  DSHVal r;
  r.tag = Tag::Nat;
  r.nat = std::move(v);
  return r;
}

DSHVal DSHVal::of_ct(CarrierValue v) {
  DSHVal r;
  r.tag = Tag::CType;
  r.ct = std::move(v);
  return r;
}

DSHVal DSHVal::of_ptr(uint64_t addr, NatValue size) {
  DSHVal r;
  r.tag = Tag::Ptr;
  r.addr = addr;
  r.size = std::move(size);
  return r;
}

// ---- expression evaluation ---------------------------------------------------

namespace {

template <class T>
Result<T> lookup_err(const char* what, size_t k) {
  return Result<T>::err(ErrKind::LookupError,
                        std::string("error looking up ") + what + " " + std::to_string(k));
}

Result<uint64_t> nat_offset(const NatValue& v) {
  if (!v.fits_u64())
    return Result<uint64_t>::err(ErrKind::RangeError, "offset does not fit the address space");
  return v.to_u64_clamped();
}

}  // namespace

Result<std::pair<uint64_t, NatValue>> eval_pexpr(const PExpr& e, const EvalContext& ctx) {
  using R = Result<std::pair<uint64_t, NatValue>>;
  const auto* entry = ctx.at(e.var);
  if (!entry || entry->protected_) return lookup_err<std::pair<uint64_t, NatValue>>("PVar", e.var);
  if (entry->val.tag != DSHVal::Tag::Ptr)
    return R::err(ErrKind::TypeErrorInContext, "invalid PVar type");
  return std::make_pair(entry->val.addr, entry->val.size);
}

Result<std::pair<MemBlock, NatValue>> eval_mexpr(const MExpr& e, const EvalContext& ctx,
                                                 const Memory& mem, const DEvalOpts& opts) {
  using R = Result<std::pair<MemBlock, NatValue>>;
  if (e.is_const) {
    auto sz = nat_from_nat(e.size, opts.lang.nt);
    if (!sz.ok()) return sz.error();
    MemBlock b;
    for (const auto& [k, lit] : e.block) {
      try {
        b.set(k, lit.materialize(opts.lang.ct, opts.arena));
      } catch (const KindMismatchError& ex) {
        return R::err(ErrKind::UnknownConstant, ex.what());
      }
    }
    return std::make_pair(std::move(b), sz.value());
  }
  auto p = eval_pexpr(e.p, ctx);
  if (!p.ok()) return p.error();
  auto blk = mem.lookup(p.value().first);
  if (!blk) return R::err(ErrKind::LookupError, "MPtrDeref lookup failed");
  return std::make_pair(std::move(*blk), p.value().second);
}

Result<NatValue> eval_nexpr(const NExprPtr& e, const EvalContext& ctx, const DEvalOpts& opts) {
  using R = Result<NatValue>;
  switch (e->op) {
    case NOp::Var: {
      const auto* entry = ctx.at(e->var);
      if (!entry || entry->protected_) return lookup_err<NatValue>("NVar", e->var);
      if (entry->val.tag != DSHVal::Tag::Nat)
        return R::err(ErrKind::TypeErrorInContext, "invalid NVar type");
      return entry->val.nat;
    }
    case NOp::Const: return nat_from_nat(e->value, opts.lang.nt);
    default: break;
  }
  auto a = eval_nexpr(e->a, ctx, opts);
  if (!a.ok()) return a;
  auto b = eval_nexpr(e->b, ctx, opts);
  if (!b.ok()) return b;
  NatOp op;
  switch (e->op) {
    case NOp::Div: op = NatOp::Div; break;
    case NOp::Mod: op = NatOp::Mod; break;
    case NOp::Plus: op = NatOp::Plus; break;
    case NOp::Minus: op = NatOp::Minus; break;
    case NOp::Mult: op = NatOp::Mult; break;
    case NOp::Min: op = NatOp::Min; break;
    case NOp::Max: op = NatOp::Max; break;
    default: return R::err(ErrKind::EvalError, "bad NExpr");
  }
  return nat_arith(op, a.value(), b.value());
}

Result<CarrierValue> eval_aexpr(const AExprPtr& e, const EvalContext& ctx, const Memory& mem,
                                const DEvalOpts& opts) {
  using R = Result<CarrierValue>;
  try {
    switch (e->op) {
      case AOp::Var: {
        const auto* entry = ctx.at(e->var);
        if (!entry || entry->protected_) return lookup_err<CarrierValue>("AVar", e->var);
        if (entry->val.tag != DSHVal::Tag::CType)
          return R::err(ErrKind::TypeErrorInContext, "invalid AVar type");
        return entry->val.ct;
      }
      case AOp::Const: return e->lit.materialize(opts.lang.ct, opts.arena);
      case AOp::Nth: {
        auto i = eval_nexpr(e->idx, ctx, opts);
        if (!i.ok()) return i.error();
        auto m = eval_mexpr(*e->mem, ctx, mem, opts);
        if (!m.ok()) return m.error();
        const NatValue& size = m.value().second;
        if (i.value().to_nat() >= size.to_nat())
          return R::err(ErrKind::IndexOOB, "ANth index out of bounds");
        auto off = nat_offset(i.value());
        if (!off.ok()) return off.error();
        auto v = m.value().first.lookup(off.value());
        if (!v) return R::err(ErrKind::SparseRead, "ANth not in memory");
        return *v;
      }
      case AOp::Abs: {
        auto a = eval_aexpr(e->a, ctx, mem, opts);
        if (!a.ok()) return a;
        if (opts.ct_op_counter) ++*opts.ct_op_counter;
        return ct_arith(CtOp::Abs, a.value());
      }
      default: break;
    }
    auto a = eval_aexpr(e->a, ctx, mem, opts);
    if (!a.ok()) return a;
    auto b = eval_aexpr(e->b, ctx, mem, opts);
    if (!b.ok()) return b;
    CtOp op;
    switch (e->op) {
      case AOp::Plus: op = CtOp::Plus; break;
      case AOp::Minus: op = CtOp::Sub; break;
      case AOp::Mult: op = CtOp::Mult; break;
      case AOp::Min: op = CtOp::Min; break;
      case AOp::Max: op = CtOp::Max; break;
      case AOp::ZLess: op = CtOp::ZLess; break;
      default: return R::err(ErrKind::EvalError, "bad AExpr");
    }
    if (opts.ct_op_counter) ++*opts.ct_op_counter;
    return ct_arith(op, a.value(), b.value());
  } catch (const KindMismatchError& ex) {
    return R::err(ErrKind::UnknownConstant, ex.what());
  }
}

// ---- operator evaluation -------------------------------------------------------

namespace {

struct OpEval {
  const DEvalOpts& opts;

  using MemResult = std::optional<Result<Memory>>;

  static MemResult none() { return std::nullopt; }
  static MemResult err(ErrKind k, std::string msg) {
    return Result<Memory>::err(k, std::move(msg));
  }

  Result<uint64_t> block_and_offset(const Memory& mem, const EvalContext& ctx, const MemRef& ref,
                                    uint64_t* addr_out, NatValue* size_out, MemBlock* blk_out) {
    auto p = eval_pexpr(ref.p, ctx);
    if (!p.ok()) return p.error();
    auto blk = mem.lookup(p.value().first);
    if (!blk) return Result<uint64_t>::err(ErrKind::LookupError, "memory lookup failed");
    auto off = eval_nexpr(ref.idx, ctx, opts);
    if (!off.ok()) return off.error();
    auto key = nat_offset(off.value());
    if (!key.ok()) return key;
    *addr_out = p.value().first;
    *size_out = p.value().second;
    *blk_out = std::move(*blk);
    return key.value();
  }

  MemResult eval(const EvalContext& ctx, const DshPtr& op, const Memory& mem, Fuel fuel) {
    if (fuel == 0) return none();
    --fuel;
    switch (op->op) {
      case DOp::Nop: return Result<Memory>(mem);

      case DOp::Assign: {
        uint64_t xa = 0, ya = 0;
        NatValue xs, ys;
        MemBlock xb, yb;
        auto src = block_and_offset(mem, ctx, op->src, &xa, &xs, &xb);
        if (!src.ok()) return Result<Memory>(src.error());
        auto dst = block_and_offset(mem, ctx, op->dst, &ya, &ys, &yb);
        if (!dst.ok()) return Result<Memory>(dst.error());
        if (!(BigInt::from_u64(dst.value()) < ys.to_nat()))
          return err(ErrKind::IndexOOB, "DSHAssign destination offset out of bounds");
        auto v = xb.lookup(src.value());
        if (!v) return err(ErrKind::SparseRead, "DSHAssign source cell not in memory");
        yb.set(dst.value(), *v);
        Memory out = mem;
        out.set(ya, std::move(yb));
        return Result<Memory>(std::move(out));
      }

      case DOp::IMap: {
        auto n = nat_from_nat(op->bound, opts.lang.nt);
        if (!n.ok()) return Result<Memory>(n.error());
        auto xp = eval_pexpr(op->x, ctx);
        if (!xp.ok()) return Result<Memory>(xp.error());
        auto yp = eval_pexpr(op->y, ctx);
        if (!yp.ok()) return Result<Memory>(yp.error());
        auto xb = mem.lookup(xp.value().first);
        auto yb = mem.lookup(yp.value().first);
        if (!xb || !yb) return err(ErrKind::LookupError, "DSHIMap block lookup failed");
        if (op->bound > xp.value().second.to_nat())
          return err(ErrKind::IndexOOB, "DSHIMap bound exceeds input size");
        MemBlock out = *yb;
        for (BigInt i = op->bound - BigInt(1); !i.is_negative(); i -= BigInt(1)) {
          uint64_t k = i.to_uint64();
          auto v = xb->lookup(k);
          if (!v) return err(ErrKind::SparseRead, "DSHIMap input cell not in memory");
          auto iv = nat_from_nat(i, opts.lang.nt);
          if (!iv.ok()) return Result<Memory>(iv.error());
          EvalContext inner = ctx;
          inner.push(DSHVal::of_nat(iv.value()));
          inner.push(DSHVal::of_ct(*v));
          auto r = eval_aexpr(op->fn, inner, mem, opts);
          if (!r.ok()) return Result<Memory>(r.error());
          out.set(k, r.value());
        }
        Memory res = mem;
        res.set(yp.value().first, std::move(out));
        return Result<Memory>(std::move(res));
      }

      case DOp::BinOp: {
        auto n = nat_from_nat(op->bound, opts.lang.nt);
        if (!n.ok()) return Result<Memory>(n.error());
        auto xp = eval_pexpr(op->x, ctx);
        if (!xp.ok()) return Result<Memory>(xp.error());
        auto yp = eval_pexpr(op->y, ctx);
        if (!yp.ok()) return Result<Memory>(yp.error());
        auto xb = mem.lookup(xp.value().first);
        auto yb = mem.lookup(yp.value().first);
        if (!xb || !yb) return err(ErrKind::LookupError, "DSHBinOp block lookup failed");
        if (op->bound > yp.value().second.to_nat())
          return err(ErrKind::IndexOOB, "DSHBinOp bound exceeds output size");
        MemBlock out = *yb;
        uint64_t nn = op->bound.fits_uint64() ? op->bound.to_uint64() : ~0ull;
        for (BigInt i = op->bound - BigInt(1); !i.is_negative(); i -= BigInt(1)) {
          uint64_t k = i.to_uint64();
          auto a = xb->lookup(k);
          if (!a) return err(ErrKind::SparseRead, "DSHBinOp first input cell not in memory");
          auto bcell = xb->lookup(k + nn);
          if (!bcell) return err(ErrKind::SparseRead, "DSHBinOp second input cell not in memory");
          auto iv = nat_from_nat(i, opts.lang.nt);
          if (!iv.ok()) return Result<Memory>(iv.error());
          EvalContext inner = ctx;
          inner.push(DSHVal::of_nat(iv.value()));
          inner.push(DSHVal::of_ct(*a));
          inner.push(DSHVal::of_ct(*bcell));
          auto r = eval_aexpr(op->fn, inner, mem, opts);
          if (!r.ok()) return Result<Memory>(r.error());
          out.set(k, r.value());
        }
        Memory res = mem;
        res.set(yp.value().first, std::move(out));
        return Result<Memory>(std::move(res));
      }

      case DOp::MemMap2: {
        auto n = nat_from_nat(op->bound, opts.lang.nt);
        if (!n.ok()) return Result<Memory>(n.error());
        auto x0p = eval_pexpr(op->x, ctx);
        if (!x0p.ok()) return Result<Memory>(x0p.error());
        auto x1p = eval_pexpr(op->x1, ctx);
        if (!x1p.ok()) return Result<Memory>(x1p.error());
        auto yp = eval_pexpr(op->y, ctx);
        if (!yp.ok()) return Result<Memory>(yp.error());
        auto x0b = mem.lookup(x0p.value().first);
        auto x1b = mem.lookup(x1p.value().first);
        auto yb = mem.lookup(yp.value().first);
        if (!x0b || !x1b || !yb) return err(ErrKind::LookupError, "DSHMemMap2 block lookup failed");
        if (op->bound > yp.value().second.to_nat())
          return err(ErrKind::IndexOOB, "DSHMemMap2 bound exceeds output size");
        MemBlock out = *yb;
        for (BigInt i = op->bound - BigInt(1); !i.is_negative(); i -= BigInt(1)) {
          uint64_t k = i.to_uint64();
          auto a = x0b->lookup(k);
          if (!a) return err(ErrKind::SparseRead, "DSHMemMap2 first input cell not in memory");
          auto bcell = x1b->lookup(k);
          if (!bcell) return err(ErrKind::SparseRead, "DSHMemMap2 second input cell not in memory");
          EvalContext inner = ctx;
          inner.push(DSHVal::of_ct(*a));
          inner.push(DSHVal::of_ct(*bcell));
          auto r = eval_aexpr(op->fn, inner, mem, opts);
          if (!r.ok()) return Result<Memory>(r.error());
          out.set(k, r.value());
        }
        Memory res = mem;
        res.set(yp.value().first, std::move(out));
        return Result<Memory>(std::move(res));
      }

      case DOp::Power: {
        auto nv = eval_nexpr(op->ne, ctx, opts);
        if (!nv.ok()) return Result<Memory>(nv.error());
        uint64_t xa = 0, ya = 0;
        NatValue xs, ys;
        MemBlock xb, yb;
        auto src = block_and_offset(mem, ctx, op->src, &xa, &xs, &xb);
        if (!src.ok()) return Result<Memory>(src.error());
        auto dst = block_and_offset(mem, ctx, op->dst, &ya, &ys, &yb);
        if (!dst.ok()) return Result<Memory>(dst.error());
        if (!(BigInt::from_u64(dst.value()) < ys.to_nat()))
          return err(ErrKind::IndexOOB, "DSHPower destination offset out of bounds");
        CarrierValue acc;
        try {
          acc = op->init.materialize(opts.lang.ct, opts.arena);
        } catch (const KindMismatchError& ex) {
          return err(ErrKind::UnknownConstant, ex.what());
        }
        yb.set(dst.value(), acc);
        auto iters = nat_offset(nv.value());
        if (!iters.ok()) return Result<Memory>(iters.error());
        for (uint64_t k = 0; k < iters.value(); ++k) {
          auto a = xb.lookup(src.value());
          if (!a) return err(ErrKind::SparseRead, "DSHPower source cell not in memory");
          auto bcur = yb.lookup(dst.value());
          if (!bcur) return err(ErrKind::SparseRead, "DSHPower destination cell not in memory");
          EvalContext inner = ctx;
          inner.push(DSHVal::of_ct(*a));
          inner.push(DSHVal::of_ct(*bcur));
          auto r = eval_aexpr(op->fn, inner, mem, opts);
          if (!r.ok()) return Result<Memory>(r.error());
          yb.set(dst.value(), r.value());
        }
        Memory res = mem;
        res.set(ya, std::move(yb));
        return Result<Memory>(std::move(res));
      }

      case DOp::Loop: {
        if (!op->bound.fits_uint64()) return err(ErrKind::NatOverflow, "loop bound too large");
        uint64_t n = op->bound.to_uint64();
        // mirrors the recursive unfolding exactly: the nested DSHLoop k calls
        // burn one fuel unit each, so iteration k runs at fuel - (n - k) + 1
        if (fuel < n) return none();
        Memory cur = mem;
        for (uint64_t k = 0; k < n; ++k) {
          auto iv = nat_from_nat(BigInt::from_u64(k), opts.lang.nt);
          if (!iv.ok()) return Result<Memory>(iv.error());
          EvalContext inner = ctx;
          inner.push(DSHVal::of_nat(iv.value()));
          auto r = eval(inner, op->body, cur, fuel - (n - k) + 1);
          if (!r.has_value()) return none();
          if (!r->ok()) return r;
          cur = r->value();
        }
        return Result<Memory>(std::move(cur));
      }

      case DOp::Alloc: {
        auto sz = nat_from_nat(op->size, opts.lang.nt);
        if (!sz.ok()) return Result<Memory>(sz.error());
        uint64_t t = mem.next_key();
        Memory inner_mem = mem;
        inner_mem.set(t, MemBlock{});
        EvalContext inner = ctx;
        inner.push(DSHVal::of_ptr(t, sz.value()));
        auto r = eval(inner, op->body, inner_mem, fuel);
        if (!r.has_value()) return none();
        if (!r->ok()) return r;
        Memory out = r->value();
        out.remove(t);
        return Result<Memory>(std::move(out));
      }

      case DOp::MemInit: {
        auto yp = eval_pexpr(op->y, ctx);
        if (!yp.ok()) return Result<Memory>(yp.error());
        auto yb = mem.lookup(yp.value().first);
        if (!yb) return err(ErrKind::LookupError, "DSHMemInit block lookup failed");
        auto count = nat_offset(yp.value().second);
        if (!count.ok()) return Result<Memory>(count.error());
        CarrierValue v;
        try {
          v = op->init.materialize(opts.lang.ct, opts.arena);
        } catch (const KindMismatchError& ex) {
          return err(ErrKind::UnknownConstant, ex.what());
        }
        MemBlock out = *yb;
        for (uint64_t k = 0; k < count.value(); ++k) out.set(k, v);
        Memory res = mem;
        res.set(yp.value().first, std::move(out));
        return Result<Memory>(std::move(res));
      }

      case DOp::Seq: {
        auto r1 = eval(ctx, op->a, mem, fuel);
        if (!r1.has_value()) return none();
        if (!r1->ok()) return r1;
        if (opts.seq_hook && *opts.seq_hook) (*opts.seq_hook)(ctx, r1->value());
        auto r2 = eval(ctx, op->b, r1->value(), fuel);
        if (r2.has_value() && r2->ok() && opts.seq_hook && *opts.seq_hook)
          (*opts.seq_hook)(ctx, r2->value());
        return r2;
      }
    }
    return err(ErrKind::EvalError, "bad operator");
  }
};

}  // namespace

std::optional<Result<Memory>> eval_dshoperator(const EvalContext& ctx, const DshPtr& op,
                                               const Memory& mem, Fuel fuel, const DEvalOpts& opts) {
  OpEval ev{opts};
  return ev.eval(ctx, op, mem, fuel);
}

namespace {
Fuel sat_add(Fuel a, Fuel b) { return a > ~b ? ~Fuel(0) : a + b; }
}  // namespace

Fuel estimate_fuel(const DshPtr& op) {
  switch (op->op) {
    case DOp::Nop:
    case DOp::Assign:
    case DOp::IMap:
    case DOp::BinOp:
    case DOp::MemMap2:
    case DOp::Power:
    case DOp::MemInit: return 1;
    case DOp::Seq: return sat_add(1, std::max(estimate_fuel(op->a), estimate_fuel(op->b)));
    case DOp::Alloc: return sat_add(1, estimate_fuel(op->body));
    case DOp::Loop: {
      Fuel n = op->bound.fits_uint64() ? op->bound.to_uint64() : ~Fuel(0);
      return sat_add(n, estimate_fuel(op->body));
    }
  }
  return 1;
}

// ---- translation ----------------------------------------------------------------

namespace {

Result<Unit> check_lit(const CarrierLit& lit) {
  if (!lit.is_zero_or_one())
    return Result<Unit>::err(ErrKind::UnknownConstant,
                             "constant " + lit.to_string() + " is not representable in the target");
  return Unit{};
}

Result<Unit> check_nat(const BigInt& n) {
  if (!n.fits_uint64())
    return Result<Unit>::err(ErrKind::NatOverflow,
                             "natural " + n.to_decimal() + " does not fit 64 bits");
  return Unit{};
}

Result<Unit> check_nexpr(const NExprPtr& e) {
  if (!e) return Unit{};
  if (e->op == NOp::Const) return check_nat(e->value);
  if (e->a) {
    auto r = check_nexpr(e->a);
    if (!r.ok()) return r;
  }
  if (e->b) return check_nexpr(e->b);
  return Unit{};
}

Result<Unit> check_aexpr(const AExprPtr& e) {
  if (!e) return Unit{};
  switch (e->op) {
    case AOp::Const: return check_lit(e->lit);
    case AOp::Nth: {
      if (e->mem->is_const) {
        for (const auto& [k, lit] : e->mem->block) {
          auto r = check_lit(lit);
          if (!r.ok()) return r;
        }
        auto r = check_nat(e->mem->size);
        if (!r.ok()) return r;
      }
      return check_nexpr(e->idx);
    }
    default: {
      if (e->a) {
        auto r = check_aexpr(e->a);
        if (!r.ok()) return r;
      }
      if (e->b) return check_aexpr(e->b);
      return Unit{};
    }
  }
}

Result<Unit> check_op(const DshPtr& op) {
  switch (op->op) {
    case DOp::Nop: return Unit{};
    case DOp::Assign: {
      auto r = check_nexpr(op->src.idx);
      if (!r.ok()) return r;
      return check_nexpr(op->dst.idx);
    }
    case DOp::IMap:
    case DOp::BinOp: {
      auto r = check_nat(op->bound);
      if (!r.ok()) return r;
      return check_aexpr(op->fn);
    }
    case DOp::MemMap2: {
      auto r = check_nat(op->bound);
      if (!r.ok()) return r;
      return check_aexpr(op->fn);
    }
    case DOp::Power: {
      auto r = check_nexpr(op->ne);
      if (!r.ok()) return r;
      r = check_nexpr(op->src.idx);
      if (!r.ok()) return r;
      r = check_nexpr(op->dst.idx);
      if (!r.ok()) return r;
      r = check_aexpr(op->fn);
      if (!r.ok()) return r;
      return check_lit(op->init);
    }
    case DOp::Loop: {
      auto r = check_nat(op->bound);
      if (!r.ok()) return r;
      return check_op(op->body);
    }
    case DOp::Alloc: {
      auto r = check_nat(op->size);
      if (!r.ok()) return r;
      return check_op(op->body);
    }
    case DOp::MemInit: return check_lit(op->init);
    case DOp::Seq: {
      auto r = check_op(op->a);
      if (!r.ok()) return r;
      return check_op(op->b);
    }
  }
  return Unit{};
}

}  // namespace

Result<DshPtr> translate_rhcol_to_fhcol(const DshPtr& op) {
  auto r = check_op(op);
  if (!r.ok()) return r.error();
  // the AST is carrier-polymorphic; once every constant is known translatable
  // the same tree evaluates under the fixed-width instance
  return op;
}

// ---- heterogeneous equivalence -----------------------------------------------------

Memory memory_to_rational(const Memory& m) {
  Memory out;
  for (const auto& [addr, blk] : m.blocks()) {
    MemBlock b;
    for (const auto& [k, v] : blk.cells()) b.set(k, CarrierValue(Rational::from_double(v.binary64())));
    out.set(addr, b);
  }
  return out;
}

RfVerdict check_rf_equiv(const DshPtr& r_op, const DshPtr& f_op, const EvalContext& ctx_r,
                         const EvalContext& ctx_f, const Memory& mem_r, const Memory& mem_f,
                         const Rational& tolerance) {
  DEvalOpts ro{kRhcolKind, nullptr};
  DEvalOpts fo{kFhcolKind, nullptr};
  auto rr = eval_dshoperator(ctx_r, r_op, mem_r, estimate_fuel(r_op), ro);
  auto rf = eval_dshoperator(ctx_f, f_op, mem_f, estimate_fuel(f_op), fo);
  if (!rr.has_value() || !rf.has_value())
    return {false, "fuel exhausted despite estimate", Rational()};
  if (rr->ok() != rf->ok())
    return {false,
            std::string("error behavior diverges: ") +
                (rr->ok() ? "fixed-width errs: " + rf->error().message
                          : "exact errs: " + rr->error().message),
            Rational()};
  if (!rr->ok()) return {true, "both err: " + rr->error().message, Rational()};

  const Memory& mr = rr->value();
  const Memory& mf2 = rf->value();
  if (mr.blocks().size() != mf2.blocks().size())
    return {false, "memory shapes diverge", Rational()};
  Rational max_dev;
  for (auto itr = mr.blocks().begin(), itf = mf2.blocks().begin(); itr != mr.blocks().end();
       ++itr, ++itf) {
    if (itr->first != itf->first || itr->second.cells().size() != itf->second.cells().size())
      return {false, "memory shapes diverge at block " + std::to_string(itr->first), Rational()};
    auto cr = itr->second.cells().begin();
    auto cf = itf->second.cells().begin();
    for (; cr != itr->second.cells().end(); ++cr, ++cf) {
      if (cr->first != cf->first)
        return {false, "cell layout diverges at block " + std::to_string(itr->first), Rational()};
      Rational dev = (cr->second.rational() - Rational::from_double(cf->second.binary64())).abs();
      if (max_dev < dev) max_dev = dev;
    }
  }
  if (tolerance < max_dev)
    return {false, "deviation exceeds tolerance", max_dev};
  return {true, "", max_dev};
}

// ---- printing ------------------------------------------------------------------------

std::string to_string(const NExprPtr& e) {
  switch (e->op) {
    case NOp::Var: return "(NVar " + std::to_string(e->var) + ")";
    case NOp::Const: return "(NConst " + e->value.to_decimal() + ")";
    case NOp::Div: return "(NDiv " + to_string(e->a) + " " + to_string(e->b) + ")";
    case NOp::Mod: return "(NMod " + to_string(e->a) + " " + to_string(e->b) + ")";
    case NOp::Plus: return "(NPlus " + to_string(e->a) + " " + to_string(e->b) + ")";
    case NOp::Minus: return "(NMinus " + to_string(e->a) + " " + to_string(e->b) + ")";
    case NOp::Mult: return "(NMult " + to_string(e->a) + " " + to_string(e->b) + ")";
    case NOp::Min: return "(NMin " + to_string(e->a) + " " + to_string(e->b) + ")";
    case NOp::Max: return "(NMax " + to_string(e->a) + " " + to_string(e->b) + ")";
  }
  return "?";
}

namespace {
std::string mexpr_str(const MExpr& m) {
  if (!m.is_const) return "(MPtrDeref (PVar " + std::to_string(m.p.var) + "))";
  std::string s = "(MConst {";
  bool first = true;
  for (const auto& [k, v] : m.block) {
    if (!first) s += ", ";
    first = false;
    s += std::to_string(k) + ": " + v.to_string();
  }
  return s + "} " + m.size.to_decimal() + ")";
}
}  // namespace

std::string to_string(const AExprPtr& e) {
  switch (e->op) {
    case AOp::Var: return "(AVar " + std::to_string(e->var) + ")";
    case AOp::Const: return "(AConst " + e->lit.to_string() + ")";
    case AOp::Nth: return "(ANth " + mexpr_str(*e->mem) + " " + to_string(e->idx) + ")";
    case AOp::Abs: return "(AAbs " + to_string(e->a) + ")";
    case AOp::Plus: return "(APlus " + to_string(e->a) + " " + to_string(e->b) + ")";
    case AOp::Minus: return "(AMinus " + to_string(e->a) + " " + to_string(e->b) + ")";
    case AOp::Mult: return "(AMult " + to_string(e->a) + " " + to_string(e->b) + ")";
    case AOp::Min: return "(AMin " + to_string(e->a) + " " + to_string(e->b) + ")";
    case AOp::Max: return "(AMax " + to_string(e->a) + " " + to_string(e->b) + ")";
    case AOp::ZLess: return "(AZless " + to_string(e->a) + " " + to_string(e->b) + ")";
  }
  return "?";
}

std::string to_string(const DshPtr& op) {
  auto memref = [](const MemRef& r) {
    return "((PVar " + std::to_string(r.p.var) + "), " + to_string(r.idx) + ")";
  };
  switch (op->op) {
    case DOp::Nop: return "DSHNop";
    case DOp::Assign: return "(DSHAssign " + memref(op->src) + " " + memref(op->dst) + ")";
    case DOp::IMap:
      return "(DSHIMap " + op->bound.to_decimal() + " (PVar " + std::to_string(op->x.var) +
             ") (PVar " + std::to_string(op->y.var) + ") " + to_string(op->fn) + ")";
    case DOp::BinOp:
      return "(DSHBinOp " + op->bound.to_decimal() + " (PVar " + std::to_string(op->x.var) +
             ") (PVar " + std::to_string(op->y.var) + ") " + to_string(op->fn) + ")";
    case DOp::MemMap2:
      return "(DSHMemMap2 " + op->bound.to_decimal() + " (PVar " + std::to_string(op->x.var) +
             ") (PVar " + std::to_string(op->x1.var) + ") (PVar " + std::to_string(op->y.var) +
             ") " + to_string(op->fn) + ")";
    case DOp::Power:
      return "(DSHPower " + to_string(op->ne) + " " + memref(op->src) + " " + memref(op->dst) +
             " " + to_string(op->fn) + " " + op->init.to_string() + ")";
    case DOp::Loop:
      return "(DSHLoop " + op->bound.to_decimal() + " " + to_string(op->body) + ")";
    case DOp::Alloc:
      return "(DSHAlloc " + op->size.to_decimal() + " " + to_string(op->body) + ")";
    case DOp::MemInit:
      return "(DSHMemInit (PVar " + std::to_string(op->y.var) + ") " + op->init.to_string() + ")";
    case DOp::Seq: return "(DSHSeq " + to_string(op->a) + " " + to_string(op->b) + ")";
  }
  return "?";
}

}  // namespace hcolc::dhcol
