#include "hcolc/lowering.hpp"

#include "hcolc/rng.hpp"

namespace hcolc::lowering {

using namespace hcolc::dhcol;
using mshcol::MOp;
using mshcol::MSHExprPtr;
using sigma::ShOp;

VarResolver VarResolver::id() { return VarResolver{}; }

VarResolver VarResolver::fake(VarResolver parent, size_t n) {
  VarResolver r;
  r.kind_ = Kind::Fake;
  r.n_ = n;
  r.parent_ = std::make_shared<const VarResolver>(std::move(parent));
  return r;
}

VarResolver VarResolver::lambda(VarResolver parent, size_t n) {
  VarResolver r;
  r.kind_ = Kind::Lambda;
  r.n_ = n;
  r.parent_ = std::make_shared<const VarResolver>(std::move(parent));
  return r;
}

size_t VarResolver::resolve(size_t r) const {
  switch (kind_) {
    case Kind::Id: return r;
    case Kind::Fake: return parent_->resolve(r) + n_;
    case Kind::Lambda: return r < n_ ? r : parent_->resolve(r - n_) + n_;
  }
  return r;
}

// ---- Σ-HCOL -> MSHCOL ----------------------------------------------------------

Result<MSHExprPtr> shcol_to_mshcol(const sigma::SHExprPtr& e) {
  using R = Result<MSHExprPtr>;
  switch (e->op) {
    case ShOp::Embed: return mshcol::msh_embed(e->n, e->b);
    case ShOp::Pick: return mshcol::msh_pick(e->n, e->b);
    case ShOp::Pointwise: return mshcol::msh_pointwise(e->n, e->fn);
    case ShOp::BinOp: return mshcol::msh_binop(e->n, e->fn);
    case ShOp::Inductor: return mshcol::msh_inductor(e->count, e->fn, e->z);
    case ShOp::Apply2Union: {
      auto f = shcol_to_mshcol(e->f);
      if (!f.ok()) return f;
      auto g = shcol_to_mshcol(e->g);
      if (!g.ok()) return g;
      return mshcol::msh_apply2union(e->dot, f.value(), g.value());
    }
    case ShOp::SafeCast:
    case ShOp::UnSafeCast: return shcol_to_mshcol(e->f);  // casts translate as identities
    case ShOp::Compose: {
      auto f = shcol_to_mshcol(e->f);
      if (!f.ok()) return f;
      auto g = shcol_to_mshcol(e->g);
      if (!g.ok()) return g;
      return mshcol::msh_compose(f.value(), g.value());
    }
    case ShOp::IReduction: {
      auto body = shcol_to_mshcol(e->fam.body);
      if (!body.ok()) return body;
      return mshcol::msh_ireduction(e->sval, e->dot, e->fam.size, body.value());
    }
    case ShOp::IUnion: {
      auto body = shcol_to_mshcol(e->fam.body);
      if (!body.ok()) return body;
      return mshcol::msh_iunion(e->fam.size, body.value());
    }
    case ShOp::Scatter:
      return R::err(ErrKind::Unsupported, "residual Scatter: rewrite stage must eliminate it");
    case ShOp::Gather:
      return R::err(ErrKind::Unsupported, "residual Gather: rewrite stage must eliminate it");
    case ShOp::Lift:
      return R::err(ErrKind::Unsupported, "residual lifted operator: rewrite stage must eliminate it");
  }
  return R::err(ErrKind::Unsupported, "bad constructor");
}

// ---- MSHCOL -> DHCOL --------------------------------------------------------------

namespace {

void collect_fn_params(const CTExprPtr& e, std::vector<std::string>& order) {
  if (!e) return;
  if (e->tag == CTExpr::Tag::ParamNth) {
    bool seen = false;
    for (const auto& n : order) seen = seen || n == e->param;
    if (!seen) order.push_back(e->param);
  }
  collect_fn_params(e->a, order);
  collect_fn_params(e->b, order);
}

void collect_msh_params(const MSHExprPtr& e, std::vector<std::string>& order) {
  if (!e) return;
  if (e->fn.body) collect_fn_params(e->fn.body, order);
  if (e->dot.body) collect_fn_params(e->dot.body, order);
  collect_msh_params(e->f, order);
  collect_msh_params(e->g, order);
  collect_msh_params(e->fam.body, order);
}

struct CompileState {
  std::map<std::string, size_t> param_index;  // top-level de Bruijn index
  VarResolver res = VarResolver::id();
  size_t msh_shift = 0;     // MSHCOL-side lambda binders entered
  size_t binders = 0;       // DHCOL binders opened below the top-level context
  std::vector<size_t> fam_positions;  // binder count at each family-loop variable
};

Result<size_t> resolve_param(const CompileState& st, const std::string& name) {
  auto it = st.param_index.find(name);
  if (it == st.param_index.end())
    return Result<size_t>::err(ErrKind::CompileError, "unbound parameter " + name);
  return st.res.resolve(it->second + st.msh_shift);
}

Result<NExprPtr> compile_index(const IndexExpr& ix, const CompileState& st, size_t pushed) {
  using R = Result<NExprPtr>;
  switch (ix.tag) {
    case IndexExpr::Tag::Const: return n_const(BigInt::from_u64(ix.k));
    case IndexExpr::Tag::FamVar: {
      if (ix.k >= st.fam_positions.size())
        return R::err(ErrKind::CompileError, "unbound family index");
      size_t pos = st.fam_positions[st.fam_positions.size() - 1 - ix.k];
      return n_var(st.binders + pushed - 1 - pos);
    }
    case IndexExpr::Tag::Add: {
      auto a = compile_index(*ix.a, st, pushed);
      if (!a.ok()) return a;
      auto b = compile_index(*ix.b, st, pushed);
      if (!b.ok()) return b;
      return n_bin(NOp::Plus, a.value(), b.value());
    }
    case IndexExpr::Tag::Mul: {
      auto a = compile_index(*ix.a, st, pushed);
      if (!a.ok()) return a;
      auto b = compile_index(*ix.b, st, pushed);
      if (!b.ok()) return b;
      return n_bin(NOp::Mult, a.value(), b.value());
    }
  }
  return R::err(ErrKind::CompileError, "bad index expression");
}

Result<AExprPtr> compile_ct(const CTExprPtr& e, const CompileState& st,
                            std::span<const size_t> argmap, size_t pushed) {
  using R = Result<AExprPtr>;
  switch (e->tag) {
    case CTExpr::Tag::Lit: return a_const(e->lit);
    case CTExpr::Tag::Arg:
      if (e->arg >= argmap.size()) return R::err(ErrKind::CompileError, "argument out of range");
      return a_var(argmap[e->arg]);
    case CTExpr::Tag::ParamNth: {
      CompileState inner = st;
      inner.res = VarResolver::lambda(st.res, pushed);
      inner.msh_shift = st.msh_shift + pushed;
      auto v = resolve_param(inner, e->param);
      if (!v.ok()) return v.error();
      auto ix = compile_index(e->pidx, st, pushed);
      if (!ix.ok()) return ix.error();
      return a_nth(m_deref(PExpr{v.value()}), ix.value());
    }
    case CTExpr::Tag::Abs: {
      auto a = compile_ct(e->a, st, argmap, pushed);
      if (!a.ok()) return a;
      return a_abs(a.value());
    }
    default: break;
  }
  auto a = compile_ct(e->a, st, argmap, pushed);
  if (!a.ok()) return a;
  auto b = compile_ct(e->b, st, argmap, pushed);
  if (!b.ok()) return b;
  AOp op;
  switch (e->tag) {
    case CTExpr::Tag::Plus: op = AOp::Plus; break;
    case CTExpr::Tag::Sub: op = AOp::Minus; break;
    case CTExpr::Tag::Mult: op = AOp::Mult; break;
    case CTExpr::Tag::Min: op = AOp::Min; break;
    case CTExpr::Tag::Max: op = AOp::Max; break;
    case CTExpr::Tag::ZLess: op = AOp::ZLess; break;
    default: return R::err(ErrKind::CompileError, "bad scalar expression");
  }
  return a_bin(op, a.value(), b.value());
}

Result<AExprPtr> compile_fn(const ScalarFun& f, const CompileState& st,
                            std::initializer_list<size_t> argmap, size_t pushed) {
  std::vector<size_t> m(argmap);
  return compile_ct(f.body, st, m, pushed);
}

PExpr incr(PExpr p, size_t by = 1) { return PExpr{p.var + by}; }

Result<DshPtr> compile_msh(const MSHExprPtr& e, CompileState& st, PExpr x_p, PExpr y_p) {
  using R = Result<DshPtr>;
  switch (e->op) {
    case MOp::Embed: {
      auto b = compile_index(e->b, st, 0);
      if (!b.ok()) return b.error();
      return d_assign(MemRef{x_p, n_const_u(0)}, MemRef{y_p, b.value()});
    }
    case MOp::Pick: {
      auto b = compile_index(e->b, st, 0);
      if (!b.ok()) return b.error();
      return d_assign(MemRef{x_p, b.value()}, MemRef{y_p, n_const_u(0)});
    }
    case MOp::Pointwise: {
      // evalIMap pushes [value; index]
      auto f = compile_fn(e->fn, st, {0}, 2);
      if (!f.ok()) return f.error();
      return d_imap(BigInt::from_u64(e->n), x_p, y_p, f.value());
    }
    case MOp::BinOp: {
      // evalBinOp pushes [b; a; index]: first function argument sits at 1
      auto f = compile_fn(e->fn, st, {1, 0}, 3);
      if (!f.ok()) return f.error();
      return d_binop(BigInt::from_u64(e->n), x_p, y_p, f.value());
    }
    case MOp::Inductor: {
      // evalPower pushes [dst value; src value]; fold is f(acc=dst, src)
      auto f = compile_fn(e->fn, st, {0, 1}, 2);
      if (!f.ok()) return f.error();
      auto count = compile_index(e->count, st, 0);
      if (!count.ok()) return count.error();
      return d_power(count.value(), MemRef{x_p, n_const_u(0)}, MemRef{y_p, n_const_u(0)}, f.value(),
                     e->z);
    }
    case MOp::Apply2Union: {
      auto f = compile_msh(e->f, st, x_p, y_p);
      if (!f.ok()) return f;
      auto g = compile_msh(e->g, st, x_p, y_p);
      if (!g.ok()) return g;
      return d_seq(f.value(), g.value());
    }
    case MOp::Compose: {
      auto dg = mshcol::dims(e->g);
      if (!dg.ok()) return dg.error();
      size_t o2 = dg.value().out;
      CompileState inner = st;
      inner.res = VarResolver::fake(st.res, 1);
      inner.binders = st.binders + 1;
      PExpr t{0};
      auto cop2 = compile_msh(e->g, inner, incr(x_p), t);
      if (!cop2.ok()) return cop2;
      auto cop1 = compile_msh(e->f, inner, t, incr(y_p));
      if (!cop1.ok()) return cop1;
      return d_alloc(BigInt::from_u64(o2), d_seq(cop2.value(), cop1.value()));
    }
    case MOp::IUnion: {
      CompileState inner = st;
      inner.res = VarResolver::fake(st.res, 1);
      inner.binders = st.binders + 1;
      inner.fam_positions.push_back(st.binders);
      auto body = compile_msh(e->fam.body, inner, incr(x_p), incr(y_p));
      if (!body.ok()) return body;
      return d_loop(BigInt::from_u64(e->fam.size), body.value());
    }
    case MOp::IReduction: {
      auto d = mshcol::dims(e);
      if (!d.ok()) return d.error();
      size_t o = d.value().out;
      CompileState inner = st;
      inner.res = VarResolver::fake(VarResolver::fake(st.res, 1), 1);
      inner.binders = st.binders + 2;  // temp block, then the loop index
      inner.fam_positions.push_back(st.binders + 1);
      PExpr t{1};
      auto fam = compile_msh(e->fam.body, inner, incr(x_p, 2), t);
      if (!fam.ok()) return fam;
      // fold: y := dot(y, t) cell-wise; evalMap2 pushes [x1 elem; x0 elem]
      auto dot = compile_fn(e->dot, inner, {1, 0}, 2);
      if (!dot.ok()) return dot.error();
      auto map2 = d_memmap2(BigInt::from_u64(o), incr(y_p, 2), t, incr(y_p, 2), dot.value());
      return d_seq(d_meminit(y_p, e->z),
                   d_alloc(BigInt::from_u64(o),
                           d_loop(BigInt::from_u64(e->fam.size), d_seq(fam.value(), map2))));
    }
  }
  return R::err(ErrKind::CompileError, "unreachable constructor");
}

}  // namespace

Result<LoweredProgram> lower_mshcol_program(const MSHExprPtr& e,
                                            const std::map<std::string, size_t>& param_sizes) {
  using R = Result<LoweredProgram>;
  auto d = mshcol::dims(e);
  if (!d.ok()) return d.error();

  std::vector<std::string> order;
  collect_msh_params(e, order);

  LoweredProgram out;
  CompileState st;
  for (size_t i = 0; i < order.size(); ++i) {
    auto it = param_sizes.find(order[i]);
    if (it == param_sizes.end())
      return R::err(ErrKind::CompileError, "no declared size for parameter " + order[i]);
    st.param_index[order[i]] = i;
    out.globals.items.push_back(
        {"g" + std::to_string(i), order[i], DSHType{DSHType::Kind::Ptr, it->second}});
  }
  size_t k = order.size();
  auto op = compile_msh(e, st, PExpr{k}, PExpr{k + 1});
  if (!op.ok()) return op.error();
  out.op = op.value();
  out.input_dim = d.value().in;
  out.output_dim = d.value().out;
  return out;
}

// ---- instantiation and validators ------------------------------------------------

ProgramInstance instantiate(const LoweredProgram& prog, const ParamEnv& params,
                            const mshcol::MemBlock& input, CarrierKind kind,
                            sym::SexprArena* arena) {
  (void)kind;
  (void)arena;
  ProgramInstance inst;
  size_t k = prog.globals.items.size();
  NatKind nk = kind == CarrierKind::Rational ? NatKind::BigNat : NatKind::U64;
  for (size_t i = 0; i < k; ++i) {
    const auto& g = prog.globals.items[i];
    mshcol::MemBlock b;
    auto it = params.vectors.find(g.param);
    if (it != params.vectors.end())
      for (size_t j = 0; j < it->second.size(); ++j) b.set(j, it->second[j]);
    inst.mem.set(i, std::move(b));
    inst.global_addrs.push_back(i);
  }
  inst.x_addr = k;
  inst.y_addr = k + 1;
  inst.mem.set(inst.x_addr, input);
  inst.mem.set(inst.y_addr, mshcol::MemBlock{});
  // push Y, X, then globals in reverse so that g0 lands at index 0
  inst.ctx.push(DSHVal::of_ptr(inst.y_addr, nat_from_usize(prog.output_dim, nk)));
  inst.ctx.push(DSHVal::of_ptr(inst.x_addr, nat_from_usize(prog.input_dim, nk)));
  for (size_t i = k; i-- > 0;) {
    const auto& g = prog.globals.items[i];
    inst.ctx.push(DSHVal::of_ptr(i, nat_from_usize(g.type.size, nk)));
  }
  return inst;
}

PureVerdict check_dsh_pure(const DshPtr& dop, PExpr y_p, const EvalContext& ctx,
                           const Memory& mem_shape, size_t samples, uint64_t seed) {
  auto yr = eval_pexpr(y_p, ctx);
  if (!yr.ok()) return {false, "cannot resolve output pointer: " + yr.error().message};
  uint64_t y_addr = yr.value().first;
  Rng rng(seed);
  for (size_t t = 0; t < samples; ++t) {
    Memory mem;
    for (const auto& [addr, blk] : mem_shape.blocks()) {
      mshcol::MemBlock b;
      for (const auto& [k, v] : blk.cells()) {
        (void)v;
        b.set(k, CarrierValue(rng.rational()));
      }
      mem.set(addr, std::move(b));
    }
    auto r = eval_dshoperator(ctx, dop, mem, estimate_fuel(dop), DEvalOpts{});
    if (!r.has_value()) return {false, "fuel exhausted despite estimate"};
    if (!r->ok()) continue;  // purity is about successful runs
    const Memory& after = r->value();
    // mem_stable: the set of live blocks is unchanged
    if (after.blocks().size() != mem.blocks().size())
      return {false, "block count changed (allocation leak)"};
    for (const auto& [addr, blk] : mem.blocks()) {
      if (!after.exists(addr)) return {false, "block " + std::to_string(addr) + " disappeared"};
      if (addr == y_addr) continue;
      // mem_write_safe: everything except y is untouched
      if (!after.lookup_ref(addr)->equals(blk))
        return {false, "block " + std::to_string(addr) + " modified"};
    }
  }
  return {true, ""};
}

mshcol::CompatVerdict check_msh_dsh_compat(const MSHExprPtr& mop, const LoweredProgram& prog,
                                           size_t samples, uint64_t seed) {
  auto c = mshcol::msh_contract(mop);
  auto d = mshcol::dims(mop);
  if (!c.ok() || !d.ok()) return {false, "ill-typed functional operator"};
  Rng rng(seed);
  for (size_t t = 0; t < samples; ++t) {
    ParamEnv env;
    for (const auto& g : prog.globals.items) {
      std::vector<CarrierValue> v;
      for (size_t j = 0; j < g.type.size; ++j) v.push_back(CarrierValue(rng.rational()));
      env.vectors.emplace(g.param, std::move(v));
    }
    mshcol::MemBlock mx;
    for (size_t i : c.value().in) mx.set(i, CarrierValue(rng.rational()));
    // occasionally drop one required key to exercise the both-err case
    bool drop = rng.chance(1, 8) && !c.value().in.empty();
    if (drop) {
      auto it = c.value().in.begin();
      std::advance(it, rng.below(c.value().in.size()));
      mx.erase(*it);
    }
    auto inst = instantiate(prog, env, mx, CarrierKind::Rational);
    // random pre-existing output contents
    mshcol::MemBlock mb;
    for (size_t kk = 0; kk < prog.output_dim; ++kk)
      if (rng.chance(1, 2)) mb.set(kk, CarrierValue(rng.rational()));
    inst.mem.set(inst.y_addr, mb);

    auto rm = mshcol::eval_mshcol(mop, mx, env);
    auto rd = eval_dshoperator(inst.ctx, prog.op, inst.mem, estimate_fuel(prog.op), DEvalOpts{});
    if (!rd.has_value()) return {false, "fuel exhausted despite estimate"};
    if (rm.ok() != rd->ok())
      return {false, std::string("error behavior diverges: functional ") +
                         (rm.ok() ? "succeeds" : "errs") + ", imperative " +
                         (rd->ok() ? "succeeds" : "errs")};
    if (!rm.ok()) continue;  // both err together

    const mshcol::MemBlock* ma = rd->value().lookup_ref(inst.y_addr);
    if (!ma) return {false, "output block vanished"};
    const mshcol::MemBlock& md = rm.value();
    std::set<uint64_t> keys;
    for (const auto& [kk, v] : md.cells()) keys.insert(kk);
    for (const auto& [kk, v] : mb.cells()) keys.insert(kk);
    for (const auto& [kk, v] : ma->cells()) keys.insert(kk);
    for (uint64_t kk : keys) {
      auto vd = md.lookup(kk);
      auto va = ma->lookup(kk);
      auto vb = mb.lookup(kk);
      if (vd) {
        if (!va || !va->equals(*vd))
          return {false, "expected delta value missing at offset " + std::to_string(kk)};
      } else {
        if (va.has_value() != vb.has_value() || (va && !va->equals(*vb)))
          return {false, "preserved cell changed at offset " + std::to_string(kk)};
      }
    }
  }
  return {true, ""};
}

}  // namespace hcolc::lowering
