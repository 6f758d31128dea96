#include "hcolc/sigma.hpp"

#include <algorithm>

#include "hcolc/rng.hpp"

namespace hcolc::sigma {

namespace {
SHExprPtr mk(SHExpr e) { return std::make_shared<const SHExpr>(std::move(e)); }
}  // namespace

Result<IndexMap> IndexMap::make(std::vector<size_t> image, size_t codomain) {
  std::set<size_t> seen;
  for (size_t v : image) {
    if (v >= codomain)
      return Result<IndexMap>::err(ErrKind::RangeError, "index map value out of codomain");
    if (!seen.insert(v).second)
      return Result<IndexMap>::err(ErrKind::MapNotInjective, "index map is not injective");
  }
  return IndexMap{std::move(image), codomain};
}

SHExprPtr sh_embed(CarrierLit s, size_t n, IndexExpr b) {
  SHExpr e{};
  e.op = ShOp::Embed;
  e.sval = std::move(s);
  e.n = n;
  e.b = std::move(b);
  return mk(std::move(e));
}

SHExprPtr sh_pick(CarrierLit s, size_t n, IndexExpr b) {
  SHExpr e{};
  e.op = ShOp::Pick;
  e.sval = std::move(s);
  e.n = n;
  e.b = std::move(b);
  return mk(std::move(e));
}

SHExprPtr sh_scatter(CarrierLit s, size_t n, size_t m, IndexMap map) {
  SHExpr e{};
  e.op = ShOp::Scatter;
  e.sval = std::move(s);
  e.n = n;
  e.m = m;
  e.map = std::move(map);
  return mk(std::move(e));
}

SHExprPtr sh_gather(CarrierLit s, size_t n, size_t m, IndexMap map) {
  SHExpr e{};
  e.op = ShOp::Gather;
  e.sval = std::move(s);
  e.n = n;
  e.m = m;
  e.map = std::move(map);
  return mk(std::move(e));
}

SHExprPtr sh_lift(hcol::HExprPtr h, CarrierLit s) {
  SHExpr e{};
  e.op = ShOp::Lift;
  e.sval = std::move(s);
  e.h = std::move(h);
  return mk(std::move(e));
}

SHExprPtr sh_pointwise(CarrierLit s, size_t n, ScalarFun f) {
  SHExpr e{};
  e.op = ShOp::Pointwise;
  e.sval = std::move(s);
  e.n = n;
  e.fn = std::move(f);
  return mk(std::move(e));
}

SHExprPtr sh_binop(CarrierLit s, size_t n, ScalarFun f) {
  SHExpr e{};
  e.op = ShOp::BinOp;
  e.sval = std::move(s);
  e.n = n;
  e.fn = std::move(f);
  return mk(std::move(e));
}

SHExprPtr sh_inductor(CarrierLit s, IndexExpr count, ScalarFun f, CarrierLit z) {
  SHExpr e{};
  e.op = ShOp::Inductor;
  e.sval = std::move(s);
  e.count = std::move(count);
  e.fn = std::move(f);
  e.z = std::move(z);
  return mk(std::move(e));
}

SHExprPtr sh_apply2union(CarrierLit s, ScalarFun dot, SHExprPtr f, SHExprPtr g) {
  SHExpr e{};
  e.op = ShOp::Apply2Union;
  e.sval = std::move(s);
  e.dot = std::move(dot);
  e.f = std::move(f);
  e.g = std::move(g);
  return mk(std::move(e));
}

SHExprPtr sh_safecast(SHExprPtr f) {
  SHExpr e{};
  e.op = ShOp::SafeCast;
  e.f = std::move(f);
  return mk(std::move(e));
}

SHExprPtr sh_unsafecast(SHExprPtr f) {
  SHExpr e{};
  e.op = ShOp::UnSafeCast;
  e.f = std::move(f);
  return mk(std::move(e));
}

SHExprPtr sh_compose(SHExprPtr f, SHExprPtr g) {
  SHExpr e{};
  e.op = ShOp::Compose;
  e.f = std::move(f);
  e.g = std::move(g);
  return mk(std::move(e));
}

SHExprPtr sh_ireduction(CarrierLit s, ScalarFun dot, size_t size, SHExprPtr body) {
  SHExpr e{};
  e.op = ShOp::IReduction;
  e.sval = std::move(s);
  e.dot = std::move(dot);
  e.fam = SHFamily{size, std::move(body)};
  return mk(std::move(e));
}

SHExprPtr sh_iunion(CarrierLit s, ScalarFun dot, size_t size, SHExprPtr body) {
  SHExpr e{};
  e.op = ShOp::IUnion;
  e.sval = std::move(s);
  e.dot = std::move(dot);
  e.fam = SHFamily{size, std::move(body)};
  return mk(std::move(e));
}

Result<hcol::Dims> dims(const SHExprPtr& e) {
  using R = Result<hcol::Dims>;
  switch (e->op) {
    case ShOp::Embed: return hcol::Dims{1, e->n};
    case ShOp::Pick: return hcol::Dims{e->n, 1};
    case ShOp::Scatter: {
      if (e->map.image.size() != e->n || e->map.codomain != e->m)
        return R::err(ErrKind::IllTyped, "Scatter: index map shape mismatch");
      return hcol::Dims{e->n, e->m};
    }
    case ShOp::Gather: {
      if (e->map.image.size() != e->m || e->map.codomain != e->n)
        return R::err(ErrKind::IllTyped, "Gather: index map shape mismatch");
      return hcol::Dims{e->n, e->m};
    }
    case ShOp::Lift: return hcol::dims(e->h);
    case ShOp::Pointwise: return hcol::Dims{e->n, e->n};
    case ShOp::BinOp: return hcol::Dims{e->n + e->n, e->n};
    case ShOp::Inductor: return hcol::Dims{1, 1};
    case ShOp::Apply2Union: {
      auto df = dims(e->f), dg = dims(e->g);
      if (!df.ok()) return df;
      if (!dg.ok()) return dg;
      if (!(df.value() == dg.value()))
        return R::err(ErrKind::IllTyped, "Apply2Union: operand dims differ");
      return df;
    }
    case ShOp::SafeCast:
    case ShOp::UnSafeCast: return dims(e->f);
    case ShOp::Compose: {
      auto df = dims(e->f), dg = dims(e->g);
      if (!df.ok()) return df;
      if (!dg.ok()) return dg;
      if (dg.value().out != df.value().in)
        return R::err(ErrKind::IllTyped, "SHCompose: inner output != outer input");
      return hcol::Dims{dg.value().in, df.value().out};
    }
    case ShOp::IReduction:
    case ShOp::IUnion: {
      if (!e->fam.body) return R::err(ErrKind::IllTyped, "family without body");
      return dims(e->fam.body);
    }
  }
  return R::err(ErrKind::IllTyped, "dims: bad op");
}

// ---- evaluation -------------------------------------------------------------

namespace {

struct EvalState {
  const ParamEnv* env;
  CarrierKind kind;
  sym::SexprArena* arena;
  std::vector<uint64_t> fam_stack;
};

Rtheta cell_union(const ScalarFun& dot, const Rtheta& a, const Rtheta& b, FlagsKind kind,
                  EvalState& st) {
  bool coll = a.is_collision || b.is_collision;
  if (a.is_struct && b.is_struct) return {a.value, true, coll};
  if (a.is_struct) return {b.value, false, coll};
  if (b.is_struct) return {a.value, false, coll};
  ScalarEvalCtx ctx{st.env, st.fam_stack, st.kind, st.arena};
  CarrierValue args[2] = {a.value, b.value};
  return {eval_scalar(dot, args, ctx), false, coll || kind == FlagsKind::Safe};
}

Result<SparseVector> eval_rec(const SHExprPtr& e, const SparseVector& x, FlagsKind ambient,
                              EvalState& st);

Result<SparseVector> eval_family_member(const SHFamily& fam, uint64_t j, const SparseVector& x,
                                        FlagsKind ambient, EvalState& st) {
  st.fam_stack.push_back(j);
  auto r = eval_rec(fam.body, x, ambient, st);
  st.fam_stack.pop_back();
  return r;
}

Result<SparseVector> eval_rec(const SHExprPtr& e, const SparseVector& x, FlagsKind ambient,
                              EvalState& st) {
  using R = Result<SparseVector>;
  auto d = dims(e);
  if (!d.ok()) return d.error();
  if (x.size() != d.value().in)
    return R::err(ErrKind::DimMismatch, "eval_shcol: wrong input length");
  CarrierValue sv = e->sval.materialize(st.kind, st.arena);
  ScalarEvalCtx ctx{st.env, st.fam_stack, st.kind, st.arena};

  switch (e->op) {
    case ShOp::Embed: {
      uint64_t b = e->b.eval(st.fam_stack);
      if (b >= e->n) return R::err(ErrKind::RangeError, "Embed: position out of range");
      SparseVector out(e->n, Rtheta::structural(sv));
      out[b] = x[0];
      return out;
    }
    case ShOp::Pick: {
      uint64_t b = e->b.eval(st.fam_stack);
      if (b >= e->n) return R::err(ErrKind::RangeError, "Pick: position out of range");
      return SparseVector{x[b]};
    }
    case ShOp::Scatter: {
      SparseVector out(e->m, Rtheta::structural(sv));
      for (size_t j = 0; j < e->n; ++j) out[e->map.image[j]] = x[j];
      return out;
    }
    case ShOp::Gather: {
      SparseVector out;
      out.reserve(e->m);
      for (size_t j = 0; j < e->m; ++j) out.push_back(x[e->map.image[j]]);
      return out;
    }
    case ShOp::Lift: {
      hcol::DenseVector dense = densify(x);
      auto r = hcol::eval_hcol(e->h, dense, *st.env, st.kind, st.arena);
      if (!r.ok()) return r.error();
      return sparsify(r.value());
    }
    case ShOp::Pointwise: {
      SparseVector out;
      out.reserve(e->n);
      for (size_t j = 0; j < e->n; ++j) {
        CarrierValue args[1] = {x[j].value};
        out.push_back({eval_scalar(e->fn, args, ctx), x[j].is_struct, x[j].is_collision});
      }
      return out;
    }
    case ShOp::BinOp: {
      SparseVector out;
      out.reserve(e->n);
      for (size_t j = 0; j < e->n; ++j) {
        const Rtheta& a = x[j];
        const Rtheta& b = x[e->n + j];
        CarrierValue args[2] = {a.value, b.value};
        out.push_back({eval_scalar(e->fn, args, ctx), a.is_struct && b.is_struct,
                       a.is_collision || b.is_collision});
      }
      return out;
    }
    case ShOp::Inductor: {
      uint64_t cnt = e->count.eval(st.fam_stack);
      CarrierValue acc = e->z.materialize(st.kind, st.arena);
      for (uint64_t k = 0; k < cnt; ++k) {
        CarrierValue args[2] = {acc, x[0].value};
        acc = eval_scalar(e->fn, args, ctx);
      }
      return SparseVector{{acc, false, x[0].is_collision}};
    }
    case ShOp::Apply2Union: {
      auto rf = eval_rec(e->f, x, ambient, st);
      if (!rf.ok()) return rf;
      auto rg = eval_rec(e->g, x, ambient, st);
      if (!rg.ok()) return rg;
      SparseVector out;
      out.reserve(rf.value().size());
      for (size_t k = 0; k < rf.value().size(); ++k)
        out.push_back(cell_union(e->dot, rf.value()[k], rg.value()[k], ambient, st));
      return out;
    }
    case ShOp::SafeCast: return eval_rec(e->f, x, FlagsKind::Unsafe, st);
    case ShOp::UnSafeCast: return eval_rec(e->f, x, FlagsKind::Safe, st);
    case ShOp::Compose: {
      auto rg = eval_rec(e->g, x, ambient, st);
      if (!rg.ok()) return rg;
      return eval_rec(e->f, rg.value(), ambient, st);
    }
    case ShOp::IUnion: {
      SparseVector acc(d.value().out, Rtheta::structural(sv));
      for (uint64_t j = 0; j < e->fam.size; ++j) {
        auto rm = eval_family_member(e->fam, j, x, ambient, st);
        if (!rm.ok()) return rm;
        SparseVector next;
        next.reserve(acc.size());
        for (size_t k = 0; k < acc.size(); ++k)
          next.push_back(cell_union(e->dot, acc[k], rm.value()[k], FlagsKind::Safe, st));
        acc = std::move(next);
      }
      return acc;
    }
    case ShOp::IReduction: {
      // dot-fold seeded with the initial value, mirroring the memory-level
      // MemInit + MemMap2 reduction template
      size_t o = d.value().out;
      CarrierValue zv = e->sval.materialize(st.kind, st.arena);
      std::vector<CarrierValue> acc(o, zv);
      std::vector<bool> written(o, false), coll(o, false);
      for (uint64_t j = 0; j < e->fam.size; ++j) {
        auto rm = eval_family_member(e->fam, j, x, FlagsKind::Unsafe, st);
        if (!rm.ok()) return rm;
        for (size_t k = 0; k < o; ++k) {
          const Rtheta& c = rm.value()[k];
          if (c.is_collision) coll[k] = true;
          if (!c.is_struct) {
            CarrierValue args[2] = {acc[k], c.value};
            acc[k] = eval_scalar(e->dot, args, ctx);
            written[k] = true;
          }
        }
      }
      SparseVector out;
      out.reserve(o);
      for (size_t k = 0; k < o; ++k) out.push_back({acc[k], !written[k], coll[k]});
      return out;
    }
  }
  return R::err(ErrKind::IllTyped, "eval_shcol: bad op");
}

}  // namespace

Result<SparseVector> eval_shcol(const SHExprPtr& e, const SparseVector& x, const ParamEnv& env,
                                const EvalOpts& opts) {
  EvalState st{&env, opts.kind, opts.arena, {}};
  return eval_rec(e, x, opts.ambient, st);
}

SparseVector vec2union(const ScalarFun& dot, const SparseVector& a, const SparseVector& b,
                       FlagsKind kind, const ParamEnv& env, const EvalOpts& opts) {
  EvalState st{&env, opts.kind, opts.arena, {}};
  SparseVector out;
  out.reserve(a.size());
  for (size_t k = 0; k < a.size(); ++k) out.push_back(cell_union(dot, a[k], b[k], kind, st));
  return out;
}

SparseVector sparsify(const hcol::DenseVector& x) {
  SparseVector out;
  out.reserve(x.size());
  for (const auto& v : x) out.push_back(Rtheta::val(v));
  return out;
}

hcol::DenseVector densify(const SparseVector& x) {
  hcol::DenseVector out;
  out.reserve(x.size());
  for (const auto& c : x) out.push_back(c.value);
  return out;
}

// ---- contracts --------------------------------------------------------------

namespace {

std::set<size_t> full_set(size_t n) {
  std::set<size_t> s;
  for (size_t i = 0; i < n; ++i) s.insert(i);
  return s;
}

Result<SparsityContract> contract_rec(const SHExprPtr& e, std::vector<uint64_t>& fam_stack) {
  using R = Result<SparsityContract>;
  auto d = dims(e);
  if (!d.ok()) return d.error();
  switch (e->op) {
    case ShOp::Embed: {
      uint64_t b = e->b.eval(fam_stack);
      if (b >= e->n) return R::err(ErrKind::IllTyped, "Embed: position out of range");
      return SparsityContract{{0}, {static_cast<size_t>(b)}};
    }
    case ShOp::Pick: {
      uint64_t b = e->b.eval(fam_stack);
      if (b >= e->n) return R::err(ErrKind::IllTyped, "Pick: position out of range");
      return SparsityContract{{static_cast<size_t>(b)}, {0}};
    }
    case ShOp::Scatter: {
      SparsityContract c;
      c.in = full_set(e->n);
      c.out.insert(e->map.image.begin(), e->map.image.end());
      return c;
    }
    case ShOp::Gather: {
      SparsityContract c;
      c.in.insert(e->map.image.begin(), e->map.image.end());
      c.out = full_set(e->m);
      return c;
    }
    case ShOp::Lift: return SparsityContract{full_set(d.value().in), full_set(d.value().out)};
    case ShOp::Pointwise: return SparsityContract{full_set(e->n), full_set(e->n)};
    case ShOp::BinOp: return SparsityContract{full_set(e->n + e->n), full_set(e->n)};
    case ShOp::Inductor: return SparsityContract{{0}, {0}};
    case ShOp::Apply2Union: {
      auto cf = contract_rec(e->f, fam_stack);
      auto cg = contract_rec(e->g, fam_stack);
      if (!cf.ok()) return cf;
      if (!cg.ok()) return cg;
      SparsityContract c = cf.value();
      c.in.insert(cg.value().in.begin(), cg.value().in.end());
      c.out.insert(cg.value().out.begin(), cg.value().out.end());
      return c;
    }
    case ShOp::SafeCast:
    case ShOp::UnSafeCast: return contract_rec(e->f, fam_stack);
    case ShOp::Compose: {
      auto cf = contract_rec(e->f, fam_stack);
      auto cg = contract_rec(e->g, fam_stack);
      if (!cf.ok()) return cf;
      if (!cg.ok()) return cg;
      return SparsityContract{cg.value().in, cf.value().out};
    }
    case ShOp::IReduction:
    case ShOp::IUnion: {
      SparsityContract c;
      for (uint64_t j = 0; j < e->fam.size; ++j) {
        fam_stack.push_back(j);
        auto cm = contract_rec(e->fam.body, fam_stack);
        fam_stack.pop_back();
        if (!cm.ok()) return cm;
        c.in.insert(cm.value().in.begin(), cm.value().in.end());
        c.out.insert(cm.value().out.begin(), cm.value().out.end());
      }
      return c;
    }
  }
  return R::err(ErrKind::IllTyped, "sparsity_contract: bad op");
}

}  // namespace

Result<SparsityContract> sparsity_contract(const SHExprPtr& e) {
  std::vector<uint64_t> fam_stack;
  return contract_rec(e, fam_stack);
}

// ---- facts -------------------------------------------------------------------

namespace {

void check_disjoint_rec(const SHExprPtr& e, std::vector<uint64_t>& fam_stack,
                        std::vector<std::string>& violations) {
  switch (e->op) {
    case ShOp::Apply2Union: {
      auto cf = contract_rec(e->f, fam_stack);
      auto cg = contract_rec(e->g, fam_stack);
      if (cf.ok() && cg.ok()) {
        for (size_t k : cf.value().out)
          if (cg.value().out.count(k))
            violations.push_back("Apply2Union members overlap at output index " + std::to_string(k));
      }
      check_disjoint_rec(e->f, fam_stack, violations);
      check_disjoint_rec(e->g, fam_stack, violations);
      return;
    }
    case ShOp::IUnion: {
      std::set<size_t> seen;
      for (uint64_t j = 0; j < e->fam.size; ++j) {
        fam_stack.push_back(j);
        auto cm = contract_rec(e->fam.body, fam_stack);
        if (cm.ok()) {
          for (size_t k : cm.value().out) {
            if (seen.count(k))
              violations.push_back("IUnion members overlap at output index " + std::to_string(k));
            seen.insert(k);
          }
        }
        check_disjoint_rec(e->fam.body, fam_stack, violations);
        fam_stack.pop_back();
      }
      return;
    }
    case ShOp::IReduction: {
      for (uint64_t j = 0; j < e->fam.size; ++j) {
        fam_stack.push_back(j);
        check_disjoint_rec(e->fam.body, fam_stack, violations);
        fam_stack.pop_back();
      }
      return;
    }
    default: break;
  }
  if (e->f) check_disjoint_rec(e->f, fam_stack, violations);
  if (e->g) check_disjoint_rec(e->g, fam_stack, violations);
}

}  // namespace

FactsReport facts_check(const SHExprPtr& e, size_t samples, uint64_t seed,
                        const std::map<std::string, size_t>& params) {
  FactsReport rep;
  auto d = dims(e);
  if (!d.ok()) {
    rep.violations.push_back("ill-typed: " + d.error().message);
    return rep;
  }
  auto c = sparsity_contract(e);
  if (!c.ok()) {
    rep.violations.push_back("no contract: " + c.error().message);
    return rep;
  }
  {
    std::vector<uint64_t> fam_stack;
    check_disjoint_rec(e, fam_stack, rep.violations);
  }
  Rng rng(seed);
  for (size_t t = 0; t < samples && rep.violations.size() < 8; ++t) {
    ParamEnv env;
    for (const auto& [name, size] : params) {
      std::vector<CarrierValue> v;
      for (size_t i = 0; i < size; ++i) v.push_back(CarrierValue(rng.rational()));
      env.vectors.emplace(name, std::move(v));
    }
    SparseVector x;
    CarrierValue sv = e->sval.materialize(CarrierKind::Rational, nullptr);
    for (size_t i = 0; i < d.value().in; ++i) {
      if (c.value().in.count(i))
        x.push_back(Rtheta::val(CarrierValue(rng.rational())));
      else
        x.push_back(Rtheta::structural(sv));
    }
    auto r = eval_shcol(e, x, env);
    if (!r.ok()) {
      rep.violations.push_back("evaluation failed on contract input: " + r.error().message);
      continue;
    }
    for (size_t k = 0; k < r.value().size(); ++k) {
      bool expect_val = c.value().out.count(k) > 0;
      if (expect_val && r.value()[k].is_struct)
        rep.violations.push_back("output " + std::to_string(k) + " structural but in out set");
      if (!expect_val && !r.value()[k].is_struct)
        rep.violations.push_back("output " + std::to_string(k) + " non-structural outside out set");
      if (r.value()[k].is_collision)
        rep.violations.push_back("collision flag set at output " + std::to_string(k));
    }
  }
  return rep;
}

SHExprPtr lift_hcol(const hcol::HExprPtr& h, CarrierLit s) { return sh_lift(h, std::move(s)); }

// ---- rewriting ----------------------------------------------------------------

namespace {

bool ct_equal(const CTExprPtr& a, const CTExprPtr& b) {
  if (!a || !b) return a == b;
  if (a->tag != b->tag) return false;
  switch (a->tag) {
    case CTExpr::Tag::Lit: return a->lit == b->lit;
    case CTExpr::Tag::Arg: return a->arg == b->arg;
    case CTExpr::Tag::ParamNth: return false;  // not needed for rule matching
    default: return ct_equal(a->a, b->a) && ct_equal(a->b, b->b);
  }
}

bool fn_is(const ScalarFun& f, const ScalarFun& model) {
  return f.arity == model.arity && ct_equal(f.body, model.body);
}

// route (total -> size) reading a window at offset: single Pick, or an IUnion
// of Embed∘Pick members
SHExprPtr pick_route(const CarrierLit& s, size_t total, size_t offset, size_t size) {
  if (size == 1) return sh_pick(s, total, IndexExpr::constant(offset));
  auto member = sh_compose(
      sh_embed(s, size, IndexExpr::fam(0)),
      sh_pick(s, total, IndexExpr::add(IndexExpr::constant(offset), IndexExpr::fam(0))));
  return sh_iunion(s, sf_plus(), size, member);
}

// route (size -> total) writing a window at offset
SHExprPtr embed_route(const CarrierLit& s, size_t total, size_t offset, size_t size) {
  if (size == 1) return sh_embed(s, total, IndexExpr::constant(offset));
  auto member = sh_compose(
      sh_embed(s, total, IndexExpr::add(IndexExpr::constant(offset), IndexExpr::fam(0))),
      sh_pick(s, size, IndexExpr::fam(0)));
  return sh_iunion(s, sf_plus(), size, member);
}

bool is_lift_of(const SHExprPtr& e, hcol::HOp op) {
  return e && e->op == ShOp::Lift && e->h->op == op;
}

}  // namespace

std::vector<ShRule> sh_builtin_rules() {
  std::vector<ShRule> rules;

  rules.push_back({"lift-compose", [](const SHExprPtr& e) -> SHExprPtr {
                     if (!is_lift_of(e, hcol::HOp::Compose)) return nullptr;
                     return sh_compose(sh_lift(e->h->f, e->sval), sh_lift(e->h->g, e->sval));
                   }});

  rules.push_back({"lift-pointwise", [](const SHExprPtr& e) -> SHExprPtr {
                     if (!is_lift_of(e, hcol::HOp::Pointwise)) return nullptr;
                     return sh_pointwise(e->sval, e->h->n, e->h->fn);
                   }});

  rules.push_back({"lift-binop", [](const SHExprPtr& e) -> SHExprPtr {
                     if (!is_lift_of(e, hcol::HOp::BinOp)) return nullptr;
                     return sh_binop(e->sval, e->h->n, e->h->fn);
                   }});

  rules.push_back({"lift-inductor", [](const SHExprPtr& e) -> SHExprPtr {
                     if (!is_lift_of(e, hcol::HOp::Inductor)) return nullptr;
                     return sh_inductor(e->sval, IndexExpr::constant(e->h->n), e->h->fn, e->h->z);
                   }});

  // lifted HCross splits into two Embed/Pick-routed branches joined by
  // Apply2Union; writes are disjoint so the union dot never fires
  rules.push_back({"cross-split", [](const SHExprPtr& e) -> SHExprPtr {
                     if (!is_lift_of(e, hcol::HOp::Cross)) return nullptr;
                     auto df = hcol::dims(e->h->f);
                     auto dg = hcol::dims(e->h->g);
                     if (!df.ok() || !dg.ok()) return nullptr;
                     size_t fi = df.value().in, fo = df.value().out;
                     size_t gi = dg.value().in, go = dg.value().out;
                     auto branch_f = sh_compose(
                         embed_route(e->sval, fo + go, 0, fo),
                         sh_compose(sh_lift(e->h->f, e->sval), pick_route(e->sval, fi + gi, 0, fi)));
                     auto branch_g = sh_compose(
                         embed_route(e->sval, fo + go, fo, go),
                         sh_compose(sh_lift(e->h->g, e->sval), pick_route(e->sval, fi + gi, fi, gi)));
                     return sh_apply2union(e->sval, sf_plus(), branch_f, branch_g);
                   }});

  // lifted right-fold-of-products polynomial pipeline becomes an IReduction
  // over a_j * x^j members; requires the coefficient vector to be a parameter
  rules.push_back({"poly-ireduction", [](const SHExprPtr& e) -> SHExprPtr {
                     if (!e || e->op != ShOp::Compose) return nullptr;
                     const SHExprPtr& lhs = e->f;
                     const SHExprPtr& rhs = e->g;
                     if (!lhs || lhs->op != ShOp::Compose || !rhs || rhs->op != ShOp::Compose)
                       return nullptr;
                     if (!is_lift_of(lhs->f, hcol::HOp::Reduction) ||
                         !is_lift_of(lhs->g, hcol::HOp::BinOp) ||
                         !is_lift_of(rhs->f, hcol::HOp::Prepend) ||
                         !is_lift_of(rhs->g, hcol::HOp::MonomialEnumerator))
                       return nullptr;
                     const auto& red = lhs->f->h;
                     const auto& bin = lhs->g->h;
                     const auto& pre = rhs->f->h;
                     const auto& mono = rhs->g->h;
                     if (!fn_is(red->fn, sf_plus()) || !(red->z == CarrierLit::zero())) return nullptr;
                     if (!fn_is(bin->fn, sf_mult())) return nullptr;
                     if (!pre->vec.is_param) return nullptr;
                     size_t m = pre->vec.length();
                     if (red->n != m || bin->n != m || pre->n != m || mono->n + 1 != m) return nullptr;
                     CarrierLit s = e->f->sval;
                     ScalarFun coef{1, ct_binary(CTExpr::Tag::Mult, ct_arg(0),
                                                 ct_param_nth(pre->vec.name, IndexExpr::fam(0)))};
                     auto member = sh_compose(
                         sh_pointwise(s, 1, coef),
                         sh_inductor(s, IndexExpr::fam(0), sf_mult(), CarrierLit::one()));
                     return sh_safecast(sh_ireduction(CarrierLit::zero(), sf_plus(), m, member));
                   }});

  // lifted infinity-norm-of-differences becomes an IReduction(max) over
  // |x_j - x_{m+j}| members, each gathering its pair with an inner IUnion
  rules.push_back({"cheb-ireduction", [](const SHExprPtr& e) -> SHExprPtr {
                     if (!e || e->op != ShOp::Compose) return nullptr;
                     if (!is_lift_of(e->f, hcol::HOp::InfinityNorm) ||
                         !is_lift_of(e->g, hcol::HOp::VMinus))
                       return nullptr;
                     size_t m = e->f->h->n;
                     if (e->g->h->n != m) return nullptr;
                     CarrierLit s = e->f->sval;
                     auto gather_pair = sh_unsafecast(sh_iunion(
                         CarrierLit::zero(), sf_plus(), 2,
                         sh_compose(sh_embed(CarrierLit::zero(), 2, IndexExpr::fam(0)),
                                    sh_pick(CarrierLit::zero(), m + m,
                                            IndexExpr::add(IndexExpr::fam(1),
                                                           IndexExpr::mul(IndexExpr::constant(m),
                                                                          IndexExpr::fam(0)))))));
                     auto member = sh_compose(
                         sh_pointwise(s, 1, sf_abs()),
                         sh_compose(sh_binop(s, 1, sf_sub()), gather_pair));
                     return sh_safecast(sh_ireduction(CarrierLit::zero(), sf_max(), m, member));
                   }});

  return rules;
}

namespace {

Result<SHExprPtr> sh_rewrite_at(const SHExprPtr& e, std::span<const size_t> path, const ShRule& rule,
                                const std::string& label) {
  using R = Result<SHExprPtr>;
  if (path.empty()) {
    SHExprPtr out = rule.apply(e);
    if (!out) return R::err(ErrKind::RewriteError, label + ": rule does not match node");
    auto din = dims(e);
    auto dout = dims(out);
    if (!dout.ok()) return R::err(ErrKind::RewriteError, label + ": rewrite result ill-typed");
    if (din.ok() && !(din.value() == dout.value()))
      return R::err(ErrKind::RewriteError, label + ": rewrite changes dimensions");
    return out;
  }
  size_t child = path.front();
  SHExpr copy = *e;
  SHExprPtr sub;
  if (child == 0)
    sub = e->f ? e->f : (e->fam.body ? e->fam.body : nullptr);
  else if (child == 1)
    sub = e->g;
  if (!sub) return R::err(ErrKind::RewriteError, label + ": path leaves the tree");
  auto r = sh_rewrite_at(sub, path.subspan(1), rule, label);
  if (!r.ok()) return r;
  if (child == 0) {
    if (e->f)
      copy.f = r.value();
    else
      copy.fam.body = r.value();
  } else {
    copy.g = r.value();
  }
  return std::make_shared<const SHExpr>(std::move(copy));
}

}  // namespace

Result<SHExprPtr> apply_sh_rewrites(const SHExprPtr& e, std::span<const hcol::TraceStep> trace,
                                    std::span<const ShRule> rules) {
  using R = Result<SHExprPtr>;
  SHExprPtr cur = e;
  size_t step_no = 0;
  for (const auto& step : trace) {
    ++step_no;
    const ShRule* rule = nullptr;
    for (const auto& r : rules)
      if (r.name == step.rule) {
        rule = &r;
        break;
      }
    std::string label = "step " + std::to_string(step_no) + " (" + step.rule + ")";
    if (!rule) return R::err(ErrKind::RewriteError, label + ": unknown rule");
    auto next = sh_rewrite_at(cur, step.path, *rule, label);
    if (!next.ok()) return next;
    cur = next.value();
  }
  return cur;
}

Result<hcol::EquivVerdict> check_sh_equiv(const SHExprPtr& e1, const SHExprPtr& e2, size_t samples,
                                          uint64_t seed, const std::map<std::string, size_t>& params) {
  using R = Result<hcol::EquivVerdict>;
  auto d1 = dims(e1), d2 = dims(e2);
  if (!d1.ok()) return d1.error();
  if (!d2.ok()) return d2.error();
  if (!(d1.value() == d2.value())) return R::err(ErrKind::DimMismatch, "dims differ");
  Rng rng(seed);
  for (size_t t = 0; t < samples; ++t) {
    ParamEnv env;
    for (const auto& [name, size] : params) {
      std::vector<CarrierValue> v;
      for (size_t i = 0; i < size; ++i) v.push_back(CarrierValue(rng.rational()));
      env.vectors.emplace(name, std::move(v));
    }
    SparseVector x;
    for (size_t i = 0; i < d1.value().in; ++i) x.push_back(Rtheta::val(CarrierValue(rng.rational())));
    auto r1 = eval_shcol(e1, x, env);
    auto r2 = eval_shcol(e2, x, env);
    if (!r1.ok()) return r1.error();
    if (!r2.ok()) return r2.error();
    hcol::DenseVector v1 = densify(r1.value()), v2 = densify(r2.value());
    bool same = v1.size() == v2.size();
    for (size_t i = 0; same && i < v1.size(); ++i) same = v1[i].equals(v2[i]);
    if (!same) {
      hcol::EquivVerdict v;
      v.equal = false;
      v.cex = hcol::Counterexample{densify(x), v1, v2};
      return v;
    }
  }
  return hcol::EquivVerdict{};
}

Result<hcol::EquivVerdict> check_sh_vs_hcol(const SHExprPtr& sh, const hcol::HExprPtr& h, size_t samples,
                                            uint64_t seed, const std::map<std::string, size_t>& params) {
  using R = Result<hcol::EquivVerdict>;
  auto ds = dims(sh);
  auto dh = hcol::dims(h);
  if (!ds.ok()) return ds.error();
  if (!dh.ok()) return dh.error();
  if (!(ds.value() == dh.value())) return R::err(ErrKind::DimMismatch, "dims differ");
  Rng rng(seed);
  for (size_t t = 0; t < samples; ++t) {
    ParamEnv env;
    for (const auto& [name, size] : params) {
      std::vector<CarrierValue> v;
      for (size_t i = 0; i < size; ++i) v.push_back(CarrierValue(rng.rational()));
      env.vectors.emplace(name, std::move(v));
    }
    hcol::DenseVector x;
    for (size_t i = 0; i < dh.value().in; ++i) x.push_back(CarrierValue(rng.rational()));
    auto rs = eval_shcol(sh, sparsify(x), env);
    auto rh = hcol::eval_hcol(h, x, env, CarrierKind::Rational);
    if (!rs.ok()) return rs.error();
    if (!rh.ok()) return rh.error();
    hcol::DenseVector vs = densify(rs.value());
    bool same = vs.size() == rh.value().size();
    for (size_t i = 0; same && i < vs.size(); ++i) same = vs[i].equals(rh.value()[i]);
    if (!same) {
      hcol::EquivVerdict v;
      v.equal = false;
      v.cex = hcol::Counterexample{x, vs, rh.value()};
      return v;
    }
  }
  return hcol::EquivVerdict{};
}

std::string to_string(const SHExprPtr& e) {
  switch (e->op) {
    case ShOp::Embed: return "(embed " + std::to_string(e->n) + " " + e->b.to_string() + ")";
    case ShOp::Pick: return "(pick " + std::to_string(e->n) + " " + e->b.to_string() + ")";
    case ShOp::Scatter: return "(scatter " + std::to_string(e->n) + " " + std::to_string(e->m) + ")";
    case ShOp::Gather: return "(gather " + std::to_string(e->n) + " " + std::to_string(e->m) + ")";
    case ShOp::Lift: return "(lift " + hcol::to_string(e->h) + ")";
    case ShOp::Pointwise: return "(spointwise " + std::to_string(e->n) + ")";
    case ShOp::BinOp: return "(sbinop " + std::to_string(e->n) + ")";
    case ShOp::Inductor: return "(sinductor " + e->count.to_string() + ")";
    case ShOp::Apply2Union:
      return "(apply2union " + to_string(e->f) + " " + to_string(e->g) + ")";
    case ShOp::SafeCast: return "(safecast " + to_string(e->f) + ")";
    case ShOp::UnSafeCast: return "(unsafecast " + to_string(e->f) + ")";
    case ShOp::Compose: return "(scompose " + to_string(e->f) + " " + to_string(e->g) + ")";
    case ShOp::IReduction:
      return "(ireduction " + std::to_string(e->fam.size) + " " + to_string(e->fam.body) + ")";
    case ShOp::IUnion:
      return "(iunion " + std::to_string(e->fam.size) + " " + to_string(e->fam.body) + ")";
  }
  return "?";
}

}  // namespace hcolc::sigma
