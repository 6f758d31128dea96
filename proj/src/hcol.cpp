#include "hcolc/hcol.hpp"

#include <cassert>

#include "hcolc/rng.hpp"

namespace hcolc {

IndexExpr IndexExpr::add(IndexExpr x, IndexExpr y) {
  if (x.tag == Tag::Const && y.tag == Tag::Const) return constant(x.k + y.k);
  IndexExpr r;
  r.tag = Tag::Add;
  r.a = std::make_shared<const IndexExpr>(std::move(x));
  r.b = std::make_shared<const IndexExpr>(std::move(y));
  return r;
}

IndexExpr IndexExpr::mul(IndexExpr x, IndexExpr y) {
  if (x.tag == Tag::Const && y.tag == Tag::Const) return constant(x.k * y.k);
  IndexExpr r;
  r.tag = Tag::Mul;
  r.a = std::make_shared<const IndexExpr>(std::move(x));
  r.b = std::make_shared<const IndexExpr>(std::move(y));
  return r;
}

uint64_t IndexExpr::eval(std::span<const uint64_t> fam_stack) const {
  switch (tag) {
    case Tag::Const: return k;
    case Tag::FamVar:
      if (k >= fam_stack.size()) throw std::logic_error("IndexExpr: unbound family variable");
      return fam_stack[fam_stack.size() - 1 - k];
    case Tag::Add: return a->eval(fam_stack) + b->eval(fam_stack);
    case Tag::Mul: return a->eval(fam_stack) * b->eval(fam_stack);
  }
  return 0;
}

std::string IndexExpr::to_string() const {
  switch (tag) {
    case Tag::Const: return std::to_string(k);
    case Tag::FamVar: return "$" + std::to_string(k);
    case Tag::Add: return "(+ " + a->to_string() + " " + b->to_string() + ")";
    case Tag::Mul: return "(* " + a->to_string() + " " + b->to_string() + ")";
  }
  return "?";
}

CTExprPtr ct_lit(CarrierLit v) {
  auto e = std::make_shared<CTExpr>();
  e->tag = CTExpr::Tag::Lit;
  e->lit = std::move(v);
  return e;
}

CTExprPtr ct_arg(uint32_t k) {
  auto e = std::make_shared<CTExpr>();
  e->tag = CTExpr::Tag::Arg;
  e->arg = k;
  return e;
}

CTExprPtr ct_param_nth(std::string param, IndexExpr idx) {
  auto e = std::make_shared<CTExpr>();
  e->tag = CTExpr::Tag::ParamNth;
  e->param = std::move(param);
  e->pidx = std::move(idx);
  return e;
}

CTExprPtr ct_unary(CTExpr::Tag t, CTExprPtr a) {
  auto e = std::make_shared<CTExpr>();
  e->tag = t;
  e->a = std::move(a);
  return e;
}

CTExprPtr ct_binary(CTExpr::Tag t, CTExprPtr a, CTExprPtr b) {
  auto e = std::make_shared<CTExpr>();
  e->tag = t;
  e->a = std::move(a);
  e->b = std::move(b);
  return e;
}

namespace {
ScalarFun binf(CTExpr::Tag t) { return ScalarFun{2, ct_binary(t, ct_arg(0), ct_arg(1))}; }
}  // namespace

ScalarFun sf_plus() { return binf(CTExpr::Tag::Plus); }
ScalarFun sf_sub() { return binf(CTExpr::Tag::Sub); }
ScalarFun sf_mult() { return binf(CTExpr::Tag::Mult); }
ScalarFun sf_min() { return binf(CTExpr::Tag::Min); }
ScalarFun sf_max() { return binf(CTExpr::Tag::Max); }
ScalarFun sf_zless() { return binf(CTExpr::Tag::ZLess); }
ScalarFun sf_abs() { return ScalarFun{1, ct_unary(CTExpr::Tag::Abs, ct_arg(0))}; }

namespace {

CarrierValue eval_ct(const CTExprPtr& e, std::span<const CarrierValue> args, const ScalarEvalCtx& ctx) {
  switch (e->tag) {
    case CTExpr::Tag::Lit: return e->lit.materialize(ctx.kind, ctx.arena);
    case CTExpr::Tag::Arg:
      if (e->arg >= args.size()) throw std::logic_error("scalar fn: argument index out of range");
      return args[e->arg];
    case CTExpr::Tag::ParamNth: {
      if (!ctx.params) throw std::logic_error("scalar fn: no parameter environment");
      auto it = ctx.params->vectors.find(e->param);
      if (it == ctx.params->vectors.end())
        throw std::logic_error("scalar fn: unbound parameter " + e->param);
      uint64_t i = e->pidx.eval(ctx.fam_stack);
      if (i >= it->second.size()) throw std::logic_error("scalar fn: parameter index out of range");
      return it->second[i];
    }
    case CTExpr::Tag::Abs: return ct_arith(CtOp::Abs, eval_ct(e->a, args, ctx));
    case CTExpr::Tag::Plus:
      return ct_arith(CtOp::Plus, eval_ct(e->a, args, ctx), eval_ct(e->b, args, ctx));
    case CTExpr::Tag::Sub:
      return ct_arith(CtOp::Sub, eval_ct(e->a, args, ctx), eval_ct(e->b, args, ctx));
    case CTExpr::Tag::Mult:
      return ct_arith(CtOp::Mult, eval_ct(e->a, args, ctx), eval_ct(e->b, args, ctx));
    case CTExpr::Tag::Min:
      return ct_arith(CtOp::Min, eval_ct(e->a, args, ctx), eval_ct(e->b, args, ctx));
    case CTExpr::Tag::Max:
      return ct_arith(CtOp::Max, eval_ct(e->a, args, ctx), eval_ct(e->b, args, ctx));
    case CTExpr::Tag::ZLess:
      return ct_arith(CtOp::ZLess, eval_ct(e->a, args, ctx), eval_ct(e->b, args, ctx));
  }
  throw std::logic_error("scalar fn: bad tag");
}

}  // namespace

CarrierValue eval_scalar(const ScalarFun& f, std::span<const CarrierValue> args, const ScalarEvalCtx& ctx) {
  return eval_ct(f.body, args, ctx);
}

void collect_ct_params(const CTExprPtr& e, std::map<std::string, size_t>& out) {
  if (!e) return;
  if (e->tag == CTExpr::Tag::ParamNth) {
    size_t lo = 0;
    if (e->pidx.is_const()) lo = static_cast<size_t>(e->pidx.k) + 1;
    auto [it, inserted] = out.emplace(e->param, lo);
    if (!inserted && it->second < lo) it->second = lo;
  }
  collect_ct_params(e->a, out);
  collect_ct_params(e->b, out);
}

namespace hcol {

namespace {
HExprPtr mk(HExpr e) { return std::make_shared<const HExpr>(std::move(e)); }
}  // namespace

HExprPtr h_pointwise(size_t n, ScalarFun f) { return mk({HOp::Pointwise, n, std::move(f), {}, {}, nullptr, nullptr}); }
HExprPtr h_atomic(ScalarFun f) { return mk({HOp::Atomic, 1, std::move(f), {}, {}, nullptr, nullptr}); }
HExprPtr h_scalarprod(size_t n) { return mk({HOp::ScalarProd, n, {}, {}, {}, nullptr, nullptr}); }
HExprPtr h_binop(size_t n, ScalarFun f) { return mk({HOp::BinOp, n, std::move(f), {}, {}, nullptr, nullptr}); }
HExprPtr h_reduction(size_t n, ScalarFun f, CarrierLit z) {
  return mk({HOp::Reduction, n, std::move(f), std::move(z), {}, nullptr, nullptr});
}
HExprPtr h_evalpolynomial(VecOperand a) {
  return mk({HOp::EvalPolynomial, 1, {}, {}, std::move(a), nullptr, nullptr});
}
HExprPtr h_prepend(VecOperand a, size_t n) { return mk({HOp::Prepend, n, {}, {}, std::move(a), nullptr, nullptr}); }
HExprPtr h_append(VecOperand a, size_t n) { return mk({HOp::Append, n, {}, {}, std::move(a), nullptr, nullptr}); }
HExprPtr h_monomial_enumerator(size_t n) { return mk({HOp::MonomialEnumerator, n, {}, {}, {}, nullptr, nullptr}); }
HExprPtr h_inductor(size_t n, ScalarFun f, CarrierLit z) {
  return mk({HOp::Inductor, n, std::move(f), std::move(z), {}, nullptr, nullptr});
}
HExprPtr h_induction(size_t n, ScalarFun f, CarrierLit z) {
  return mk({HOp::Induction, n, std::move(f), std::move(z), {}, nullptr, nullptr});
}
HExprPtr h_infinity_norm(size_t n) { return mk({HOp::InfinityNorm, n, {}, {}, {}, nullptr, nullptr}); }
HExprPtr h_chebyshev_distance(size_t n) { return mk({HOp::ChebyshevDistance, n, {}, {}, {}, nullptr, nullptr}); }
HExprPtr h_vminus(size_t n) { return mk({HOp::VMinus, n, {}, {}, {}, nullptr, nullptr}); }
HExprPtr h_cross(HExprPtr f, HExprPtr g) { return mk({HOp::Cross, 0, {}, {}, {}, std::move(f), std::move(g)}); }
HExprPtr h_stack(HExprPtr f, HExprPtr g) { return mk({HOp::Stack, 0, {}, {}, {}, std::move(f), std::move(g)}); }
HExprPtr h_compose(HExprPtr f, HExprPtr g) { return mk({HOp::Compose, 0, {}, {}, {}, std::move(f), std::move(g)}); }
HExprPtr h_tless(HExprPtr f, HExprPtr g) { return mk({HOp::TLess, 0, {}, {}, {}, std::move(f), std::move(g)}); }

Result<Dims> dims(const HExprPtr& e) {
  using R = Result<Dims>;
  switch (e->op) {
    case HOp::Pointwise: return Dims{e->n, e->n};
    case HOp::Atomic: return Dims{1, 1};
    case HOp::ScalarProd: return Dims{e->n + e->n, 1};
    case HOp::BinOp: return Dims{e->n + e->n, e->n};
    case HOp::Reduction: return Dims{e->n, 1};
    case HOp::EvalPolynomial: return Dims{1, 1};
    case HOp::Prepend: return Dims{e->n, e->vec.length() + e->n};
    case HOp::Append: return Dims{e->n, e->n + e->vec.length()};
    case HOp::MonomialEnumerator: return Dims{1, e->n + 1};
    case HOp::Inductor: return Dims{1, 1};
    case HOp::Induction: return Dims{1, e->n};
    case HOp::InfinityNorm: return Dims{e->n, 1};
    case HOp::ChebyshevDistance: return Dims{e->n + e->n, 1};
    case HOp::VMinus: return Dims{e->n + e->n, e->n};
    case HOp::Cross: {
      auto df = dims(e->f);
      auto dg = dims(e->g);
      if (!df.ok()) return df;
      if (!dg.ok()) return dg;
      return Dims{df.value().in + dg.value().in, df.value().out + dg.value().out};
    }
    case HOp::Stack: {
      auto df = dims(e->f);
      auto dg = dims(e->g);
      if (!df.ok()) return df;
      if (!dg.ok()) return dg;
      if (df.value().in != dg.value().in)
        return R::err(ErrKind::IllTyped, "HStack: operand input dims differ");
      return Dims{df.value().in, df.value().out + dg.value().out};
    }
    case HOp::Compose: {
      auto df = dims(e->f);
      auto dg = dims(e->g);
      if (!df.ok()) return df;
      if (!dg.ok()) return dg;
      if (dg.value().out != df.value().in)
        return R::err(ErrKind::IllTyped, "HCompose: inner output != outer input");
      return Dims{dg.value().in, df.value().out};
    }
    case HOp::TLess: {
      auto df = dims(e->f);
      auto dg = dims(e->g);
      if (!df.ok()) return df;
      if (!dg.ok()) return dg;
      if (df.value().out != dg.value().out)
        return R::err(ErrKind::IllTyped, "HTLess: operand output dims differ");
      return Dims{df.value().in + dg.value().in, df.value().out};
    }
  }
  return R::err(ErrKind::IllTyped, "dims: bad op");
}

namespace {

Result<std::vector<CarrierValue>> materialize_vec(const VecOperand& v, const ParamEnv& env,
                                                  CarrierKind kind, sym::SexprArena* arena) {
  using R = Result<std::vector<CarrierValue>>;
  if (!v.is_param) {
    std::vector<CarrierValue> out;
    out.reserve(v.lit.size());
    for (const auto& l : v.lit) out.push_back(l.materialize(kind, arena));
    return out;
  }
  auto it = env.vectors.find(v.name);
  if (it == env.vectors.end()) return R::err(ErrKind::LookupError, "unbound parameter " + v.name);
  if (it->second.size() != v.param_size)
    return R::err(ErrKind::DimMismatch, "parameter " + v.name + " has wrong length");
  return it->second;
}

}  // namespace

Result<DenseVector> eval_hcol(const HExprPtr& e, std::span<const CarrierValue> x, const ParamEnv& env,
                              CarrierKind kind, sym::SexprArena* arena) {
  using R = Result<DenseVector>;
  auto d = dims(e);
  if (!d.ok()) return d.error();
  if (x.size() != d.value().in)
    return R::err(ErrKind::DimMismatch,
                  "expected input length " + std::to_string(d.value().in) + ", got " +
                      std::to_string(x.size()));
  ScalarEvalCtx ctx{&env, {}, kind, arena};
  auto zero = [&] { return CarrierValue::zero(kind, arena); };
  auto one = [&] { return CarrierValue::one(kind, arena); };

  switch (e->op) {
    case HOp::Pointwise: {
      DenseVector out;
      out.reserve(e->n);
      for (size_t j = 0; j < e->n; ++j) {
        CarrierValue args[1] = {x[j]};
        out.push_back(eval_scalar(e->fn, args, ctx));
      }
      return out;
    }
    case HOp::Atomic: {
      CarrierValue args[1] = {x[0]};
      return DenseVector{eval_scalar(e->fn, args, ctx)};
    }
    case HOp::ScalarProd: {
      CarrierValue acc = zero();
      for (size_t i = e->n; i-- > 0;)
        acc = ct_arith(CtOp::Plus, ct_arith(CtOp::Mult, x[i], x[e->n + i]), acc);
      return DenseVector{acc};
    }
    case HOp::BinOp: {
      DenseVector out;
      out.reserve(e->n);
      for (size_t j = 0; j < e->n; ++j) {
        CarrierValue args[2] = {x[j], x[e->n + j]};
        out.push_back(eval_scalar(e->fn, args, ctx));
      }
      return out;
    }
    case HOp::Reduction: {
      CarrierValue acc = e->z.materialize(kind, arena);
      for (size_t i = e->n; i-- > 0;) {
        CarrierValue args[2] = {x[i], acc};
        acc = eval_scalar(e->fn, args, ctx);
      }
      return DenseVector{acc};
    }
    case HOp::EvalPolynomial: {
      auto av = materialize_vec(e->vec, env, kind, arena);
      if (!av.ok()) return av.error();
      const auto& a = av.value();
      // mirrors the scalar-product-of-monomials decomposition exactly
      std::vector<CarrierValue> mono;
      mono.reserve(a.size());
      CarrierValue p = one();
      for (size_t k = 0; k < a.size(); ++k) {
        if (k > 0) p = ct_arith(CtOp::Mult, p, x[0]);
        mono.push_back(p);
      }
      CarrierValue acc = zero();
      for (size_t i = a.size(); i-- > 0;)
        acc = ct_arith(CtOp::Plus, ct_arith(CtOp::Mult, a[i], mono[i]), acc);
      return DenseVector{acc};
    }
    case HOp::Prepend: {
      auto av = materialize_vec(e->vec, env, kind, arena);
      if (!av.ok()) return av.error();
      DenseVector out = av.value();
      out.insert(out.end(), x.begin(), x.end());
      return out;
    }
    case HOp::Append: {
      auto av = materialize_vec(e->vec, env, kind, arena);
      if (!av.ok()) return av.error();
      DenseVector out(x.begin(), x.end());
      out.insert(out.end(), av.value().begin(), av.value().end());
      return out;
    }
    case HOp::MonomialEnumerator: {
      DenseVector out;
      out.reserve(e->n + 1);
      CarrierValue p = one();
      out.push_back(p);
      for (size_t k = 1; k <= e->n; ++k) {
        p = ct_arith(CtOp::Mult, p, x[0]);
        out.push_back(p);
      }
      return out;
    }
    case HOp::Inductor: {
      CarrierValue acc = e->z.materialize(kind, arena);
      for (size_t k = 0; k < e->n; ++k) {
        CarrierValue args[2] = {acc, x[0]};
        acc = eval_scalar(e->fn, args, ctx);
      }
      return DenseVector{acc};
    }
    case HOp::Induction: {
      DenseVector out;
      out.reserve(e->n);
      CarrierValue acc = e->z.materialize(kind, arena);
      for (size_t k = 0; k < e->n; ++k) {
        out.push_back(acc);
        CarrierValue args[2] = {acc, x[0]};
        acc = eval_scalar(e->fn, args, ctx);
      }
      return out;
    }
    case HOp::InfinityNorm: {
      CarrierValue acc = zero();
      for (size_t i = e->n; i-- > 0;) acc = ct_arith(CtOp::Max, ct_arith(CtOp::Abs, x[i]), acc);
      return DenseVector{acc};
    }
    case HOp::ChebyshevDistance: {
      CarrierValue acc = zero();
      for (size_t i = e->n; i-- > 0;)
        acc = ct_arith(CtOp::Max, ct_arith(CtOp::Abs, ct_arith(CtOp::Sub, x[i], x[e->n + i])), acc);
      return DenseVector{acc};
    }
    case HOp::VMinus: {
      DenseVector out;
      out.reserve(e->n);
      for (size_t i = 0; i < e->n; ++i) out.push_back(ct_arith(CtOp::Sub, x[i], x[e->n + i]));
      return out;
    }
    case HOp::Cross: {
      size_t fi = dims(e->f).value().in;
      auto rf = eval_hcol(e->f, x.subspan(0, fi), env, kind, arena);
      if (!rf.ok()) return rf;
      auto rg = eval_hcol(e->g, x.subspan(fi), env, kind, arena);
      if (!rg.ok()) return rg;
      DenseVector out = rf.value();
      out.insert(out.end(), rg.value().begin(), rg.value().end());
      return out;
    }
    case HOp::Stack: {
      auto rf = eval_hcol(e->f, x, env, kind, arena);
      if (!rf.ok()) return rf;
      auto rg = eval_hcol(e->g, x, env, kind, arena);
      if (!rg.ok()) return rg;
      DenseVector out = rf.value();
      out.insert(out.end(), rg.value().begin(), rg.value().end());
      return out;
    }
    case HOp::Compose: {
      auto rg = eval_hcol(e->g, x, env, kind, arena);
      if (!rg.ok()) return rg;
      return eval_hcol(e->f, rg.value(), env, kind, arena);
    }
    case HOp::TLess: {
      size_t fi = dims(e->f).value().in;
      auto rf = eval_hcol(e->f, x.subspan(0, fi), env, kind, arena);
      if (!rf.ok()) return rf;
      auto rg = eval_hcol(e->g, x.subspan(fi), env, kind, arena);
      if (!rg.ok()) return rg;
      DenseVector out;
      out.reserve(rf.value().size());
      for (size_t i = 0; i < rf.value().size(); ++i)
        out.push_back(ct_arith(CtOp::ZLess, rf.value()[i], rg.value()[i]));
      return out;
    }
  }
  return R::err(ErrKind::IllTyped, "eval_hcol: bad op");
}

namespace {

void collect_rec(const HExprPtr& e, std::map<std::string, size_t>& out) {
  if (!e) return;
  if (e->vec.is_param) {
    auto [it, inserted] = out.emplace(e->vec.name, e->vec.param_size);
    if (!inserted && it->second < e->vec.param_size) it->second = e->vec.param_size;
  }
  if (e->fn.body) collect_ct_params(e->fn.body, out);
  collect_rec(e->f, out);
  collect_rec(e->g, out);
}

}  // namespace

std::map<std::string, size_t> collect_params(const HExprPtr& e) {
  std::map<std::string, size_t> out;
  collect_rec(e, out);
  return out;
}

// ---- breakdown rules ------------------------------------------------------

std::vector<BreakdownRule> builtin_rules() {
  std::vector<BreakdownRule> rules;
  // scalar product = right-fold-plus of pointwise products
  rules.push_back({"scalarprod-reduction", [](const HExprPtr& e) -> HExprPtr {
                     if (e->op != HOp::ScalarProd) return nullptr;
                     return h_compose(h_reduction(e->n, sf_plus(), CarrierLit::zero()),
                                      h_binop(e->n, sf_mult()));
                   }});
  // polynomial evaluation = scalar product of coefficients with monomials
  rules.push_back({"evalpoly-scalarprod", [](const HExprPtr& e) -> HExprPtr {
                     if (e->op != HOp::EvalPolynomial) return nullptr;
                     size_t m = e->vec.length();
                     if (m == 0) return nullptr;
                     return h_compose(h_scalarprod(m),
                                      h_compose(h_prepend(e->vec, m), h_monomial_enumerator(m - 1)));
                   }});
  // chebyshev distance = infinity norm of the pointwise difference
  rules.push_back({"chebyshev-norm", [](const HExprPtr& e) -> HExprPtr {
                     if (e->op != HOp::ChebyshevDistance) return nullptr;
                     return h_compose(h_infinity_norm(e->n), h_vminus(e->n));
                   }});
  // pair comparison = pointwise zless after the cartesian product
  rules.push_back({"tless-cross", [](const HExprPtr& e) -> HExprPtr {
                     if (e->op != HOp::TLess) return nullptr;
                     auto dfo = dims(e->f);
                     if (!dfo.ok()) return nullptr;
                     return h_compose(h_binop(dfo.value().out, sf_zless()), h_cross(e->f, e->g));
                   }});
  return rules;
}

namespace {

Result<HExprPtr> rewrite_at(const HExprPtr& e, std::span<const size_t> path, const BreakdownRule& rule,
                            const std::string& step_label) {
  using R = Result<HExprPtr>;
  if (path.empty()) {
    HExprPtr out = rule.apply(e);
    if (!out) return R::err(ErrKind::RewriteError, step_label + ": rule does not match node");
    auto din = dims(e);
    auto dout = dims(out);
    if (!dout.ok()) return R::err(ErrKind::RewriteError, step_label + ": rewrite result ill-typed");
    if (din.ok() && !(din.value() == dout.value()))
      return R::err(ErrKind::RewriteError, step_label + ": rewrite changes dimensions");
    return out;
  }
  size_t child = path.front();
  const HExprPtr& sub = child == 0 ? e->f : e->g;
  if (child > 1 || !sub) return R::err(ErrKind::RewriteError, step_label + ": path leaves the tree");
  auto r = rewrite_at(sub, path.subspan(1), rule, step_label);
  if (!r.ok()) return r;
  HExpr copy = *e;
  if (child == 0)
    copy.f = r.value();
  else
    copy.g = r.value();
  return std::make_shared<const HExpr>(std::move(copy));
}

}  // namespace

Result<HExprPtr> apply_breakdown_trace(const HExprPtr& e, std::span<const TraceStep> trace,
                                       std::span<const BreakdownRule> rules) {
  using R = Result<HExprPtr>;
  HExprPtr cur = e;
  size_t step_no = 0;
  for (const auto& step : trace) {
    ++step_no;
    const BreakdownRule* rule = nullptr;
    for (const auto& r : rules)
      if (r.name == step.rule) {
        rule = &r;
        break;
      }
    std::string label = "step " + std::to_string(step_no) + " (" + step.rule + ")";
    if (!rule) return R::err(ErrKind::RewriteError, label + ": unknown rule");
    auto next = rewrite_at(cur, step.path, *rule, label);
    if (!next.ok()) return next;
    cur = next.value();
  }
  return cur;
}

// ---- extensional equivalence ----------------------------------------------

Result<EquivVerdict> check_extensional_equiv(const HExprPtr& e1, const HExprPtr& e2, size_t samples,
                                             uint64_t seed) {
  using R = Result<EquivVerdict>;
  auto d1 = dims(e1);
  auto d2 = dims(e2);
  if (!d1.ok()) return d1.error();
  if (!d2.ok()) return d2.error();
  if (!(d1.value() == d2.value()))
    return R::err(ErrKind::DimMismatch, "operators have different dimensions");

  std::map<std::string, size_t> params = collect_params(e1);
  for (auto& [k, v] : collect_params(e2)) {
    auto [it, inserted] = params.emplace(k, v);
    if (!inserted && it->second < v) it->second = v;
  }

  Rng rng(seed);
  for (size_t s = 0; s < samples; ++s) {
    ParamEnv env;
    for (auto& [name, size] : params) {
      std::vector<CarrierValue> v;
      v.reserve(size);
      for (size_t i = 0; i < size; ++i) v.push_back(CarrierValue(rng.rational()));
      env.vectors.emplace(name, std::move(v));
    }
    DenseVector x;
    x.reserve(d1.value().in);
    for (size_t i = 0; i < d1.value().in; ++i) x.push_back(CarrierValue(rng.rational()));

    auto r1 = eval_hcol(e1, x, env, CarrierKind::Rational);
    auto r2 = eval_hcol(e2, x, env, CarrierKind::Rational);
    if (!r1.ok()) return r1.error();
    if (!r2.ok()) return r2.error();
    bool same = r1.value().size() == r2.value().size();
    for (size_t i = 0; same && i < r1.value().size(); ++i)
      same = r1.value()[i].equals(r2.value()[i]);
    if (!same) {
      EquivVerdict v;
      v.equal = false;
      v.cex = Counterexample{x, r1.value(), r2.value()};
      return v;
    }
  }
  return EquivVerdict{};
}

std::string to_string(const HExprPtr& e) {
  switch (e->op) {
    case HOp::Pointwise: return "(pointwise " + std::to_string(e->n) + ")";
    case HOp::Atomic: return "(atomic)";
    case HOp::ScalarProd: return "(scalarprod " + std::to_string(e->n) + ")";
    case HOp::BinOp: return "(binop " + std::to_string(e->n) + ")";
    case HOp::Reduction: return "(reduction " + std::to_string(e->n) + ")";
    case HOp::EvalPolynomial: return "(evalpoly)";
    case HOp::Prepend: return "(prepend)";
    case HOp::Append: return "(append)";
    case HOp::MonomialEnumerator: return "(monomial " + std::to_string(e->n) + ")";
    case HOp::Inductor: return "(inductor " + std::to_string(e->n) + ")";
    case HOp::Induction: return "(induction " + std::to_string(e->n) + ")";
    case HOp::InfinityNorm: return "(infnorm " + std::to_string(e->n) + ")";
    case HOp::ChebyshevDistance: return "(chebyshev " + std::to_string(e->n) + ")";
    case HOp::VMinus: return "(vminus " + std::to_string(e->n) + ")";
    case HOp::Cross: return "(cross " + to_string(e->f) + " " + to_string(e->g) + ")";
    case HOp::Stack: return "(stack " + to_string(e->f) + " " + to_string(e->g) + ")";
    case HOp::Compose: return "(compose " + to_string(e->f) + " " + to_string(e->g) + ")";
    case HOp::TLess: return "(tless " + to_string(e->f) + " " + to_string(e->g) + ")";
  }
  return "?";
}

}  // namespace hcol
}  // namespace hcolc
