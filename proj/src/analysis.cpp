#include "hcolc/analysis.hpp"

namespace hcolc::analysis {

using namespace hcolc::dhcol;

// ---- symbolic execution ---------------------------------------------------------

Result<SymbolicResult> symbolic_exec(const lowering::LoweredProgram& prog, uint64_t out_offset) {
  using R = Result<SymbolicResult>;
  SymbolicResult res;
  res.arena = std::make_shared<sym::SexprArena>();

  // memory of fresh variables, scanned in ascending (address, offset) order:
  // globals first, then the input block
  ParamEnv env;
  uint32_t next_var = 0;
  for (const auto& g : prog.globals.items) {
    std::vector<CarrierValue> v;
    for (uint64_t j = 0; j < g.type.size; ++j)
      v.push_back(CarrierValue(SymRef{res.arena.get(), res.arena->var(next_var++)}));
    env.vectors.emplace(g.param, std::move(v));
  }
  mshcol::MemBlock input;
  for (uint64_t j = 0; j < prog.input_dim; ++j)
    input.set(j, CarrierValue(SymRef{res.arena.get(), res.arena->var(next_var++)}));
  res.num_vars = next_var;

  auto inst = lowering::instantiate(prog, env, input, CarrierKind::Symbolic, res.arena.get());
  DEvalOpts opts{kSymbolicKind, res.arena.get(), nullptr};
  auto r = eval_dshoperator(inst.ctx, prog.op, inst.mem, estimate_fuel(prog.op), opts);
  if (!r.has_value()) return R::err(ErrKind::EvalError, "fuel exhausted despite estimate");
  if (!r->ok()) return r->error();
  const mshcol::MemBlock* y = r->value().lookup_ref(inst.y_addr);
  if (!y) return R::err(ErrKind::EvalError, "output block missing");
  auto cell = y->lookup(out_offset);
  if (!cell) return R::err(ErrKind::SparseRead, "output cell not written");
  res.root = cell->symbolic().node;
  return res;
}

// ---- interval model ----------------------------------------------------------------

Interval interval_point(Rational v) { return {v, v, Rational()}; }
Interval interval_of(Rational lo, Rational hi) { return {std::move(lo), std::move(hi), Rational()}; }

namespace {

const Rational& unit_roundoff() {
  static const Rational u(BigInt(1), BigInt(1).shl(53));
  return u;
}

Rational maxabs(const Interval& i) {
  Rational a = i.lo.abs(), b = i.hi.abs();
  return a < b ? b : a;
}

Rational rmin(const Rational& a, const Rational& b) { return a < b ? a : b; }
Rational rmax(const Rational& a, const Rational& b) { return a < b ? b : a; }

Interval rounded(Rational lo, Rational hi, Rational propagated) {
  Interval out{std::move(lo), std::move(hi), Rational()};
  out.err = propagated + unit_roundoff() * (maxabs(out) + propagated);
  return out;
}

}  // namespace

Result<Interval> interval_error_bound(const sym::SexprArena& arena, uint32_t root,
                                      const std::map<uint32_t, Interval>& env,
                                      std::map<uint32_t, Interval>* per_subterm) {
  using R = Result<Interval>;
  auto remember = [&](Result<Interval> r) {
    if (r.ok() && per_subterm) (*per_subterm)[root] = r.value();
    return r;
  };
  const sym::SNode& n = arena.at(root);
  switch (n.op) {
    case sym::SOp::Zero: return remember(interval_point(Rational()));
    case sym::SOp::One: return remember(interval_point(Rational(1)));
    case sym::SOp::Var: {
      auto it = env.find(n.var);
      if (it == env.end())
        return R::err(ErrKind::UnboundedRange, "no range for variable " + std::to_string(n.var));
      return remember(it->second);
    }
    case sym::SOp::Abs: {
      auto a = interval_error_bound(arena, n.a, env, per_subterm);
      if (!a.ok()) return a;
      const Interval& i = a.value();
      Interval out;
      if (!i.lo.is_negative()) {
        out = i;
      } else if (!i.hi.is_negative()) {
        out = {Rational(), rmax(i.lo.abs(), i.hi), i.err};
      } else {
        out = {i.hi.abs(), i.lo.abs(), i.err};
      }
      return remember(out);  // binary64 abs is exact
    }
    case sym::SOp::ZLess:
      return R::err(ErrKind::Unsupported, "comparison nodes are analyzed via the safety margin");
    default: break;
  }
  auto ra = interval_error_bound(arena, n.a, env, per_subterm);
  if (!ra.ok()) return ra;
  auto rb = interval_error_bound(arena, n.b, env, per_subterm);
  if (!rb.ok()) return rb;
  const Interval& a = ra.value();
  const Interval& b = rb.value();
  switch (n.op) {
    case sym::SOp::Plus: return remember(rounded(a.lo + b.lo, a.hi + b.hi, a.err + b.err));
    case sym::SOp::Sub: return remember(rounded(a.lo - b.hi, a.hi - b.lo, a.err + b.err));
    case sym::SOp::Mult: {
      Rational p1 = a.lo * b.lo, p2 = a.lo * b.hi, p3 = a.hi * b.lo, p4 = a.hi * b.hi;
      Rational lo = rmin(rmin(p1, p2), rmin(p3, p4));
      Rational hi = rmax(rmax(p1, p2), rmax(p3, p4));
      Rational prop = a.err * maxabs(b) + b.err * maxabs(a) + a.err * b.err;
      return remember(rounded(std::move(lo), std::move(hi), std::move(prop)));
    }
    case sym::SOp::Min: {
      // compare-and-select is exact; the selection error is bounded by the
      // larger input error
      Interval out{rmin(a.lo, b.lo), rmin(a.hi, b.hi), rmax(a.err, b.err)};
      return remember(out);
    }
    case sym::SOp::Max: {
      Interval out{rmax(a.lo, b.lo), rmax(a.hi, b.hi), rmax(a.err, b.err)};
      return remember(out);
    }
    default: break;
  }
  return R::err(ErrKind::Unsupported, "bad node");
}

Rational safety_margin(const Rational& lhs_err, const Rational& rhs_err) { return lhs_err + rhs_err; }

double safe_zless(double a, double b, double eps) { return eps < (b - a) ? 1.0 : 0.0; }

// ---- closure traces ------------------------------------------------------------------

namespace {

struct TraceBuilder {
  ClosureTrace out;

  void capture(const std::vector<DSHIndexRange>& ctx, const NExprPtr& e) {
    if (e) out.push_back({ctx, e});
  }

  void walk_aexpr(const std::vector<DSHIndexRange>& ctx, const AExprPtr& e) {
    if (!e) return;
    switch (e->op) {
      case AOp::Nth:
        capture(ctx, e->idx);
        return;
      case AOp::Abs:
        walk_aexpr(ctx, e->a);
        return;
      case AOp::Var:
      case AOp::Const: return;
      default:
        walk_aexpr(ctx, e->a);
        walk_aexpr(ctx, e->b);
        return;
    }
  }

  static std::vector<DSHIndexRange> extend(const std::vector<DSHIndexRange>& ctx,
                                           std::initializer_list<DSHIndexRange> front) {
    std::vector<DSHIndexRange> out(front);
    out.insert(out.end(), ctx.begin(), ctx.end());
    return out;
  }

  void walk(const std::vector<DSHIndexRange>& ctx, const DshPtr& op) {
    switch (op->op) {
      case DOp::Nop: return;
      case DOp::Assign:
        capture(ctx, op->src.idx);
        capture(ctx, op->dst.idx);
        return;
      case DOp::IMap: {
        auto inner = extend(ctx, {DSHIndexRange::other(), DSHIndexRange::index(op->bound)});
        walk_aexpr(inner, op->fn);
        return;
      }
      case DOp::BinOp: {
        auto inner = extend(ctx, {DSHIndexRange::other(), DSHIndexRange::other(),
                                  DSHIndexRange::index(op->bound)});
        walk_aexpr(inner, op->fn);
        return;
      }
      case DOp::MemMap2: {
        auto inner = extend(ctx, {DSHIndexRange::other(), DSHIndexRange::other()});
        walk_aexpr(inner, op->fn);
        return;
      }
      case DOp::Power: {
        capture(ctx, op->ne);
        capture(ctx, op->src.idx);
        capture(ctx, op->dst.idx);
        auto inner = extend(ctx, {DSHIndexRange::other(), DSHIndexRange::other()});
        walk_aexpr(inner, op->fn);
        return;
      }
      case DOp::Loop: {
        // per-iteration capture, highest index first
        if (!op->bound.fits_uint64()) return;
        for (BigInt k = op->bound - BigInt(1); !k.is_negative(); k -= BigInt(1)) {
          auto inner = extend(ctx, {DSHIndexRange::index(k)});
          walk(inner, op->body);
        }
        return;
      }
      case DOp::Alloc: {
        auto inner = extend(ctx, {DSHIndexRange::other()});
        walk(inner, op->body);
        return;
      }
      case DOp::MemInit: return;
      case DOp::Seq:
        walk(ctx, op->a);
        walk(ctx, op->b);
        return;
    }
  }
};

}  // namespace

ClosureTrace closure_trace(const DshPtr& op, const std::vector<DSHIndexRange>& sigma_ranges) {
  TraceBuilder b;
  b.walk(sigma_ranges, op);
  return b.out;
}

// ---- overflow check --------------------------------------------------------------------

namespace {

struct NatInterval {
  BigInt lo, hi;
};

struct IntervalEval {
  const std::vector<DSHIndexRange>& ctx;
  const BigInt& limit;
  std::vector<std::string>& findings;

  void flag(const std::string& msg) {
    if (findings.size() < 16) findings.push_back(msg);
  }

  NatInterval check_bounds(NatInterval v) {
    if (v.hi > limit) flag("OverflowPossible: value can reach " + v.hi.to_decimal());
    return v;
  }

  NatInterval eval(const NExprPtr& e) {
    switch (e->op) {
      case NOp::Const: return check_bounds({e->value, e->value});
      case NOp::Var: {
        if (e->var >= ctx.size()) {
          flag("unbound variable in closure");
          return {BigInt(0), BigInt(0)};
        }
        const DSHIndexRange& r = ctx[e->var];
        if (!r.is_index) {
          flag("non-index variable used in an integer expression");
          return {BigInt(0), BigInt(0)};
        }
        return {BigInt(0), r.bound};
      }
      default: break;
    }
    NatInterval a = eval(e->a);
    NatInterval b = eval(e->b);
    switch (e->op) {
      case NOp::Plus: return check_bounds({a.lo + b.lo, a.hi + b.hi});
      case NOp::Minus: {
        if (a.lo < b.hi)
          flag("UnderflowPossible: subtraction can go below zero (truncation vs wraparound)");
        BigInt lo = a.lo - b.hi;
        if (lo.is_negative()) lo = BigInt(0);
        BigInt hi = a.hi - b.lo;
        if (hi.is_negative()) hi = BigInt(0);
        return {lo, hi};
      }
      case NOp::Mult: return check_bounds({a.lo * b.lo, a.hi * b.hi});
      case NOp::Div: {
        if (b.lo.is_zero()) flag("DivByZeroPossible: divisor range includes zero");
        BigInt dlo = b.hi.is_zero() ? BigInt(1) : b.hi;
        BigInt dhi = b.lo.is_zero() ? BigInt(1) : b.lo;
        return {a.lo / dlo, a.hi / dhi};
      }
      case NOp::Mod: {
        if (b.lo.is_zero()) flag("DivByZeroPossible: modulus range includes zero");
        BigInt hi = b.hi.is_zero() ? BigInt(0) : b.hi - BigInt(1);
        if (a.hi < hi) hi = a.hi;
        return {BigInt(0), hi};
      }
      case NOp::Min: return {a.lo < b.lo ? a.lo : b.lo, a.hi < b.hi ? a.hi : b.hi};
      case NOp::Max: return {a.lo < b.lo ? b.lo : a.lo, a.hi < b.hi ? b.hi : a.hi};
      default: break;
    }
    return {BigInt(0), BigInt(0)};
  }
};

}  // namespace

OverflowReport check_trace_no_overflow(const ClosureTrace& trace, unsigned width) {
  OverflowReport rep;
  BigInt limit = BigInt(1).shl(width) - BigInt(1);
  for (const auto& c : trace) {
    IntervalEval ev{c.ctx, limit, rep.findings};
    ev.eval(c.expr);
  }
  return rep;
}

std::string closure_to_string(const RangeClosure& c) {
  std::string s = "([";
  for (size_t i = 0; i < c.ctx.size(); ++i) {
    if (i) s += "; ";
    s += c.ctx[i].is_index ? "DSHIndex " + c.ctx[i].bound.to_decimal() : "DSHOtherVar";
  }
  s += "], " + dhcol::to_string(c.expr) + ")";
  return s;
}

// ---- Gappa export -------------------------------------------------------------------------

namespace {

bool trivial_const(const sym::SexprArena& a, uint32_t i) {
  return a.at(i).op == sym::SOp::Zero || a.at(i).op == sym::SOp::One;
}

std::string gexpr(const sym::SexprArena& a, uint32_t i) {
  const sym::SNode& n = a.at(i);
  switch (n.op) {
    case sym::SOp::Zero: return "0.0";
    case sym::SOp::One: return "1.0";
    case sym::SOp::Var: return "x" + std::to_string(n.var);
    case sym::SOp::Plus: return "(" + gexpr(a, n.a) + " + " + gexpr(a, n.b) + ")";
    case sym::SOp::Sub: return "(" + gexpr(a, n.a) + " - " + gexpr(a, n.b) + ")";
    case sym::SOp::Mult: return "(" + gexpr(a, n.a) + " * " + gexpr(a, n.b) + ")";
    // abs/min/max are exact on floats and unsupported by the target tool;
    // a representative rounded operand keeps the analysis meaningful
    case sym::SOp::Abs: return gexpr(a, n.a);
    case sym::SOp::Min:
    case sym::SOp::Max: return gexpr(a, trivial_const(a, n.a) ? n.b : n.a);
    case sym::SOp::ZLess: return gexpr(a, n.a);
  }
  return "0.0";
}

std::string decimal(const Rational& q) {
  double d = q.to_double();
  char buf[64];
  snprintf(buf, sizeof buf, "%.17g", d);
  return buf;
}

}  // namespace

std::string export_gappa_problem(const sym::SexprArena& arena, uint32_t lhs, uint32_t rhs,
                                 const std::map<uint32_t, Interval>& env) {
  std::string s;
  s += "@rnd64 = float<ieee_64, ne>;\n\n";
  s += "lhs = " + gexpr(arena, lhs) + ";\n";
  s += "lhs64 rnd64= " + gexpr(arena, lhs) + ";\n\n";
  s += "rhs = " + gexpr(arena, rhs) + ";\n";
  s += "rhs64 rnd64= " + gexpr(arena, rhs) + ";\n\n{\n";
  bool first = true;
  for (const auto& [var, iv] : env) {
    s += first ? "    " : " /\\ ";
    first = false;
    s += "x" + std::to_string(var) + " in [" + decimal(iv.lo) + ", " + decimal(iv.hi) + "]\n";
  }
  s += "  ->\n    |lhs64 - lhs| in ?\n /\\ |rhs64 - rhs| in ?\n}\n";
  return s;
}

}  // namespace hcolc::analysis
