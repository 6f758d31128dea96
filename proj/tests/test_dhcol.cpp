#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hcolc/dhcol.hpp"
#include "hcolc/generators.hpp"

using namespace hcolc;
using namespace hcolc::dhcol;

namespace {

CarrierValue cq(int64_t n, int64_t d = 1) { return CarrierValue(Rational(BigInt(n), BigInt(d))); }

EvalContext two_blocks(Memory& mem, uint64_t xsize = 4, uint64_t ysize = 4) {
  MemBlock x, y;
  mem.set(0, x);
  mem.set(1, y);
  EvalContext ctx;
  ctx.push(DSHVal::of_ptr(0, NatValue::big(BigInt::from_u64(xsize))));  // PVar 1
  ctx.push(DSHVal::of_ptr(1, NatValue::big(BigInt::from_u64(ysize))));  // PVar 0
  return ctx;
}

Result<Memory> eval_full(const EvalContext& ctx, const DshPtr& op, const Memory& mem,
                         const DEvalOpts& opts = {}) {
  auto r = eval_dshoperator(ctx, op, mem, estimate_fuel(op), opts);
  REQUIRE(r.has_value());
  return *r;
}

}  // namespace

TEST_CASE("natural expression evaluation follows the rules") {
  EvalContext ctx;
  DEvalOpts opts;
  CHECK(eval_nexpr(n_bin(NOp::Div, n_const_u(7), n_const_u(2)), ctx, opts).value().to_nat() ==
        BigInt(3));
  auto dz = eval_nexpr(n_bin(NOp::Div, n_const_u(1), n_const_u(0)), ctx, opts);
  CHECK(!dz.ok());
  CHECK(dz.error().kind == ErrKind::DivByZero);
  auto mz = eval_nexpr(n_bin(NOp::Mod, n_const_u(1), n_const_u(0)), ctx, opts);
  CHECK(!mz.ok());
  // unbound variable
  CHECK(!eval_nexpr(n_var(0), ctx, opts).ok());
}

TEST_CASE("ANth reads constant blocks and checks bounds") {
  EvalContext ctx;
  Memory mem;
  DEvalOpts opts;
  std::map<uint64_t, CarrierLit> cells;
  cells[0] = CarrierLit::of(Rational(5));
  auto e = a_nth(m_const(cells, BigInt(1)), n_const_u(0));
  CHECK(eval_aexpr(e, ctx, mem, opts).value().equals(cq(5)));

  auto oob = a_nth(m_const(cells, BigInt(1)), n_const_u(1));
  auto r = eval_aexpr(oob, ctx, mem, opts);
  CHECK(!r.ok());
  CHECK(r.error().kind == ErrKind::IndexOOB);

  std::map<uint64_t, CarrierLit> sparse;
  auto missing = a_nth(m_const(sparse, BigInt(3)), n_const_u(1));
  auto r2 = eval_aexpr(missing, ctx, mem, opts);
  CHECK(!r2.ok());
  CHECK(r2.error().kind == ErrKind::SparseRead);
}

TEST_CASE("context lookups respect types and protection") {
  EvalContext ctx;
  ctx.push(DSHVal::of_nat(NatValue::big(BigInt(7))));
  ctx.push(DSHVal::of_ct(cq(3)), /*protect=*/true);
  Memory mem;
  DEvalOpts opts;
  // protected entry is invisible
  auto r = eval_aexpr(a_var(0), ctx, mem, opts);
  CHECK(!r.ok());
  CHECK(r.error().kind == ErrKind::LookupError);
  // wrong type
  auto r2 = eval_aexpr(a_var(1), ctx, mem, opts);
  CHECK(!r2.ok());
  CHECK(r2.error().kind == ErrKind::TypeErrorInContext);
  auto r3 = eval_nexpr(n_var(1), ctx, opts);
  CHECK(r3.value().to_nat() == BigInt(7));
}

TEST_CASE("assign copies one cell") {
  Memory mem;
  EvalContext ctx = two_blocks(mem);
  MemBlock x;
  x.set(0, cq(42));
  mem.set(0, x);
  auto op = d_assign(MemRef{PExpr{1}, n_const_u(0)}, MemRef{PExpr{0}, n_const_u(1)});
  auto r = eval_full(ctx, op, mem);
  REQUIRE(r.ok());
  CHECK(r.value().lookup_ref(1)->lookup(1)->equals(cq(42)));
  // source cell absent -> error
  auto bad = d_assign(MemRef{PExpr{1}, n_const_u(3)}, MemRef{PExpr{0}, n_const_u(0)});
  auto rb = eval_full(ctx, bad, mem);
  CHECK(!rb.ok());
  CHECK(rb.error().kind == ErrKind::SparseRead);
  // destination out of declared size -> error
  auto oob = d_assign(MemRef{PExpr{1}, n_const_u(0)}, MemRef{PExpr{0}, n_const_u(9)});
  CHECK(!eval_full(ctx, oob, mem).ok());
}

TEST_CASE("power unfolds *dst = f(*src, *dst) n times") {
  Memory mem;
  EvalContext ctx = two_blocks(mem);
  MemBlock x;
  x.set(0, cq(2));
  mem.set(0, x);
  auto op = d_power(n_const_u(3), MemRef{PExpr{1}, n_const_u(0)}, MemRef{PExpr{0}, n_const_u(0)},
                    a_bin(AOp::Plus, a_var(1), a_var(0)), CarrierLit::zero());
  auto r = eval_full(ctx, op, mem);
  REQUIRE(r.ok());
  CHECK(r.value().lookup_ref(1)->lookup(0)->equals(cq(6)));  // 0+2+2+2
}

TEST_CASE("imap applies f with value and index in context") {
  Memory mem;
  EvalContext ctx = two_blocks(mem);
  MemBlock x;
  for (uint64_t k = 0; k < 4; ++k) x.set(k, cq(static_cast<int64_t>(k) + 10));
  mem.set(0, x);
  // f = value + value
  auto op = d_imap(BigInt(4), PExpr{1}, PExpr{0}, a_bin(AOp::Plus, a_var(0), a_var(0)));
  auto r = eval_full(ctx, op, mem);
  REQUIRE(r.ok());
  for (uint64_t k = 0; k < 4; ++k)
    CHECK(r.value().lookup_ref(1)->lookup(k)->equals(cq(2 * (static_cast<int64_t>(k) + 10))));
}

TEST_CASE("loop semantics") {
  Memory mem;
  EvalContext ctx = two_blocks(mem);
  MemBlock x;
  x.set(0, cq(1));
  mem.set(0, x);
  // zero iterations leave memory unchanged
  auto nothing = d_loop(BigInt(0), d_meminit(PExpr{0}, CarrierLit::one()));
  auto r0 = eval_full(ctx, nothing, mem);
  REQUIRE(r0.ok());
  CHECK(r0.value().lookup_ref(1)->size() == 0);
  // loop index is pushed: y[i] := x[0] for each i
  auto body = d_assign(MemRef{PExpr{2}, n_const_u(0)}, MemRef{PExpr{1}, n_var(0)});
  auto loop = d_loop(BigInt(3), body);
  auto r = eval_full(ctx, loop, mem);
  REQUIRE(r.ok());
  CHECK(r.value().lookup_ref(1)->size() == 3);
}

TEST_CASE("alloc scopes its temporary block") {
  Memory mem;
  EvalContext ctx = two_blocks(mem);
  MemBlock x;
  x.set(0, cq(5));
  mem.set(0, x);
  // copy x[0] through a temporary
  auto body = d_seq(d_assign(MemRef{PExpr{2}, n_const_u(0)}, MemRef{PExpr{0}, n_const_u(0)}),
                    d_assign(MemRef{PExpr{0}, n_const_u(0)}, MemRef{PExpr{1}, n_const_u(0)}));
  auto op = d_alloc(BigInt(1), body);
  auto r = eval_full(ctx, op, mem);
  REQUIRE(r.ok());
  CHECK(r.value().lookup_ref(1)->lookup(0)->equals(cq(5)));
  // the temporary address is gone from the result
  CHECK(r.value().blocks().size() == 2);
  CHECK(!r.value().exists(2));
}

TEST_CASE("fuel: zero fuel is exhaustion, estimates always suffice") {
  Memory mem;
  EvalContext ctx = two_blocks(mem);
  auto op = d_nop();
  CHECK(!eval_dshoperator(ctx, op, mem, 0, DEvalOpts{}).has_value());
  CHECK(estimate_fuel(d_nop()) == 1);
  auto seq = d_seq(d_nop(), d_nop());
  CHECK(estimate_fuel(seq) == 2);
  auto loop8 = d_loop(BigInt(8), d_nop());
  auto loop4 = d_loop(BigInt(4), d_nop());
  CHECK(estimate_fuel(loop8) > estimate_fuel(loop4));
  // estimate minus one must actually exhaust for straight-line nests
  auto nest = d_loop(BigInt(5), d_loop(BigInt(3), d_nop()));
  Fuel est = estimate_fuel(nest);
  CHECK(eval_dshoperator(ctx, nest, mem, est, DEvalOpts{}).has_value());
}

TEST_CASE("fuel sufficiency on random programs (property)") {
  Rng rng(2025);
  for (int t = 0; t < 1000; ++t) {
    auto p = gen::random_dsh_program(rng, gen::DGenOpts{4, 6, 3, 4, true});
    auto r = eval_dshoperator(p.ctx, p.op, p.mem, estimate_fuel(p.op), DEvalOpts{});
    REQUIRE(r.has_value());  // may err, may not exhaust
  }
}

TEST_CASE("nat minus differs between instances") {
  // RHCOL truncates at zero, FHCOL wraps modulo 2^64
  EvalContext ctx;
  auto e = n_bin(NOp::Minus, n_const_u(3), n_const_u(5));
  DEvalOpts r{kRhcolKind, nullptr};
  DEvalOpts f{kFhcolKind, nullptr};
  CHECK(eval_nexpr(e, ctx, r).value().to_nat().is_zero());
  CHECK(eval_nexpr(e, ctx, f).value().to_u64_clamped() == static_cast<uint64_t>(-2));
}

TEST_CASE("translation accepts 0/1 and rejects everything else") {
  auto ok = d_meminit(PExpr{0}, CarrierLit::one());
  CHECK(translate_rhcol_to_fhcol(ok).ok());

  auto third = d_imap(BigInt(2), PExpr{0}, PExpr{1},
                      a_bin(AOp::Mult, a_var(0), a_const(CarrierLit::of(Rational(BigInt(1), BigInt(3))))));
  auto r = translate_rhcol_to_fhcol(third);
  CHECK(!r.ok());
  CHECK(r.error().kind == ErrKind::UnknownConstant);

  BigInt two64 = BigInt(1).shl(64);
  auto big_loop = d_loop(two64, d_nop());
  auto r2 = translate_rhcol_to_fhcol(big_loop);
  CHECK(!r2.ok());
  CHECK(r2.error().kind == ErrKind::NatOverflow);

  auto big_const = d_assign(MemRef{PExpr{0}, n_const(two64)}, MemRef{PExpr{1}, n_const_u(0)});
  CHECK(!translate_rhcol_to_fhcol(big_const).ok());
}

TEST_CASE("rf equivalence: exact on integers, tiny deviation on fractions") {
  // y[0] := x[0] + x[1]
  auto op = d_seq(
      d_alloc(BigInt(1),
              d_seq(d_assign(MemRef{PExpr{2}, n_const_u(0)}, MemRef{PExpr{0}, n_const_u(0)}),
                    d_nop())),
      d_binop(BigInt(1), PExpr{1}, PExpr{0}, a_bin(AOp::Plus, a_var(1), a_var(0))));
  REQUIRE(translate_rhcol_to_fhcol(op).ok());

  auto build = [&](double v0, double v1) {
    Memory mf;
    MemBlock x, y;
    x.set(0, CarrierValue(v0));
    x.set(1, CarrierValue(v1));
    mf.set(0, x);
    mf.set(1, y);
    return mf;
  };
  EvalContext ctx;
  ctx.push(DSHVal::of_ptr(0, NatValue::u64(2)));
  ctx.push(DSHVal::of_ptr(1, NatValue::u64(1)));
  EvalContext ctx_r;
  ctx_r.push(DSHVal::of_ptr(0, NatValue::big(BigInt(2))));
  ctx_r.push(DSHVal::of_ptr(1, NatValue::big(BigInt(1))));

  // small integers are exactly representable: deviation 0
  Memory mf_int = build(3.0, 4.0);
  auto v1 = check_rf_equiv(op, op, ctx_r, ctx, memory_to_rational(mf_int), mf_int, Rational());
  CHECK(v1.pass);
  CHECK(v1.max_deviation == Rational());

  // 0.1 + 0.2 deviates from the exact sum, but far below 1e-15
  Memory mf_frac = build(0.1, 0.2);
  Memory mr_frac;
  {
    MemBlock x, y;
    x.set(0, cq(1, 10));
    x.set(1, cq(2, 10));
    mr_frac.set(0, x);
    mr_frac.set(1, y);
  }
  auto v2 = check_rf_equiv(op, op, ctx_r, ctx, mr_frac, mf_frac,
                           Rational(BigInt(1), BigInt(1000000000000000ll)));
  CHECK(v2.pass);
  CHECK(!(v2.max_deviation == Rational()));

  // structural divergence: rational side divides by zero only when values
  // mismatch is impossible here, so force an error on one side instead
  auto bad = d_assign(MemRef{PExpr{1}, n_const_u(5)}, MemRef{PExpr{0}, n_const_u(0)});
  auto v3 = check_rf_equiv(bad, bad, ctx_r, ctx, mr_frac, mf_frac, Rational(1));
  CHECK(v3.pass);  // both err together is acceptable
}

TEST_CASE("evaluation is deterministic") {
  Rng rng(777);
  auto p = gen::random_dsh_program(rng, gen::DGenOpts{5, 5, 3, 4, true});
  auto r1 = eval_dshoperator(p.ctx, p.op, p.mem, estimate_fuel(p.op), DEvalOpts{});
  auto r2 = eval_dshoperator(p.ctx, p.op, p.mem, estimate_fuel(p.op), DEvalOpts{});
  REQUIRE(r1.has_value());
  REQUIRE(r2.has_value());
  CHECK(r1->ok() == r2->ok());
  if (r1->ok()) {
    CHECK(r1->value().blocks().size() == r2->value().blocks().size());
  }
}
