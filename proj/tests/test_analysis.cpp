#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hcolc/analysis.hpp"
#include "hcolc/rng.hpp"

using namespace hcolc;
using namespace hcolc::analysis;
using namespace hcolc::dhcol;

namespace {

lowering::LoweredProgram passthrough() {
  lowering::LoweredProgram p;
  p.input_dim = 3;
  p.output_dim = 1;
  p.op = d_assign(MemRef{PExpr{0}, n_const_u(1)}, MemRef{PExpr{1}, n_const_u(0)});
  return p;
}

}  // namespace

TEST_CASE("symbolic execution: assignment passes a variable through") {
  auto r = symbolic_exec(passthrough(), 0);
  REQUIRE(r.ok());
  CHECK(r.value().arena->to_string(r.value().root) == "(SVar 1)");
  CHECK(r.value().num_vars == 3);
}

TEST_CASE("symbolic execution: power unfolds symbolically") {
  lowering::LoweredProgram p;
  p.input_dim = 1;
  p.output_dim = 1;
  p.op = d_power(n_const_u(2), MemRef{PExpr{0}, n_const_u(0)}, MemRef{PExpr{1}, n_const_u(0)},
                 a_bin(AOp::Plus, a_var(0), a_var(1)), CarrierLit::zero());
  auto r = symbolic_exec(p, 0);
  REQUIRE(r.ok());
  CHECK(r.value().arena->to_string(r.value().root) ==
        "(SPlus (SPlus SConstZero (SVar 0)) (SVar 0))");
}

TEST_CASE("symbolic and concrete evaluation perform identical operation sequences") {
  lowering::LoweredProgram p;
  p.input_dim = 2;
  p.output_dim = 1;
  p.op = d_binop(BigInt(1), PExpr{0}, PExpr{1},
                 a_bin(AOp::Plus, a_abs(a_var(1)), a_bin(AOp::Mult, a_var(0), a_var(1))));
  auto sym = symbolic_exec(p, 0);
  REQUIRE(sym.ok());
  size_t sym_ops = sym.value().arena->size() - 1 - sym.value().num_vars;  // minus Zero + vars

  // two concrete runs with different inputs count the same operations
  for (double base : {1.5, -7.25}) {
    mshcol::MemBlock input;
    input.set(0, CarrierValue(base));
    input.set(1, CarrierValue(base * 3));
    auto inst = lowering::instantiate(p, ParamEnv{}, input, CarrierKind::Binary64);
    uint64_t count = 0;
    DEvalOpts opts{kFhcolKind, nullptr, &count};
    auto r = eval_dshoperator(inst.ctx, p.op, inst.mem, estimate_fuel(p.op), opts);
    REQUIRE(r.has_value());
    REQUIRE(r->ok());
    CHECK(count == sym_ops);
  }
}

TEST_CASE("interval model: single addition of bounded literals") {
  sym::SexprArena arena;
  uint32_t a = arena.var(0), b = arena.var(1);
  uint32_t sum = arena.binary(sym::SOp::Plus, a, b);
  std::map<uint32_t, Interval> env;
  env[0] = interval_of(Rational(0), Rational(1));
  env[1] = interval_of(Rational(0), Rational(1));
  auto r = interval_error_bound(arena, sum, env);
  REQUIRE(r.ok());
  Rational u(BigInt(1), BigInt(1).shl(53));
  CHECK(r.value().err == u * Rational(2));  // one rounding on a sum bounded by 2
  CHECK(r.value().lo == Rational(0));
  CHECK(r.value().hi == Rational(2));

  // a variable alone carries its own input error
  env[0].err = Rational(BigInt(1), BigInt(1000));
  auto rv = interval_error_bound(arena, a, env);
  REQUIRE(rv.ok());
  CHECK(rv.value().err == Rational(BigInt(1), BigInt(1000)));

  // comparisons are out of scope for the range model
  uint32_t zl = arena.binary(sym::SOp::ZLess, a, b);
  CHECK(!interval_error_bound(arena, zl, env).ok());
  // unbound variables are reported
  uint32_t c = arena.var(9);
  auto missing = interval_error_bound(arena, c, env);
  CHECK(!missing.ok());
  CHECK(missing.error().kind == ErrKind::UnboundedRange);
}

TEST_CASE("interval soundness by sampling") {
  // expr = |a - b| * a + b over [-3, 5]
  sym::SexprArena arena;
  uint32_t a = arena.var(0), b = arena.var(1);
  uint32_t expr = arena.binary(
      sym::SOp::Plus,
      arena.binary(sym::SOp::Mult, arena.unary(sym::SOp::Abs, arena.binary(sym::SOp::Sub, a, b)), a),
      b);
  std::map<uint32_t, Interval> env;
  env[0] = interval_of(Rational(-3), Rational(5));
  env[1] = interval_of(Rational(-3), Rational(5));
  auto bound = interval_error_bound(arena, expr, env).value();

  Rng rng(31337);
  for (int t = 0; t < 20000; ++t) {
    double da = rng.real(-3, 5), db = rng.real(-3, 5);
    Rational qa = Rational::from_double(da), qb = Rational::from_double(db);
    double f = std::fabs(da - db) * da + db;
    Rational q = (qa - qb).abs() * qa + qb;
    Rational dev = (q - Rational::from_double(f)).abs();
    CHECK(dev <= bound.err);
    CHECK(q >= bound.lo);
    CHECK(q <= bound.hi);
  }
}

TEST_CASE("safety margin and guarded comparison") {
  CHECK(safety_margin(Rational(BigInt(2), BigInt(10)), Rational(BigInt(3), BigInt(10))) ==
        Rational(BigInt(5), BigInt(10)));
  CHECK(safety_margin(Rational(), Rational()) == Rational());
  CHECK(safe_zless(1.0, 2.0, 1e-12) == 1.0);
  CHECK(safe_zless(2.0, 1.0, 1e-12) == 0.0);
  // gap below the margin: 1.0 + 2^-54 rounds to 1.0, difference is 0
  CHECK(safe_zless(1.0, 1.0 + std::ldexp(1.0, -54), 1e-12) == 0.0);
  // the guarantee: 1.0 result implies the reals are separated beyond eps
  CHECK(safe_zless(1.0, 1.0 + 4e-12, 1e-12) == 1.0);
}

TEST_CASE("closure trace of the nested loop/map example") {
  // DSHLoop 3 (DSHIMap 3 (PVar 1) (PVar 2)
  //   (APlus (ANth (MPtrDeref (PVar 3)) (NVar 1))
  //          (ANth (MPtrDeref (PVar 5)) (NMult (NConst 3) (NVar 2)))))
  auto f = a_bin(AOp::Plus, a_nth(m_deref(PExpr{3}), n_var(1)),
                 a_nth(m_deref(PExpr{5}), n_bin(NOp::Mult, n_const_u(3), n_var(2))));
  auto prog = d_loop(BigInt(3), d_imap(BigInt(3), PExpr{1}, PExpr{2}, f));
  std::vector<DSHIndexRange> sigma = {DSHIndexRange::other(), DSHIndexRange::other(),
                                      DSHIndexRange::other()};
  auto trace = closure_trace(prog, sigma);
  REQUIRE(trace.size() == 6);
  // contexts: [OtherVar; Index 3; Index k; Other; Other; Other], k = 2,1,0
  for (size_t i = 0; i < 6; ++i) {
    const auto& c = trace[i];
    REQUIRE(c.ctx.size() == 6);
    CHECK(!c.ctx[0].is_index);
    CHECK(c.ctx[1] == DSHIndexRange::index(BigInt(3)));
    CHECK(c.ctx[2] == DSHIndexRange::index(BigInt(2 - static_cast<int64_t>(i / 2))));
    CHECK(!c.ctx[3].is_index);
    CHECK(!c.ctx[4].is_index);
    CHECK(!c.ctx[5].is_index);
  }
  CHECK(dhcol::to_string(trace[0].expr) == "(NVar 1)");
  CHECK(dhcol::to_string(trace[1].expr) == "(NMult (NConst 3) (NVar 2))");
  CHECK(dhcol::to_string(trace[4].expr) == "(NVar 1)");
  CHECK(dhcol::to_string(trace[5].expr) == "(NMult (NConst 3) (NVar 2))");

  auto rep = check_trace_no_overflow(trace);
  CHECK(rep.pass());  // maximum value is 3 * 2 = 6

  // the trace is input independent by construction: same call, same result
  auto trace2 = closure_trace(prog, sigma);
  REQUIRE(trace2.size() == trace.size());
  for (size_t i = 0; i < trace.size(); ++i) {
    CHECK(closure_to_string(trace[i]) == closure_to_string(trace2[i]));
  }
}

TEST_CASE("trace of simple operators") {
  CHECK(closure_trace(d_nop(), {}).empty());
  auto assign = d_assign(MemRef{PExpr{0}, n_const_u(2)}, MemRef{PExpr{1}, n_const_u(0)});
  CHECK(closure_trace(assign, {DSHIndexRange::other(), DSHIndexRange::other()}).size() == 2);
}

TEST_CASE("overflow and underflow detection") {
  // NMinus(NVar bounded by 3, NConst 5) can underflow
  {
    RangeClosure c;
    c.ctx = {DSHIndexRange::index(BigInt(3))};
    c.expr = n_bin(NOp::Minus, n_var(0), n_const_u(5));
    auto rep = check_trace_no_overflow({c});
    REQUIRE(!rep.pass());
    CHECK(rep.findings[0].find("Underflow") != std::string::npos);
  }
  // NMult(2^63, 2) must overflow
  {
    RangeClosure c;
    c.expr = n_bin(NOp::Mult, n_const(BigInt(1).shl(63)), n_const_u(2));
    auto rep = check_trace_no_overflow({c});
    REQUIRE(!rep.pass());
    CHECK(rep.findings[0].find("Overflow") != std::string::npos);
  }
  // div-by-zero possibility is reported
  {
    RangeClosure c;
    c.ctx = {DSHIndexRange::index(BigInt(3))};
    c.expr = n_bin(NOp::Div, n_const_u(7), n_var(0));
    auto rep = check_trace_no_overflow({c});
    CHECK(!rep.pass());
  }
}

TEST_CASE("gappa export shape") {
  sym::SexprArena arena;
  uint32_t a = arena.var(0);
  uint32_t lhs = arena.binary(sym::SOp::Plus, arena.zero(), a);
  uint32_t rhs = arena.binary(sym::SOp::Sub, a, arena.one());
  std::map<uint32_t, Interval> env;
  env[0] = interval_of(Rational(0), Rational(10));
  std::string text = export_gappa_problem(arena, lhs, rhs, env);
  CHECK(text.find("@rnd64 = float<ieee_64, ne>;") != std::string::npos);
  CHECK(text.find("x0 in [0, 10]") != std::string::npos);
  CHECK(text.find("|lhs64 - lhs| in ?") != std::string::npos);
}
