#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hcolc/hcol.hpp"
#include "hcolc/rng.hpp"

using namespace hcolc;
using namespace hcolc::hcol;

namespace {

CarrierValue cq(int64_t n, int64_t d = 1) { return CarrierValue(Rational(BigInt(n), BigInt(d))); }

DenseVector qvec(std::initializer_list<int64_t> vals) {
  DenseVector v;
  for (auto x : vals) v.push_back(cq(x));
  return v;
}

DenseVector eval_q(const HExprPtr& e, const DenseVector& x) {
  ParamEnv env;
  auto r = eval_hcol(e, x, env, CarrierKind::Rational);
  REQUIRE(r.ok());
  return r.value();
}

bool vec_eq(const DenseVector& a, const DenseVector& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i)
    if (!a[i].equals(b[i])) return false;
  return true;
}

// independent oracles, used to freeze the expected values below
Rational oracle_right_fold_sub(const std::vector<Rational>& xs, Rational z) {
  Rational acc = z;
  for (size_t i = xs.size(); i-- > 0;) acc = xs[i] - acc;
  return acc;
}

Rational oracle_scalarprod(const std::vector<Rational>& xs) {
  size_t n = xs.size() / 2;
  Rational acc;
  for (size_t i = 0; i < n; ++i) acc = acc + xs[i] * xs[n + i];
  return acc;
}

Rational oracle_poly(const std::vector<Rational>& a, Rational x) {
  Rational acc, p(1);
  for (size_t i = 0; i < a.size(); ++i) {
    acc = acc + a[i] * p;
    p = p * x;
  }
  return acc;
}

}  // namespace

TEST_CASE("dims match the operator signatures") {
  CHECK(dims(h_chebyshev_distance(2)).value() == Dims{4, 1});
  CHECK(dims(h_monomial_enumerator(3)).value() == Dims{1, 4});
  // composition typing: f:(3,1) after g:(5,3)
  auto f = h_reduction(3, sf_plus(), CarrierLit::zero());
  auto g = h_compose(h_vminus(3), h_append(VecOperand::literal({CarrierLit::one()}), 5));
  CHECK(dims(g).value() == Dims{5, 3});
  CHECK(dims(h_compose(f, g)).value() == Dims{5, 1});
  // cross sums dims: f:(2,1), g:(3,2)
  auto cf = h_scalarprod(1);
  CHECK(dims(cf).value() == Dims{2, 1});
  auto cg2 = h_compose(h_monomial_enumerator(1), h_reduction(3, sf_plus(), CarrierLit::zero()));
  CHECK(dims(cg2).value() == Dims{3, 2});
  CHECK(dims(h_cross(cf, cg2)).value() == Dims{5, 3});
  // ill-typed composite is rejected
  auto bad = h_compose(h_scalarprod(3), h_vminus(1));
  CHECK(!dims(bad).ok());
  CHECK(dims(bad).error().kind == ErrKind::IllTyped);
}

TEST_CASE("eval: induction unfolds [z, f z x, f (f z x) x]") {
  auto e = h_induction(3, sf_plus(), CarrierLit::zero());
  CHECK(vec_eq(eval_q(e, qvec({2})), qvec({0, 2, 4})));
}

TEST_CASE("eval: reduction is a right fold") {
  std::vector<Rational> xs = {Rational(1), Rational(2), Rational(3)};
  Rational expect = oracle_right_fold_sub(xs, Rational());
  CHECK(expect == Rational(2));  // 1 - (2 - (3 - 0))
  auto e = h_reduction(3, sf_sub(), CarrierLit::zero());
  CHECK(vec_eq(eval_q(e, qvec({1, 2, 3})), qvec({2})));
  // a left-assoc fold gives a different value on the same input: ((1-2)-3)-0
  Rational left = ((Rational(1) - Rational(2)) - Rational(3)) - Rational();
  CHECK(left == Rational(-4));
  CHECK(left != expect);
}

TEST_CASE("eval: scalar product against brute force") {
  std::vector<Rational> xs;
  for (int i = 1; i <= 6; ++i) xs.push_back(Rational(i));
  CHECK(oracle_scalarprod(xs) == Rational(32));
  CHECK(vec_eq(eval_q(h_scalarprod(3), qvec({1, 2, 3, 4, 5, 6})), qvec({32})));
}

TEST_CASE("eval: polynomial, chebyshev, vminus, norms") {
  std::vector<Rational> a = {Rational(1), Rational(2), Rational(3)};
  CHECK(oracle_poly(a, Rational(2)) == Rational(17));
  auto poly = h_evalpolynomial(
      VecOperand::literal({CarrierLit::one(), CarrierLit::of(Rational(2)), CarrierLit::of(Rational(3))}));
  CHECK(vec_eq(eval_q(poly, qvec({2})), qvec({17})));

  CHECK(vec_eq(eval_q(h_chebyshev_distance(2), qvec({1, 2, 4, 6})), qvec({4})));
  CHECK(vec_eq(eval_q(h_vminus(2), qvec({1, 2, 4, 6})), qvec({-3, -4})));
  CHECK(vec_eq(eval_q(h_infinity_norm(3), qvec({-5, 2, 4})), qvec({5})));
  CHECK(vec_eq(eval_q(h_monomial_enumerator(3), qvec({2})), qvec({1, 2, 4, 8})));
  CHECK(vec_eq(eval_q(h_prepend(VecOperand::literal({CarrierLit::one()}), 2), qvec({7, 8})),
               qvec({1, 7, 8})));
  CHECK(vec_eq(eval_q(h_append(VecOperand::literal({CarrierLit::one()}), 2), qvec({7, 8})),
               qvec({7, 8, 1})));
  CHECK(vec_eq(eval_q(h_stack(h_infinity_norm(2), h_vminus(1)), qvec({3, -4})), qvec({4, 7})));
  CHECK(vec_eq(eval_q(h_tless(h_atomic(sf_abs()), h_atomic(sf_abs())), qvec({-2, 3})), qvec({1})));
}

TEST_CASE("eval rejects wrong input length") {
  auto r = eval_hcol(h_scalarprod(3), qvec({1, 2, 3}), ParamEnv{}, CarrierKind::Rational);
  CHECK(!r.ok());
  CHECK(r.error().kind == ErrKind::DimMismatch);
}

TEST_CASE("inductor equals the last induction element") {
  Rng rng(21);
  for (int t = 0; t < 50; ++t) {
    size_t n = rng.below(6);
    auto ind = h_inductor(n, sf_plus(), CarrierLit::one());
    auto ful = h_induction(n + 1, sf_plus(), CarrierLit::one());
    DenseVector x = {CarrierValue(rng.rational())};
    auto a = eval_q(ind, x);
    auto b = eval_q(ful, x);
    CHECK(a[0].equals(b.back()));
  }
}

TEST_CASE("output length always matches dims") {
  Rng rng(31);
  std::vector<HExprPtr> pool = {
      h_scalarprod(3),
      h_chebyshev_distance(2),
      h_compose(h_infinity_norm(2), h_vminus(2)),
      h_stack(h_monomial_enumerator(2), h_monomial_enumerator(1)),
      h_cross(h_vminus(1), h_induction(3, sf_mult(), CarrierLit::one())),
  };
  for (const auto& e : pool) {
    Dims d = dims(e).value();
    for (int t = 0; t < 20; ++t) {
      DenseVector x;
      for (size_t i = 0; i < d.in; ++i) x.push_back(CarrierValue(rng.rational()));
      CHECK(eval_q(e, x).size() == d.out);
    }
  }
}

TEST_CASE("builtin rules rewrite and stay extensionally equal") {
  auto rules = builtin_rules();
  REQUIRE(rules.size() == 4);

  const BreakdownRule* r1 = &rules[0];
  const BreakdownRule* r2 = &rules[1];
  const BreakdownRule* r3 = &rules[2];
  const BreakdownRule* r4 = &rules[3];

  SUBCASE("scalarprod rule") {
    auto sp = h_scalarprod(3);
    auto rw = r1->apply(sp);
    REQUIRE(rw != nullptr);
    CHECK(rw->op == HOp::Compose);
    CHECK(rw->f->op == HOp::Reduction);
    CHECK(rw->g->op == HOp::BinOp);
    CHECK(vec_eq(eval_q(rw, qvec({1, 2, 3, 4, 5, 6})), qvec({32})));
    auto verdict = check_extensional_equiv(sp, rw, 1000, 2024).value();
    CHECK(verdict.equal);
  }
  SUBCASE("rules do not match other constructors") {
    CHECK(r1->apply(h_pointwise(3, sf_abs())) == nullptr);
    CHECK(r3->apply(h_scalarprod(3)) == nullptr);
  }
  SUBCASE("chebyshev rule") {
    auto ch = h_chebyshev_distance(2);
    auto rw = r3->apply(ch);
    REQUIRE(rw != nullptr);
    CHECK(vec_eq(eval_q(rw, qvec({1, 2, 4, 6})), qvec({4})));
    CHECK(check_extensional_equiv(ch, rw, 500, 7).value().equal);
  }
  SUBCASE("polynomial rule (with parameter vector)") {
    auto poly = h_evalpolynomial(VecOperand::param("a", 3));
    auto rw = r2->apply(poly);
    REQUIRE(rw != nullptr);
    CHECK(check_extensional_equiv(poly, rw, 500, 99).value().equal);
  }
  SUBCASE("tless rule") {
    auto tl = h_tless(h_infinity_norm(2), h_infinity_norm(3));
    auto rw = r4->apply(tl);
    REQUIRE(rw != nullptr);
    CHECK(check_extensional_equiv(tl, rw, 500, 123).value().equal);
  }
}

TEST_CASE("apply_breakdown_trace") {
  auto rules = builtin_rules();
  SUBCASE("applies at the root") {
    TraceStep steps[] = {{"scalarprod-reduction", {}}};
    auto r = apply_breakdown_trace(h_scalarprod(3), steps, rules);
    REQUIRE(r.ok());
    CHECK(r.value()->op == HOp::Compose);
  }
  SUBCASE("non-matching rule is rejected") {
    TraceStep steps[] = {{"chebyshev-norm", {}}};
    auto r = apply_breakdown_trace(h_scalarprod(3), steps, rules);
    CHECK(!r.ok());
    CHECK(r.error().kind == ErrKind::RewriteError);
  }
  SUBCASE("unknown rule is rejected") {
    TraceStep steps[] = {{"no-such-rule", {}}};
    CHECK(!apply_breakdown_trace(h_scalarprod(3), steps, rules).ok());
  }
  SUBCASE("path addressing inside the tree") {
    auto e = h_compose(h_infinity_norm(1), h_tless(h_scalarprod(1), h_scalarprod(1)));
    TraceStep steps[] = {{"tless-cross", {1}}, {"scalarprod-reduction", {1, 1, 0}}};
    auto r = apply_breakdown_trace(e, steps, rules);
    REQUIRE(r.ok());
    CHECK(check_extensional_equiv(e, r.value(), 300, 5).value().equal);
  }
  SUBCASE("bad path is rejected") {
    TraceStep steps[] = {{"scalarprod-reduction", {0}}};
    CHECK(!apply_breakdown_trace(h_scalarprod(3), steps, rules).ok());
  }
}

TEST_CASE("check_extensional_equiv finds counterexamples") {
  // right fold vs arg-swapped fold of sub differ
  auto rf = h_reduction(3, sf_sub(), CarrierLit::zero());
  ScalarFun swapped{2, ct_binary(CTExpr::Tag::Sub, ct_arg(1), ct_arg(0))};
  auto lf = h_reduction(3, swapped, CarrierLit::zero());
  auto v = check_extensional_equiv(rf, lf, 200, 17).value();
  CHECK(!v.equal);
  REQUIRE(v.cex.has_value());
  CHECK(!vec_eq(v.cex->lhs, v.cex->rhs));
  // reflexivity
  CHECK(check_extensional_equiv(rf, rf, 1, 0).value().equal);
  // dimension mismatch is an error, not a counterexample
  auto bad = check_extensional_equiv(rf, h_reduction(4, sf_sub(), CarrierLit::zero()), 10, 0);
  CHECK(!bad.ok());
  CHECK(bad.error().kind == ErrKind::DimMismatch);
}

TEST_CASE("rule soundness: every builtin rule preserves semantics on random matches") {
  auto rules = builtin_rules();
  std::vector<HExprPtr> targets = {
      h_scalarprod(1), h_scalarprod(4),
      h_evalpolynomial(VecOperand::literal({CarrierLit::of(Rational(BigInt(2), BigInt(3))),
                                            CarrierLit::one(), CarrierLit::of(Rational(5))})),
      h_chebyshev_distance(1), h_chebyshev_distance(3),
      h_tless(h_scalarprod(2), h_chebyshev_distance(2)),
  };
  for (const auto& t : targets) {
    for (const auto& r : rules) {
      auto rw = r.apply(t);
      if (!rw) continue;
      CAPTURE(r.name);
      CHECK(check_extensional_equiv(t, rw, 300, 4242).value().equal);
    }
  }
}

TEST_CASE("zero-size edges") {
  // reduction over an empty vector yields the initial value
  auto red0 = h_reduction(0, sf_plus(), CarrierLit::one());
  CHECK(vec_eq(eval_q(red0, {}), qvec({1})));
  // induction to depth zero produces an empty vector
  auto ind0 = h_induction(0, sf_plus(), CarrierLit::zero());
  CHECK(dims(ind0).value() == Dims{1, 0});
  CHECK(eval_q(ind0, qvec({5})).empty());
  // scalar product of empty halves is the additive identity
  CHECK(vec_eq(eval_q(h_scalarprod(0), {}), qvec({0})));
  // prepending onto an empty input is just the constant prefix
  auto pre = h_prepend(VecOperand::literal({CarrierLit::one(), CarrierLit::zero()}), 0);
  CHECK(dims(pre).value() == Dims{0, 2});
  CHECK(vec_eq(eval_q(pre, {}), qvec({1, 0})));
  // infinity norm of nothing is zero
  CHECK(vec_eq(eval_q(h_infinity_norm(0), {}), qvec({0})));
}
