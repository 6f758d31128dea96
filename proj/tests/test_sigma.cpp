#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hcolc/rng.hpp"
#include "hcolc/sigma.hpp"

using namespace hcolc;
using namespace hcolc::hcol;
using namespace hcolc::sigma;

namespace {

CarrierValue cq(int64_t n, int64_t d = 1) { return CarrierValue(Rational(BigInt(n), BigInt(d))); }

SparseVector svals(std::initializer_list<int64_t> vals) {
  SparseVector v;
  for (auto x : vals) v.push_back(Rtheta::val(cq(x)));
  return v;
}

SparseVector eval_ok(const SHExprPtr& e, const SparseVector& x) {
  ParamEnv env;
  auto r = eval_shcol(e, x, env);
  REQUIRE(r.ok());
  return r.value();
}

}  // namespace

TEST_CASE("embed places the input cell, others structural") {
  auto e = sh_embed(CarrierLit::zero(), 3, IndexExpr::constant(1));
  auto out = eval_ok(e, svals({7}));
  REQUIRE(out.size() == 3);
  CHECK(out[0].is_struct);
  CHECK(out[0].value.is_zero());
  CHECK(!out[1].is_struct);
  CHECK(out[1].value.equals(cq(7)));
  CHECK(out[2].is_struct);
}

TEST_CASE("pick and gather") {
  auto p = sh_pick(CarrierLit::zero(), 4, IndexExpr::constant(2));
  CHECK(eval_ok(p, svals({10, 11, 12, 13}))[0].value.equals(cq(12)));
  auto gm = IndexMap::make({2, 0}, 4);
  REQUIRE(gm.ok());
  auto g = sh_gather(CarrierLit::zero(), 4, 2, gm.value());
  auto out = eval_ok(g, svals({1, 2, 3, 4}));
  CHECK(out[0].value.equals(cq(3)));
  CHECK(out[1].value.equals(cq(1)));
}

TEST_CASE("scatter requires injectivity") {
  CHECK(!IndexMap::make({1, 1}, 3).ok());
  CHECK(IndexMap::make({1, 1}, 3).error().kind == ErrKind::MapNotInjective);
  auto sm = IndexMap::make({2, 0}, 3);
  REQUIRE(sm.ok());
  auto s = sh_scatter(CarrierLit::zero(), 2, 3, sm.value());
  auto out = eval_ok(s, svals({5, 6}));
  CHECK(out[0].value.equals(cq(6)));
  CHECK(out[1].is_struct);
  CHECK(out[2].value.equals(cq(5)));
}

TEST_CASE("vec2union cell semantics") {
  ParamEnv env;
  SparseVector a = {Rtheta::structural(cq(0)), Rtheta::val(cq(5))};
  SparseVector b = {Rtheta::val(cq(3)), Rtheta::structural(cq(0))};
  auto u = vec2union(sf_plus(), a, b, FlagsKind::Safe, env);
  CHECK(u[0].value.equals(cq(3)));
  CHECK(!u[0].is_collision);
  CHECK(u[1].value.equals(cq(5)));
  CHECK(!u[1].is_collision);

  // both non-structural under the collision-tracking monoid
  SparseVector c = {Rtheta::val(cq(4))};
  SparseVector d = {Rtheta::val(cq(5))};
  auto v = vec2union(sf_plus(), c, d, FlagsKind::Safe, env);
  CHECK(v[0].value.equals(cq(9)));
  CHECK(v[0].is_collision);
  auto w = vec2union(sf_plus(), c, d, FlagsKind::Unsafe, env);
  CHECK(w[0].value.equals(cq(9)));
  CHECK(!w[0].is_collision);

  // struct union struct stays struct
  SparseVector s1 = {Rtheta::structural(cq(0))};
  auto su = vec2union(sf_plus(), s1, s1, FlagsKind::Safe, env);
  CHECK(su[0].is_struct);
}

TEST_CASE("safecast/unsafecast are value identities") {
  Rng rng(6);
  auto inner = sh_binop(CarrierLit::zero(), 2, sf_plus());
  auto cast = sh_safecast(sh_unsafecast(inner));
  for (int t = 0; t < 30; ++t) {
    SparseVector x;
    for (int i = 0; i < 4; ++i) x.push_back(Rtheta::val(CarrierValue(rng.rational())));
    auto a = eval_ok(inner, x);
    auto b = eval_ok(cast, x);
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) CHECK(a[i].value.equals(b[i].value));
  }
}

TEST_CASE("sparsity contracts") {
  auto e = sh_embed(CarrierLit::zero(), 3, IndexExpr::constant(1));
  auto c = sparsity_contract(e).value();
  CHECK(c.in == std::set<size_t>{0});
  CHECK(c.out == std::set<size_t>{1});

  auto u = sh_apply2union(CarrierLit::zero(), sf_plus(),
                          sh_embed(CarrierLit::zero(), 3, IndexExpr::constant(0)),
                          sh_embed(CarrierLit::zero(), 3, IndexExpr::constant(2)));
  auto cu = sparsity_contract(u).value();
  CHECK(cu.out == std::set<size_t>{0, 2});

  auto l = sh_lift(h_chebyshev_distance(2), CarrierLit::zero());
  auto cl = sparsity_contract(l).value();
  CHECK(cl.in == std::set<size_t>{0, 1, 2, 3});
  CHECK(cl.out == std::set<size_t>{0});
}

TEST_CASE("facts: iunion over embeds partitions the output") {
  auto fam_body = sh_compose(sh_embed(CarrierLit::zero(), 4, IndexExpr::fam(0)),
                             sh_pick(CarrierLit::zero(), 4, IndexExpr::fam(0)));
  auto e = sh_iunion(CarrierLit::zero(), sf_plus(), 4, fam_body);
  auto rep = facts_check(e, 30, 17);
  CHECK(rep.pass());
  auto c = sparsity_contract(e).value();
  CHECK(c.out == std::set<size_t>({0, 1, 2, 3}));
}

TEST_CASE("facts: overlapping apply2union is flagged") {
  auto bad = sh_apply2union(CarrierLit::zero(), sf_plus(),
                            sh_embed(CarrierLit::zero(), 3, IndexExpr::constant(1)),
                            sh_embed(CarrierLit::zero(), 3, IndexExpr::constant(1)));
  auto rep = facts_check(bad, 10, 3);
  CHECK(!rep.pass());
}

TEST_CASE("facts: lifted dense operator passes trivially") {
  auto rep = facts_check(sh_lift(h_vminus(2), CarrierLit::zero()), 10, 5);
  CHECK(rep.pass());
}

TEST_CASE("lift round trip equals hcol on dense inputs") {
  std::vector<HExprPtr> hs = {
      h_chebyshev_distance(2),
      h_compose(h_reduction(3, sf_plus(), CarrierLit::zero()), h_binop(3, sf_mult())),
      h_scalarprod(2),
  };
  for (const auto& h : hs) {
    auto sh = lift_hcol(h, CarrierLit::zero());
    CHECK(check_sh_vs_hcol(sh, h, 100, 77).value().equal);
  }
}

TEST_CASE("rewrites: lifted leaves become native operators") {
  auto rules = sh_builtin_rules();
  ParamEnv env;

  SUBCASE("binop") {
    auto lifted = sh_lift(h_binop(3, sf_mult()), CarrierLit::zero());
    TraceStep steps[] = {{"lift-binop", {}}};
    auto r = apply_sh_rewrites(lifted, steps, rules);
    REQUIRE(r.ok());
    CHECK(r.value()->op == ShOp::BinOp);
    CHECK(check_sh_equiv(lifted, r.value(), 200, 4).value().equal);
  }
  SUBCASE("inductor") {
    auto lifted = sh_lift(h_inductor(4, sf_mult(), CarrierLit::one()), CarrierLit::zero());
    TraceStep steps[] = {{"lift-inductor", {}}};
    auto r = apply_sh_rewrites(lifted, steps, rules);
    REQUIRE(r.ok());
    CHECK(check_sh_equiv(lifted, r.value(), 200, 5).value().equal);
  }
  SUBCASE("compose distribution") {
    auto h = h_compose(h_infinity_norm(2), h_vminus(2));
    auto lifted = sh_lift(h, CarrierLit::zero());
    TraceStep steps[] = {{"lift-compose", {}}};
    auto r = apply_sh_rewrites(lifted, steps, rules);
    REQUIRE(r.ok());
    CHECK(r.value()->op == ShOp::Compose);
    CHECK(r.value()->f->op == ShOp::Lift);
    CHECK(check_sh_equiv(lifted, r.value(), 200, 6).value().equal);
  }
  SUBCASE("empty trace is identity") {
    auto lifted = sh_lift(h_vminus(2), CarrierLit::zero());
    auto r = apply_sh_rewrites(lifted, {}, rules);
    REQUIRE(r.ok());
    CHECK(r.value() == lifted);
  }
  SUBCASE("cross-split") {
    auto h = h_cross(h_scalarprod(1), h_chebyshev_distance(2));
    auto lifted = sh_lift(h, CarrierLit::zero());
    TraceStep steps[] = {{"cross-split", {}}};
    auto r = apply_sh_rewrites(lifted, steps, rules);
    REQUIRE(r.ok());
    CHECK(r.value()->op == ShOp::Apply2Union);
    CHECK(check_sh_equiv(lifted, r.value(), 150, 7).value().equal);
    CHECK(facts_check(r.value(), 20, 8).pass());
  }
  SUBCASE("cheb-ireduction") {
    auto h = h_compose(h_infinity_norm(2), h_vminus(2));
    auto lifted = sh_lift(h, CarrierLit::zero());
    TraceStep steps[] = {{"lift-compose", {}}, {"cheb-ireduction", {}}};
    auto r = apply_sh_rewrites(lifted, steps, rules);
    REQUIRE(r.ok());
    CHECK(r.value()->op == ShOp::SafeCast);
    CHECK(check_sh_equiv(lifted, r.value(), 150, 9).value().equal);
    // values may be negative; |a-b| >= 0 keeps max(0, .) honest here
  }
  SUBCASE("non-matching rule reports RewriteError") {
    auto lifted = sh_lift(h_vminus(2), CarrierLit::zero());
    TraceStep steps[] = {{"lift-binop", {}}};
    auto r = apply_sh_rewrites(lifted, steps, rules);
    CHECK(!r.ok());
    CHECK(r.error().kind == ErrKind::RewriteError);
  }
}

TEST_CASE("ireduction folds the initial value like the memory template") {
  // two members both writing cell 0: result = dot(dot(z, m0), m1)
  auto member = sh_inductor(CarrierLit::zero(), IndexExpr::fam(0), sf_plus(), CarrierLit::zero());
  auto e = sh_ireduction(CarrierLit::zero(), sf_plus(), 3, member);
  // member j computes j * x; sum = (0 + 0*x) + 1*x + 2*x = 3x
  auto out = eval_ok(e, svals({5}));
  REQUIRE(out.size() == 1);
  CHECK(!out[0].is_struct);
  CHECK(out[0].value.equals(cq(15)));
  CHECK(!out[0].is_collision);
}

TEST_CASE("iunion flags collisions on overlap") {
  auto member = sh_embed(CarrierLit::zero(), 2, IndexExpr::constant(0));  // all write cell 0
  auto e = sh_iunion(CarrierLit::zero(), sf_plus(), 2, member);
  auto out = eval_ok(e, svals({1}));
  CHECK(out[0].is_collision);
  auto rep = facts_check(e, 5, 1);
  CHECK(!rep.pass());
}

TEST_CASE("densified lift equality invariant (property)") {
  Rng rng(123);
  for (int t = 0; t < 20; ++t) {
    size_t n = 1 + rng.below(4);
    auto h = h_compose(h_reduction(n, sf_plus(), CarrierLit::zero()),
                       h_pointwise(n, sf_abs()));
    auto sh = lift_hcol(h, CarrierLit::zero());
    CHECK(check_sh_vs_hcol(sh, h, 50, rng.next()).value().equal);
  }
}

TEST_CASE("collision flags are sticky through later operators") {
  ParamEnv env;
  // force a collision, then push the cell through value-level operators
  SparseVector a = {Rtheta::val(cq(4))};
  SparseVector b = {Rtheta::val(cq(5))};
  auto u = vec2union(sf_plus(), a, b, FlagsKind::Safe, env);
  REQUIRE(u[0].is_collision);
  auto pw = sh_pointwise(CarrierLit::zero(), 1, sf_abs());
  auto r1 = eval_ok(pw, u);
  CHECK(r1[0].is_collision);
  auto ind = sh_inductor(CarrierLit::zero(), IndexExpr::constant(3), sf_plus(), CarrierLit::zero());
  auto r2 = eval_ok(ind, r1);
  CHECK(r2[0].is_collision);
  auto emb = sh_embed(CarrierLit::zero(), 2, IndexExpr::constant(1));
  auto r3 = eval_ok(emb, r2);
  CHECK(r3[1].is_collision);
}
