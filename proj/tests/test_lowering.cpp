#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hcolc/generators.hpp"
#include "hcolc/lowering.hpp"

using namespace hcolc;
using namespace hcolc::lowering;
using namespace hcolc::dhcol;

namespace {
CarrierValue cq(int64_t n, int64_t d = 1) { return CarrierValue(Rational(BigInt(n), BigInt(d))); }
}  // namespace

TEST_CASE("resolver algebra") {
  auto id = VarResolver::id();
  auto fake1 = VarResolver::fake(id, 1);
  for (size_t r = 0; r <= 64; ++r) {
    CHECK(id.resolve(r) == r);
    CHECK(fake1.resolve(r) == r + 1);
  }
  auto lam = VarResolver::lambda(id, 3);
  for (size_t r = 0; r < 3; ++r) CHECK(lam.resolve(r) == r);
  for (size_t r = 3; r <= 64; ++r) CHECK(lam.resolve(r) == r);
  // paper worked example: parent = Fake(Id,1), lambda of one argument,
  // argument resolves to itself, the outer variable lands two binders up
  auto ex = VarResolver::lambda(fake1, 1);
  CHECK(ex.resolve(0) == 0);
  CHECK(ex.resolve(1) == 2);
}

TEST_CASE("shcol_to_mshcol is constructor-wise with casts erased") {
  using namespace hcolc::sigma;
  auto sh = sh_safecast(sh_binop(CarrierLit::zero(), 3, sf_mult()));
  auto m = shcol_to_mshcol(sh);
  REQUIRE(m.ok());
  CHECK(m.value()->op == mshcol::MOp::BinOp);

  auto comp = sh_compose(sh_pick(CarrierLit::zero(), 2, IndexExpr::constant(0)),
                         sh_pointwise(CarrierLit::zero(), 2, sf_abs()));
  auto mc = shcol_to_mshcol(comp);
  REQUIRE(mc.ok());
  CHECK(mc.value()->op == mshcol::MOp::Compose);

  // residual lifted operator is not lowerable
  auto lifted = sh_lift(hcol::h_vminus(2), CarrierLit::zero());
  auto bad = shcol_to_mshcol(lifted);
  CHECK(!bad.ok());
  CHECK(bad.error().kind == ErrKind::Unsupported);
}

TEST_CASE("compose lowers to alloc/seq with shifted references") {
  using namespace hcolc::sigma;
  auto sh = sh_compose(sh_pointwise(CarrierLit::zero(), 2, sf_abs()),
                       sh_binop(CarrierLit::zero(), 2, sf_plus()));
  auto m = shcol_to_mshcol(sh).value();
  auto prog = lower_mshcol_program(m, {});
  REQUIRE(prog.ok());
  const auto& op = prog.value().op;
  REQUIRE(op->op == DOp::Alloc);
  CHECK(op->size == BigInt(2));
  REQUIRE(op->body->op == DOp::Seq);
  // top level: X = PVar 0, Y = PVar 1; inside the alloc both shift past the
  // temp (PVar 0): inner writes the temp, outer reads it
  CHECK(op->body->a->op == DOp::BinOp);
  CHECK(op->body->a->x.var == 1);
  CHECK(op->body->a->y.var == 0);
  CHECK(op->body->b->op == DOp::IMap);
  CHECK(op->body->b->x.var == 0);
  CHECK(op->body->b->y.var == 2);
}

TEST_CASE("ireduction lowers to the meminit/alloc/loop/map2 template") {
  using namespace hcolc::sigma;
  auto member = sh_inductor(CarrierLit::zero(), IndexExpr::fam(0), sf_plus(), CarrierLit::zero());
  auto sh = sh_safecast(sh_ireduction(CarrierLit::zero(), sf_plus(), 3, member));
  auto m = shcol_to_mshcol(sh).value();
  auto prog = lower_mshcol_program(m, {}).value();
  const auto& op = prog.op;
  REQUIRE(op->op == DOp::Seq);
  CHECK(op->a->op == DOp::MemInit);
  CHECK(op->a->y.var == 1);  // top-level Y
  REQUIRE(op->b->op == DOp::Alloc);
  REQUIRE(op->b->body->op == DOp::Loop);
  CHECK(op->b->body->bound == BigInt(3));
  REQUIRE(op->b->body->body->op == DOp::Seq);
  const auto& fold = op->b->body->body->b;
  REQUIRE(fold->op == DOp::MemMap2);
  // y' with the de Bruijn index increased by two
  CHECK(fold->x.var == 3);
  CHECK(fold->x1.var == 1);
  CHECK(fold->y.var == 3);
}

TEST_CASE("lowered programs satisfy purity and the delta relation") {
  using namespace hcolc::sigma;
  // a representative little pipeline: binop after a pointwise through a temp
  auto sh = sh_compose(sh_binop(CarrierLit::zero(), 2, sf_sub()),
                       sh_pointwise(CarrierLit::zero(), 4, sf_abs()));
  auto m = shcol_to_mshcol(sh).value();
  auto prog = lower_mshcol_program(m, {}).value();

  ParamEnv env;
  mshcol::MemBlock input;
  for (uint64_t k = 0; k < 4; ++k) input.set(k, cq(static_cast<int64_t>(k) - 2));
  auto inst = instantiate(prog, env, input, CarrierKind::Rational);

  auto pure = check_dsh_pure(prog.op, PExpr{1}, inst.ctx, inst.mem, 100, 5);
  CHECK(pure.ok);
  auto compat = check_msh_dsh_compat(m, prog, 500, 6);
  CHECK(compat.ok);
  // DSHNop passes purity trivially
  CHECK(check_dsh_pure(d_nop(), PExpr{1}, inst.ctx, inst.mem, 10, 7).ok);
}

TEST_CASE("writing anything but y violates purity") {
  Memory mem;
  mshcol::MemBlock x;
  x.set(0, cq(3));
  mem.set(0, x);
  mem.set(1, mshcol::MemBlock{});
  EvalContext ctx;
  ctx.push(DSHVal::of_ptr(0, NatValue::big(BigInt(2))));  // PVar 1 = x
  ctx.push(DSHVal::of_ptr(1, NatValue::big(BigInt(2))));  // PVar 0 = y
  // writes into x instead of y
  auto bad = d_assign(MemRef{PExpr{1}, n_const_u(0)}, MemRef{PExpr{1}, n_const_u(1)});
  auto v = check_dsh_pure(bad, PExpr{0}, ctx, mem, 20, 8);
  CHECK(!v.ok);
}

TEST_CASE("delta relation catches a wrong destination offset") {
  using namespace hcolc::sigma;
  auto sh = sh_embed(CarrierLit::zero(), 3, IndexExpr::constant(1));
  auto m = shcol_to_mshcol(sh).value();
  auto prog = lower_mshcol_program(m, {}).value();
  CHECK(check_msh_dsh_compat(m, prog, 200, 9).ok);

  // mutate: write offset 2 instead of 1
  LoweredProgram wrong = prog;
  wrong.op = d_assign(MemRef{PExpr{0}, n_const_u(0)}, MemRef{PExpr{1}, n_const_u(2)});
  auto v = check_msh_dsh_compat(m, wrong, 50, 10);
  CHECK(!v.ok);
}

TEST_CASE("family indices land on the right loop variables") {
  using namespace hcolc::sigma;
  // IUnion j: y[j] := x[j] (embed/pick routed through the family index)
  auto body = sh_compose(sh_embed(CarrierLit::zero(), 3, IndexExpr::fam(0)),
                         sh_pick(CarrierLit::zero(), 3, IndexExpr::fam(0)));
  auto sh = sh_iunion(CarrierLit::zero(), sf_plus(), 3, body);
  auto m = shcol_to_mshcol(sh).value();
  auto prog = lower_mshcol_program(m, {}).value();
  CHECK(check_msh_dsh_compat(m, prog, 300, 11).ok);

  mshcol::MemBlock input;
  input.set(0, cq(5));
  input.set(1, cq(6));
  input.set(2, cq(7));
  auto inst = instantiate(prog, ParamEnv{}, input, CarrierKind::Rational);
  auto r = eval_dshoperator(inst.ctx, prog.op, inst.mem, estimate_fuel(prog.op), DEvalOpts{});
  REQUIRE(r.has_value());
  REQUIRE(r->ok());
  const auto* y = r->value().lookup_ref(inst.y_addr);
  for (uint64_t k = 0; k < 3; ++k) CHECK(y->lookup(k)->equals(cq(5 + static_cast<int64_t>(k))));
}

TEST_CASE("parameter vectors become globals resolved through binders") {
  using namespace hcolc::sigma;
  // pointwise j: y[j] = a[j] * x[j], with a a named parameter
  ScalarFun f{1, ct_binary(CTExpr::Tag::Mult, ct_arg(0),
                           ct_param_nth("a", IndexExpr::constant(0)))};
  auto body = sh_compose(sh_embed(CarrierLit::zero(), 2, IndexExpr::fam(0)),
                         sh_compose(sh_pointwise(CarrierLit::zero(), 1, f),
                                    sh_pick(CarrierLit::zero(), 2, IndexExpr::fam(0))));
  auto sh = sh_iunion(CarrierLit::zero(), sf_plus(), 2, body);
  auto m = shcol_to_mshcol(sh).value();
  auto prog = lower_mshcol_program(m, {{"a", 1}});
  REQUIRE(prog.ok());
  REQUIRE(prog.value().globals.items.size() == 1);
  CHECK(prog.value().globals.items[0].name == "g0");
  CHECK(prog.value().globals.items[0].param == "a");
  CHECK(check_msh_dsh_compat(m, prog.value(), 300, 12).ok);
}

TEST_CASE("generated final-subset operators survive the whole lowering chain") {
  Rng rng(2026);
  int lowered = 0;
  for (int t = 0; t < 12; ++t) {
    size_t dim = 2 + rng.below(3);
    auto sh = gen::random_final_shexpr(rng, dim, 2);
    auto facts = sigma::facts_check(sh, 20, rng.next());
    REQUIRE(facts.pass());
    auto m = shcol_to_mshcol(sh);
    REQUIRE(m.ok());
    CHECK(mshcol::check_sh_msh_compat(sh, m.value(), 100, rng.next()).ok);
    CHECK(mshcol::msh_facts_check(m.value(), 50, rng.next()).pass());
    auto prog = lower_mshcol_program(m.value(), {});
    REQUIRE(prog.ok());
    CHECK(check_msh_dsh_compat(m.value(), prog.value(), 100, rng.next()).ok);
    ++lowered;
  }
  CHECK(lowered == 12);
}
