#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hcolc/mshcol.hpp"
#include "hcolc/rng.hpp"

using namespace hcolc;
using namespace hcolc::mshcol;

namespace {
CarrierValue cq(int64_t n, int64_t d = 1) { return CarrierValue(Rational(BigInt(n), BigInt(d))); }
}  // namespace

TEST_CASE("embed moves the cell to its output offset") {
  MemBlock x;
  x.set(0, cq(7));
  auto e = msh_embed(3, IndexExpr::constant(1));
  auto r = eval_mshcol(e, x, ParamEnv{});
  REQUIRE(r.ok());
  CHECK(r.value().size() == 1);
  CHECK(r.value().lookup(1)->equals(cq(7)));
}

TEST_CASE("pick of an absent key is a sparse read") {
  auto e = msh_pick(4, IndexExpr::constant(2));
  auto r = eval_mshcol(e, MemBlock{}, ParamEnv{});
  CHECK(!r.ok());
  CHECK(r.error().kind == ErrKind::SparseRead);
}

TEST_CASE("apply2union merges disjoint outputs and rejects overlap") {
  // f writes {0,2}, g writes {1,3}
  auto f = msh_apply2union(sf_plus(),
                           msh_embed(4, IndexExpr::constant(0)),
                           msh_embed(4, IndexExpr::constant(2)));
  auto g = msh_apply2union(sf_plus(),
                           msh_embed(4, IndexExpr::constant(1)),
                           msh_embed(4, IndexExpr::constant(3)));
  auto u = msh_apply2union(sf_plus(), f, g);
  MemBlock x;
  x.set(0, cq(9));
  auto r = eval_mshcol(u, x, ParamEnv{});
  REQUIRE(r.ok());
  CHECK(r.value().size() == 4);
  for (uint64_t k = 0; k < 4; ++k) CHECK(r.value().lookup(k)->equals(cq(9)));

  auto bad = msh_apply2union(sf_plus(),
                             msh_embed(3, IndexExpr::constant(1)),
                             msh_embed(3, IndexExpr::constant(1)));
  auto rb = eval_mshcol(bad, x, ParamEnv{});
  CHECK(!rb.ok());
  CHECK(rb.error().kind == ErrKind::MergeCollision);
}

TEST_CASE("svector/mem_block conversions") {
  using sigma::Rtheta;
  sigma::SparseVector v = {Rtheta::val(cq(10)), Rtheta::structural(cq(0)), Rtheta::val(cq(20)),
                           Rtheta::val(cq(30))};
  MemBlock b = svector_to_mem_block(v);
  CHECK(b.size() == 3);
  CHECK(b.lookup(0)->equals(cq(10)));
  CHECK(!b.contains(1));
  CHECK(b.lookup(2)->equals(cq(20)));
  CHECK(b.lookup(3)->equals(cq(30)));

  auto back = mem_block_to_svector(b, 4, cq(0));
  REQUIRE(back.ok());
  CHECK(back.value()[1].is_struct);
  CHECK(back.value()[0].value.equals(cq(10)));

  // empty block with n=2 gives two structural cells
  auto empty = mem_block_to_svector(MemBlock{}, 2, cq(0));
  REQUIRE(empty.ok());
  CHECK(empty.value()[0].is_struct);
  CHECK(empty.value()[1].is_struct);

  // key out of range is rejected
  MemBlock oob;
  oob.set(7, cq(1));
  CHECK(!mem_block_to_svector(oob, 4, cq(0)).ok());

  // dense round trip is the identity
  Rng rng(8);
  sigma::SparseVector dense;
  for (int i = 0; i < 6; ++i) dense.push_back(Rtheta::val(CarrierValue(rng.rational())));
  auto rt = mem_block_to_svector(svector_to_mem_block(dense), 6, cq(0)).value();
  for (int i = 0; i < 6; ++i) {
    CHECK(!rt[i].is_struct);
    CHECK(rt[i].value.equals(dense[i].value));
  }
}

TEST_CASE("facts: well-formed operators never error on contract inputs") {
  auto e = msh_compose(msh_binop(2, sf_plus()), msh_pointwise(4, sf_abs()));
  auto rep = msh_facts_check(e, 50, 12);
  CHECK(rep.pass());

  auto bad = msh_apply2union(sf_plus(),
                             msh_embed(3, IndexExpr::constant(1)),
                             msh_embed(3, IndexExpr::constant(1)));
  CHECK(!msh_facts_check(bad, 10, 13).pass());

  // pick on full input passes trivially
  CHECK(msh_facts_check(msh_pick(3, IndexExpr::constant(1)), 10, 14).pass());
}

TEST_CASE("compat: matching pairs agree, mismatched pairs do not") {
  using namespace hcolc::sigma;
  auto sp = sh_pointwise(CarrierLit::zero(), 3, sf_abs());
  auto mp = msh_pointwise(3, sf_abs());
  CHECK(check_sh_msh_compat(sp, mp, 200, 5).ok);

  auto se = sh_embed(CarrierLit::zero(), 3, IndexExpr::constant(1));
  auto me_wrong = msh_embed(3, IndexExpr::constant(2));
  CHECK(!check_sh_msh_compat(se, me_wrong, 50, 6).ok);

  // empty families on both sides agree (both produce empty output)
  auto sfam = sh_iunion(CarrierLit::zero(), sf_plus(), 0,
                        sh_embed(CarrierLit::zero(), 2, IndexExpr::fam(0)));
  auto mfam = msh_iunion(0, msh_embed(2, IndexExpr::fam(0)));
  CHECK(check_sh_msh_compat(sfam, mfam, 10, 7).ok);
}

TEST_CASE("compat: ireduction with initial value") {
  using namespace hcolc::sigma;
  // member j computes j*x at cell 0; both layers fold with + seeded by 0
  auto sbody = sh_inductor(CarrierLit::zero(), IndexExpr::fam(0), sf_plus(), CarrierLit::zero());
  auto sred = sh_ireduction(CarrierLit::zero(), sf_plus(), 3, sbody);
  auto mbody = msh_inductor(IndexExpr::fam(0), sf_plus(), CarrierLit::zero());
  auto mred = msh_ireduction(CarrierLit::zero(), sf_plus(), 3, mbody);
  CHECK(check_sh_msh_compat(sred, mred, 200, 8).ok);

  MemBlock x;
  x.set(0, cq(5));
  auto r = eval_mshcol(mred, x, ParamEnv{});
  REQUIRE(r.ok());
  CHECK(r.value().lookup(0)->equals(cq(15)));
}

TEST_CASE("memory next_key is never an existing address") {
  Memory m;
  CHECK(m.next_key() == 0);
  m.set(0, MemBlock{});
  m.set(5, MemBlock{});
  CHECK(m.next_key() == 6);
  CHECK(!m.exists(6));
  m.remove(5);
  CHECK(m.next_key() == 1);
  CHECK(!m.exists(1));
}

TEST_CASE("ireduction keyed merge over partially written members") {
  using namespace hcolc::sigma;
  // member 0 writes cell 0, member 1 writes cell 1, member 2 writes cell 0
  // again; cells fold independently, absent cells stay absent
  auto body = msh_compose(msh_embed(3, IndexExpr::add(IndexExpr::fam(0), IndexExpr::constant(0))),
                          msh_pick(1, IndexExpr::constant(0)));
  // fam index 2 would write cell 2; restrict to two members so cell 2 stays absent
  auto red = msh_ireduction(CarrierLit::zero(), sf_plus(), 2, body);
  MemBlock x;
  x.set(0, cq(5));
  auto r = eval_mshcol(red, x, ParamEnv{});
  REQUIRE(r.ok());
  CHECK(r.value().size() == 2);
  CHECK(r.value().lookup(0)->equals(cq(5)));
  CHECK(r.value().lookup(1)->equals(cq(5)));
  CHECK(!r.value().contains(2));
}
