#include "hcolc/generators.hpp"

namespace hcolc::gen {

using namespace hcolc::dhcol;

namespace {

enum class VT : uint8_t { Ptr, Nat, CType };

struct Scope {
  std::vector<VT> vars;  // index 0 = most recent

  std::vector<size_t> of(VT t) const {
    std::vector<size_t> out;
    for (size_t i = 0; i < vars.size(); ++i)
      if (vars[i] == t) out.push_back(i);
    return out;
  }
};

NExprPtr gen_nexpr(Rng& rng, const Scope& sc, size_t depth) {
  auto nats = sc.of(VT::Nat);
  if (depth == 0 || rng.chance(1, 2)) {
    if (!nats.empty() && rng.chance(1, 2)) return n_var(nats[rng.below(nats.size())]);
    return n_const_u(rng.below(6));
  }
  static const NOp ops[] = {NOp::Plus, NOp::Minus, NOp::Mult, NOp::Div,
                            NOp::Mod,  NOp::Min,   NOp::Max};
  return n_bin(ops[rng.below(7)], gen_nexpr(rng, sc, depth - 1), gen_nexpr(rng, sc, depth - 1));
}

AExprPtr gen_aexpr(Rng& rng, const Scope& sc, size_t depth) {
  auto cts = sc.of(VT::CType);
  auto ptrs = sc.of(VT::Ptr);
  if (depth == 0 || rng.chance(1, 3)) {
    uint64_t pick = rng.below(3);
    if (pick == 0 && !cts.empty()) return a_var(cts[rng.below(cts.size())]);
    if (pick == 1 && !ptrs.empty())
      return a_nth(m_deref(PExpr{ptrs[rng.below(ptrs.size())]}), gen_nexpr(rng, sc, 1));
    return a_const(rng.chance(1, 2) ? CarrierLit::zero() : CarrierLit::one());
  }
  if (rng.chance(1, 6)) return a_abs(gen_aexpr(rng, sc, depth - 1));
  static const AOp ops[] = {AOp::Plus, AOp::Minus, AOp::Mult, AOp::Min, AOp::Max, AOp::ZLess};
  return a_bin(ops[rng.below(6)], gen_aexpr(rng, sc, depth - 1), gen_aexpr(rng, sc, depth - 1));
}

PExpr gen_ptr(Rng& rng, const Scope& sc) {
  auto ptrs = sc.of(VT::Ptr);
  return PExpr{ptrs[rng.below(ptrs.size())]};
}

DshPtr gen_op(Rng& rng, Scope& sc, const DGenOpts& o, size_t depth) {
  uint64_t leaf = rng.below(depth == 0 ? 6 : 9);
  switch (leaf) {
    case 0: return d_nop();
    case 1:
      return d_assign(MemRef{gen_ptr(rng, sc), gen_nexpr(rng, sc, 1)},
                      MemRef{gen_ptr(rng, sc), gen_nexpr(rng, sc, 1)});
    case 2: return d_meminit(gen_ptr(rng, sc), CarrierLit::zero());
    case 3: {
      Scope inner = sc;
      inner.vars.insert(inner.vars.begin(), {VT::CType, VT::Nat});
      return d_imap(BigInt(static_cast<int64_t>(rng.below(o.block_size + 1))), gen_ptr(rng, sc),
                    gen_ptr(rng, sc), gen_aexpr(rng, inner, 2));
    }
    case 4: {
      Scope inner = sc;
      inner.vars.insert(inner.vars.begin(), {VT::CType, VT::CType, VT::Nat});
      return d_binop(BigInt(static_cast<int64_t>(rng.below(o.block_size / 2 + 1))), gen_ptr(rng, sc),
                     gen_ptr(rng, sc), gen_aexpr(rng, inner, 2));
    }
    case 5: {
      Scope inner = sc;
      inner.vars.insert(inner.vars.begin(), {VT::CType, VT::CType});
      // keep the iteration count small and runnable
      NExprPtr count = n_bin(NOp::Min, gen_nexpr(rng, sc, 1), n_const_u(rng.below(6)));
      return d_power(count, MemRef{gen_ptr(rng, sc), gen_nexpr(rng, sc, 1)},
                     MemRef{gen_ptr(rng, sc), gen_nexpr(rng, sc, 1)}, gen_aexpr(rng, inner, 2),
                     CarrierLit::zero());
    }
    case 6: {
      Scope inner = sc;
      inner.vars.insert(inner.vars.begin(), VT::Nat);
      DshPtr body = gen_op(rng, inner, o, depth - 1);
      return d_loop(BigInt(static_cast<int64_t>(rng.below(o.max_loop + 1))), body);
    }
    case 7: {
      Scope inner = sc;
      inner.vars.insert(inner.vars.begin(), VT::Ptr);
      DshPtr body = gen_op(rng, inner, o, depth - 1);
      return d_alloc(BigInt(static_cast<int64_t>(1 + rng.below(o.block_size))), body);
    }
    default:
      return d_seq(gen_op(rng, sc, o, depth - 1), gen_op(rng, sc, o, depth - 1));
  }
}

}  // namespace

DProgram random_dsh_program(Rng& rng, const DGenOpts& o) {
  DProgram p;
  Scope sc;
  for (size_t i = 0; i < o.blocks; ++i) {
    sc.vars.push_back(VT::Ptr);
    MemBlock b;
    if (o.dense_blocks)
      for (uint64_t k = 0; k < o.block_size; ++k) b.set(k, CarrierValue(rng.rational(50, 4)));
    p.mem.set(i, std::move(b));
  }
  // most recent entry = de Bruijn 0 = last block
  for (size_t i = 0; i < o.blocks; ++i)
    p.ctx.push(DSHVal::of_ptr(o.blocks - 1 - i, NatValue::big(BigInt::from_u64(o.block_size))));
  p.op = gen_op(rng, sc, o, o.max_depth);
  return p;
}

// ---- Σ-HCOL generator ---------------------------------------------------------

namespace {

using namespace hcolc::sigma;

ScalarFun random_unary(Rng& rng) {
  if (rng.chance(1, 2)) return sf_abs();
  // x + 1 keeps things total
  return ScalarFun{1, ct_binary(CTExpr::Tag::Plus, ct_arg(0), ct_lit(CarrierLit::one()))};
}

ScalarFun random_binary(Rng& rng) {
  switch (rng.below(4)) {
    case 0: return sf_plus();
    case 1: return sf_sub();
    case 2: return sf_min();
    default: return sf_max();
  }
}

// produces (n -> 1) operators
SHExprPtr gen_to_scalar(Rng& rng, size_t n, size_t depth) {
  CarrierLit z = CarrierLit::zero();
  if (n == 1 && depth > 0 && rng.chance(1, 3))
    return sh_compose(sh_inductor(z, IndexExpr::constant(rng.below(4)), sf_mult(), CarrierLit::one()),
                      gen_to_scalar(rng, n, 0));
  if (depth > 0 && rng.chance(1, 3)) {
    // IReduction of picks: sum/fold of all elements, plus-seeded by zero
    auto body = sh_compose(sh_pointwise(z, 1, random_unary(rng)),
                           sh_pick(z, n, IndexExpr::fam(0)));
    return sh_safecast(sh_ireduction(z, sf_plus(), n, body));
  }
  return sh_pick(z, n, IndexExpr::constant(rng.below(n)));
}

// produces (n -> n) operators
SHExprPtr gen_square(Rng& rng, size_t n, size_t depth) {
  CarrierLit z = CarrierLit::zero();
  uint64_t c = rng.below(depth == 0 ? 2 : 5);
  switch (c) {
    case 0: return sh_pointwise(z, n, random_unary(rng));
    case 1: {
      // identity-shaped IUnion route with a per-member tweak
      auto body = sh_compose(sh_embed(z, n, IndexExpr::fam(0)),
                             sh_compose(sh_pointwise(z, 1, random_unary(rng)),
                                        sh_pick(z, n, IndexExpr::fam(0))));
      return sh_iunion(z, sf_plus(), n, body);
    }
    case 2: return sh_compose(gen_square(rng, n, depth - 1), gen_square(rng, n, depth - 1));
    case 3: {
      if (n < 2) return gen_square(rng, n, 0);
      // split into two disjoint windows computed independently
      size_t k = 1 + rng.below(n - 1);
      auto left = sh_compose(
          sh_embed(z, n, IndexExpr::constant(0)),
          sh_compose(gen_to_scalar(rng, n, depth - 1), gen_square(rng, n, 0)));
      auto right_body = sh_compose(
          sh_embed(z, n, IndexExpr::add(IndexExpr::constant(1), IndexExpr::fam(0))),
          sh_compose(sh_pointwise(z, 1, random_unary(rng)),
                     sh_pick(z, n, IndexExpr::fam(0))));
      auto right = sh_iunion(z, sf_plus(), n - 1, right_body);
      (void)k;
      return sh_apply2union(z, sf_plus(), left, right);
    }
    default: return sh_safecast(sh_unsafecast(gen_square(rng, n, depth - 1)));
  }
}

}  // namespace

sigma::SHExprPtr random_final_shexpr(Rng& rng, size_t input_dim, size_t depth) {
  // top level: square operator, optionally post-processed by a binop collapse
  auto e = gen_square(rng, input_dim, depth);
  if (input_dim % 2 == 0 && input_dim > 0 && rng.chance(1, 3))
    return sigma::sh_compose(sigma::sh_binop(CarrierLit::zero(), input_dim / 2, random_binary(rng)), e);
  return e;
}

}  // namespace hcolc::gen
