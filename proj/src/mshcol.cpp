#include "hcolc/mshcol.hpp"

#include "hcolc/rng.hpp"

namespace hcolc::mshcol {

bool MemBlock::equals(const MemBlock& o) const {
  if (cells_.size() != o.cells_.size()) return false;
  auto it = cells_.begin();
  auto jt = o.cells_.begin();
  for (; it != cells_.end(); ++it, ++jt) {
    if (it->first != jt->first || !it->second.equals(jt->second)) return false;
  }
  return true;
}

namespace {
MSHExprPtr mk(MSHExpr e) { return std::make_shared<const MSHExpr>(std::move(e)); }
}  // namespace

MSHExprPtr msh_embed(size_t n, IndexExpr b) {
  MSHExpr e{};
  e.op = MOp::Embed;
  e.n = n;
  e.b = std::move(b);
  return mk(std::move(e));
}

MSHExprPtr msh_pick(size_t n, IndexExpr b) {
  MSHExpr e{};
  e.op = MOp::Pick;
  e.n = n;
  e.b = std::move(b);
  return mk(std::move(e));
}

MSHExprPtr msh_pointwise(size_t n, ScalarFun f) {
  MSHExpr e{};
  e.op = MOp::Pointwise;
  e.n = n;
  e.fn = std::move(f);
  return mk(std::move(e));
}

MSHExprPtr msh_binop(size_t n, ScalarFun f) {
  MSHExpr e{};
  e.op = MOp::BinOp;
  e.n = n;
  e.fn = std::move(f);
  return mk(std::move(e));
}

MSHExprPtr msh_inductor(IndexExpr count, ScalarFun f, CarrierLit z) {
  MSHExpr e{};
  e.op = MOp::Inductor;
  e.count = std::move(count);
  e.fn = std::move(f);
  e.z = std::move(z);
  return mk(std::move(e));
}

MSHExprPtr msh_apply2union(ScalarFun dot, MSHExprPtr f, MSHExprPtr g) {
  MSHExpr e{};
  e.op = MOp::Apply2Union;
  e.dot = std::move(dot);
  e.f = std::move(f);
  e.g = std::move(g);
  return mk(std::move(e));
}

MSHExprPtr msh_compose(MSHExprPtr f, MSHExprPtr g) {
  MSHExpr e{};
  e.op = MOp::Compose;
  e.f = std::move(f);
  e.g = std::move(g);
  return mk(std::move(e));
}

MSHExprPtr msh_ireduction(CarrierLit z, ScalarFun dot, size_t size, MSHExprPtr body) {
  MSHExpr e{};
  e.op = MOp::IReduction;
  e.z = std::move(z);
  e.dot = std::move(dot);
  e.fam = MFamily{size, std::move(body)};
  return mk(std::move(e));
}

MSHExprPtr msh_iunion(size_t size, MSHExprPtr body) {
  MSHExpr e{};
  e.op = MOp::IUnion;
  e.fam = MFamily{size, std::move(body)};
  return mk(std::move(e));
}

Result<hcol::Dims> dims(const MSHExprPtr& e) {
  using R = Result<hcol::Dims>;
  switch (e->op) {
    case MOp::Embed: return hcol::Dims{1, e->n};
    case MOp::Pick: return hcol::Dims{e->n, 1};
    case MOp::Pointwise: return hcol::Dims{e->n, e->n};
    case MOp::BinOp: return hcol::Dims{e->n + e->n, e->n};
    case MOp::Inductor: return hcol::Dims{1, 1};
    case MOp::Apply2Union: {
      auto df = dims(e->f), dg = dims(e->g);
      if (!df.ok()) return df;
      if (!dg.ok()) return dg;
      if (!(df.value() == dg.value()))
        return R::err(ErrKind::IllTyped, "MApply2Union: operand dims differ");
      return df;
    }
    case MOp::Compose: {
      auto df = dims(e->f), dg = dims(e->g);
      if (!df.ok()) return df;
      if (!dg.ok()) return dg;
      if (dg.value().out != df.value().in)
        return R::err(ErrKind::IllTyped, "MSHCompose: inner output != outer input");
      return hcol::Dims{dg.value().in, df.value().out};
    }
    case MOp::IReduction:
    case MOp::IUnion:
      if (!e->fam.body) return R::err(ErrKind::IllTyped, "family without body");
      return dims(e->fam.body);
  }
  return R::err(ErrKind::IllTyped, "dims: bad op");
}

namespace {

std::set<size_t> full_set(size_t n) {
  std::set<size_t> s;
  for (size_t i = 0; i < n; ++i) s.insert(i);
  return s;
}

Result<sigma::SparsityContract> contract_rec(const MSHExprPtr& e, std::vector<uint64_t>& fam) {
  using R = Result<sigma::SparsityContract>;
  switch (e->op) {
    case MOp::Embed: {
      uint64_t b = e->b.eval(fam);
      if (b >= e->n) return R::err(ErrKind::IllTyped, "MSHEmbed: position out of range");
      return sigma::SparsityContract{{0}, {static_cast<size_t>(b)}};
    }
    case MOp::Pick: {
      uint64_t b = e->b.eval(fam);
      if (b >= e->n) return R::err(ErrKind::IllTyped, "MSHPick: position out of range");
      return sigma::SparsityContract{{static_cast<size_t>(b)}, {0}};
    }
    case MOp::Pointwise: return sigma::SparsityContract{full_set(e->n), full_set(e->n)};
    case MOp::BinOp: return sigma::SparsityContract{full_set(e->n + e->n), full_set(e->n)};
    case MOp::Inductor: return sigma::SparsityContract{{0}, {0}};
    case MOp::Apply2Union: {
      auto cf = contract_rec(e->f, fam), cg = contract_rec(e->g, fam);
      if (!cf.ok()) return cf;
      if (!cg.ok()) return cg;
      sigma::SparsityContract c = cf.value();
      c.in.insert(cg.value().in.begin(), cg.value().in.end());
      c.out.insert(cg.value().out.begin(), cg.value().out.end());
      return c;
    }
    case MOp::Compose: {
      auto cf = contract_rec(e->f, fam), cg = contract_rec(e->g, fam);
      if (!cf.ok()) return cf;
      if (!cg.ok()) return cg;
      return sigma::SparsityContract{cg.value().in, cf.value().out};
    }
    case MOp::IReduction:
    case MOp::IUnion: {
      sigma::SparsityContract c;
      for (uint64_t j = 0; j < e->fam.size; ++j) {
        fam.push_back(j);
        auto cm = contract_rec(e->fam.body, fam);
        fam.pop_back();
        if (!cm.ok()) return cm;
        c.in.insert(cm.value().in.begin(), cm.value().in.end());
        c.out.insert(cm.value().out.begin(), cm.value().out.end());
      }
      return c;
    }
  }
  return R::err(ErrKind::IllTyped, "contract: bad op");
}

struct MEvalState {
  const ParamEnv* env;
  CarrierKind kind;
  sym::SexprArena* arena;
  std::vector<uint64_t> fam_stack;
};

Result<MemBlock> eval_rec(const MSHExprPtr& e, const MemBlock& x, MEvalState& st) {
  using R = Result<MemBlock>;
  ScalarEvalCtx ctx{st.env, st.fam_stack, st.kind, st.arena};
  auto read = [&](const MemBlock& b, uint64_t k) -> Result<CarrierValue> {
    auto v = b.lookup(k);
    if (!v) return Result<CarrierValue>::err(ErrKind::SparseRead,
                                             "read of uninitialized offset " + std::to_string(k));
    return *v;
  };
  switch (e->op) {
    case MOp::Embed: {
      uint64_t b = e->b.eval(st.fam_stack);
      if (b >= e->n) return R::err(ErrKind::RangeError, "MSHEmbed: position out of range");
      auto v = read(x, 0);
      if (!v.ok()) return v.error();
      MemBlock out;
      out.set(b, v.value());
      return out;
    }
    case MOp::Pick: {
      uint64_t b = e->b.eval(st.fam_stack);
      if (b >= e->n) return R::err(ErrKind::RangeError, "MSHPick: position out of range");
      auto v = read(x, b);
      if (!v.ok()) return v.error();
      MemBlock out;
      out.set(0, v.value());
      return out;
    }
    case MOp::Pointwise: {
      MemBlock out;
      for (size_t j = 0; j < e->n; ++j) {
        auto v = read(x, j);
        if (!v.ok()) return v.error();
        CarrierValue args[1] = {v.value()};
        out.set(j, eval_scalar(e->fn, args, ctx));
      }
      return out;
    }
    case MOp::BinOp: {
      MemBlock out;
      for (size_t j = 0; j < e->n; ++j) {
        auto a = read(x, j);
        if (!a.ok()) return a.error();
        auto b = read(x, e->n + j);
        if (!b.ok()) return b.error();
        CarrierValue args[2] = {a.value(), b.value()};
        out.set(j, eval_scalar(e->fn, args, ctx));
      }
      return out;
    }
    case MOp::Inductor: {
      auto v = read(x, 0);
      if (!v.ok()) return v.error();
      uint64_t cnt = e->count.eval(st.fam_stack);
      CarrierValue acc = e->z.materialize(st.kind, st.arena);
      for (uint64_t k = 0; k < cnt; ++k) {
        CarrierValue args[2] = {acc, v.value()};
        acc = eval_scalar(e->fn, args, ctx);
      }
      MemBlock out;
      out.set(0, acc);
      return out;
    }
    case MOp::Apply2Union: {
      auto rf = eval_rec(e->f, x, st);
      if (!rf.ok()) return rf;
      auto rg = eval_rec(e->g, x, st);
      if (!rg.ok()) return rg;
      MemBlock out = rf.value();
      for (const auto& [k, v] : rg.value().cells()) {
        if (out.contains(k))
          return R::err(ErrKind::MergeCollision, "key " + std::to_string(k) + " written twice");
        out.set(k, v);
      }
      return out;
    }
    case MOp::Compose: {
      auto rg = eval_rec(e->g, x, st);
      if (!rg.ok()) return rg;
      return eval_rec(e->f, rg.value(), st);
    }
    case MOp::IUnion: {
      MemBlock out;
      for (uint64_t j = 0; j < e->fam.size; ++j) {
        st.fam_stack.push_back(j);
        auto rm = eval_rec(e->fam.body, x, st);
        st.fam_stack.pop_back();
        if (!rm.ok()) return rm;
        for (const auto& [k, v] : rm.value().cells()) {
          if (out.contains(k))
            return R::err(ErrKind::MergeCollision, "key " + std::to_string(k) + " written twice");
          out.set(k, v);
        }
      }
      return out;
    }
    case MOp::IReduction: {
      // keyed dot-merge seeded with the initial value
      MemBlock out;
      CarrierValue z = e->z.materialize(st.kind, st.arena);
      for (uint64_t j = 0; j < e->fam.size; ++j) {
        st.fam_stack.push_back(j);
        auto rm = eval_rec(e->fam.body, x, st);
        st.fam_stack.pop_back();
        if (!rm.ok()) return rm;
        for (const auto& [k, v] : rm.value().cells()) {
          CarrierValue acc = out.contains(k) ? *out.lookup(k) : z;
          CarrierValue args[2] = {acc, v};
          out.set(k, eval_scalar(e->dot, args, ctx));
        }
      }
      return out;
    }
  }
  return R::err(ErrKind::IllTyped, "eval_mshcol: bad op");
}

}  // namespace

Result<sigma::SparsityContract> msh_contract(const MSHExprPtr& e) {
  std::vector<uint64_t> fam;
  return contract_rec(e, fam);
}

Result<MemBlock> eval_mshcol(const MSHExprPtr& e, const MemBlock& x, const ParamEnv& env,
                             const MEvalOpts& opts) {
  MEvalState st{&env, opts.kind, opts.arena, {}};
  return eval_rec(e, x, st);
}

MemBlock svector_to_mem_block(const sigma::SparseVector& v) {
  MemBlock out;
  for (size_t i = 0; i < v.size(); ++i)
    if (!v[i].is_struct) out.set(i, v[i].value);
  return out;
}

Result<sigma::SparseVector> mem_block_to_svector(const MemBlock& b, size_t n, const CarrierValue& s) {
  using R = Result<sigma::SparseVector>;
  for (const auto& [k, v] : b.cells())
    if (k >= n) return R::err(ErrKind::KeyOutOfRange, "key " + std::to_string(k) + " >= " + std::to_string(n));
  sigma::SparseVector out;
  out.reserve(n);
  for (size_t i = 0; i < n; ++i) {
    auto v = b.lookup(i);
    out.push_back(v ? sigma::Rtheta::val(*v) : sigma::Rtheta::structural(s));
  }
  return out;
}

sigma::FactsReport msh_facts_check(const MSHExprPtr& e, size_t samples, uint64_t seed,
                                   const std::map<std::string, size_t>& params) {
  sigma::FactsReport rep;
  auto d = dims(e);
  auto c = msh_contract(e);
  if (!d.ok() || !c.ok()) {
    rep.violations.push_back("ill-typed operator");
    return rep;
  }
  Rng rng(seed);
  for (size_t t = 0; t < samples && rep.violations.size() < 8; ++t) {
    ParamEnv env;
    for (const auto& [name, size] : params) {
      std::vector<CarrierValue> v;
      for (size_t i = 0; i < size; ++i) v.push_back(CarrierValue(rng.rational()));
      env.vectors.emplace(name, std::move(v));
    }
    MemBlock x;
    for (size_t k : c.value().in) x.set(k, CarrierValue(rng.rational()));
    // extra keys outside the in set must not break anything
    if (rng.chance(1, 3) && d.value().in > 0) x.set(rng.below(d.value().in), CarrierValue(rng.rational()));
    auto r = eval_mshcol(e, x, env);
    if (!r.ok()) {
      rep.violations.push_back("errored on an input dense on the in set: " + r.error().message);
      continue;
    }
    for (const auto& [k, v] : r.value().cells()) {
      if (k >= d.value().out)
        rep.violations.push_back("output key " + std::to_string(k) + " beyond output size");
      if (!c.value().out.count(k))
        rep.violations.push_back("output key " + std::to_string(k) + " outside out set");
    }
    for (size_t k : c.value().out)
      if (!r.value().contains(k))
        rep.violations.push_back("missing output key " + std::to_string(k));
  }
  return rep;
}

CompatVerdict check_sh_msh_compat(const sigma::SHExprPtr& se, const MSHExprPtr& me, size_t samples,
                                  uint64_t seed, const std::map<std::string, size_t>& params) {
  auto ds = sigma::dims(se);
  auto dm = dims(me);
  if (!ds.ok() || !dm.ok() || !(ds.value() == dm.value()))
    return {false, "dimension mismatch between the operators"};
  auto cs = sigma::sparsity_contract(se);
  if (!cs.ok()) return {false, "no sparsity contract"};
  Rng rng(seed);
  for (size_t t = 0; t < samples; ++t) {
    ParamEnv env;
    for (const auto& [name, size] : params) {
      std::vector<CarrierValue> v;
      for (size_t i = 0; i < size; ++i) v.push_back(CarrierValue(rng.rational()));
      env.vectors.emplace(name, std::move(v));
    }
    CarrierValue sv = se->sval.materialize(CarrierKind::Rational, nullptr);
    sigma::SparseVector x;
    for (size_t i = 0; i < ds.value().in; ++i) {
      if (cs.value().in.count(i))
        x.push_back(sigma::Rtheta::val(CarrierValue(rng.rational())));
      else
        x.push_back(sigma::Rtheta::structural(sv));
    }
    auto rs = sigma::eval_shcol(se, x, env);
    if (!rs.ok()) return {false, "sigma evaluation failed: " + rs.error().message};
    auto rm = eval_mshcol(me, svector_to_mem_block(x), env);
    if (!rm.ok()) return {false, "memory evaluation failed: " + rm.error().message};
    MemBlock expect = svector_to_mem_block(rs.value());
    if (!expect.equals(rm.value()))
      return {false, "outputs differ at sample " + std::to_string(t)};
  }
  return {true, ""};
}

std::string to_string(const MSHExprPtr& e) {
  switch (e->op) {
    case MOp::Embed: return "(membed " + std::to_string(e->n) + " " + e->b.to_string() + ")";
    case MOp::Pick: return "(mpick " + std::to_string(e->n) + " " + e->b.to_string() + ")";
    case MOp::Pointwise: return "(mpointwise " + std::to_string(e->n) + ")";
    case MOp::BinOp: return "(mbinop " + std::to_string(e->n) + ")";
    case MOp::Inductor: return "(minductor " + e->count.to_string() + ")";
    case MOp::Apply2Union: return "(mapply2union " + to_string(e->f) + " " + to_string(e->g) + ")";
    case MOp::Compose: return "(mcompose " + to_string(e->f) + " " + to_string(e->g) + ")";
    case MOp::IReduction:
      return "(mireduction " + std::to_string(e->fam.size) + " " + to_string(e->fam.body) + ")";
    case MOp::IUnion:
      return "(miunion " + std::to_string(e->fam.size) + " " + to_string(e->fam.body) + ")";
  }
  return "?";
}

}  // namespace hcolc::mshcol
