#include "hcolc/llvmgen.hpp"

#include <algorithm>
#include <cstring>
#include <set>

namespace hcolc::llvmgen {

using namespace hcolc::dhcol;

std::string double_literal(double v) {
  uint64_t bits;
  std::memcpy(&bits, &v, sizeof bits);
  char buf[24];
  snprintf(buf, sizeof buf, "0x%016llX", static_cast<unsigned long long>(bits));
  return buf;
}

namespace {

std::string i64_lit(uint64_t v) { return std::to_string(v); }

struct Emit {
  IRState& st;
  std::vector<Instr>* cur;

  std::string instr(Instr::K k, std::string a = "", std::string b = "", std::string c = "",
                    uint64_t n = 0) {
    Instr i;
    i.k = k;
    i.a = std::move(a);
    i.b = std::move(b);
    i.c = std::move(c);
    i.n = n;
    bool has_result = true;
    switch (k) {
      case Instr::K::StoreF64:
      case Instr::K::StoreI64:
      case Instr::K::CallOp:
      case Instr::K::PrintF64:
      case Instr::K::PrintNl:
        has_result = false;
        ++st.void_count;
        break;
      default: break;
    }
    if (has_result) i.res = st.fresh_local();
    cur->push_back(i);
    return cur->back().res;
  }
};

struct GammaScope {
  IRState& st;
  size_t pushed = 0;
  GammaScope(IRState& s) : st(s) {}
  void push(GammaEntry e) {
    st.gamma.push_back(std::move(e));
    ++pushed;
  }
  ~GammaScope() {
    for (size_t i = 0; i < pushed; ++i) st.gamma.pop_back();
  }
};

struct Codegen {
  IRState& st;

  // ---- expression code, emitted into the current instruction list ----

  Result<std::string> nexpr(const NExprPtr& e, Emit& em) {
    using R = Result<std::string>;
    switch (e->op) {
      case NOp::Var: {
        const GammaEntry* g = st.lookup(e->var);
        if (!g) return R::err(ErrKind::CompileError, "NVar out of scope");
        if (g->kind != GammaEntry::Kind::I64Slot)
          return R::err(ErrKind::CompileError, "NVar does not name an integer variable");
        return em.instr(Instr::K::LoadI64, g->name);
      }
      case NOp::Const:
        if (!e->value.fits_uint64())
          return R::err(ErrKind::CompileError, "integer constant does not fit 64 bits");
        return i64_lit(e->value.to_uint64());
      default: break;
    }
    auto a = nexpr(e->a, em);
    if (!a.ok()) return a;
    auto b = nexpr(e->b, em);
    if (!b.ok()) return b;
    switch (e->op) {
      case NOp::Plus: return em.instr(Instr::K::Add, a.value(), b.value());
      case NOp::Minus: return em.instr(Instr::K::Sub, a.value(), b.value());
      case NOp::Mult: return em.instr(Instr::K::Mul, a.value(), b.value());
      case NOp::Div: return em.instr(Instr::K::UDiv, a.value(), b.value());
      case NOp::Mod: return em.instr(Instr::K::URem, a.value(), b.value());
      case NOp::Min: {
        std::string c = em.instr(Instr::K::ICmpUlt, a.value(), b.value());
        return em.instr(Instr::K::SelI64, c, a.value(), b.value());
      }
      case NOp::Max: {
        std::string c = em.instr(Instr::K::ICmpUlt, a.value(), b.value());
        return em.instr(Instr::K::SelI64, c, b.value(), a.value());
      }
      default: break;
    }
    return R::err(ErrKind::CompileError, "bad integer expression");
  }

  Result<std::string> cell_ptr(const GammaEntry& g, const std::string& idx, Emit& em) {
    return em.instr(Instr::K::Gep, g.name, idx, "", g.size);
  }

  Result<std::string> block_ptr(size_t var, Emit& em, const GammaEntry** out) {
    using R = Result<std::string>;
    const GammaEntry* g = st.lookup(var);
    if (!g) return R::err(ErrKind::CompileError, "PVar out of scope");
    if (g->kind != GammaEntry::Kind::BlockPtr)
      return R::err(ErrKind::CompileError, "PVar does not name a memory block");
    *out = g;
    (void)em;
    return g->name;
  }

  Result<std::string> aexpr(const AExprPtr& e, Emit& em) {
    using R = Result<std::string>;
    switch (e->op) {
      case AOp::Var: {
        const GammaEntry* g = st.lookup(e->var);
        if (!g) return R::err(ErrKind::CompileError, "AVar out of scope");
        if (g->kind != GammaEntry::Kind::F64Val)
          return R::err(ErrKind::CompileError, "AVar does not name a scalar");
        return g->name;
      }
      case AOp::Const: {
        if (!e->lit.is_zero_or_one())
          return R::err(ErrKind::CompileError,
                        "constant " + e->lit.to_string() + " is not representable");
        return double_literal(e->lit.tag == CarrierLit::Tag::One ? 1.0 : 0.0);
      }
      case AOp::Nth: {
        if (e->mem->is_const)
          return R::err(ErrKind::CompileError, "constant memory blocks are not supported");
        const GammaEntry* g = nullptr;
        auto p = block_ptr(e->mem->p.var, em, &g);
        if (!p.ok()) return p;
        auto idx = nexpr(e->idx, em);
        if (!idx.ok()) return idx;
        auto ptr = cell_ptr(*g, idx.value(), em);
        if (!ptr.ok()) return ptr;
        return em.instr(Instr::K::LoadF64, ptr.value());
      }
      case AOp::Abs: {
        auto a = aexpr(e->a, em);
        if (!a.ok()) return a;
        return em.instr(Instr::K::Fabs, a.value());
      }
      default: break;
    }
    auto a = aexpr(e->a, em);
    if (!a.ok()) return a;
    auto b = aexpr(e->b, em);
    if (!b.ok()) return b;
    switch (e->op) {
      case AOp::Plus: return em.instr(Instr::K::FAdd, a.value(), b.value());
      case AOp::Minus: return em.instr(Instr::K::FSub, a.value(), b.value());
      case AOp::Mult: return em.instr(Instr::K::FMul, a.value(), b.value());
      case AOp::Min: {
        std::string c = em.instr(Instr::K::FCmpOlt, b.value(), a.value());
        return em.instr(Instr::K::SelF64, c, b.value(), a.value());
      }
      case AOp::Max: {
        std::string c = em.instr(Instr::K::FCmpOlt, a.value(), b.value());
        return em.instr(Instr::K::SelF64, c, b.value(), a.value());
      }
      case AOp::ZLess: {
        std::string c = em.instr(Instr::K::FCmpOlt, a.value(), b.value());
        return em.instr(Instr::K::SelF64, c, double_literal(1.0), double_literal(0.0));
      }
      default: break;
    }
    return R::err(ErrKind::CompileError, "bad scalar expression");
  }

  // ---- operator compilation ----

  Result<Segment> single_block(const std::string& prefix, std::vector<Instr> body,
                               const std::string& nextblock) {
    BasicBlock b;
    b.label = st.fresh_block(prefix);
    b.body = std::move(body);
    b.term = {Terminator::K::Br, "", nextblock, ""};
    return Segment{b.label, {std::move(b)}};
  }

  // shared counted-loop scaffold for the iterative operators; body_gen emits
  // instructions given the loop-slot register
  template <class BodyGen>
  Result<Segment> counted_loop(const std::string& prefix, const std::string& bound,
                               const std::string& nextblock, std::vector<Instr> init,
                               BodyGen&& body_gen) {
    std::string slot;
    {
      Emit em{st, &init};
      slot = em.instr(Instr::K::AllocaI64);
    }
    std::string loopcont = st.fresh_block(prefix + ".cont");
    std::vector<Instr> body;
    Emit em{st, &body};
    auto r = body_gen(slot, em);
    if (!r.ok()) return r.error();
    BasicBlock body_block;
    body_block.label = st.fresh_block(prefix + ".body");
    body_block.body = std::move(body);
    body_block.term = {Terminator::K::Br, "", loopcont, ""};
    std::string body_entry = body_block.label;
    std::vector<BasicBlock> body_blocks;
    body_blocks.push_back(std::move(body_block));
    return gen_while_loop(prefix, "0", bound, slot, loopcont, body_entry, std::move(body_blocks),
                          std::move(init), nextblock, st);
  }

  Result<std::string> loop_bound(const BigInt& b) {
    if (!b.fits_uint64())
      return Result<std::string>::err(ErrKind::CompileError, "loop bound does not fit 64 bits");
    return i64_lit(b.to_uint64());
  }

  Result<Segment> op(const DshPtr& o, const std::string& nextblock) {
    using R = Result<Segment>;
    switch (o->op) {
      case DOp::Nop: return single_block("nop", {}, nextblock);

      case DOp::Assign: {
        std::vector<Instr> body;
        Emit em{st, &body};
        const GammaEntry *gx = nullptr, *gy = nullptr;
        auto px = block_ptr(o->src.p.var, em, &gx);
        if (!px.ok()) return px.error();
        auto py = block_ptr(o->dst.p.var, em, &gy);
        if (!py.ok()) return py.error();
        auto si = nexpr(o->src.idx, em);
        if (!si.ok()) return si.error();
        auto di = nexpr(o->dst.idx, em);
        if (!di.ok()) return di.error();
        auto sp = cell_ptr(*gx, si.value(), em);
        if (!sp.ok()) return sp.error();
        std::string v = em.instr(Instr::K::LoadF64, sp.value());
        auto dp = cell_ptr(*gy, di.value(), em);
        if (!dp.ok()) return dp.error();
        em.instr(Instr::K::StoreF64, v, dp.value());
        return single_block("assign", std::move(body), nextblock);
      }

      case DOp::IMap: {
        auto n = loop_bound(o->bound);
        if (!n.ok()) return n.error();
        const GammaEntry *gx = nullptr, *gy = nullptr;
        {
          std::vector<Instr> scratch;
          Emit em{st, &scratch};
          auto px = block_ptr(o->x.var, em, &gx);
          if (!px.ok()) return px.error();
          auto py = block_ptr(o->y.var, em, &gy);
          if (!py.ok()) return py.error();
        }
        GammaEntry ex = *gx, ey = *gy;
        return counted_loop("imap", n.value(), nextblock, {},
                            [&](const std::string& slot, Emit& em) -> Result<Unit> {
                              std::string iv = em.instr(Instr::K::LoadI64, slot);
                              auto xp = cell_ptr(ex, iv, em);
                              if (!xp.ok()) return xp.error();
                              std::string xv = em.instr(Instr::K::LoadF64, xp.value());
                              GammaScope sc(st);
                              sc.push({GammaEntry::Kind::I64Slot, slot, 0});
                              sc.push({GammaEntry::Kind::F64Val, xv, 0});
                              auto fv = aexpr(o->fn, em);
                              if (!fv.ok()) return fv.error();
                              auto yp = cell_ptr(ey, iv, em);
                              if (!yp.ok()) return yp.error();
                              em.instr(Instr::K::StoreF64, fv.value(), yp.value());
                              return Unit{};
                            });
      }

      case DOp::BinOp: {
        auto n = loop_bound(o->bound);
        if (!n.ok()) return n.error();
        const GammaEntry *gx = nullptr, *gy = nullptr;
        {
          std::vector<Instr> scratch;
          Emit em{st, &scratch};
          auto px = block_ptr(o->x.var, em, &gx);
          if (!px.ok()) return px.error();
          auto py = block_ptr(o->y.var, em, &gy);
          if (!py.ok()) return py.error();
        }
        GammaEntry ex = *gx, ey = *gy;
        return counted_loop("binop", n.value(), nextblock, {},
                            [&](const std::string& slot, Emit& em) -> Result<Unit> {
                              std::string iv = em.instr(Instr::K::LoadI64, slot);
                              auto ap = cell_ptr(ex, iv, em);
                              if (!ap.ok()) return ap.error();
                              std::string av = em.instr(Instr::K::LoadF64, ap.value());
                              std::string i2 = em.instr(Instr::K::Add, iv, n.value());
                              auto bp = cell_ptr(ex, i2, em);
                              if (!bp.ok()) return bp.error();
                              std::string bv = em.instr(Instr::K::LoadF64, bp.value());
                              GammaScope sc(st);
                              sc.push({GammaEntry::Kind::I64Slot, slot, 0});
                              sc.push({GammaEntry::Kind::F64Val, av, 0});
                              sc.push({GammaEntry::Kind::F64Val, bv, 0});
                              auto fv = aexpr(o->fn, em);
                              if (!fv.ok()) return fv.error();
                              auto yp = cell_ptr(ey, iv, em);
                              if (!yp.ok()) return yp.error();
                              em.instr(Instr::K::StoreF64, fv.value(), yp.value());
                              return Unit{};
                            });
      }

      case DOp::MemMap2: {
        auto n = loop_bound(o->bound);
        if (!n.ok()) return n.error();
        const GammaEntry *gx0 = nullptr, *gx1 = nullptr, *gy = nullptr;
        {
          std::vector<Instr> scratch;
          Emit em{st, &scratch};
          auto p0 = block_ptr(o->x.var, em, &gx0);
          if (!p0.ok()) return p0.error();
          auto p1 = block_ptr(o->x1.var, em, &gx1);
          if (!p1.ok()) return p1.error();
          auto py = block_ptr(o->y.var, em, &gy);
          if (!py.ok()) return py.error();
        }
        GammaEntry e0 = *gx0, e1 = *gx1, ey = *gy;
        return counted_loop("map2", n.value(), nextblock, {},
                            [&](const std::string& slot, Emit& em) -> Result<Unit> {
                              std::string iv = em.instr(Instr::K::LoadI64, slot);
                              auto ap = cell_ptr(e0, iv, em);
                              if (!ap.ok()) return ap.error();
                              std::string av = em.instr(Instr::K::LoadF64, ap.value());
                              auto bp = cell_ptr(e1, iv, em);
                              if (!bp.ok()) return bp.error();
                              std::string bv = em.instr(Instr::K::LoadF64, bp.value());
                              GammaScope sc(st);
                              sc.push({GammaEntry::Kind::F64Val, av, 0});
                              sc.push({GammaEntry::Kind::F64Val, bv, 0});
                              auto fv = aexpr(o->fn, em);
                              if (!fv.ok()) return fv.error();
                              auto yp = cell_ptr(ey, iv, em);
                              if (!yp.ok()) return yp.error();
                              em.instr(Instr::K::StoreF64, fv.value(), yp.value());
                              return Unit{};
                            });
      }

      case DOp::Power: {
        std::vector<Instr> init;
        Emit em0{st, &init};
        const GammaEntry *gx = nullptr, *gy = nullptr;
        auto px = block_ptr(o->src.p.var, em0, &gx);
        if (!px.ok()) return px.error();
        auto py = block_ptr(o->dst.p.var, em0, &gy);
        if (!py.ok()) return py.error();
        auto n = nexpr(o->ne, em0);
        if (!n.ok()) return n.error();
        auto si = nexpr(o->src.idx, em0);
        if (!si.ok()) return si.error();
        auto di = nexpr(o->dst.idx, em0);
        if (!di.ok()) return di.error();
        auto sp0 = cell_ptr(*gx, si.value(), em0);
        if (!sp0.ok()) return sp0.error();
        auto dp0 = cell_ptr(*gy, di.value(), em0);
        if (!dp0.ok()) return dp0.error();
        if (!o->init.is_zero_or_one())
          return R::err(ErrKind::CompileError, "constant " + o->init.to_string() + " is not representable");
        em0.instr(Instr::K::StoreF64,
                  double_literal(o->init.tag == CarrierLit::Tag::One ? 1.0 : 0.0), dp0.value());
        std::string srcp = sp0.value(), dstp = dp0.value();
        return counted_loop("power", n.value(), nextblock, std::move(init),
                            [&](const std::string& slot, Emit& em) -> Result<Unit> {
                              (void)slot;
                              std::string sv = em.instr(Instr::K::LoadF64, srcp);
                              std::string dv = em.instr(Instr::K::LoadF64, dstp);
                              GammaScope sc(st);
                              sc.push({GammaEntry::Kind::F64Val, sv, 0});
                              sc.push({GammaEntry::Kind::F64Val, dv, 0});
                              auto fv = aexpr(o->fn, em);
                              if (!fv.ok()) return fv.error();
                              em.instr(Instr::K::StoreF64, fv.value(), dstp);
                              return Unit{};
                            });
      }

      case DOp::MemInit: {
        const GammaEntry* gy = nullptr;
        {
          std::vector<Instr> scratch;
          Emit em{st, &scratch};
          auto py = block_ptr(o->y.var, em, &gy);
          if (!py.ok()) return py.error();
        }
        if (!o->init.is_zero_or_one())
          return R::err(ErrKind::CompileError, "constant " + o->init.to_string() + " is not representable");
        std::string v = double_literal(o->init.tag == CarrierLit::Tag::One ? 1.0 : 0.0);
        GammaEntry ey = *gy;
        return counted_loop("meminit", i64_lit(ey.size), nextblock, {},
                            [&](const std::string& slot, Emit& em) -> Result<Unit> {
                              std::string iv = em.instr(Instr::K::LoadI64, slot);
                              auto yp = cell_ptr(ey, iv, em);
                              if (!yp.ok()) return yp.error();
                              em.instr(Instr::K::StoreF64, v, yp.value());
                              return Unit{};
                            });
      }

      case DOp::Loop: {
        auto n = loop_bound(o->bound);
        if (!n.ok()) return n.error();
        std::vector<Instr> init;
        std::string slot;
        {
          Emit em{st, &init};
          slot = em.instr(Instr::K::AllocaI64);
        }
        std::string loopcont = st.fresh_block("loop.cont");
        Segment body;
        {
          GammaScope sc(st);
          sc.push({GammaEntry::Kind::I64Slot, slot, 0});
          auto r = op(o->body, loopcont);
          if (!r.ok()) return r;
          body = r.value();
        }
        std::string body_entry = body.entry;
        return gen_while_loop("loop", "0", n.value(), slot, loopcont, body_entry,
                              std::move(body.blocks), std::move(init), nextblock, st);
      }

      case DOp::Alloc: {
        if (!o->size.fits_uint64())
          return R::err(ErrKind::CompileError, "allocation size does not fit 64 bits");
        std::vector<Instr> pre;
        Emit em{st, &pre};
        std::string arr = em.instr(Instr::K::AllocaArr, "", "", "", o->size.to_uint64());
        Segment body;
        {
          GammaScope sc(st);
          sc.push({GammaEntry::Kind::BlockPtr, arr, o->size.to_uint64()});
          auto r = op(o->body, nextblock);
          if (!r.ok()) return r;
          body = r.value();
        }
        BasicBlock head;
        head.label = st.fresh_block("alloc");
        head.body = std::move(pre);
        head.term = {Terminator::K::Br, "", body.entry, ""};
        Segment out{head.label, {std::move(head)}};
        for (auto& bb : body.blocks) out.blocks.push_back(std::move(bb));
        return out;
      }

      case DOp::Seq: {
        auto sb = op(o->b, nextblock);
        if (!sb.ok()) return sb;
        auto sa = op(o->a, sb.value().entry);
        if (!sa.ok()) return sa;
        Segment out{sa.value().entry, std::move(sa.value().blocks)};
        for (auto& bb : sb.value().blocks) out.blocks.push_back(std::move(bb));
        return out;
      }
    }
    return R::err(ErrKind::CompileError, "bad operator");
  }
};

}  // namespace

Segment gen_while_loop(const std::string& prefix, const std::string& from, const std::string& to,
                       const std::string& loopvar_slot, const std::string& loopcont,
                       const std::string& body_entry, std::vector<BasicBlock> body_blocks,
                       std::vector<Instr> init_code, const std::string& nextblock, IRState& st) {
  BasicBlock entry;
  entry.label = st.fresh_block(prefix + ".entry");
  entry.body = std::move(init_code);
  {
    Emit em{st, &entry.body};
    em.instr(Instr::K::StoreI64, from, loopvar_slot);
    std::string c0 = em.instr(Instr::K::ICmpUlt, from, to);
    entry.term = {Terminator::K::CondBr, c0, body_entry, nextblock};
  }

  BasicBlock cont;
  cont.label = loopcont;
  {
    Emit em{st, &cont.body};
    std::string iv = em.instr(Instr::K::LoadI64, loopvar_slot);
    std::string nx = em.instr(Instr::K::Add, iv, "1");
    em.instr(Instr::K::StoreI64, nx, loopvar_slot);
    std::string c = em.instr(Instr::K::ICmpUlt, nx, to);
    cont.term = {Terminator::K::CondBr, c, body_entry, nextblock};
  }

  Segment out{entry.label, {std::move(entry)}};
  for (auto& b : body_blocks) out.blocks.push_back(std::move(b));
  out.blocks.push_back(std::move(cont));
  return out;
}

Result<Segment> gen_ir(const DshPtr& op, const std::string& nextblock, IRState& st) {
  Codegen cg{st};
  return cg.op(op, nextblock);
}

Result<LlvmModule> compile_w_main(const FSHCOLProgram& p, std::span<const double> data, IRState st) {
  using R = Result<LlvmModule>;
  LlvmModule m;

  // unique global names, not colliding with emitted symbols
  std::set<std::string> names;
  const char* reserved[] = {"main", "printf", "llvm.fabs.f64", "X", "Y"};
  for (const char* r : reserved) names.insert(r);
  if (!names.insert(p.name).second) return R::err(ErrKind::NameCollision, "operator name is reserved");
  for (const auto& [gname, gsize] : p.globals) {
    if (!names.insert(gname).second)
      return R::err(ErrKind::NameCollision, "duplicate global name " + gname);
    (void)gsize;
  }

  // data pool is cyclic: reuse values when it is too short
  size_t cursor = 0;
  auto draw = [&]() -> double {
    if (data.empty()) return 0.0;
    double v = data[cursor % data.size()];
    ++cursor;
    return v;
  };

  for (const auto& [gname, gsize] : p.globals) {
    GlobalDef g;
    g.name = gname;
    g.size = gsize;
    g.internal = p.internal_globals;
    for (uint64_t i = 0; i < gsize; ++i) g.init.push_back(draw());
    m.globals.push_back(std::move(g));
  }
  GlobalDef gx;
  gx.name = "X";
  gx.size = p.input_dim;
  for (uint64_t i = 0; i < p.input_dim; ++i) gx.init.push_back(draw());
  m.globals.push_back(std::move(gx));
  GlobalDef gy;
  gy.name = "Y";
  gy.size = p.output_dim;
  gy.zero = true;
  gy.internal = false;
  m.globals.push_back(std::move(gy));

  // operator function: context is globals ++ [X, Y]
  Function fn;
  fn.name = p.name;
  fn.takes_ptrs = true;
  fn.in_size = p.input_dim;
  fn.out_size = p.output_dim;
  st.gamma.clear();
  st.gamma.push_back({GammaEntry::Kind::BlockPtr, "%Y", p.output_dim});
  st.gamma.push_back({GammaEntry::Kind::BlockPtr, "%X", p.input_dim});
  for (size_t i = p.globals.size(); i-- > 0;)
    st.gamma.push_back({GammaEntry::Kind::BlockPtr, "@" + p.globals[i].first, p.globals[i].second});

  std::string retblock = st.fresh_block("done");
  auto seg = gen_ir(p.op, retblock, st);
  if (!seg.ok()) return seg.error();
  fn.blocks = std::move(seg.value().blocks);
  // entry must be the first block in the printed function
  if (fn.blocks.front().label != seg.value().entry) {
    for (size_t i = 0; i < fn.blocks.size(); ++i)
      if (fn.blocks[i].label == seg.value().entry) {
        std::rotate(fn.blocks.begin(), fn.blocks.begin() + i, fn.blocks.begin() + i + 1);
        break;
      }
  }
  BasicBlock ret;
  ret.label = retblock;
  ret.term = {Terminator::K::RetVoid, "", "", ""};
  fn.blocks.push_back(std::move(ret));
  m.functions.push_back(std::move(fn));

  // main: run the operator on the initialized globals, print the output
  Function mainfn;
  mainfn.name = "main";
  mainfn.returns_i32 = true;
  BasicBlock entry;
  entry.label = "entry";
  {
    Emit em{st, &entry.body};
    Instr call;
    call.k = Instr::K::CallOp;
    call.callee = p.name;
    call.a = "@X";
    call.b = "@Y";
    call.in_size = p.input_dim;
    call.out_size = p.output_dim;
    entry.body.push_back(call);
    ++st.void_count;
    for (uint64_t k = 0; k < p.output_dim; ++k) {
      std::string ptr = em.instr(Instr::K::Gep, "@Y", i64_lit(k), "", p.output_dim);
      std::string v = em.instr(Instr::K::LoadF64, ptr);
      em.instr(Instr::K::PrintF64, v);
    }
    em.instr(Instr::K::PrintNl);
  }
  entry.term = {Terminator::K::RetI32, "", "", ""};
  mainfn.blocks.push_back(std::move(entry));
  m.functions.push_back(std::move(mainfn));
  m.needs_printf = true;
  m.needs_fabs = true;
  return m;
}

// ---- pretty printer -----------------------------------------------------------------

namespace {

std::string arr_ty(uint64_t n) { return "[" + std::to_string(n) + " x double]"; }

void print_instr(std::string& out, const Instr& i) {
  auto arrp = [&](const std::string& v) { return arr_ty(i.n) + "* " + v; };
  switch (i.k) {
    case Instr::K::AllocaI64: out += "  " + i.res + " = alloca i64\n"; break;
    case Instr::K::AllocaArr: out += "  " + i.res + " = alloca " + arr_ty(i.n) + "\n"; break;
    case Instr::K::LoadF64: out += "  " + i.res + " = load double, double* " + i.a + "\n"; break;
    case Instr::K::LoadI64: out += "  " + i.res + " = load i64, i64* " + i.a + "\n"; break;
    case Instr::K::StoreF64: out += "  store double " + i.a + ", double* " + i.b + "\n"; break;
    case Instr::K::StoreI64: out += "  store i64 " + i.a + ", i64* " + i.b + "\n"; break;
    case Instr::K::Gep:
      out += "  " + i.res + " = getelementptr inbounds " + arr_ty(i.n) + ", " + arrp(i.a) +
             ", i64 0, i64 " + i.b + "\n";
      break;
    case Instr::K::FAdd: out += "  " + i.res + " = fadd double " + i.a + ", " + i.b + "\n"; break;
    case Instr::K::FSub: out += "  " + i.res + " = fsub double " + i.a + ", " + i.b + "\n"; break;
    case Instr::K::FMul: out += "  " + i.res + " = fmul double " + i.a + ", " + i.b + "\n"; break;
    case Instr::K::FCmpOlt:
      out += "  " + i.res + " = fcmp olt double " + i.a + ", " + i.b + "\n";
      break;
    case Instr::K::SelF64:
      out += "  " + i.res + " = select i1 " + i.a + ", double " + i.b + ", double " + i.c + "\n";
      break;
    case Instr::K::SelI64:
      out += "  " + i.res + " = select i1 " + i.a + ", i64 " + i.b + ", i64 " + i.c + "\n";
      break;
    case Instr::K::Fabs:
      out += "  " + i.res + " = call double @llvm.fabs.f64(double " + i.a + ")\n";
      break;
    case Instr::K::Add: out += "  " + i.res + " = add i64 " + i.a + ", " + i.b + "\n"; break;
    case Instr::K::Sub: out += "  " + i.res + " = sub i64 " + i.a + ", " + i.b + "\n"; break;
    case Instr::K::Mul: out += "  " + i.res + " = mul i64 " + i.a + ", " + i.b + "\n"; break;
    case Instr::K::UDiv: out += "  " + i.res + " = udiv i64 " + i.a + ", " + i.b + "\n"; break;
    case Instr::K::URem: out += "  " + i.res + " = urem i64 " + i.a + ", " + i.b + "\n"; break;
    case Instr::K::ICmpUlt:
      out += "  " + i.res + " = icmp ult i64 " + i.a + ", " + i.b + "\n";
      break;
    case Instr::K::CallOp:
      out += "  call void @" + i.callee + "(" + arr_ty(i.in_size) + "* " + i.a + ", " +
             arr_ty(i.out_size) + "* " + i.b + ")\n";
      break;
    case Instr::K::PrintF64:
      out += "  call i32 (i8*, ...) @printf(i8* getelementptr inbounds ([4 x i8], [4 x i8]* "
             "@.fmt, i64 0, i64 0), double " +
             i.a + ")\n";
      break;
    case Instr::K::PrintNl:
      out += "  call i32 (i8*, ...) @printf(i8* getelementptr inbounds ([2 x i8], [2 x i8]* "
             "@.nl, i64 0, i64 0))\n";
      break;
  }
}

void print_block(std::string& out, const BasicBlock& b) {
  out += b.label + ":\n";
  for (const auto& i : b.body) print_instr(out, i);
  switch (b.term.k) {
    case Terminator::K::Br: out += "  br label %" + b.term.target + "\n"; break;
    case Terminator::K::CondBr:
      out += "  br i1 " + b.term.cond + ", label %" + b.term.target + ", label %" + b.term.target2 +
             "\n";
      break;
    case Terminator::K::RetVoid: out += "  ret void\n"; break;
    case Terminator::K::RetI32: out += "  ret i32 0\n"; break;
  }
}

}  // namespace

std::string emit_text(const LlvmModule& m) {
  std::string out;
  out += "; ModuleID = 'hcolc'\n";
  out += "target datalayout = \"e-m:e-p270:32:32-p271:32:32-p272:64:64-i64:64-f80:128-n8:16:32:64-S128\"\n\n";
  if (m.needs_printf) {
    out += "@.fmt = private unnamed_addr constant [4 x i8] c\"%a \\00\"\n";
    out += "@.nl = private unnamed_addr constant [2 x i8] c\"\\0A\\00\"\n";
  }
  for (const auto& g : m.globals) {
    out += "@" + g.name + " = " + (g.internal ? "internal global " : "global ") + arr_ty(g.size);
    if (g.zero) {
      out += " zeroinitializer\n";
    } else {
      out += " [";
      for (size_t i = 0; i < g.init.size(); ++i) {
        if (i) out += ", ";
        out += "double " + double_literal(g.init[i]);
      }
      out += "]\n";
    }
  }
  out += "\n";
  if (m.needs_fabs) out += "declare double @llvm.fabs.f64(double)\n";
  if (m.needs_printf) out += "declare i32 @printf(i8*, ...)\n";
  out += "\n";
  for (const auto& f : m.functions) {
    if (f.takes_ptrs) {
      out += "define void @" + f.name + "(" + arr_ty(f.in_size) + "* %X, " + arr_ty(f.out_size) +
             "* %Y) {\n";
    } else if (f.returns_i32) {
      out += "define i32 @" + f.name + "() {\n";
    } else {
      out += "define void @" + f.name + "() {\n";
    }
    for (const auto& b : f.blocks) print_block(out, b);
    out += "}\n\n";
  }
  return out;
}

}  // namespace hcolc::llvmgen
