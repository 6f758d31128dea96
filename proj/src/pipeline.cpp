#include "hcolc/pipeline.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>

#include <json.hpp>

#include "hcolc/rng.hpp"

namespace hcolc::pipeline {

using namespace hcolc::hcol;
using namespace hcolc::dhcol;

// ---- DynWin fixture ------------------------------------------------------------

namespace {

ValueRange vr(int64_t lo_n, int64_t lo_d, int64_t hi_n, int64_t hi_d) {
  return {Rational(BigInt(lo_n), BigInt(lo_d)), Rational(BigInt(hi_n), BigInt(hi_d))};
}

ValueRange iv_add(const ValueRange& a, const ValueRange& b) { return {a.lo + b.lo, a.hi + b.hi}; }

ValueRange iv_mul(const ValueRange& a, const ValueRange& b) {
  Rational c[4] = {a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi};
  Rational lo = c[0], hi = c[0];
  for (int i = 1; i < 4; ++i) {
    if (c[i] < lo) lo = c[i];
    if (hi < c[i]) hi = c[i];
  }
  return {lo, hi};
}

// positive divisor only
ValueRange iv_div(const ValueRange& a, const ValueRange& b) {
  return iv_mul(a, {Rational(1) / b.hi, Rational(1) / b.lo});
}

}  // namespace

DynWinDerivedRanges derive_dynwin_coefficient_ranges() {
  // parameter boxes: obstacle velocity, acceleration, braking, sampling period
  ValueRange V = vr(0, 1, 20, 1);
  ValueRange A = vr(0, 1, 5, 1);
  ValueRange b = vr(1, 1, 6, 1);
  ValueRange eps = vr(1, 100, 1, 10);
  ValueRange one = vr(1, 1, 1, 1);
  ValueRange half = vr(1, 2, 1, 2);

  ValueRange ab1 = iv_add(iv_div(A, b), one);                        // A/b + 1
  ValueRange a0 = iv_mul(ab1, iv_add(iv_mul(iv_mul(A, half), iv_mul(eps, eps)), iv_mul(eps, V)));
  ValueRange a1 = iv_add(iv_div(V, b), iv_mul(eps, ab1));
  ValueRange a2 = iv_div(half, b);
  return {a0, a1, a2};
}

DynWinFixture dynwin_fixture() {
  DynWinFixture f;
  // safe := p(v) < d_inf(p_r, p_o), input [v, xr, yr, xo, yo]
  f.orig = h_tless(h_evalpolynomial(VecOperand::param("a", 3)), h_chebyshev_distance(2));
  f.params = {{"a", 3}};
  f.hcol_trace = {
      {"tless-cross", {}},
      {"evalpoly-scalarprod", {1, 0}},
      {"scalarprod-reduction", {1, 0, 0}},
      {"chebyshev-norm", {1, 1}},
  };
  f.sigma_trace = {
      {"lift-compose", {}},
      {"lift-binop", {0}},
      {"cross-split", {1}},
      {"lift-compose", {1, 0, 1, 0}},
      {"lift-compose", {1, 0, 1, 0, 0}},
      {"lift-compose", {1, 0, 1, 0, 1}},
      {"poly-ireduction", {1, 0, 1, 0}},
      {"lift-compose", {1, 1, 1, 0}},
      {"cheb-ireduction", {1, 1, 1, 0}},
  };
  auto derived = derive_dynwin_coefficient_ranges();
  f.a0 = derived.a0;
  f.a1 = derived.a1;
  f.a2 = derived.a2;
  f.v = vr(0, 1, 20, 1);
  f.coord = vr(-5000, 1, 5000, 1);
  return f;
}

Rational dynwin_formula(const Rational& a0, const Rational& a1, const Rational& a2,
                        const Rational& v, const Rational& xr, const Rational& yr,
                        const Rational& xo, const Rational& yo) {
  Rational poly = a0 + a1 * v + a2 * v * v;
  Rational dx = (xr - xo).abs();
  Rational dy = (yr - yo).abs();
  Rational cheb = dx < dy ? dy : dx;
  return poly < cheb ? Rational(1) : Rational(0);
}

// ---- external execution -----------------------------------------------------------

std::string resolve_clang(const std::string& override_path) {
  if (!override_path.empty()) return override_path;
  if (const char* env = std::getenv("HCOLC_CLANG")) return env;
  return "clang";
}

ExecResult execute_module_text(const std::string& ll_text, const std::string& clang_path) {
  ExecResult res;
  std::string cc = resolve_clang(clang_path);
  if (std::system((cc + " --version > /dev/null 2>&1").c_str()) != 0) {
    res.detail = "external toolchain not found";
    return res;
  }
  res.available = true;
  char dirtmpl[] = "/tmp/hcolc.XXXXXX";
  if (!mkdtemp(dirtmpl)) {
    res.detail = "cannot create a scratch directory";
    return res;
  }
  std::string dir = dirtmpl;
  {
    std::ofstream f(dir + "/m.ll");
    f << ll_text;
  }
  std::string cmd = cc + " -O0 -o " + dir + "/m " + dir + "/m.ll > " + dir + "/cc.log 2>&1";
  if (std::system(cmd.c_str()) != 0) {
    res.detail = "module failed to compile";
    return res;
  }
  FILE* pipe = popen((dir + "/m").c_str(), "r");
  if (!pipe) {
    res.detail = "cannot run the module";
    return res;
  }
  std::string out;
  char buf[512];
  while (fgets(buf, sizeof buf, pipe)) out += buf;
  int rc = pclose(pipe);
  std::string cleanup = "rm -rf " + dir;
  int rc2 = std::system(cleanup.c_str());
  (void)rc2;
  if (rc != 0) {
    res.detail = "module exited with an error";
    return res;
  }
  const char* s = out.c_str();
  char* end = nullptr;
  while (*s) {
    double v = strtod(s, &end);
    if (end == s) break;
    res.values.push_back(v);
    s = end;
  }
  res.ran = true;
  return res;
}

// ---- harness -------------------------------------------------------------------------

HarnessResult run_test_harness(const llvmgen::FSHCOLProgram& p, uint64_t seed,
                               bool use_external_llvm, const std::string& clang_path,
                               size_t pool_size_override) {
  HarnessResult out;
  out.program = p.name;

  // step 1: random data pool, sized from globals plus the input vector,
  // treated as cyclic when too short
  size_t required = p.input_dim;
  for (const auto& [n, sz] : p.globals) {
    (void)n;
    required += sz;
  }
  size_t pool_size = pool_size_override ? pool_size_override : required;
  Rng rng(seed);
  std::vector<double> pool;
  for (size_t i = 0; i < pool_size; ++i) pool.push_back(rng.real(-100.0, 100.0));
  out.steps.push_back({"data-pool", HarnessStep::Status::Pass,
                       std::to_string(pool.size()) + " values for " + std::to_string(required)});

  // step 2: compile to a self-enclosed module
  auto m = llvmgen::compile_w_main(p, pool);
  if (!m.ok()) {
    out.steps.push_back({"compile", HarnessStep::Status::Fail, m.error().message});
    return out;
  }
  std::string text = llvmgen::emit_text(m.value());
  out.steps.push_back({"compile", HarnessStep::Status::Pass,
                       std::to_string(1 + std::count(text.begin(), text.end(), '\n')) + " lines"});

  // step 3: external execution
  ExecResult exec;
  if (use_external_llvm) {
    exec = execute_module_text(text, clang_path);
    if (exec.available && exec.ran) {
      out.steps.push_back({"llvm-exec", HarnessStep::Status::Pass,
                           std::to_string(exec.values.size()) + " outputs"});
    } else if (!exec.available) {
      out.steps.push_back({"llvm-exec", HarnessStep::Status::Skipped, exec.detail});
    } else {
      out.steps.push_back({"llvm-exec", HarnessStep::Status::Fail, exec.detail});
      return out;
    }
  } else {
    out.steps.push_back({"llvm-exec", HarnessStep::Status::Skipped, "disabled"});
  }

  // step 4: evaluator with estimated fuel on the same data
  Memory mem;
  EvalContext ctx;
  size_t cursor = 0;
  auto draw = [&]() {
    double v = pool[cursor % pool.size()];
    ++cursor;
    return v;
  };
  uint64_t addr = 0;
  std::vector<std::pair<uint64_t, uint64_t>> layout;  // addr, size
  for (const auto& [n, sz] : p.globals) {
    (void)n;
    mshcol::MemBlock b;
    for (uint64_t k = 0; k < sz; ++k) b.set(k, CarrierValue(draw()));
    mem.set(addr, std::move(b));
    layout.push_back({addr, sz});
    ++addr;
  }
  mshcol::MemBlock xb;
  for (uint64_t k = 0; k < p.input_dim; ++k) xb.set(k, CarrierValue(draw()));
  uint64_t x_addr = addr++;
  uint64_t y_addr = addr++;
  mem.set(x_addr, std::move(xb));
  mem.set(y_addr, mshcol::MemBlock{});
  ctx.push(DSHVal::of_ptr(y_addr, NatValue::u64(p.output_dim)));
  ctx.push(DSHVal::of_ptr(x_addr, NatValue::u64(p.input_dim)));
  for (size_t i = layout.size(); i-- > 0;)
    ctx.push(DSHVal::of_ptr(layout[i].first, NatValue::u64(layout[i].second)));

  auto r = eval_dshoperator(ctx, p.op, mem, estimate_fuel(p.op), DEvalOpts{kFhcolKind, nullptr});
  if (!r.has_value()) {
    out.steps.push_back({"evaluate", HarnessStep::Status::Fail, "fuel exhausted despite estimate"});
    return out;
  }
  if (!r->ok()) {
    out.steps.push_back({"evaluate", HarnessStep::Status::Fail, r->error().message});
    return out;
  }
  out.steps.push_back({"evaluate", HarnessStep::Status::Pass, ""});

  // step 5: bit-exact comparison of every cell the evaluator produced
  if (use_external_llvm && exec.ran) {
    if (exec.values.size() != p.output_dim) {
      out.steps.push_back({"compare", HarnessStep::Status::Fail, "wrong output arity"});
      return out;
    }
    const mshcol::MemBlock* y = r->value().lookup_ref(y_addr);
    for (uint64_t k = 0; k < p.output_dim; ++k) {
      auto cell = y ? y->lookup(k) : std::nullopt;
      if (!cell) continue;  // unwritten cells print as the zero initializer
      if (cell->binary64() != exec.values[k]) {
        out.steps.push_back({"compare", HarnessStep::Status::Fail,
                             "cell " + std::to_string(k) + " differs"});
        return out;
      }
    }
    out.steps.push_back({"compare", HarnessStep::Status::Pass, "bit-exact"});
  } else {
    out.steps.push_back({"compare", HarnessStep::Status::Skipped, "no external run"});
  }
  return out;
}

// ---- harness suite ----------------------------------------------------------------------

namespace {

Result<lowering::LoweredProgram> lower_fixture_like(const hcol::HExprPtr& h,
                                                    const std::vector<TraceStep>& htrace,
                                                    const std::vector<TraceStep>& strace,
                                                    const std::map<std::string, size_t>& params) {
  auto rules = builtin_rules();
  auto broken = apply_breakdown_trace(h, htrace, rules);
  if (!broken.ok()) return broken.error();
  auto lifted = sigma::lift_hcol(broken.value(), CarrierLit::zero());
  auto srules = sigma::sh_builtin_rules();
  auto rewritten = sigma::apply_sh_rewrites(lifted, strace, srules);
  if (!rewritten.ok()) return rewritten.error();
  auto msh = lowering::shcol_to_mshcol(rewritten.value());
  if (!msh.ok()) return msh.error();
  return lowering::lower_mshcol_program(msh.value(), params);
}

llvmgen::FSHCOLProgram make_prog(std::string name, uint64_t i, uint64_t o, DshPtr op,
                                 std::vector<std::pair<std::string, uint64_t>> globals = {}) {
  llvmgen::FSHCOLProgram p;
  p.name = std::move(name);
  p.input_dim = i;
  p.output_dim = o;
  p.op = std::move(op);
  p.globals = std::move(globals);
  return p;
}

}  // namespace

std::vector<llvmgen::FSHCOLProgram> harness_suite() {
  std::vector<llvmgen::FSHCOLProgram> suite;
  // context layout everywhere: [globals..., X, Y]; with no globals X = PVar 0
  PExpr X{0}, Y{1};

  suite.push_back(make_prog("t01_nop", 1, 1, d_nop()));
  suite.push_back(make_prog("t02_assign", 4, 2,
                            d_assign(MemRef{X, n_const_u(2)}, MemRef{Y, n_const_u(0)})));
  suite.push_back(make_prog("t03_meminit", 1, 3, d_meminit(Y, CarrierLit::one())));
  suite.push_back(make_prog(
      "t04_imap", 4, 4,
      d_imap(BigInt(4), X, Y, a_bin(AOp::Plus, a_abs(a_var(0)), a_const(CarrierLit::one())))));
  suite.push_back(make_prog("t05_binop", 6, 3,
                            d_binop(BigInt(3), X, Y, a_bin(AOp::Mult, a_var(1), a_var(0)))));
  suite.push_back(make_prog("t06_memmap2", 4, 4,
                            d_memmap2(BigInt(4), X, X, Y, a_bin(AOp::Plus, a_var(1), a_var(0)))));
  suite.push_back(make_prog(
      "t07_power", 1, 1,
      d_power(n_const_u(5), MemRef{X, n_const_u(0)}, MemRef{Y, n_const_u(0)},
              a_bin(AOp::Mult, a_var(0), a_var(1)), CarrierLit::one())));
  // inside the loop the index shifts X and Y by one
  suite.push_back(make_prog(
      "t08_loop", 3, 3,
      d_loop(BigInt(3), d_assign(MemRef{PExpr{1}, n_var(0)}, MemRef{PExpr{2}, n_var(0)}))));
  suite.push_back(make_prog(
      "t09_alloc", 2, 2,
      d_alloc(BigInt(2),
              d_seq(d_imap(BigInt(2), PExpr{1}, PExpr{0},
                           a_bin(AOp::Plus, a_var(0), a_const(CarrierLit::one()))),
                    d_imap(BigInt(2), PExpr{0}, PExpr{2}, a_var(0))))));
  suite.push_back(make_prog(
      "t10_seq", 2, 2,
      d_seq(d_meminit(Y, CarrierLit::zero()),
            d_assign(MemRef{X, n_const_u(0)}, MemRef{Y, n_const_u(1)}))));

  // chebyshev distance through the whole front half of the chain
  {
    auto h = h_chebyshev_distance(2);
    std::vector<TraceStep> htrace = {{"chebyshev-norm", {}}};
    std::vector<TraceStep> strace = {{"lift-compose", {}}, {"cheb-ireduction", {}}};
    auto prog = lower_fixture_like(h, htrace, strace, {});
    if (prog.ok() && translate_rhcol_to_fhcol(prog.value().op).ok()) {
      llvmgen::FSHCOLProgram p;
      p.name = "t11_chebyshev";
      p.input_dim = prog.value().input_dim;
      p.output_dim = prog.value().output_dim;
      p.op = prog.value().op;
      suite.push_back(std::move(p));
    }
  }
  // the full dynamic window monitor
  {
    auto f = dynwin_fixture();
    auto prog = lower_fixture_like(f.orig, f.hcol_trace, f.sigma_trace, f.params);
    if (prog.ok() && translate_rhcol_to_fhcol(prog.value().op).ok()) {
      llvmgen::FSHCOLProgram p;
      p.name = "t12_dynwin";
      p.input_dim = prog.value().input_dim;
      p.output_dim = prog.value().output_dim;
      for (const auto& g : prog.value().globals.items) p.globals.push_back({g.name, g.type.size});
      p.op = prog.value().op;
      suite.push_back(std::move(p));
    }
  }
  return suite;
}

// ---- pipeline --------------------------------------------------------------------------

namespace {

struct StageRunner {
  PipelineReport& rep;
  bool aborted = false;

  bool stage(const std::string& name, bool pass, const std::string& detail = "") {
    rep.stages.push_back({name, pass, false, detail});
    if (!pass) aborted = true;
    return pass;
  }
  void skipped(const std::string& name, const std::string& detail) {
    rep.stages.push_back({name, true, true, detail});
  }
};

// exact rational / rounded double evaluation of an extracted expression
Rational sexpr_eval_rational(const sym::SexprArena& a, uint32_t i,
                             const std::vector<Rational>& vars) {
  const sym::SNode& n = a.at(i);
  switch (n.op) {
    case sym::SOp::Zero: return Rational();
    case sym::SOp::One: return Rational(1);
    case sym::SOp::Var: return vars[n.var];
    case sym::SOp::Plus: return sexpr_eval_rational(a, n.a, vars) + sexpr_eval_rational(a, n.b, vars);
    case sym::SOp::Sub: return sexpr_eval_rational(a, n.a, vars) - sexpr_eval_rational(a, n.b, vars);
    case sym::SOp::Mult: return sexpr_eval_rational(a, n.a, vars) * sexpr_eval_rational(a, n.b, vars);
    case sym::SOp::Abs: return sexpr_eval_rational(a, n.a, vars).abs();
    case sym::SOp::Min: {
      Rational x = sexpr_eval_rational(a, n.a, vars), y = sexpr_eval_rational(a, n.b, vars);
      return y < x ? y : x;
    }
    case sym::SOp::Max: {
      Rational x = sexpr_eval_rational(a, n.a, vars), y = sexpr_eval_rational(a, n.b, vars);
      return x < y ? y : x;
    }
    case sym::SOp::ZLess: {
      return sexpr_eval_rational(a, n.a, vars) < sexpr_eval_rational(a, n.b, vars) ? Rational(1)
                                                                                   : Rational();
    }
  }
  return Rational();
}

double sexpr_eval_double(const sym::SexprArena& a, uint32_t i, const std::vector<double>& vars) {
  const sym::SNode& n = a.at(i);
  switch (n.op) {
    case sym::SOp::Zero: return 0.0;
    case sym::SOp::One: return 1.0;
    case sym::SOp::Var: return vars[n.var];
    case sym::SOp::Plus: return sexpr_eval_double(a, n.a, vars) + sexpr_eval_double(a, n.b, vars);
    case sym::SOp::Sub: return sexpr_eval_double(a, n.a, vars) - sexpr_eval_double(a, n.b, vars);
    case sym::SOp::Mult: return sexpr_eval_double(a, n.a, vars) * sexpr_eval_double(a, n.b, vars);
    case sym::SOp::Abs: return std::fabs(sexpr_eval_double(a, n.a, vars));
    case sym::SOp::Min: {
      double x = sexpr_eval_double(a, n.a, vars), y = sexpr_eval_double(a, n.b, vars);
      return y < x ? y : x;
    }
    case sym::SOp::Max: {
      double x = sexpr_eval_double(a, n.a, vars), y = sexpr_eval_double(a, n.b, vars);
      return x < y ? y : x;
    }
    case sym::SOp::ZLess:
      return sexpr_eval_double(a, n.a, vars) < sexpr_eval_double(a, n.b, vars) ? 1.0 : 0.0;
  }
  return 0.0;
}

}  // namespace

PipelineReport run_pipeline(const PipelineConfig& cfg) {
  PipelineReport rep;
  StageRunner run{rep};

  DynWinFixture fixture = dynwin_fixture();
  hcol::HExprPtr h;
  std::vector<TraceStep> htrace, strace;
  std::map<std::string, size_t> params;
  bool is_fixture = cfg.input_text.empty();
  if (is_fixture) {
    h = fixture.orig;
    htrace = fixture.hcol_trace;
    strace = fixture.sigma_trace;
    params = fixture.params;
    run.stage("parse", true, "bundled dynamic window fixture");
  } else {
    auto parsed = surface::parse_program(cfg.input_text, surface::Language::Hcol);
    if (!run.stage("parse", parsed.ok(), parsed.ok() ? "" : parsed.error().message)) return rep;
    h = parsed.value().h;
    htrace = cfg.hcol_trace;
    strace = cfg.sigma_trace;
    params = collect_params(h);
  }

  // stage 1: breakdown, validated by the extensional oracle
  auto rules = builtin_rules();
  auto broken = apply_breakdown_trace(h, htrace, rules);
  if (!run.stage("hcol-breakdown", broken.ok(), broken.ok() ? "" : broken.error().message))
    return rep;
  {
    auto eq = check_extensional_equiv(h, broken.value(), cfg.rewrite_samples, cfg.seed);
    bool pass = eq.ok() && eq.value().equal;
    if (!run.stage("hcol-breakdown-oracle", pass,
                   pass ? std::to_string(cfg.rewrite_samples) + " samples"
                        : (eq.ok() ? "counterexample found" : eq.error().message)))
      return rep;
  }

  // stage 2: lift and rewrite into the final sparse form
  auto lifted = sigma::lift_hcol(broken.value(), CarrierLit::zero());
  auto srules = sigma::sh_builtin_rules();
  auto sh = sigma::apply_sh_rewrites(lifted, strace, srules);
  if (!run.stage("sigma-rewrite", sh.ok(), sh.ok() ? "" : sh.error().message)) return rep;
  {
    auto eq = sigma::check_sh_vs_hcol(sh.value(), h, cfg.rewrite_samples, cfg.seed + 1, params);
    bool pass = eq.ok() && eq.value().equal;
    if (!run.stage("sigma-oracle", pass,
                   pass ? std::to_string(cfg.rewrite_samples) + " dense samples"
                        : (eq.ok() ? "counterexample found" : eq.error().message)))
      return rep;
    auto facts = sigma::facts_check(sh.value(), cfg.compat_samples / 5 + 1, cfg.seed + 2, params);
    if (!run.stage("sigma-facts", facts.pass(),
                   facts.pass() ? "" : facts.violations.front()))
      return rep;
  }

  // stage 3: memory form
  auto msh = lowering::shcol_to_mshcol(sh.value());
  if (!run.stage("mshcol-translate", msh.ok(), msh.ok() ? "" : msh.error().message)) return rep;
  {
    auto facts = mshcol::msh_facts_check(msh.value(), cfg.compat_samples / 5 + 1, cfg.seed + 3, params);
    if (!run.stage("mshcol-facts", facts.pass(), facts.pass() ? "" : facts.violations.front()))
      return rep;
    auto compat = mshcol::check_sh_msh_compat(sh.value(), msh.value(), cfg.compat_samples,
                                              cfg.seed + 4, params);
    if (!run.stage("sh-msh-compat", compat.ok, compat.detail)) return rep;
  }

  // stage 4: imperative form
  auto prog = lowering::lower_mshcol_program(msh.value(), params);
  if (!run.stage("dhcol-lower", prog.ok(), prog.ok() ? "" : prog.error().message)) return rep;
  {
    ParamEnv env;
    Rng prng(cfg.seed + 5);
    for (const auto& g : prog.value().globals.items) {
      std::vector<CarrierValue> v;
      for (uint64_t j = 0; j < g.type.size; ++j) v.push_back(CarrierValue(prng.rational()));
      env.vectors.emplace(g.param, std::move(v));
    }
    mshcol::MemBlock input;
    for (uint64_t j = 0; j < prog.value().input_dim; ++j)
      input.set(j, CarrierValue(prng.rational()));
    auto inst = lowering::instantiate(prog.value(), env, input, CarrierKind::Rational);
    auto pure = lowering::check_dsh_pure(prog.value().op,
                                         PExpr{prog.value().globals.items.size() + 1}, inst.ctx,
                                         inst.mem, cfg.compat_samples, cfg.seed + 6);
    if (!run.stage("dsh-pure", pure.ok, pure.detail)) return rep;
    auto compat =
        lowering::check_msh_dsh_compat(msh.value(), prog.value(), cfg.compat_samples, cfg.seed + 7);
    if (!run.stage("msh-dsh-compat", compat.ok, compat.detail)) return rep;
  }

  // stage 5: fixed-width instance
  auto fop = translate_rhcol_to_fhcol(prog.value().op);
  if (!run.stage("rhcol-fhcol-translate", fop.ok(), fop.ok() ? "" : fop.error().message))
    return rep;

  // stage 6: numerical analysis on the extracted arithmetic form
  auto symres = analysis::symbolic_exec(prog.value(), 0);
  if (!run.stage("symbolic-exec", symres.ok(), symres.ok() ? "" : symres.error().message))
    return rep;
  rep.symbolic_sexpr = symres.value().arena->to_string(symres.value().root);
  uint32_t lhs_node = 0, rhs_node = 0;
  {
    const sym::SNode& root = symres.value().arena->at(symres.value().root);
    bool is_cmp = root.op == sym::SOp::ZLess;
    if (is_fixture) {
      if (!run.stage("analysis-shape", is_cmp,
                     is_cmp ? "single guarded comparison" : "root is not a comparison"))
        return rep;
      lhs_node = root.a;
      rhs_node = root.b;
      std::map<uint32_t, analysis::Interval> env;
      env[0] = analysis::interval_of(fixture.a0.lo, fixture.a0.hi);
      env[1] = analysis::interval_of(fixture.a1.lo, fixture.a1.hi);
      env[2] = analysis::interval_of(fixture.a2.lo, fixture.a2.hi);
      env[3] = analysis::interval_of(fixture.v.lo, fixture.v.hi);
      for (uint32_t k = 4; k < 8; ++k)
        env[k] = analysis::interval_of(fixture.coord.lo, fixture.coord.hi);
      std::map<uint32_t, analysis::Interval> per_subterm;
      auto lhs = analysis::interval_error_bound(*symres.value().arena, lhs_node, env, &per_subterm);
      auto rhs = analysis::interval_error_bound(*symres.value().arena, rhs_node, env, &per_subterm);
      for (const auto& [node, iv] : per_subterm)
        rep.subterm_intervals.push_back({symres.value().arena->to_string(node),
                                         iv.lo.to_string(), iv.hi.to_string(),
                                         iv.err.to_string()});
      if (!run.stage("interval-bounds", lhs.ok() && rhs.ok(),
                     lhs.ok() && rhs.ok() ? "" : "range propagation failed"))
        return rep;
      rep.lhs_err = lhs.value().err;
      rep.rhs_err = rhs.value().err;
      rep.epsilon = analysis::safety_margin(rep.lhs_err, rep.rhs_err);
      rep.gappa_text =
          analysis::export_gappa_problem(*symres.value().arena, lhs_node, rhs_node, env);
      char epsbuf[48];
      snprintf(epsbuf, sizeof epsbuf, "epsilon = %.6g", rep.epsilon.to_double());
      run.stage("safety-margin", !rep.epsilon.is_negative() && !rep.epsilon.is_zero(), epsbuf);
    } else {
      run.skipped("interval-bounds", "input ranges are fixture specific");
    }
  }
  {
    std::vector<analysis::DSHIndexRange> sigma_ranges(prog.value().globals.items.size() + 2,
                                                      analysis::DSHIndexRange::other());
    auto trace = analysis::closure_trace(prog.value().op, sigma_ranges);
    auto ovf = analysis::check_trace_no_overflow(trace);
    if (!run.stage("closure-overflow",
                   ovf.pass(), ovf.pass() ? std::to_string(trace.size()) + " closures"
                                          : ovf.findings.front()))
      return rep;
  }

  // stage 7: paired-instance deviation check on the extracted comparison
  if (is_fixture) {
    Rng rng(cfg.seed + 8);
    const auto& arena = *symres.value().arena;
    Rational max_lhs, max_rhs;
    bool sound = true;
    auto sample_in = [&](const ValueRange& r) {
      double lo = r.lo.to_double(), hi = r.hi.to_double();
      return rng.real(lo, hi);
    };
    for (size_t t = 0; t < cfg.rf_samples && sound; ++t) {
      std::vector<double> dv = {sample_in(fixture.a0), sample_in(fixture.a1),
                                sample_in(fixture.a2), sample_in(fixture.v),
                                sample_in(fixture.coord), sample_in(fixture.coord),
                                sample_in(fixture.coord), sample_in(fixture.coord)};
      std::vector<Rational> qv;
      for (double d : dv) qv.push_back(Rational::from_double(d));
      Rational dl =
          (sexpr_eval_rational(arena, lhs_node, qv) -
           Rational::from_double(sexpr_eval_double(arena, lhs_node, dv)))
              .abs();
      Rational dr =
          (sexpr_eval_rational(arena, rhs_node, qv) -
           Rational::from_double(sexpr_eval_double(arena, rhs_node, dv)))
              .abs();
      if (max_lhs < dl) max_lhs = dl;
      if (max_rhs < dr) max_rhs = dr;
      sound = !(rep.lhs_err < dl) && !(rep.rhs_err < dr);
    }
    run.stage("rf-deviation", sound,
              sound ? std::to_string(cfg.rf_samples) + " paired samples within bounds"
                    : "observed deviation exceeds the analysis bound");
    if (!sound) return rep;
  } else {
    run.skipped("rf-deviation", "fixture-specific sampling");
  }

  // stage 8: code generation
  llvmgen::FSHCOLProgram fsh;
  fsh.input_dim = prog.value().input_dim;
  fsh.output_dim = prog.value().output_dim;
  fsh.name = is_fixture ? "dynwin" : "operator";
  for (const auto& g : prog.value().globals.items) fsh.globals.push_back({g.name, g.type.size});
  fsh.op = prog.value().op;
  Rng poolrng(cfg.seed + 9);
  std::vector<double> pool;
  size_t need = fsh.input_dim;
  for (const auto& [n, sz] : fsh.globals) {
    (void)n;
    need += sz;
  }
  for (size_t i = 0; i < need; ++i) pool.push_back(poolrng.real(-50.0, 50.0));
  auto module = llvmgen::compile_w_main(fsh, pool);
  if (!run.stage("llvm-emit", module.ok(), module.ok() ? "" : module.error().message)) return rep;
  rep.ll_text = llvmgen::emit_text(module.value());
  size_t lines = static_cast<size_t>(std::count(rep.ll_text.begin(), rep.ll_text.end(), '\n'));
  run.stage("llvm-lines", true, std::to_string(lines) + " lines");

  // optional external execution against the evaluator
  if (cfg.use_external_llvm) {
    auto harness = run_test_harness(fsh, cfg.seed + 10, true, cfg.clang_path);
    bool pass = harness.ok();
    bool skipped = false;
    for (const auto& s : harness.steps)
      if (s.name == "llvm-exec" && s.status == HarnessStep::Status::Skipped) skipped = true;
    if (skipped)
      run.skipped("llvm-exec", "external toolchain not found");
    else
      run.stage("llvm-exec", pass, pass ? "bit-exact against the evaluator" : "mismatch");
  } else {
    run.skipped("llvm-exec", "disabled");
  }
  return rep;
}

nlohmann::json PipelineReport::to_json() const {
  nlohmann::json j;
  j["stages"] = nlohmann::json::array();
  for (const auto& s : stages) {
    j["stages"].push_back({{"stage", s.stage},
                           {"status", s.skipped ? "skipped" : (s.pass ? "pass" : "fail")},
                           {"detail", s.detail}});
  }
  j["ok"] = ok();
  if (!symbolic_sexpr.empty()) {
    j["symbolic"] = symbolic_sexpr;
    j["lhs_abs_error"] = lhs_err.to_string();
    j["rhs_abs_error"] = rhs_err.to_string();
    j["epsilon"] = epsilon.to_string();
    j["subterm_intervals"] = nlohmann::json::array();
    for (const auto& [term, lo, hi, err] : subterm_intervals)
      j["subterm_intervals"].push_back(
          {{"term", term}, {"lo", lo}, {"hi", hi}, {"abs_error", err}});
  }
  return j;
}

}  // namespace hcolc::pipeline
