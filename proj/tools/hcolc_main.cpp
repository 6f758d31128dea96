#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "hcolc/pipeline.hpp"
#include "hcolc/rng.hpp"

using namespace hcolc;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

struct ProgramInput {
  std::string expr;
  std::string file;
  std::string language = "hcol";

  void attach(CLI::App* cmd, bool with_lang = true) {
    cmd->add_option("--expr", expr, "program text");
    cmd->add_option("--input", file, "program file");
    if (with_lang)
      cmd->add_option("--language", language, "hcol | shcol | mshcol | dhcol")
          ->capture_default_str();
  }

  Result<surface::Parsed> parse() const {
    std::string text = expr;
    if (text.empty() && !file.empty()) text = slurp(file);
    if (text.empty())
      return Result<surface::Parsed>::err(ErrKind::ParseError, "no program given (--expr or --input)");
    auto lang = surface::language_from_name(language);
    if (!lang.ok()) return lang.error();
    return surface::parse_program(text, lang.value());
  }
};

ParamEnv parse_params(const std::vector<std::string>& specs, CarrierKind kind) {
  ParamEnv env;
  for (const auto& s : specs) {
    auto eq = s.find('=');
    if (eq == std::string::npos) throw std::runtime_error("bad --param, expected name=v1,v2,...");
    auto vals = surface::parse_values(s.substr(eq + 1), kind);
    if (!vals.ok()) throw std::runtime_error(vals.error().message);
    env.vectors[s.substr(0, eq)] = vals.value();
  }
  return env;
}

std::map<std::string, size_t> parse_param_sizes(const std::vector<std::string>& specs) {
  std::map<std::string, size_t> out;
  for (const auto& s : specs) {
    auto eq = s.find('=');
    if (eq == std::string::npos) throw std::runtime_error("bad --param-size, expected name=N");
    out[s.substr(0, eq)] = std::stoull(s.substr(eq + 1));
  }
  return out;
}

int fail(const Error& e) {
  std::cerr << "error (" << err_kind_name(e.kind) << "): " << e.message << "\n";
  return 1;
}

void write_or_print(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(path);
  f << text;
  std::cout << "wrote " << path << "\n";
}

const char* status_str(bool pass, bool skipped) {
  return skipped ? "SKIP" : (pass ? "PASS" : "FAIL");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"operator-language compiler pipeline with differential validation"};
  app.require_subcommand(1);

  // ---- parse ----
  ProgramInput parse_in;
  bool parse_json = false;
  auto* cmd_parse = app.add_subcommand("parse", "parse a program and report its dimensions");
  parse_in.attach(cmd_parse);
  cmd_parse->add_flag("--json", parse_json, "dump the AST as JSON");

  // ---- eval ----
  ProgramInput eval_in;
  std::string eval_x, eval_carrier = "rational";
  std::vector<std::string> eval_params;
  auto* cmd_eval = app.add_subcommand("eval", "evaluate a dense-vector program");
  eval_in.attach(cmd_eval);
  cmd_eval->add_option("--x", eval_x, "input values")->required();
  cmd_eval->add_option("--carrier", eval_carrier, "rational | binary64")->capture_default_str();
  cmd_eval->add_option("--param", eval_params, "parameter binding name=v1,v2,...");

  // ---- lower ----
  ProgramInput lower_in;
  lower_in.language = "shcol";
  std::vector<std::string> lower_sizes;
  bool lower_json = false;
  auto* cmd_lower = app.add_subcommand("lower", "lower a sparse operator to the imperative form");
  lower_in.attach(cmd_lower);
  cmd_lower->add_option("--param-size", lower_sizes, "declared parameter size name=N");
  cmd_lower->add_flag("--json", lower_json, "dump the lowering as JSON");

  // ---- validate ----
  ProgramInput val_in;
  val_in.language = "shcol";
  std::vector<std::string> val_sizes;
  size_t val_samples = 300;
  uint64_t val_seed = 1;
  auto* cmd_val = app.add_subcommand("validate", "run the stage validators on a sparse operator");
  val_in.attach(cmd_val);
  cmd_val->add_option("--param-size", val_sizes, "declared parameter size name=N");
  cmd_val->add_option("--samples", val_samples, "samples per validator")->capture_default_str();
  cmd_val->add_option("--seed", val_seed, "random seed")->capture_default_str();

  // ---- emit-llvm ----
  ProgramInput emit_in;
  emit_in.language = "dhcol";
  uint64_t emit_i = 0, emit_o = 0, emit_seed = 1;
  std::string emit_name = "operator", emit_out;
  std::vector<std::string> emit_globals;
  auto* cmd_emit = app.add_subcommand("emit-llvm", "compile an imperative program to textual IR");
  emit_in.attach(cmd_emit);
  cmd_emit->add_option("--input-dim", emit_i, "input vector size")->required();
  cmd_emit->add_option("--output-dim", emit_o, "output vector size")->required();
  cmd_emit->add_option("--name", emit_name, "function name")->capture_default_str();
  cmd_emit->add_option("--global", emit_globals, "global block name=size");
  cmd_emit->add_option("--seed", emit_seed, "data pool seed")->capture_default_str();
  cmd_emit->add_option("--out", emit_out, "output .ll path");
  bool emit_external_globals = false;
  cmd_emit->add_flag("--external-globals", emit_external_globals,
                     "emit globals with external linkage instead of internal");

  // ---- analyze ----
  ProgramInput an_in;
  an_in.language = "dhcol";
  uint64_t an_i = 1, an_o = 1;
  std::vector<std::string> an_globals;
  bool an_json = false;
  auto* cmd_an = app.add_subcommand("analyze", "symbolic execution and integer range analysis");
  an_in.attach(cmd_an);
  cmd_an->add_option("--input-dim", an_i, "input vector size")->capture_default_str();
  cmd_an->add_option("--output-dim", an_o, "output vector size")->capture_default_str();
  cmd_an->add_option("--global", an_globals, "global block name=size");
  cmd_an->add_flag("--json", an_json, "JSON report");
  bool an_trace = false;
  uint64_t an_trace_seed = 1;
  cmd_an->add_flag("--trace-json", an_trace,
                   "dump (context, memory) after each sequencing step on a random input");
  cmd_an->add_option("--trace-seed", an_trace_seed, "input seed for --trace-json")
      ->capture_default_str();

  // ---- harness ----
  uint64_t h_seed = 1;
  bool h_nollvm = false, h_json = false;
  auto* cmd_h = app.add_subcommand("harness", "run the bundled compiler test suite");
  cmd_h->add_option("--seed", h_seed, "random seed")->capture_default_str();
  cmd_h->add_flag("--no-llvm-exec", h_nollvm, "skip external execution");
  cmd_h->add_flag("--json", h_json, "JSON report");

  // ---- dynwin ----
  pipeline::PipelineConfig dw_cfg;
  std::string dw_out, dw_report, dw_gappa;
  bool dw_nollvm = false;
  auto* cmd_dw = app.add_subcommand("dynwin", "run the full pipeline on the bundled fixture");
  cmd_dw->add_option("--seed", dw_cfg.seed, "random seed")->capture_default_str();
  cmd_dw->add_option("--samples", dw_cfg.rewrite_samples, "oracle samples")->capture_default_str();
  cmd_dw->add_option("--compat-samples", dw_cfg.compat_samples, "validator samples")
      ->capture_default_str();
  cmd_dw->add_option("--rf-samples", dw_cfg.rf_samples, "paired deviation samples")
      ->capture_default_str();
  cmd_dw->add_option("--out", dw_out, "write the emitted .ll here");
  cmd_dw->add_option("--report", dw_report, "write the JSON report here");
  cmd_dw->add_option("--gappa", dw_gappa, "write the exported error-analysis problem here");
  cmd_dw->add_flag("--no-llvm-exec", dw_nollvm, "skip external execution");

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_parse->parsed()) {
      auto p = parse_in.parse();
      if (!p.ok()) return fail(p.error());
      if (parse_json) {
        std::cout << surface::program_json(p.value()).dump(2) << "\n";
      } else {
        std::cout << surface::print_program(p.value()) << "\n";
        if (p.value().lang == surface::Language::Hcol) {
          auto d = hcol::dims(p.value().h);
          if (!d.ok()) return fail(d.error());
          std::cout << "dims: " << d.value().in << " -> " << d.value().out << "\n";
        }
      }
      return 0;
    }

    if (cmd_eval->parsed()) {
      auto p = eval_in.parse();
      if (!p.ok()) return fail(p.error());
      CarrierKind kind =
          eval_carrier == "binary64" ? CarrierKind::Binary64 : CarrierKind::Rational;
      auto x = surface::parse_values(eval_x, kind);
      if (!x.ok()) return fail(x.error());
      ParamEnv env = parse_params(eval_params, kind);
      if (p.value().lang == surface::Language::Hcol) {
        auto r = hcol::eval_hcol(p.value().h, x.value(), env, kind);
        if (!r.ok()) return fail(r.error());
        for (const auto& v : r.value()) std::cout << v.to_string() << " ";
        std::cout << "\n";
        return 0;
      }
      if (p.value().lang == surface::Language::Shcol) {
        auto r = sigma::eval_shcol(p.value().sh, sigma::sparsify(x.value()), env,
                                   sigma::EvalOpts{kind, nullptr, sigma::FlagsKind::Safe});
        if (!r.ok()) return fail(r.error());
        for (const auto& c : r.value())
          std::cout << (c.is_struct ? "_" : c.value.to_string()) << " ";
        std::cout << "\n";
        return 0;
      }
      return fail({ErrKind::Unsupported, "eval expects an hcol or shcol program"});
    }

    if (cmd_lower->parsed()) {
      auto p = lower_in.parse();
      if (!p.ok()) return fail(p.error());
      mshcol::MSHExprPtr msh;
      if (p.value().lang == surface::Language::Shcol) {
        auto m = lowering::shcol_to_mshcol(p.value().sh);
        if (!m.ok()) return fail(m.error());
        msh = m.value();
      } else if (p.value().lang == surface::Language::Mshcol) {
        msh = p.value().msh;
      } else {
        return fail({ErrKind::Unsupported, "lower expects an shcol or mshcol program"});
      }
      auto prog = lowering::lower_mshcol_program(msh, parse_param_sizes(lower_sizes));
      if (!prog.ok()) return fail(prog.error());
      if (lower_json) {
        nlohmann::json j;
        j["mshcol"] = surface::to_json(msh);
        j["dhcol"] = dhcol::to_string(prog.value().op);
        j["globals"] = nlohmann::json::array();
        for (const auto& g : prog.value().globals.items)
          j["globals"].push_back({{"name", g.name}, {"parameter", g.param}, {"size", g.type.size}});
        j["binders"] = {{"input", prog.value().globals.items.size()},
                        {"output", prog.value().globals.items.size() + 1}};
        static const std::map<mshcol::MOp, std::string> templates = {
            {mshcol::MOp::Embed, "assign"},
            {mshcol::MOp::Pick, "assign"},
            {mshcol::MOp::Pointwise, "imap"},
            {mshcol::MOp::BinOp, "binop"},
            {mshcol::MOp::Inductor, "power"},
            {mshcol::MOp::Apply2Union, "seq"},
            {mshcol::MOp::Compose, "alloc/seq"},
            {mshcol::MOp::IUnion, "loop"},
            {mshcol::MOp::IReduction, "meminit/alloc/loop/memmap2"},
        };
        std::set<std::string> used;
        std::function<void(const mshcol::MSHExprPtr&)> walk = [&](const mshcol::MSHExprPtr& e) {
          if (!e) return;
          used.insert(mshcol::to_string(e).substr(1, mshcol::to_string(e).find(' ') - 1) + " -> " +
                      templates.at(e->op));
          walk(e->f);
          walk(e->g);
          walk(e->fam.body);
        };
        walk(msh);
        j["templates"] = used;
        std::cout << j.dump(2) << "\n";
      } else {
        std::cout << mshcol::to_string(msh) << "\n\n" << dhcol::to_string(prog.value().op) << "\n";
        for (const auto& g : prog.value().globals.items)
          std::cout << "global " << g.name << " (parameter " << g.param << ", size "
                    << g.type.size << ")\n";
      }
      return 0;
    }

    if (cmd_val->parsed()) {
      auto p = val_in.parse();
      if (!p.ok()) return fail(p.error());
      if (p.value().lang != surface::Language::Shcol)
        return fail({ErrKind::Unsupported, "validate expects an shcol program"});
      auto sizes = parse_param_sizes(val_sizes);
      bool all = true;
      auto facts = sigma::facts_check(p.value().sh, val_samples, val_seed, sizes);
      std::cout << status_str(facts.pass(), false) << " sigma-facts"
                << (facts.pass() ? "" : "  " + facts.violations.front()) << "\n";
      all &= facts.pass();
      auto m = lowering::shcol_to_mshcol(p.value().sh);
      if (!m.ok()) {
        std::cout << "FAIL mshcol-translate  " << m.error().message << "\n";
        return 1;
      }
      auto mfacts = mshcol::msh_facts_check(m.value(), val_samples, val_seed + 1, sizes);
      std::cout << status_str(mfacts.pass(), false) << " mshcol-facts" << "\n";
      all &= mfacts.pass();
      auto compat = mshcol::check_sh_msh_compat(p.value().sh, m.value(), val_samples, val_seed + 2, sizes);
      std::cout << status_str(compat.ok, false) << " sh-msh-compat"
                << (compat.ok ? "" : "  " + compat.detail) << "\n";
      all &= compat.ok;
      auto prog = lowering::lower_mshcol_program(m.value(), sizes);
      if (!prog.ok()) {
        std::cout << "FAIL dhcol-lower  " << prog.error().message << "\n";
        return 1;
      }
      auto dcompat = lowering::check_msh_dsh_compat(m.value(), prog.value(), val_samples, val_seed + 3);
      std::cout << status_str(dcompat.ok, false) << " msh-dsh-compat"
                << (dcompat.ok ? "" : "  " + dcompat.detail) << "\n";
      all &= dcompat.ok;
      return all ? 0 : 1;
    }

    if (cmd_emit->parsed()) {
      auto p = emit_in.parse();
      if (!p.ok()) return fail(p.error());
      if (p.value().lang != surface::Language::Dhcol)
        return fail({ErrKind::Unsupported, "emit-llvm expects a dhcol program"});
      llvmgen::FSHCOLProgram fp;
      fp.input_dim = emit_i;
      fp.output_dim = emit_o;
      fp.name = emit_name;
      fp.internal_globals = !emit_external_globals;
      for (const auto& g : emit_globals) {
        auto eq = g.find('=');
        if (eq == std::string::npos) throw std::runtime_error("bad --global, expected name=size");
        fp.globals.push_back({g.substr(0, eq), std::stoull(g.substr(eq + 1))});
      }
      auto fhcol = dhcol::translate_rhcol_to_fhcol(p.value().dsh);
      if (!fhcol.ok()) return fail(fhcol.error());
      fp.op = fhcol.value();
      Rng rng(emit_seed);
      std::vector<double> pool;
      size_t need = fp.input_dim;
      for (const auto& [n, sz] : fp.globals) {
        (void)n;
        need += sz;
      }
      for (size_t i = 0; i < need; ++i) pool.push_back(rng.real(-100.0, 100.0));
      auto m = llvmgen::compile_w_main(fp, pool);
      if (!m.ok()) return fail(m.error());
      write_or_print(emit_out, llvmgen::emit_text(m.value()));
      return 0;
    }

    if (cmd_an->parsed()) {
      auto p = an_in.parse();
      if (!p.ok()) return fail(p.error());
      if (p.value().lang != surface::Language::Dhcol)
        return fail({ErrKind::Unsupported, "analyze expects a dhcol program"});
      lowering::LoweredProgram prog;
      prog.input_dim = an_i;
      prog.output_dim = an_o;
      prog.op = p.value().dsh;
      for (const auto& g : an_globals) {
        auto eq = g.find('=');
        if (eq == std::string::npos) throw std::runtime_error("bad --global, expected name=size");
        prog.globals.items.push_back({g.substr(0, eq), g.substr(0, eq),
                                      lowering::DSHType{lowering::DSHType::Kind::Ptr,
                                                        std::stoull(g.substr(eq + 1))}});
      }
      if (an_trace) {
        Rng trng(an_trace_seed);
        ParamEnv penv;
        for (auto& g : prog.globals.items) {
          std::vector<CarrierValue> v;
          for (uint64_t k = 0; k < g.type.size; ++k) v.push_back(CarrierValue(trng.rational()));
          penv.vectors[g.param] = std::move(v);
        }
        mshcol::MemBlock input;
        for (uint64_t k = 0; k < prog.input_dim; ++k) input.set(k, CarrierValue(trng.rational()));
        auto inst = lowering::instantiate(prog, penv, input, CarrierKind::Rational);
        nlohmann::json steps = nlohmann::json::array();
        std::function<void(const dhcol::EvalContext&, const dhcol::Memory&)> hook =
            [&](const dhcol::EvalContext& c, const dhcol::Memory& mm) {
              nlohmann::json st;
              st["context_size"] = c.size();
              st["memory"] = surface::to_json(mm);
              steps.push_back(std::move(st));
            };
        dhcol::DEvalOpts topts;
        topts.seq_hook = &hook;
        auto r = dhcol::eval_dshoperator(inst.ctx, prog.op, inst.mem,
                                         dhcol::estimate_fuel(prog.op), topts);
        nlohmann::json j;
        j["steps"] = steps;
        j["ok"] = r.has_value() && r->ok();
        if (r.has_value() && !r->ok()) j["error"] = r->error().message;
        std::cout << j.dump(2) << "\n";
        return (r.has_value() && r->ok()) ? 0 : 1;
      }
      auto sym = analysis::symbolic_exec(prog, 0);
      std::vector<analysis::DSHIndexRange> sigma_ranges(prog.globals.items.size() + 2,
                                                        analysis::DSHIndexRange::other());
      auto trace = analysis::closure_trace(prog.op, sigma_ranges);
      auto ovf = analysis::check_trace_no_overflow(trace);
      if (an_json) {
        nlohmann::json j;
        j["symbolic"] = sym.ok() ? sym.value().arena->to_string(sym.value().root)
                                 : "error: " + sym.error().message;
        j["closures"] = nlohmann::json::array();
        for (const auto& c : trace) j["closures"].push_back(analysis::closure_to_string(c));
        j["overflow_findings"] = ovf.findings;
        std::cout << j.dump(2) << "\n";
      } else {
        if (sym.ok())
          std::cout << "symbolic: " << sym.value().arena->to_string(sym.value().root) << "\n";
        else
          std::cout << "symbolic: error: " << sym.error().message << "\n";
        std::cout << trace.size() << " integer closures\n";
        for (const auto& c : trace) std::cout << "  " << analysis::closure_to_string(c) << "\n";
        std::cout << status_str(ovf.pass(), false) << " closure-overflow\n";
        for (const auto& f0 : ovf.findings) std::cout << "  " << f0 << "\n";
      }
      return ovf.pass() && sym.ok() ? 0 : 1;
    }

    if (cmd_h->parsed()) {
      auto suite = pipeline::harness_suite();
      bool all = true;
      nlohmann::json j = nlohmann::json::array();
      for (const auto& prog : suite) {
        auto res = pipeline::run_test_harness(prog, h_seed, !h_nollvm);
        all &= res.ok();
        if (h_json) {
          nlohmann::json pj;
          pj["program"] = res.program;
          for (const auto& s : res.steps)
            pj["steps"].push_back(
                {{"step", s.name},
                 {"status", s.status == pipeline::HarnessStep::Status::Pass
                                ? "pass"
                                : (s.status == pipeline::HarnessStep::Status::Skipped ? "skipped"
                                                                                      : "fail")},
                 {"detail", s.detail}});
          j.push_back(pj);
        } else {
          std::cout << (res.ok() ? "PASS" : "FAIL") << " " << res.program;
          for (const auto& s : res.steps)
            if (s.status == pipeline::HarnessStep::Status::Skipped)
              std::cout << " [" << s.name << " skipped]";
          std::cout << "\n";
        }
      }
      if (h_json) std::cout << j.dump(2) << "\n";
      return all ? 0 : 1;
    }

    if (cmd_dw->parsed()) {
      dw_cfg.use_external_llvm = !dw_nollvm;
      auto rep = pipeline::run_pipeline(dw_cfg);
      for (const auto& s : rep.stages)
        std::cout << status_str(s.pass, s.skipped) << " " << s.stage
                  << (s.detail.empty() ? "" : "  " + s.detail) << "\n";
      if (!dw_out.empty()) write_or_print(dw_out, rep.ll_text);
      if (!dw_report.empty()) write_or_print(dw_report, rep.to_json().dump(2) + "\n");
      if (!dw_gappa.empty()) write_or_print(dw_gappa, rep.gappa_text);
      return rep.ok() ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
