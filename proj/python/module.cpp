#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hcolc/pipeline.hpp"

namespace py = pybind11;
using namespace hcolc;

namespace {

surface::Parsed parse_or_throw(const std::string& text, const std::string& lang) {
  auto l = surface::language_from_name(lang);
  if (!l.ok()) throw py::value_error(l.error().message);
  auto p = surface::parse_program(text, l.value());
  if (!p.ok()) throw py::value_error(p.error().message);
  return p.value();
}

ParamEnv params_from_dict(const py::dict& params, CarrierKind kind) {
  ParamEnv env;
  for (auto item : params) {
    std::vector<CarrierValue> vals;
    for (auto v : item.second.cast<py::sequence>()) {
      Rational q = Rational::parse(py::str(v).cast<std::string>());
      vals.push_back(kind == CarrierKind::Rational ? CarrierValue(q) : CarrierValue(q.to_double()));
    }
    env.vectors[item.first.cast<std::string>()] = std::move(vals);
  }
  return env;
}

py::dict stage_dict(const pipeline::StageResult& s) {
  py::dict d;
  d["stage"] = s.stage;
  d["status"] = s.skipped ? "skipped" : (s.pass ? "pass" : "fail");
  d["detail"] = s.detail;
  return d;
}

}  // namespace

PYBIND11_MODULE(_hcolc, m) {
  m.doc() = "operator-language compiler pipeline with differential validation";

  m.def(
      "parse",
      [](const std::string& text, const std::string& lang) {
        auto p = parse_or_throw(text, lang);
        py::dict out;
        out["printed"] = surface::print_program(p);
        if (p.lang == surface::Language::Hcol) {
          auto d = hcol::dims(p.h);
          if (d.ok()) {
            out["input_dim"] = d.value().in;
            out["output_dim"] = d.value().out;
          }
        }
        return out;
      },
      py::arg("text"), py::arg("language") = "hcol");

  m.def(
      "eval_hcol",
      [](const std::string& text, const std::vector<std::string>& x, const py::dict& params,
         const std::string& carrier) {
        auto p = parse_or_throw(text, "hcol");
        CarrierKind kind = carrier == "binary64" ? CarrierKind::Binary64 : CarrierKind::Rational;
        std::vector<CarrierValue> xs;
        for (const auto& s : x) {
          Rational q = Rational::parse(s);
          xs.push_back(kind == CarrierKind::Rational ? CarrierValue(q) : CarrierValue(q.to_double()));
        }
        ParamEnv env = params_from_dict(params, kind);
        auto r = hcol::eval_hcol(p.h, xs, env, kind);
        if (!r.ok()) throw py::value_error(r.error().message);
        std::vector<std::string> out;
        for (const auto& v : r.value()) out.push_back(v.to_string());
        return out;
      },
      py::arg("text"), py::arg("x"), py::arg("params") = py::dict(),
      py::arg("carrier") = "rational");

  m.def(
      "check_equiv",
      [](const std::string& a, const std::string& b, size_t samples, uint64_t seed) {
        auto pa = parse_or_throw(a, "hcol");
        auto pb = parse_or_throw(b, "hcol");
        auto r = hcol::check_extensional_equiv(pa.h, pb.h, samples, seed);
        if (!r.ok()) throw py::value_error(r.error().message);
        return r.value().equal;
      },
      py::arg("a"), py::arg("b"), py::arg("samples") = 200, py::arg("seed") = 1);

  m.def(
      "run_dynwin",
      [](uint64_t seed, size_t samples, bool external_llvm) {
        pipeline::PipelineConfig cfg;
        cfg.seed = seed;
        cfg.rewrite_samples = samples;
        cfg.compat_samples = samples;
        cfg.rf_samples = samples;
        cfg.use_external_llvm = external_llvm;
        auto rep = pipeline::run_pipeline(cfg);
        py::dict out;
        py::list stages;
        for (const auto& s : rep.stages) stages.append(stage_dict(s));
        out["stages"] = stages;
        out["ok"] = rep.ok();
        out["symbolic"] = rep.symbolic_sexpr;
        out["epsilon"] = rep.epsilon.to_string();
        out["lhs_abs_error"] = rep.lhs_err.to_string();
        out["rhs_abs_error"] = rep.rhs_err.to_string();
        out["ll_text"] = rep.ll_text;
        return out;
      },
      py::arg("seed") = 1, py::arg("samples") = 100, py::arg("external_llvm") = false);

  m.def(
      "run_harness",
      [](uint64_t seed, bool external_llvm) {
        py::list out;
        for (const auto& p : pipeline::harness_suite()) {
          auto res = pipeline::run_test_harness(p, seed, external_llvm);
          py::dict d;
          d["program"] = res.program;
          d["ok"] = res.ok();
          out.append(d);
        }
        return out;
      },
      py::arg("seed") = 1, py::arg("external_llvm") = false);

  m.def("safe_zless", &analysis::safe_zless, py::arg("a"), py::arg("b"), py::arg("eps"));

  m.def("dynwin_coefficient_ranges", [] {
    auto r = pipeline::derive_dynwin_coefficient_ranges();
    py::dict out;
    auto pair = [](const pipeline::ValueRange& v) {
      return py::make_tuple(v.lo.to_string(), v.hi.to_string());
    };
    out["a0"] = pair(r.a0);
    out["a1"] = pair(r.a1);
    out["a2"] = pair(r.a2);
    return out;
  });
}
