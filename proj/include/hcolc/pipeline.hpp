#pragma once

#include "hcolc/analysis.hpp"
#include "hcolc/llvmgen.hpp"
#include "hcolc/surface.hpp"

namespace hcolc::pipeline {

// ---- DynWin fixture -----------------------------------------------------------

struct ValueRange {
  Rational lo, hi;
};

struct DynWinFixture {
  hcol::HExprPtr orig;  // comparison of the velocity polynomial with the
                        // chebyshev distance, input [v, xr, yr, xo, yo]
  std::vector<hcol::TraceStep> hcol_trace;
  std::vector<hcol::TraceStep> sigma_trace;
  std::map<std::string, size_t> params;  // a -> 3

  // derived coefficient ranges and raw input ranges
  ValueRange a0, a1, a2, v, coord;
};

DynWinFixture dynwin_fixture();

// coefficient ranges recomputed from the parameter boxes (max obstacle
// velocity, acceleration, braking, sampling period) with exact interval
// arithmetic
struct DynWinDerivedRanges {
  ValueRange a0, a1, a2;
};
DynWinDerivedRanges derive_dynwin_coefficient_ranges();

// direct arithmetic evaluation of the comparison the fixture encodes
Rational dynwin_formula(const Rational& a0, const Rational& a1, const Rational& a2,
                        const Rational& v, const Rational& xr, const Rational& yr,
                        const Rational& xo, const Rational& yo);

// ---- pipeline ------------------------------------------------------------------

struct PipelineConfig {
  // empty input: use the bundled fixture
  std::string input_text;
  std::vector<hcol::TraceStep> hcol_trace;
  std::vector<hcol::TraceStep> sigma_trace;
  size_t rewrite_samples = 500;
  size_t compat_samples = 500;
  size_t rf_samples = 2000;
  uint64_t seed = 1;
  bool use_external_llvm = true;
  std::string clang_path;  // empty: $HCOLC_CLANG, then "clang"
};

struct StageResult {
  std::string stage;
  bool pass = true;
  bool skipped = false;
  std::string detail;
};

struct PipelineReport {
  std::vector<StageResult> stages;
  std::string ll_text;
  std::string gappa_text;
  std::string symbolic_sexpr;
  Rational lhs_err, rhs_err, epsilon;
  // node id -> (printed subterm, lo, hi, err)
  std::vector<std::tuple<std::string, std::string, std::string, std::string>> subterm_intervals;
  bool ok() const {
    for (const auto& s : stages)
      if (!s.pass) return false;
    return true;
  }
  nlohmann::json to_json() const;
};

PipelineReport run_pipeline(const PipelineConfig& cfg);

// ---- compiler test harness ----------------------------------------------------

struct HarnessStep {
  std::string name;
  enum class Status : uint8_t { Pass, Fail, Skipped } status = Status::Pass;
  std::string detail;
};

struct HarnessResult {
  std::string program;
  std::vector<HarnessStep> steps;
  bool ok() const {
    for (const auto& s : steps)
      if (s.status == HarnessStep::Status::Fail) return false;
    return true;
  }
};

// One test: random pool -> compile to IR -> run externally (when available)
// -> run the evaluator with estimated fuel -> compare bit-exact.
HarnessResult run_test_harness(const llvmgen::FSHCOLProgram& p, uint64_t seed,
                               bool use_external_llvm = true, const std::string& clang_path = "",
                               size_t pool_size_override = 0);

// the bundled twelve-program suite: one per operator plus the chebyshev
// distance and the full dynamic window monitor
std::vector<llvmgen::FSHCOLProgram> harness_suite();

// external toolchain hook (compile the .ll and run it); empty result on failure
struct ExecResult {
  bool available = false;
  bool ran = false;
  std::vector<double> values;
  std::string detail;
};
ExecResult execute_module_text(const std::string& ll_text, const std::string& clang_path);

std::string resolve_clang(const std::string& override_path);

}  // namespace hcolc::pipeline
