#pragma once

#include "hcolc/lowering.hpp"

namespace hcolc::analysis {

// ---- symbolic execution -----------------------------------------------------

struct SymbolicResult {
  std::shared_ptr<sym::SexprArena> arena;
  uint32_t root = 0;
  size_t num_vars = 0;  // fresh input variables, numbered in (address, offset) order
};

// Runs the program under the symbolic carrier over a memory of fresh
// variables (globals first, then the input block) and reads the requested
// output cell.
Result<SymbolicResult> symbolic_exec(const lowering::LoweredProgram& prog, uint64_t out_offset = 0);

// ---- interval rounding model ---------------------------------------------------

// Value range of the exact expression plus an accumulated absolute rounding
// bound for its binary64 evaluation (first-order model, u = 2^-53 per
// fadd/fsub/fmul; abs/min/max propagate input errors).
struct Interval {
  Rational lo, hi;
  Rational err;
};

Interval interval_point(Rational v);
Interval interval_of(Rational lo, Rational hi);

Result<Interval> interval_error_bound(const sym::SexprArena& arena, uint32_t root,
                                      const std::map<uint32_t, Interval>& env,
                                      std::map<uint32_t, Interval>* per_subterm = nullptr);

// Sum of the two absolute error bounds: the margin that makes the comparison
// immune to rounding.
Rational safety_margin(const Rational& lhs_err, const Rational& rhs_err);

// 1.0 iff (b - a), computed in binary64, is strictly greater than eps.
double safe_zless(double a, double b, double eps);

// ---- integer range closures ------------------------------------------------------

struct DSHIndexRange {
  bool is_index = false;
  BigInt bound;  // variable ranges over [0, bound]

  static DSHIndexRange index(BigInt b) { return {true, std::move(b)}; }
  static DSHIndexRange other() { return {false, BigInt()}; }
  bool operator==(const DSHIndexRange& o) const {
    return is_index == o.is_index && (!is_index || bound == o.bound);
  }
};

struct RangeClosure {
  std::vector<DSHIndexRange> ctx;  // de Bruijn order, index 0 first
  dhcol::NExprPtr expr;
};

using ClosureTrace = std::vector<RangeClosure>;

// Statically computed list of every integer expression the operator
// evaluates, with the ambient variable ranges; input independent.
ClosureTrace closure_trace(const dhcol::DshPtr& op, const std::vector<DSHIndexRange>& sigma_ranges);

struct OverflowReport {
  std::vector<std::string> findings;
  bool pass() const { return findings.empty(); }
};

// Interval evaluation of each closure; flags any reachable value above
// 2^width - 1 and any subtraction that can underflow (the two language
// instances disagree there).
OverflowReport check_trace_no_overflow(const ClosureTrace& trace, unsigned width = 64);

std::string closure_to_string(const RangeClosure& c);

// ---- report plumbing ----------------------------------------------------------------

// Gappa-style problem text for users who want an external check; export only.
std::string export_gappa_problem(const sym::SexprArena& arena, uint32_t lhs, uint32_t rhs,
                                 const std::map<uint32_t, Interval>& env);

}  // namespace hcolc::analysis
