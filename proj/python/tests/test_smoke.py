"""Smoke tests for the python bindings."""

import sys

import _hcolc as h


def check(cond, what):
    if not cond:
        print("FAIL", what)
        sys.exit(1)
    print("ok  ", what)


def main():
    p = h.parse("(scalarprod 3)")
    check(p["input_dim"] == 6 and p["output_dim"] == 1, "parse reports dims")

    out = h.eval_hcol("(chebyshev 2)", ["1", "2", "4", "6"])
    check(out == ["4"], "chebyshev distance evaluates exactly")

    out = h.eval_hcol("(evalpoly (param a 3))", ["2"], {"a": ["1", "2", "3"]})
    check(out == ["17"], "polynomial with a parameter vector")

    check(
        h.check_equiv(
            "(scalarprod 3)",
            "(compose (reduction plus 0 3) (binop 3 (fun i a b (mul a b))))",
            samples=300,
        ),
        "breakdown target is extensionally equal",
    )

    check(h.safe_zless(1.0, 2.0, 1e-12) == 1.0, "guarded comparison accepts a wide gap")
    check(h.safe_zless(1.0, 1.0 + 2**-54, 1e-12) == 0.0, "guarded comparison rejects a thin gap")

    ranges = h.dynwin_coefficient_ranges()
    check(ranges["a2"] == ("1/12", "1/2"), "derived coefficient ranges")

    rep = h.run_dynwin(seed=5, samples=60, external_llvm=False)
    check(rep["ok"], "pipeline runs green")
    check(rep["symbolic"].startswith("(SZLess"), "symbolic result is a guarded comparison")
    check("define void @dynwin" in rep["ll_text"], "module defines the operator")

    results = h.run_harness(seed=2, external_llvm=False)
    check(len(results) == 12 and all(r["ok"] for r in results), "harness suite passes")

    print("smoke: all good")


if __name__ == "__main__":
    main()
