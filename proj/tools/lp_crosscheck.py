#!/usr/bin/env python3
"""Re-solve exported LP files with HiGHS and compare against the embedded solver.

Usage: lp_crosscheck.py DIR [--tol 1e-6]

DIR/manifest.json lists {"file", "status", "objective"} entries written by the
acceptance suite. Exit status 0 when every model agrees, 1 otherwise, 2 when
HiGHS is unavailable.
"""
import argparse
import json
import os
import sys


def solve(path):
    import highspy

    h = highspy.Highs()
    h.setOptionValue("output_flag", False)
    h.setOptionValue("presolve", "off")
    h.setOptionValue("primal_feasibility_tolerance", 1e-9)
    h.setOptionValue("dual_feasibility_tolerance", 1e-9)
    if h.readModel(path) != highspy.HighsStatus.kOk:
        return "read_error", None
    h.run()
    st = h.getModelStatus()
    if st == highspy.HighsModelStatus.kOptimal:
        return "optimal", h.getInfo().objective_function_value
    if st in (highspy.HighsModelStatus.kInfeasible, highspy.HighsModelStatus.kUnboundedOrInfeasible):
        return "infeasible", None
    if st == highspy.HighsModelStatus.kUnbounded:
        return "unbounded", None
    return h.modelStatusToString(st), None


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("dir")
    ap.add_argument("--tol", type=float, default=1e-6)
    args = ap.parse_args()
    try:
        import highspy  # noqa: F401
    except ImportError:
        print("highspy not available", file=sys.stderr)
        return 2

    with open(os.path.join(args.dir, "manifest.json")) as f:
        entries = json.load(f)
    bad = 0
    worst = 0.0
    for e in entries:
        status, obj = solve(os.path.join(args.dir, e["file"]))
        ok = status == e["status"]
        rel = 0.0
        if ok and status == "optimal":
            rel = abs(obj - e["objective"]) / max(1.0, abs(obj))
            worst = max(worst, rel)
            ok = rel <= args.tol
        if not ok:
            bad += 1
            print(f"MISMATCH {e['file']}: embedded {e['status']} {e.get('objective')} highs {status} {obj}")
    print(f"{len(entries)} models, {bad} mismatches, worst relative difference {worst:.3g}")
    return 0 if bad == 0 else 1


if __name__ == "__main__":
    sys.exit(main())
