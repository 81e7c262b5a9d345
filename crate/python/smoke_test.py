#!/usr/bin/env python3
"""Smoke test for the mvbp Python extension.

Builds nothing itself: expects `cargo build -p mvbp-python` (or --release)
to have produced the cdylib, copies it next to a temp dir as an importable
module, and runs a few end-to-end checks.
"""

import pathlib
import shutil
import sys
import tempfile

ROOT = pathlib.Path(__file__).resolve().parent.parent

SAMPLE = """\
2
2
3 100 75
2 75 50
2
2 1
  75 50
1 2
  40 15
  25 25
"""


def import_mvbp():
    candidates = [
        ROOT / "target" / profile / name
        for profile in ("release", "debug")
        for name in ("libmvbp.so", "libmvbp.dylib", "mvbp.dll")
    ]
    built = next((c for c in candidates if c.exists()), None)
    if built is None:
        sys.exit("build the extension first: cargo build -p mvbp-python")
    staging = tempfile.mkdtemp(prefix="mvbp_py")
    target = pathlib.Path(staging) / ("mvbp" + (".pyd" if built.suffix == ".dll" else ".so"))
    shutil.copyfile(built, target)
    sys.path.insert(0, staging)
    import mvbp

    return mvbp


def main():
    mvbp = import_mvbp()
    checks = 0

    def check(condition, label):
        nonlocal checks
        if not condition:
            sys.exit(f"FAIL: {label}")
        checks += 1
        print(f"ok: {label}")

    inst = mvbp.Instance.parse(SAMPLE)
    check(inst.dims == 2 and inst.num_items == 2, "parse sample instance")
    check(inst.total_items == 3 and inst.num_bin_types == 2, "instance counts")

    reparsed = mvbp.Instance.parse(inst.render())
    check(reparsed.fingerprint() == inst.fingerprint(), "render round-trips")

    sol = mvbp.solve(inst)
    check(sol.cost_exact == "5", "builtin solve reaches cost 5")
    check(sorted(t for t, _ in sol.bins) == [1, 2], "one bin of each type")
    type1 = next(contents for t, contents in sol.bins if t == 1)
    check((2, 2) in type1, "item 2 packed via its second incarnation")

    stats = mvbp.graph_stats(inst)
    check(stats.pct_vertices_removed > 0, "compression removed vertices")
    check("digraph" in mvbp.graph_dot(inst), "dot export")

    gen = mvbp.Instance.generate(3, 3, 100, seed=7)
    check(gen.total_items == 100, "generator preserves item count")
    gen_sol = mvbp.solve(gen)
    check(gen_sol.cost > 0, "benchmark instance solves")

    lp = inst.lp_model()
    check(lp.startswith("Minimize") and "dem_2" in lp, "lp model emission")

    try:
        mvbp.Instance.parse("1\n1\n1 10\n0\n")
        sys.exit("FAIL: empty item list accepted")
    except ValueError:
        check(True, "parse errors raise ValueError")

    print(f"smoke test passed ({checks} checks)")


if __name__ == "__main__":
    main()
