"""Smoke test for the pyflop bindings.

Uses an installed pyflop if there is one (maturin develop), otherwise the
cdylib from target/release or target/debug under a temp name."""

import importlib
import json
import os
import shutil
import sys
import tempfile

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))


def load():
    try:
        return importlib.import_module("pyflop")
    except ImportError:
        pass
    for prof in ("release", "debug"):
        lib = os.path.join(ROOT, "target", prof, "libpyflop.so")
        if os.path.exists(lib):
            d = tempfile.mkdtemp(prefix="pyflop-")
            shutil.copy(lib, os.path.join(d, "pyflop.so"))
            sys.path.insert(0, d)
            return importlib.import_module("pyflop")
    sys.exit("pyflop not built: run `cargo build --release -p pyflop` or `maturin develop`")


def main():
    pf = load()
    print("pyflop", pf.version())

    assert pf.point_psi([1, 1, 0, 0, 0]) == "2"
    assert pf.point_psi([0, 0, 0, 3, 0, 0]) == "1"

    demo = json.loads(pf.cone_demo(6))["transcript"]
    assert demo["round_trip_ok"] and demo["tau_identity_ok"] and demo["off_cone_detected"]

    chow = json.loads(pf.chow_report(json.dumps({"k": 2, "n": 3})))
    assert chow["ok"], chow

    csv = pf.emit("ifun-plus", "csv", json.dumps({"k": 1, "n": 2, "dq": 1, "logy": 1, "x": 1}))
    assert csv.splitlines()[0].endswith("numerator,denominator")

    closed, series = pf.ode_oracle(draws=5, seed=3)
    assert closed < 1e-10 and series < 1e-10, (closed, series)

    try:
        pf.chow_report(json.dumps({"k": 3, "n": 3}))
    except ValueError:
        pass
    else:
        raise AssertionError("k = n accepted")

    print("smoke test ok")


if __name__ == "__main__":
    main()
