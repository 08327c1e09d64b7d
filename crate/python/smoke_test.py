#!/usr/bin/env python3
"""Smoke test for the jumpfb_py extension module.

Builds are importable without maturin: the script locates the compiled
cdylib under target/, copies it next to a temp dir as an importable module,
and runs a few end-to-end checks.

    cargo build -p jumpfb-py          # or --release
    python3 python/smoke_test.py
"""

import math
import os
import shutil
import sys
import tempfile

REPO_ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))


def locate_cdylib():
    target = os.environ.get("CARGO_TARGET_DIR", os.path.join(REPO_ROOT, "target"))
    names = {
        "linux": "libjumpfb_py.so",
        "darwin": "libjumpfb_py.dylib",
        "win32": "jumpfb_py.dll",
    }
    name = names.get(sys.platform, "libjumpfb_py.so")
    candidates = [
        os.path.join(target, profile, name) for profile in ("release", "debug")
    ]
    found = [path for path in candidates if os.path.exists(path)]
    if not found:
        sys.exit(
            "compiled extension not found; run `cargo build -p jumpfb-py` first\n"
            + "\n".join("  looked at " + c for c in candidates)
        )
    return max(found, key=os.path.getmtime)


def import_module():
    lib = locate_cdylib()
    stage = tempfile.mkdtemp(prefix="jumpfb_py_")
    suffix = ".pyd" if sys.platform == "win32" else ".so"
    shutil.copy(lib, os.path.join(stage, "jumpfb_py" + suffix))
    sys.path.insert(0, stage)
    import jumpfb_py

    return jumpfb_py


def expect(condition, message):
    if not condition:
        sys.exit("FAIL: " + message)
    print("ok:", message)


def main():
    jfb = import_module()

    # entanglement measures on explicit matrices
    singlet = [
        [0, 0, 0, 0],
        [0, 0.5, -0.5, 0],
        [0, -0.5, 0.5, 0],
        [0, 0, 0, 0],
    ]
    expect(abs(jfb.concurrence(singlet) - 1.0) < 1e-9, "concurrence(singlet) == 1")
    expect(abs(jfb.fidelity_to_singlet(singlet) - 1.0) < 1e-12, "singlet fidelity == 1")
    mixed = [[0.25 if i == j else 0 for j in range(4)] for i in range(4)]
    expect(abs(jfb.concurrence(mixed)) < 1e-9, "concurrence(I/4) == 0")
    expect(abs(jfb.purity(mixed) - 0.25) < 1e-12, "purity(I/4) == 0.25")

    # the local jump feedback pins the singlet as the unique steady state
    system = jfb.System(omega=0.4, feedback="local", feedback_strength=math.pi / 2)
    steady = system.steady_state()
    expect(steady["null_dimension"] == 1, "local feedback steady state is unique")
    expect(abs(steady["concurrence"] - 1.0) < 1e-6, "steady concurrence == 1")
    expect(steady["residual"] < 1e-9, "steady-state residual below 1e-9")
    expect(abs(steady["rho"][1][2].real + 0.5) < 1e-6, "rho matches the singlet")

    # deterministic evolution approaches the steady state
    run = system.evolve(initial="gg", t_final=50.0, samples=51)
    expect(run["concurrence"][0] < 1e-9, "ground state starts unentangled")
    expect(run["concurrence"][-1] > 0.999, "evolution reaches the singlet")

    # trajectory ensembles are reproducible and track the master equation
    a = system.trajectory_mean(initial="gg", t_final=5.0, dt=0.005, n=50, base_seed=7, samples=6)
    b = system.trajectory_mean(initial="gg", t_final=5.0, dt=0.005, n=50, base_seed=7, samples=6)
    expect(a["mean_concurrence"] == b["mean_concurrence"], "trajectory mean is seed-deterministic")

    # a small sweep with decay: values dip below 1 but stay unique
    noisy = jfb.System(omega=0.4, gamma1=0.01, gamma2=0.01, feedback="local",
                       feedback_strength=1.0)
    grid = noisy.sweep(omega_axis=(0.3, 2.0, 3), lambda_axis=(0.5, 2.5, 3))
    expect(all(n == 1 for row in grid["null_dimensions"] for n in row),
           "sweep cells all have unique steady states")
    expect(max(v for row in grid["grid"] for v in row) < 1.0,
           "decay keeps steady concurrence below 1")
    expect(grid["refined"] is not None, "sweep reports a refined optimum")

    print("smoke test passed")


if __name__ == "__main__":
    main()
