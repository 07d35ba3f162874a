"""Smoke test for the zzsim Python module.

Build first with `cargo build --release -p zzsim-py`, then run
`python3 python/smoke_test.py`. An importable `zzsim` on sys.path wins over
the build directory.
"""

import importlib.machinery
import importlib.util
import math
import pathlib
import sys

ROOT = pathlib.Path(__file__).resolve().parent.parent


def load_zzsim():
    try:
        import zzsim
        return zzsim
    except ImportError:
        pass
    for profile in ("release", "debug"):
        lib = ROOT / "target" / profile / "libzzsim_py.so"
        if lib.exists():
            loader = importlib.machinery.ExtensionFileLoader("zzsim", str(lib))
            spec = importlib.util.spec_from_file_location("zzsim", lib, loader=loader)
            module = importlib.util.module_from_spec(spec)
            loader.exec_module(module)
            return module
    sys.exit("zzsim not built: run `cargo build --release -p zzsim-py`")


def close(a, b, tol):
    return abs(a - b) <= tol


def main():
    zz = load_zzsim()
    a = zz.Device.bundled("device_a")
    b = zz.Device.bundled("device_b")
    print(a)

    roots = a.find_zero_zeta()
    assert len(roots) == 2, roots
    op = a.operating_point()
    assert close(op.detuning_ghz, -1.472, 0.01), op
    assert abs(a.zeta(op.detuning_ghz)) < 1e-3
    print("device_a zeros:", [round(r.detuning_ghz, 4) for r in roots])

    pert = b.zeta(-1.0, method="pert")
    exact = b.zeta(-1.0, dims=[3, 3, 3, 3])
    assert math.isfinite(pert) and math.isfinite(exact)
    sweep = b.zeta_sweep(-1.2, -0.4, points=9)
    assert len(sweep) == 9 and close(sweep[0][0], -1.2, 1e-12)

    rb = b.rb(zeta_mhz=0.0, lengths=[2, 8, 32, 128], trials=10, seed=1)
    f1 = rb.fidelity(1)
    assert f1 is not None and 0.99 < f1 < 1.0, f1
    assert rb.fidelity(2) is not None
    q1 = b.rb(mode="q1", lengths=[2, 8, 32], trials=4)
    assert q1.fidelity(2) is None
    print(f"device_b RB fidelity q1 = {f1:.5f}")

    ideal = zz.Ptm.sqrt_iswap()
    noisy = b.sqrt_iswap_ptm()
    fg = noisy.gate_fidelity(ideal)
    assert 0.98 < fg < 1.0, fg
    assert close(ideal.gate_fidelity(ideal), 1.0, 1e-12)
    assert len(noisy.matrix()) == 16
    print(f"device_b sqrt(iSWAP) F_g = {fg:.5f}")

    thermal = b.thermal_fidelity([0.0, 100.0, 200.0])
    assert thermal[0][1] == 0.0
    assert thermal[2][2] < thermal[0][2]

    bell = [[0.5, 0, 0, 0.5], [0, 0, 0, 0], [0, 0, 0, 0], [0.5, 0, 0, 0.5]]
    assert close(zz.concurrence(bell), 1.0, 1e-9)
    mixed = [[0.25 if i == j else 0 for j in range(4)] for i in range(4)]
    assert close(zz.concurrence(mixed), 0.0, 1e-9)
    assert close(zz.state_fidelity(bell, bell), 1.0, 1e-9)
    _, dist = zz.project_physical([[1.05, 0], [0, -0.05]])
    assert dist > 0

    try:
        zz.Device.bundled("device_z")
    except ValueError:
        pass
    else:
        raise AssertionError("unknown device accepted")

    print("smoke test passed")


if __name__ == "__main__":
    main()
