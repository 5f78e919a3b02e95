#!/usr/bin/env python3
"""Smoke test for the metrogain_py bindings.

Builds nothing itself: run `cargo build -p metrogain-py` first, then
`python3 python/smoke.py`. The script locates the compiled extension in
target/debug or target/release, imports it, and checks a handful of
known values end to end.
"""

import math
import os
import shutil
import sys
import tempfile

REPO_ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))


def locate_extension():
    candidates = []
    for profile in ("debug", "release"):
        for name in ("libmetrogain_py.so", "libmetrogain_py.dylib", "metrogain_py.dll"):
            candidates.append(os.path.join(REPO_ROOT, "target", profile, name))
    for path in candidates:
        if os.path.exists(path):
            return path
    sys.exit(
        "compiled extension not found; run `cargo build -p metrogain-py` first\n"
        "searched:\n  " + "\n  ".join(candidates)
    )


def import_module():
    source = locate_extension()
    stage = tempfile.mkdtemp(prefix="metrogain_py_")
    target = os.path.join(stage, "metrogain_py.so")
    shutil.copy2(source, target)
    sys.path.insert(0, stage)
    import metrogain_py

    return metrogain_py


CHECKS = []


def check(name):
    def wrap(fn):
        CHECKS.append((name, fn))
        return fn

    return wrap


def close(a, b, tol):
    return abs(a - b) <= tol


mg = import_module()


@check("singlet reaches the maximal two-qubit gain")
def _(mg=mg):
    result = mg.optimize_gain(mg.DensityMatrix.singlet(), trials=4, steps=80, seed=1)
    assert close(result.gain, 2.0, 1e-6), result.gain
    assert close(result.qfi, 16.0, 1e-5), result.qfi


@check("noisy max-entangled gain matches the closed form")
def _(mg=mg):
    state = mg.DensityMatrix.noisy_max_entangled(3, 0.2)
    result = mg.optimize_gain(state, trials=4, steps=100, seed=3)
    assert close(result.gain, mg.isotropic_gain_best(3, 0.8), 1e-6), result.gain


@check("flip-symmetric gain matches the closed form")
def _(mg=mg):
    state = mg.DensityMatrix.werner(4, -1.0)
    result = mg.optimize_gain(state, trials=4, steps=120, seed=3)
    assert close(result.gain, 4.0 / 3.0, 1e-6), result.gain
    assert close(mg.werner_gain_best(4, -1.0), 4.0 / 3.0, 1e-12)


@check("Fisher information of the singlet under opposite local fields")
def _(mg=mg):
    z_minus_z = [
        [complex(v) if i == j else complex(0) for j, v in enumerate(row)]
        for i, row in enumerate([[0, 0, 0, 0], [0, 2, 0, 0], [0, 0, -2, 0], [0, 0, 0, 0]])
    ]
    value = mg.qfi(mg.DensityMatrix.singlet(), z_minus_z)
    assert close(value, 16.0, 1e-9), value


@check("fixed-Hamiltonian gain and the SLD agree with the optimizer")
def _(mg=mg):
    state = mg.DensityMatrix.noisy_singlet(0.2)
    z = [[complex(1), complex(0)], [complex(0), complex(-1)]]
    minus_z = [[complex(-1), complex(0)], [complex(0), complex(1)]]
    fixed = mg.gain_for_hamiltonian(state, z, minus_z)
    best = mg.optimize_gain(state, trials=5, steps=120, seed=7)
    assert fixed.gain <= best.gain + 1e-9, (fixed.gain, best.gain)
    assert close(fixed.gain, best.gain, 1e-6), (fixed.gain, best.gain)
    m = mg.sld(state, [[complex(v) for v in row] for row in
                       [[0, 0, 0, 0], [0, 2, 0, 0], [0, 0, -2, 0], [0, 0, 0, 0]]])
    assert len(m) == 4 and len(m[0]) == 4


@check("ancilla and copy extensions change the layout as documented")
def _(mg=mg):
    base = mg.DensityMatrix.nonwhite_singlet()
    assert base.dims == [2, 2]
    assert mg.DensityMatrix.nonwhite_singlet().with_ancilla("B").dims == [2, 4]
    assert base.with_ancilla("A").dims == [4, 2]
    two = base.tensor_with(base)
    assert two.dims == [4, 4]
    assert close(two.purity(), base.purity() ** 2, 1e-12)


@check("many-copy bound grows monotonically from the single-copy value")
def _(mg=mg):
    sigma = [0.9, 0.436]
    values = [mg.ncopy_bound(sigma, n) for n in range(1, 7)]
    assert close(values[0], mg.schmidt_pairing_qfi(sigma), 1e-9)
    assert close(values[0], 14.2778, 1e-3), values[0]
    assert all(b >= a - 1e-9 for a, b in zip(values, values[1:])), values


@check("thresholds match their frozen values")
def _(mg=mg):
    assert close(mg.isotropic_threshold(3), 1.0 - (25.0 - math.sqrt(177.0)) / 32.0, 1e-9)
    assert close(mg.werner_threshold(2), (1.0 - math.sqrt(17.0)) / 4.0, 1e-9)
    assert mg.twirl_lower_bound_isotropic(1.0, 2) > 1.0
    assert mg.twirl_lower_bound_werner(-1.0, 2) == 2.0


@check("JSON roundtrip preserves the state")
def _(mg=mg):
    state = mg.DensityMatrix.random_mixed([2, 3], seed=11)
    text = state.to_json(label="roundtrip check")
    again = mg.DensityMatrix.from_json(text)
    assert again.dims == [2, 3]
    assert close(again.purity(), state.purity(), 1e-12)
    first = state.matrix()
    second = again.matrix()
    worst = max(
        abs(first[i][j] - second[i][j]) for i in range(6) for j in range(6)
    )
    assert worst == 0.0, worst


@check("invalid inputs raise ValueError")
def _(mg=mg):
    try:
        mg.DensityMatrix.werner(3, 1.5)
    except ValueError:
        pass
    else:
        raise AssertionError("out-of-range flip weight must be rejected")
    try:
        mg.werner_gain_best(3, 0.5)
    except ValueError:
        pass
    else:
        raise AssertionError("the closed form only covers flip weights in [-1, 0]")
    try:
        mg.DensityMatrix([[complex(1), complex(0)], [complex(0), complex(0)]], [3])
    except ValueError:
        pass
    else:
        raise AssertionError("dims that do not match the matrix must be rejected")
    try:
        mg.DensityMatrix([[complex(2), complex(0)], [complex(0), complex(-1)]], [2])
    except ValueError:
        pass
    else:
        raise AssertionError("a negative eigenvalue must be rejected")


def main():
    failures = 0
    for name, fn in CHECKS:
        try:
            fn()
            print(f"PASS {name}")
        except Exception as exc:  # noqa: BLE001 — report and count
            failures += 1
            print(f"FAIL {name}: {exc!r}")
    if failures:
        sys.exit(f"{failures}/{len(CHECKS)} smoke checks failed")
    print(f"smoke OK ({len(CHECKS)} checks)")


if __name__ == "__main__":
    main()
