#!/usr/bin/env python3
"""Smoke test for the nonauto_py extension module.

Builds nothing itself: run `cargo build -p nonauto-py --release` first,
then `python3 python/smoke_test.py`. The script copies the cdylib next to
a temp directory under the importable name and exercises the bindings.
"""
import json
import math
import shutil
import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def import_extension():
    candidates = [
        ROOT / "target" / "release" / "libnonauto_py.so",
        ROOT / "target" / "debug" / "libnonauto_py.so",
    ]
    src = next((p for p in candidates if p.exists()), None)
    if src is None:
        sys.exit("build the extension first: cargo build -p nonauto-py --release")
    tmp = Path(tempfile.mkdtemp(prefix="nonauto_py_"))
    shutil.copy(src, tmp / "nonauto_py.so")
    sys.path.insert(0, str(tmp))
    import nonauto_py  # noqa: E402

    return nonauto_py


def close(a, b, tol, what):
    if abs(a - b) > tol:
        sys.exit(f"FAIL {what}: {a} vs {b} (tol {tol})")
    print(f"ok  {what}: {a:.6f}")


def main():
    naut = import_extension()

    # spherical geometry
    close(naut.spherical_dist((0.0, 0.0), None), math.pi / 2, 1e-12, "d#(0, inf)")
    close(naut.spherical_dist((0.0, 0.0), (1.0, 0.0)), math.pi / 4, 1e-12, "d#(0, 1)")
    close(naut.spherical_derivative([(0.0, 0.0), (0.0, 0.0), (1.0, 0.0)], (1.0, 0.0)),
          1.0, 1e-12, "f# of z^2 at 1")

    # escape radii
    close(naut.escape_radius(2, 1.0, 0.0), 2.0, 0.0, "R(2,1,0)")
    close(naut.escape_radius(2, 1.0, 9.0), 20.0, 0.0, "R(2,1,9)")

    # the squaring map: filled set is the closed unit disc
    z2 = naut.Sequence(json.dumps({
        "kind": "explicit-prefix-with-periodic-tail",
        "bounds": {"d": 2, "K": 1.0, "M": 0.0},
        "prefix": [],
        "tail": [[[0.0, 0.0], [0.0, 0.0], [1.0, 0.0]]],
    }))
    assert z2.escape_radius() == 2.0
    escaped, steps = z2.escape_time(0, (3.0, 0.0), 100)
    assert escaped and steps <= 1, (escaped, steps)
    v = z2.compose_eval(0, 3, (1.1, 0.0))
    close(v[0], 1.1 ** 8, 1e-9, "Q_{0,3}(1.1) = 1.1^8")
    assert z2.composition_degree(0, 3) == 8

    ja = naut.filled_julia(z2, 0, 256, 40)
    close(ja["area"], math.pi, 0.05 * math.pi, "area of K(z^2)")
    assert ja["component_count"] == 1, ja["component_count"]

    # counterexample sequence at a piece time: four pieces
    counter = naut.Sequence(json.dumps({
        "kind": "builtin-thm72", "n": 2,
        "bounds": {"d": 2, "K": 1.0, "M": 9.0},
    }))
    pieces = naut.filled_julia(counter, 2, 512, 12)
    assert pieces["component_count"] == 4, pieces["component_count"]
    print("ok  counterexample time-2 components: 4")

    # modulus of A(0,1,2)
    close(naut.round_annulus_modulus(1.0, 2.0, 512),
          math.log(2) / (2 * math.pi), 0.005, "mod A(0,1,2)")

    # hyperbolic bracket in the unit disc contains log((1+r)/(1-r))
    lo, hi = naut.hyperbolic_bracket_in_disc((0, 0), 1.0, (0, 0), (0.5, 0), 512)
    exact = math.log(3)
    assert lo <= exact <= hi, (lo, exact, hi)
    assert abs(hi - 4 * lo) < 1e-12
    print(f"ok  hyperbolic bracket: [{lo:.4f}, {hi:.4f}] contains log 3")

    # caratheodory bound of the pointed unit disc
    close(naut.caratheodory_bound_of_disc((0, 0), 1.0, 512),
          abs(math.log(math.pi ** 2 / 8)), 0.01, "caratheodory bound (D,0)")

    # turning constant of the unit circle; hypothesis gate for c = 0.3
    close(naut.turning_constant(z2, 512, 40), 1.0, 0.2, "turning constant")
    c03 = naut.Sequence(json.dumps({
        "kind": "explicit-prefix-with-periodic-tail",
        "bounds": {"d": 2, "K": 1.0, "M": 0.3},
        "prefix": [],
        "tail": [[[0.3, 0.0], [0.0, 0.0], [1.0, 0.0]]],
    }))
    try:
        naut.turning_constant(c03, 256, 20)
        sys.exit("FAIL: c = 0.3 was not refused")
    except ValueError as e:
        print(f"ok  hypothesis gate: {e}")

    # hausdorff distance of two singletons
    close(naut.hausdorff_dist([(0.0, 0.0)], [(1.0, 0.0)]), math.pi / 4, 1e-12,
          "hausdorff singleton")

    print("smoke test passed")


if __name__ == "__main__":
    main()
