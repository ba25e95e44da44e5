"""Smoke test for the stepswitch_py extension.

Build it with `maturin develop -m crates/py/Cargo.toml`, or run
`python/build_ext.sh` to drop the shared library next to this script.
"""

import cmath
import json
import math
import tempfile

import stepswitch_py as ss


def close(a, b, tol):
    return abs(a - b) <= tol * max(1.0, abs(b))


def main():
    s = ss.Scenario.set_a()
    m = s.momenta()
    assert close(1 + m["rl"], m["tl"], 1e-14)

    solver = ss.Solver(s)
    x, t = 25.0, 30.0
    psi = solver.exact(x, t)
    assert close(psi, solver.oracle(x, t), 1e-8), (psi, solver.oracle(x, t))
    assert close(solver.density(x, t), abs(psi) ** 2, 1e-12)
    assert close(solver.exact(-10.0, 1e-4), solver.initial(-10.0), 1e-2)

    # long-time local frequency tends to the incident energy
    assert abs(solver.hbar_omega(100.0, 600.0) - s.e_q) < 0.02

    z = complex(1.5, 0.5)
    assert close(ss.faddeeva(z) + ss.faddeeva(-z), 2 * cmath.exp(-z * z), 1e-12)

    g = ss.Grid(ss.Scenario.set_b(), 44.96, 400, 1e-3, closed=True)
    n0 = g.norm()
    g.step(200)
    assert math.isclose(g.norm(), n0, rel_tol=1e-10)
    assert abs(g.t - 0.2) < 1e-12

    try:
        ss.Scenario(-0.067, 0.3, 0.3, 0.8)
    except ValueError:
        pass
    else:
        raise AssertionError("a negative mass should be rejected")

    toml = ss.preset_toml("fig2")
    assert "fig2" in toml
    with tempfile.TemporaryDirectory() as out:
        manifest = json.loads(ss.run_config(toml, out))
        assert manifest["files"][0]["rows"] > 0

    print(f"stepswitch_py {ss.__version__}: ok")


if __name__ == "__main__":
    main()
