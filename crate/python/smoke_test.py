#!/usr/bin/env python3
"""Build the distpair_py extension and exercise its whole surface.

Builds the cdylib with cargo, copies it into a temp directory under the
import name Python expects, and checks a handful of closed-form anchors:
special functions, exact Bernoulli data, singular pairings, the derivative
identity, and the nascent-delta limit.  Prints ``smoke ok`` on success.
"""

import math
import shutil
import subprocess
import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def build_module(target: Path) -> None:
    subprocess.run(
        ["cargo", "build", "-p", "distpair-py", "--release"],
        cwd=ROOT,
        check=True,
    )
    lib = ROOT / "target" / "release" / "libdistpair_py.so"
    shutil.copy2(lib, target / "distpair_py.so")


def check(label: str, got: float, want: float, tol: float) -> None:
    err = abs(got - want)
    assert err <= tol, f"{label}: got {got!r}, want {want!r} (err {err:.3e} > {tol:.1e})"
    print(f"  {label:<34} ok  (err {err:.3e})")


def main() -> None:
    with tempfile.TemporaryDirectory() as td:
        build_module(Path(td))
        sys.path.insert(0, td)
        import distpair_py as dp

        print("special functions:")
        check("coth(1)", dp.coth(1.0), 1.0 / math.tanh(1.0), 1e-15)
        check("decompose_sign(-0.7)", dp.decompose_sign(-0.7), dp.coth(-0.7), 1e-15)
        check("langevin(0.5)", dp.langevin(0.5), dp.coth(0.5) - 2.0, 1e-15)
        check("csch2(1)", dp.csch2(1.0), 1.0 / math.sinh(1.0) ** 2, 1e-15)
        check("coth_series(1, k=1e5)", dp.coth_series(1.0, 100_000), dp.coth(1.0), 1e-10)
        check("csch2_series(1, k=1e5)", dp.csch2_series(1.0, 100_000), dp.csch2(1.0), 1e-10)

        print("exact Bernoulli data:")
        assert dp.bernoulli_number(1) == ("-1", "2"), dp.bernoulli_number(1)
        assert dp.bernoulli_number(4) == ("-1", "30"), dp.bernoulli_number(4)
        print("  B_1 = -1/2, B_4 = -1/30          ok")
        check("B_3(1/2)", dp.bernoulli_polynomial(3, 0.5), 0.0, 1e-15)

        print("pairings:")
        g = dp.TestFunction.gaussian(0.0, 1.0)
        fp = dp.pair(dp.Kernel.inv_y2(), g)
        assert fp["converged"], fp
        check("FP <1/y^2, gauss>", fp["value"], -2.0 * math.sqrt(math.pi), 1e-8)
        mu0 = dp.moment(dp.Kernel.csch2(), 0)
        check("mu_0[(csch^2)_st]", mu0["value"], -2.0, 1e-8)
        check("mu_0 shifted, eps -> 0", dp.moment_formula(0, 1e-6), -math.pi, 1e-5)

        weak = dp.weak_derivative_pair(dp.Kernel.coth(), g)
        csch = dp.pair(dp.Kernel.csch2(), g)
        check("<coth', g> + <csch^2_st, g>", weak["value"] + csch["value"], 0.0, 1e-8)

        print("identity checks:")
        report = dp.check_derivative_identity()
        assert report["verdict"] == "PASS", report
        assert len(report["rows"]) == 9, len(report["rows"])
        check("derivative identity residual", report["residual"], 0.0, 1e-6)
        delta = dp.nascent_delta_limit(g)
        assert delta["converged"], delta
        check("nascent delta limit", delta["value"], -math.pi, 1e-6)
        check("cosh integral (m=0, a=1/4)", dp.cosh_power_integral(0, 0.25)["value"],
              math.pi / 2.0, 1e-9)
        check("sine series (n=1, a=1/4)", dp.bernoulli_sine_series(1, 0.25),
              math.pi ** 3 / 32.0, 1e-14)

        print("error paths:")
        for thunk, label in [
            (lambda: dp.coth(0.0), "coth(0)"),
            (lambda: dp.TestFunction.gaussian(0.0, -1.0), "gaussian(width=-1)"),
            (lambda: dp.nascent_delta_limit(g, eps_ladder=[0.1, 0.2]), "increasing ladder"),
        ]:
            try:
                thunk()
            except ValueError:
                print(f"  {label:<34} raises ValueError")
            else:
                raise AssertionError(f"{label} should have raised ValueError")

        print("smoke ok")


if __name__ == "__main__":
    main()
