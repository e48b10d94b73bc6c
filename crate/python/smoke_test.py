"""Smoke test for the Python bindings.

Build and install first, e.g.

    cd crates/py && maturin build --release -o ../../target/wheels
    pip install --force-reinstall ../../target/wheels/polydistort-*.whl
"""

import json
import math
import sys

import polydistort as pd


def close(a, b, tol):
    return abs(a - b) <= tol * max(1.0, abs(b))


def main():
    # polynomials and roots
    roots = [1.0, -0.5 + 0.25j, 2j]
    p = pd.Polynomial.from_roots(1.0, roots)
    assert p.degree == 3
    found = sorted(p.roots(), key=lambda z: (z.real, z.imag))
    for r in sorted(roots, key=lambda z: (complex(z).real, complex(z).imag)):
        assert min(abs(f - r) for f in found) < 1e-10
    assert abs(p(2j)) < 1e-12
    assert pd.Polynomial.from_json(p.to_json()) == p

    # Chebyshev
    t3 = pd.Polynomial.chebyshev(3)
    assert [c.real for c in t3.coeffs] == [0.0, -3.0, 0.0, 4.0]
    assert close(pd.cheb_inverse_ray(2, 17.0), 3.0, 1e-15)
    assert close(abs(pd.cheb_eval(4, 0.3 + 0.2j) - pd.Polynomial.chebyshev(4)(0.3 + 0.2j)), 0.0, 1e-12)
    assert close(pd.largest_zero(3), math.sqrt(0.75), 1e-15)
    _, values = t3.critical()
    assert all(close(abs(v), 1.0, 1e-12) for v in values)
    assert t3.in_class()

    # cross ratio, with None as infinity
    assert close(abs(pd.cross_ratio(0, 1, 2, 3) - 4.0 / 3.0), 0.0, 1e-15)
    assert close(abs(pd.cross_ratio(0, 1, 2, None) - 2.0), 0.0, 1e-15)

    # modulus: closed form against the grid oracle
    m = pd.two_slit_modulus(-2.0, -1.0, 1.0, 3.0)
    value, _ = pd.modulus_oracle(-2.0, -1.0, 1.0, 3.0)
    assert close(m, value, 1e-3), (m, value)
    assert pd.two_slit_modulus(-math.inf, -1.0, 1.0, 3.0) > 0

    # checkers
    t2 = pd.Polynomial.chebyshev(2)
    r = pd.theorem1_check(t2, [-3, -1, 1, 3])
    assert r["holds"] and close(r["lhs"], r["rhs"], 1e-12)
    r = pd.corollary5_check(t3)
    assert r["holds"] and abs(r["slack"]) <= 1e-10
    r = pd.corollary3_check(t3, 0.1)
    assert not r["hypothesis_ok"]
    member = pd.Polynomial.random_in_class(5, 42)
    assert member.in_class()
    r = pd.theorem1_check(member, [-2.0, -0.5, 0.75, None])
    assert r["holds"], r
    r = pd.remark1_check(member, [-2.0, -0.5, 0.75, 1.5])
    assert r["holds"], r

    # JSON verification, same wire format as the CLI
    witness = json.dumps({"poly": [[-1, 0], [0, 0], [2, 0]], "points": [[-3, 0], [-1, 0], [1, 0], [3, 0]]})
    assert pd.verify("theorem1", witness)["holds"]

    b = pd.bounds(pd.Polynomial([0, 1, 1]))
    assert close(b["M"], 0.25, 1e-12) and close(b["upper_bound"], 0.25, 1e-12)

    s = pd.run_equality(6, trials=20, seed=1)
    assert s["passed"], s["max_abs_relative_slack"]

    summary = pd.run_campaign(json.dumps({"statements": ["theorem1", "corollary5"], "degrees": [2, 3, 4], "trials": 50, "seed": 7}))
    assert summary["total_violations"] == 0

    assert "theorem1" in pd.STATEMENTS
    print("python smoke test passed")
    return 0


if __name__ == "__main__":
    sys.exit(main())
