"""Smoke test of the pyfracdiff bindings: a few closed forms, a series, samples, verify."""

import json
import math

import pyfracdiff as fd


def close(a, b, tol):
    assert abs(a - b) <= tol, (a, b)


def main():
    close(fd.gamma_fn(0.5), math.sqrt(math.pi), 1e-14)
    close(fd.mittag_leffler(1.0, -2.0), math.exp(-2.0), 1e-12)

    law = fd.GGLaw(1.0, 1.0)
    close(law.density(1.0, 1.0), math.exp(-1.0), 1e-15)
    close(law.mellin(1.0, 2.0), 1.0, 1e-14)

    # index 1/2: Levy density and the half-Gaussian
    x, t = 0.7, 1.3
    h = t / (2 * math.sqrt(math.pi)) * x ** -1.5 * math.exp(-t * t / (4 * x))
    l = math.exp(-x * x / (4 * t)) / math.sqrt(math.pi * t)
    for m in ("conv", "foxh", "wright"):
        close(fd.h_density(0.5, x, t, m), h, 1e-8)
        close(fd.l_density(0.5, x, t, m), l, 1e-8)

    sol = fd.BvpSolution(1.0, 1.0, 0.5, "first-mode", 10)
    close(sol.zeros[0], 2.404825557695773, 1e-12)
    assert sol.value(0.5, 0.2) > 0.0
    assert "zeros" in json.loads(sol.eigen_json())

    a = fd.sample("h", 20000, nu=1 / 3, seed=1)
    b = fd.sample("h", 20000, nu=1 / 3, seed=1)
    assert a == b and all(v > 0 for v in a)
    assert fd.ks_two_sample(a, fd.sample("h", 20000, nu=1 / 3, seed=2)) < 0.03

    report = json.loads(fd.run_verify(seed=0, suite="chains"))
    assert report["suite"] == "chains" and all(t["pass"] for t in report["tests"])

    try:
        fd.GGLaw(0.0, 1.0)
    except ValueError:
        pass
    else:
        raise AssertionError("gamma = 0 accepted")

    print("pyfracdiff smoke test passed")


if __name__ == "__main__":
    main()
