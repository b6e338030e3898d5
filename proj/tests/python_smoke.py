"""Smoke test for the python bindings: run against the freshly built module."""

import sys

import _core as screenlab


def main() -> int:
    evs = screenlab.eigenvalues(1.9, 0.5j, 0.0, re_min=-5.0, re_max=-1.6,
                                im_min=-1e-6, im_max=1.0)
    assert len(evs) == 3, evs
    assert abs(evs[0]["lambda"].real + 2.1390) < 5e-4, evs
    assert evs[0]["multiplicity"] == 3

    rep = screenlab.check_tensor(0.5j)
    assert rep["uniqueness_ok"] and rep["existence_ok"]
    assert abs(rep["theta_star"] - 1.5707963267948966) < 1e-12

    F = screenlab.far_field_matrix(1.9, 0.5j, n_polar=4, n_azimuth=8, N=6)
    assert F.shape == (64, 64)
    assert abs(F).max() > 0.0

    lambdas = [complex(-0.5 + 1.5 * i / 20, 0.0) for i in range(21)]
    out = screenlab.scan(1.9, 0.5j, 0.0, lambdas, n_polar=4, n_azimuth=8, N=6,
                         probe_count=3, noise_level=0.0015)
    assert len(out["indicator"]) == 21
    assert all(v > 0 for v in out["indicator"])
    assert all(out["valid"])

    ff = screenlab.far_field(1.9, 0.5j, 0.0, [0.0, 0.0, 1.0], [1.0, 0.0, 0.0],
                             [1.0, 0.0, 0.0], N=10)
    assert ff.shape == (3,)

    print("python smoke ok")
    return 0


if __name__ == "__main__":
    sys.exit(main())
