"""Smoke test for the fujita_lab extension module.

Build and install first:  pip install --no-build-isolation -e crates/python
"""

import math

import fujita_lab as fl


def main():
    p_f, threshold, forced = fl.exponents(3.0, 0.0, m=-1.0, sigma=-0.5)
    assert p_f == 5.0 / 3.0 and threshold == 5.0 / 3.0 and forced == 2.0
    assert math.isinf(fl.exponents(1.0, 0.0, m=1.0)[1])

    assert abs(fl.mittag_leffler_e(1.0, 1.0) - math.e) < 1e-12

    rec = fl.simulate(1.0, 2.0, u0="gaussian:1", radius=20.0, cells=200, dt=0.05, horizon=50.0)
    assert rec["outcome"]["kind"] == "blew_up", rec["outcome"]

    cert = fl.certify(1.0, 2.0, "gaussian:0.01", m=0.5, k_max=5, epsilon="1/T")
    assert cert["first_certified"] == 1e4, cert["first_certified"]

    wit = fl.witness(4.0, -1.0, 2.0, -0.5)
    assert wit["p_c"] == 4.0 and wit["ell"] == 2.0

    csv = fl.sweep("N = 3\nm = -1\nw = bump:1:2\naxis = p:1.2:1.4:0.1\nradius = 10\ncells = 50\nhorizon = 1\n")
    assert len(csv.strip().splitlines()) == 2 + 3

    try:
        fl.witness(1.0, -1.0, 2.0, -0.5)
    except ValueError:
        pass
    else:
        raise AssertionError("N = 1 should be rejected")

    print("smoke test passed")


if __name__ == "__main__":
    main()
