import math
import random

import numpy as np
import pytest

from midspec.quasipoly import (
    Polynomial,
    Quasipolynomial,
    RetardedSystem,
    mid_coefficients,
    multiplicity_at,
    normalize,
)
from midspec.spectral import (
    CompanionPair,
    LocalizationError,
    Rectangle,
    Root,
    SpectrumReport,
    certify_dominance,
    companion_pair,
    count_roots,
    find_roots,
    roots_to_csv,
    spectral_abscissa,
    standard_pair,
)


# --- companion pairs -------------------------------------------------------------


def test_standard_pair_matrices(std_pair):
    assert np.array_equal(std_pair.A0, [[0.0, 1.0], [-6.0, 4.0]])
    assert np.array_equal(std_pair.A1, [[0.0, 0.0], [6.0, 2.0]])


def test_n1_pair():
    pair = companion_pair(normalize(mid_coefficients(1, 0.0, 1.0), 0.0))
    assert np.array_equal(pair.A0, [[1.0]])
    assert np.array_equal(pair.A1, [[-1.0]])
    # det(z - 1 + e^(-z))
    assert abs(pair.char_value(0.3) - (0.3 - 1.0 + math.exp(-0.3))) < 1e-14


def test_delay_free_pair_reduces_to_companion():
    sys_ = RetardedSystem(3, (1.0, 2.0, 3.0), (0.0, 0.0, 0.0), 1.0)
    pair = companion_pair(normalize(sys_, 0.0))
    assert np.all(pair.A1 == 0.0)
    assert np.array_equal(pair.A0[:-1, 1:], np.eye(2))


@pytest.mark.parametrize("n,s0,tau", [(1, 0.0, 1.0), (2, -0.4, 1.7), (3, -0.5, 2.5)])
def test_determinant_identity_random_points(n, s0, tau):
    ns = normalize(mid_coefficients(n, s0, tau), s0)
    pair = companion_pair(ns)
    q = ns.quasipolynomial()
    rng = np.random.default_rng(3)
    for _ in range(20):
        z = complex(rng.uniform(-3, 3), rng.uniform(-5, 5))
        lhs = pair.char_value(z)
        rhs = q(z)
        assert abs(lhs - rhs) <= 1e-10 * max(1.0, abs(rhs))


def test_pair_shape_validation():
    with pytest.raises(ValueError):
        CompanionPair(np.zeros((2, 2)), np.zeros((3, 3)))


# --- rectangles --------------------------------------------------------------------


def test_rectangle_validation():
    with pytest.raises(ValueError):
        Rectangle(1.0, 0.0, 0.0, 1.0)
    with pytest.raises(ValueError):
        Rectangle(0.0, 1.0, 2.0, 2.0)


# --- counting ----------------------------------------------------------------------


def test_count_quartic(qhat):
    assert count_roots(qhat, Rectangle(-1, 1, -1, 1)) == 4


def test_count_simple_polynomial():
    q = Quasipolynomial([(0.0, Polynomial([1.0, 0.0, 1.0]))])  # z^2 + 1
    assert count_roots(q, Rectangle(-0.5, 0.5, 0.5, 1.5)) == 1


def test_count_empty_right_of_origin(qhat):
    assert count_roots(qhat, Rectangle(0.1, 1.0, 0.0, 1.0)) == 0


def test_count_with_root_on_boundary_inflates(qhat):
    # the quadruple root at 0 sits exactly on the edge; inflation pulls it inside
    assert count_roots(qhat, Rectangle(-1.0, 0.0, -1.0, 1.0)) == 4


def test_count_additivity_random():
    rng = np.random.default_rng(42)
    sys_ = mid_coefficients(2, -0.3, 1.3)
    q = sys_.quasipolynomial()
    for _ in range(10):
        cx, cy = rng.uniform(-2, 0.5), rng.uniform(-3, 3)
        w, h = rng.uniform(1, 3), rng.uniform(1, 3)
        rect = Rectangle(cx - w / 2, cx + w / 2, cy - h / 2, cy + h / 2)
        total = count_roots(q, rect)
        xm = cx + rng.uniform(-0.2, 0.2)
        ym = cy + rng.uniform(-0.2, 0.2)
        quads = [
            Rectangle(rect.re_min, xm, rect.im_min, ym),
            Rectangle(xm, rect.re_max, rect.im_min, ym),
            Rectangle(rect.re_min, xm, ym, rect.im_max),
            Rectangle(xm, rect.re_max, ym, rect.im_max),
        ]
        assert total == sum(count_roots(q, r) for r in quads)


def test_vertical_strip_count_stabilizes(qhat):
    # roots of the quartic design near the strip Re in [-2.3, -1.3]:
    # a conjugate pair at -1.73 +/- 10.16i and one at -2.18 +/- 16.74i
    strip = lambda K: Rectangle(-2.3, -1.3, -K, K)
    counts = [count_roots(qhat, strip(K)) for K in (12.0, 18.0, 25.0, 40.0)]
    assert counts[0] == 2
    assert counts[1] == 4
    assert counts[2] == counts[3] == 4


# --- root finding ------------------------------------------------------------------


def test_find_quartic_root(qhat):
    roots = find_roots(qhat, Rectangle(-1, 1, -1, 1))
    assert len(roots) == 1
    r = roots[0]
    assert r.multiplicity == 4
    assert abs(r.location) < 1e-9
    assert r.location.imag == 0.0


def test_find_conjugate_pair():
    q = Quasipolynomial([(0.0, Polynomial([1.0, 0.0, 1.0]))])
    roots = find_roots(q, Rectangle(-2, 2, -2, 2))
    assert len(roots) == 2
    assert abs(roots[0].location - 1j) < 1e-12 or abs(roots[0].location + 1j) < 1e-12
    assert roots[0].location == roots[1].location.conjugate()
    assert all(r.multiplicity == 1 for r in roots)


def test_find_example_region(example_system):
    roots = find_roots(example_system.quasipolynomial(), Rectangle(-5, 1, -30, 30))
    dominant = [r for r in roots if r.location.real >= -0.5 - 1e-9]
    assert len(dominant) == 1
    assert dominant[0].multiplicity == 6
    assert abs(dominant[0].location + 0.5) < 1e-9
    others = [r for r in roots if r is not dominant[0]]
    assert others and all(r.location.real < -0.5 for r in others)
    # conjugate symmetry of the reported set
    ups = sorted((r.location for r in roots if r.location.imag > 0), key=lambda z: z.imag)
    downs = sorted(
        (r.location.conjugate() for r in roots if r.location.imag < 0), key=lambda z: z.imag
    )
    assert len(ups) == len(downs)
    assert all(a == b for a, b in zip(ups, downs))


def test_find_agrees_with_derivative_multiplicity():
    for n, s0, tau in [(1, -0.3, 0.8), (2, 0.2, 1.5), (3, -0.5, 2.5)]:
        sys_ = mid_coefficients(n, s0, tau)
        q = sys_.quasipolynomial()
        rect = Rectangle(s0 - 0.6, s0 + 0.6, -0.7, 0.7)
        roots = find_roots(q, rect)
        assert len(roots) == 1
        assert roots[0].multiplicity == 2 * n
        assert multiplicity_at(q, roots[0].location) == 2 * n


def test_residuals_below_threshold(example_system):
    q = example_system.quasipolynomial()
    for r in find_roots(q, Rectangle(-5, 1, -30, 30)):
        z = r.location
        scale = q.magnitude_scale(z)
        assert r.residual <= 1e-8 * scale


def test_find_rejects_bad_tol(qhat):
    with pytest.raises(ValueError):
        find_roots(qhat, Rectangle(-1, 1, -1, 1), tol=0.0)


# --- spectral abscissa ----------------------------------------------------------------


def test_abscissa_quartic(qhat):
    assert abs(spectral_abscissa(qhat, Rectangle(-1, 1, -8, 8))) < 1e-9


def test_abscissa_polynomial():
    q = Quasipolynomial([(0.0, Polynomial([-6.0, 1.0, 1.0]))])  # (z-2)(z+3)
    assert abs(spectral_abscissa(q, Rectangle(-4, 3, -1, 1)) - 2.0) < 1e-12


def test_abscissa_example(example_system):
    v = spectral_abscissa(example_system.quasipolynomial(), Rectangle(-5, 1, -30, 30))
    assert abs(v + 0.5) < 1e-9


def test_abscissa_empty_region(qhat):
    with pytest.raises(LocalizationError, match="no roots"):
        spectral_abscissa(qhat, Rectangle(0.5, 1.0, 0.1, 0.6))


# --- dominance certification -----------------------------------------------------------


def _fro2_bound(pair):
    from midspec.bounds import Norm, bound_norm_power

    return bound_norm_power(pair, Norm.FROBENIUS, 2, sigma_min=0.0)


@pytest.mark.parametrize("s0,tau", [(0.0, 1.0), (-0.7, 0.6), (0.3, 2.2)])
def test_certify_n2(s0, tau, std_pair):
    sys_ = mid_coefficients(2, s0, tau)
    report = certify_dominance(sys_, s0, _fro2_bound(std_pair), re_floor=s0)
    assert report.strictly_dominant
    assert abs(report.spectral_abscissa - s0) < 1e-8
    assert report.dominant is not None
    assert report.dominant.multiplicity == 4


def test_certify_example(example_system):
    pair = companion_pair(normalize(example_system, -0.5))
    report = certify_dominance(example_system, -0.5, _fro2_bound(pair), re_floor=-0.5)
    assert report.strictly_dominant
    assert abs(report.spectral_abscissa + 0.5) < 1e-8


def test_certify_rejects_false_claim():
    # delay-free y' - y = 0 has the root +1; claiming dominance at 0 must fail
    sys_ = RetardedSystem(1, (-1.0,), (0.0,), 1.0)
    pair = companion_pair(normalize(sys_, 0.0))
    report = certify_dominance(sys_, 0.0, _fro2_bound(pair), re_floor=0.0)
    assert not report.strictly_dominant
    assert abs(report.spectral_abscissa - 1.0) < 1e-9


def test_certify_agrees_with_modulus_scan():
    # brute scan of the normalized right half strip, grid 0.01: the only root
    # with Re >= 0 must be the assigned one at the origin
    from oracles import scan_roots

    for n, s0, tau in [(1, -0.4, 1.2), (2, -0.5, 1.0), (3, -0.5, 2.5)]:
        sys_ = mid_coefficients(n, s0, tau)
        ns = normalize(sys_, s0)
        q = ns.quasipolynomial()
        pair = companion_pair(ns)
        bound = _fro2_bound(pair)
        report = certify_dominance(sys_, s0, bound, re_floor=s0)
        assert report.strictly_dominant

        B = bound.value
        radius = 1.0 + max(abs(b) + abs(be) for b, be in zip(ns.b, ns.beta))
        strip = Rectangle(-0.015, radius, -max(B, 0.01), max(B, 0.01))
        located = scan_roots(q, strip)
        assert len(located) == 1, (n, s0, tau, located)
        z, m = located[0]
        assert abs(z) < 1e-9 and m == 2 * n


# --- reports and export -------------------------------------------------------------


def test_report_from_roots_strict():
    roots = [Root(-1.0 + 0j, 2, 0.0), Root(-2.0 + 1j, 1, 0.0), Root(-2.0 - 1j, 1, 0.0)]
    rep = SpectrumReport.from_roots(roots, Rectangle(-3, 0, -2, 2))
    assert rep.spectral_abscissa == -1.0
    assert rep.strictly_dominant
    assert rep.dominant.location == -1.0 + 0j


def test_report_tie_is_not_strict():
    roots = [Root(-1.0 + 1j, 1, 0.0), Root(-1.0 - 1j, 1, 0.0)]
    rep = SpectrumReport.from_roots(roots, Rectangle(-3, 0, -2, 2))
    assert not rep.strictly_dominant
    assert rep.dominant is None


def test_report_json_fields(example_system):
    pair = companion_pair(normalize(example_system, -0.5))
    rep = certify_dominance(example_system, -0.5, _fro2_bound(pair), re_floor=-0.5)
    doc = rep.to_json_dict()
    assert set(doc) == {"roots", "region", "spectral_abscissa", "dominant", "strictly_dominant"}
    assert doc["strictly_dominant"] is True
    assert {"re", "im", "multiplicity", "residual"} == set(doc["roots"][0])


def test_roots_csv_format():
    roots = [Root(-2.0 + 1j, 1, 1e-13), Root(-1.0 + 0j, 4, 0.0), Root(-2.0 - 1j, 1, 1e-13)]
    text = roots_to_csv(roots)
    lines = text.strip().splitlines()
    assert lines[0] == "re,im,multiplicity,residual"
    assert lines[1].startswith("-1,0,4,")
    assert lines[2].startswith("-2,-1,1,")
    assert lines[3].startswith("-2,1,1,")
