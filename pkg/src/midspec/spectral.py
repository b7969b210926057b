"""Argument-principle root localization and dominance certification.

Root counts inside rectangles come from the winding number of the
quasipolynomial around the boundary, evaluated by adaptive phase
continuation: boundary samples are refined until consecutive phase
increments are small, so the summed increments telescope to the exact
continuous argument change.  Rectangles are quadrisected until each leaf
carries a single root location, which is then polished by a Newton
iteration on q/q' (quadratic also at multiple roots) and assigned its
multiplicity by re-counting on shrinking squares around it.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterable

import numpy as np

from .quasipoly import (
    NormalizedSystem,
    Quasipolynomial,
    RetardedSystem,
    mid_coefficients,
    normalize,
)

if TYPE_CHECKING:  # pragma: no cover
    from .bounds import BoundReport

__all__ = [
    "CompanionPair",
    "Rectangle",
    "Root",
    "SpectrumReport",
    "LocalizationError",
    "companion_pair",
    "standard_pair",
    "count_roots",
    "find_roots",
    "spectral_abscissa",
    "certify_dominance",
    "roots_to_csv",
]


class LocalizationError(RuntimeError):
    """Raised when counting, refinement, or certification cannot conclude."""


class _BoundaryProximity(Exception):
    """Internal: a contour sample sits too close to a root."""


# relative |q| floor below which a boundary sample counts as "on a root"
_BOUNDARY_FLOOR = 1e-12
# phase increment threshold for contour refinement (radians)
_PHASE_STEP = 0.8
# |q| acceptance threshold for refined roots, relative to the local scale
_RESIDUAL_REL = 1e-8


@dataclass(frozen=True)
class CompanionPair:
    """Matrices A0 (companion form) and A1 (delayed last row) with
    det(zI - A0 - A1 e^(-z)) equal to the delay-1 quasipolynomial."""

    A0: np.ndarray
    A1: np.ndarray

    def __post_init__(self):
        A0 = np.asarray(self.A0, dtype=float)
        A1 = np.asarray(self.A1, dtype=float)
        if A0.shape != A1.shape or A0.ndim != 2 or A0.shape[0] != A0.shape[1]:
            raise ValueError("A0 and A1 must be square matrices of equal size")
        A0.setflags(write=False)
        A1.setflags(write=False)
        object.__setattr__(self, "A0", A0)
        object.__setattr__(self, "A1", A1)

    @property
    def n(self) -> int:
        return self.A0.shape[0]

    def char_value(self, z: complex) -> complex:
        """det(zI - A0 - A1 e^(-z))."""
        z = complex(z)
        M = z * np.eye(self.n) - self.A0 - self.A1 * np.exp(-z)
        return complex(np.linalg.det(M))


def companion_pair(nsys: NormalizedSystem) -> CompanionPair:
    """Companion pair of a delay-1 system: ones on the superdiagonal of A0,
    last rows -b and -beta.

    The sign on the last rows is what makes det(zI - A0 - A1 e^(-z)) equal
    z^n + sum b_k z^k + e^(-z) sum beta_k z^k.
    """
    n = nsys.n
    A0 = np.zeros((n, n))
    A1 = np.zeros((n, n))
    if n > 1:
        A0[np.arange(n - 1), np.arange(1, n)] = 1.0
    A0[-1, :] = [-bk for bk in nsys.b]
    A1[-1, :] = [-bk for bk in nsys.beta]
    return CompanionPair(A0, A1)


def standard_pair() -> CompanionPair:
    """Companion pair of the normalized quartic design (n = 2, shift 0, delay 1)."""
    return companion_pair(normalize(mid_coefficients(2, 0.0, 1.0), 0.0))


@dataclass(frozen=True)
class Rectangle:
    re_min: float
    re_max: float
    im_min: float
    im_max: float

    def __post_init__(self):
        if not (self.re_min < self.re_max and self.im_min < self.im_max):
            raise ValueError("rectangle bounds must satisfy min < max")

    @property
    def width(self) -> float:
        return self.re_max - self.re_min

    @property
    def height(self) -> float:
        return self.im_max - self.im_min

    @property
    def diameter(self) -> float:
        return math.hypot(self.width, self.height)

    @property
    def center(self) -> complex:
        return complex(0.5 * (self.re_min + self.re_max), 0.5 * (self.im_min + self.im_max))

    def inflated(self, delta: float) -> "Rectangle":
        return Rectangle(
            self.re_min - delta, self.re_max + delta, self.im_min - delta, self.im_max + delta
        )

    def contains(self, z: complex, slack: float = 0.0) -> bool:
        return (
            self.re_min - slack <= z.real <= self.re_max + slack
            and self.im_min - slack <= z.imag <= self.im_max + slack
        )

    def corners(self) -> list[complex]:
        return [
            complex(self.re_min, self.im_min),
            complex(self.re_max, self.im_min),
            complex(self.re_max, self.im_max),
            complex(self.re_min, self.im_max),
        ]

    def to_json_dict(self) -> dict:
        return {
            "re_min": self.re_min,
            "re_max": self.re_max,
            "im_min": self.im_min,
            "im_max": self.im_max,
        }


@dataclass(frozen=True)
class Root:
    location: complex
    multiplicity: int
    residual: float

    def __post_init__(self):
        if self.multiplicity < 1:
            raise ValueError("multiplicity must be >= 1")


@dataclass(frozen=True)
class SpectrumReport:
    roots: tuple[Root, ...]
    region: Rectangle
    spectral_abscissa: float
    dominant: Root | None
    strictly_dominant: bool

    @staticmethod
    def from_roots(roots: Iterable[Root], region: Rectangle) -> "SpectrumReport":
        """Generic report: strict dominance means a unique real root attains
        the maximal real part (ties closer than 1e-9 count as non-strict)."""
        roots = tuple(sorted(roots, key=lambda r: (-r.location.real, r.location.imag)))
        if not roots:
            raise ValueError("cannot build a report from an empty root set")
        gamma0 = max(r.location.real for r in roots)
        tie = 1e-9 * (1.0 + abs(gamma0))
        attaining = [r for r in roots if r.location.real >= gamma0 - tie]
        dominant = attaining[0] if len(attaining) == 1 else None
        strictly = dominant is not None and dominant.location.imag == 0.0
        return SpectrumReport(roots, region, gamma0, dominant, strictly)

    def to_json_dict(self) -> dict:
        def root_doc(r: Root) -> dict:
            return {
                "re": r.location.real,
                "im": r.location.imag,
                "multiplicity": r.multiplicity,
                "residual": r.residual,
            }

        return {
            "roots": [root_doc(r) for r in self.roots],
            "region": self.region.to_json_dict(),
            "spectral_abscissa": self.spectral_abscissa,
            "dominant": root_doc(self.dominant) if self.dominant else None,
            "strictly_dominant": self.strictly_dominant,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2)


def roots_to_csv(roots: Iterable[Root]) -> str:
    """CSV table `re,im,multiplicity,residual`, descending re then ascending im."""
    lines = ["re,im,multiplicity,residual"]
    for r in sorted(roots, key=lambda r: (-r.location.real, r.location.imag)):
        lines.append(
            f"{r.location.real:.15g},{r.location.imag:.15g},{r.multiplicity},{r.residual:.6g}"
        )
    return "\n".join(lines) + "\n"


# --- winding number by phase continuation ------------------------------------


def _edge_phase_change(
    q: Quasipolynomial, qp: Quasipolynomial, a: complex, b: complex, delays_max: float
) -> float:
    """Continuous argument change of q along the segment a -> b.

    Samples are refined until (i) every observed phase increment is below
    _PHASE_STEP and (ii) the local phase-speed budget |dz| |q'/q| is small.
    The second criterion matters: |d arg q / dz| <= |q'/q|, so it rules out
    aliasing by full turns near high-multiplicity roots that the
    principal-branch increments alone cannot see.
    """
    budget = delays_max * abs((b - a).imag) + math.pi * max(q.degree, 1)
    n0 = 17 + int(budget / 1.2)
    length = abs(b - a)

    def probe(tv: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        z = a + tv * (b - a)
        v = q.eval_array(z)
        av = np.abs(v)
        if np.any(av <= _BOUNDARY_FLOOR * q.magnitude_scale_array(z)):
            raise _BoundaryProximity
        return v / av, np.abs(qp.eval_array(z)) / av

    t = np.linspace(0.0, 1.0, n0)
    u, g = probe(t)
    for _ in range(48):
        dphi = np.angle(u[1:] * np.conj(u[:-1]))
        seg = (t[1:] - t[:-1]) * length
        speed = 0.5 * (g[1:] + g[:-1]) * seg
        bad = (np.abs(dphi) > _PHASE_STEP) | (speed > 2.0)
        if not bad.any():
            break
        idx = np.nonzero(bad)[0]
        tm = 0.5 * (t[idx] + t[idx + 1])
        um, gm = probe(tm)
        t = np.insert(t, idx + 1, tm)
        u = np.insert(u, idx + 1, um)
        g = np.insert(g, idx + 1, gm)
    else:
        raise LocalizationError("contour refinement did not converge (root on boundary?)")
    return float(np.angle(u[1:] * np.conj(u[:-1])).sum())


def _winding(q: Quasipolynomial, rect: Rectangle) -> int:
    """Winding number of q around the rectangle boundary, traversed
    counterclockwise; raises if it fails to come out close to an integer."""
    delays_max = max((abs(lam) for lam, _ in q.terms), default=0.0)
    qp = q.derivative()
    corners = rect.corners()
    total = 0.0
    for i in range(4):
        total += _edge_phase_change(q, qp, corners[i], corners[(i + 1) % 4], delays_max)
    w = total / (2.0 * math.pi)
    if abs(w - round(w)) > 0.1:
        raise LocalizationError(f"winding number {w:.4f} is not close to an integer")
    return int(round(w))


def _inflation_steps(rect: Rectangle):
    """Outward inflations tried when a root sits on the boundary: starts at
    1e-6 and grows tenfold per retry, because around a root of multiplicity m
    the evaluation-cancellation floor is only cleared at distance
    ~(1e-12)^(1/m), far beyond 1e-6 for m >= 2."""
    yield rect
    delta = 0.0
    for k in range(5):
        delta += 1e-6 * 10.0**k
        yield rect.inflated(delta)


def count_roots(q: Quasipolynomial, rect: Rectangle) -> int:
    """Number of roots of q inside rect, counted with multiplicity.

    If a root sits (numerically) on the boundary the rectangle is inflated
    outward and the count retried, at most 5 times.
    """
    if q.is_zero:
        raise ValueError("cannot count roots of the zero quasipolynomial")
    for attempt in _inflation_steps(rect):
        try:
            return _winding(q, attempt)
        except _BoundaryProximity:
            continue
    raise LocalizationError("root remains on the boundary after 5 inflation retries")


def _count_exact(q: Quasipolynomial, rect: Rectangle) -> int:
    """Winding count without inflation; lets callers manage boundary clearance."""
    return _winding(q, rect)


# --- refinement ---------------------------------------------------------------


def _refine_newton(
    q: Quasipolynomial,
    qp: Quasipolynomial,
    qpp: Quasipolynomial,
    z0: complex,
    home: Rectangle,
) -> tuple[complex, bool]:
    """Polish a root starting from z0 by Newton iteration on q/q'.

    q/q' has a simple zero at any root of q regardless of multiplicity, so
    the iteration z <- z - (q/q') / (1 - q q''/q'^2) is quadratic there.
    Falls back to a damped plain Newton step when the denominator degenerates
    and to a stencil descent on |q| when the iteration stalls.
    """
    z = complex(z0)
    leash = 4.0 * home.diameter + 1e-12
    best = z
    best_res = abs(q(z)) / max(q.magnitude_scale(z), 1e-300)
    stale = 0
    for _ in range(100):
        f = q(z)
        scale = max(q.magnitude_scale(z), 1e-300)
        rel = abs(f) / scale
        if rel < best_res:
            best, best_res = z, rel
            stale = 0
        else:
            stale += 1
        if rel < 1e-16:
            return z, True
        fp = qp(z)
        if fp == 0:
            z = z + 1e-9 * (1.0 + abs(z))
            continue
        u = f / fp
        denom = 1.0 - f * qpp(z) / (fp * fp)
        step = u / denom if abs(denom) > 1e-3 else 0.5 * u
        if not (math.isfinite(step.real) and math.isfinite(step.imag)):
            break
        z = z - step
        if abs(z - home.center) > leash:
            break
        if abs(step) <= 5e-16 * (1.0 + abs(z)):
            return z, True
        if stale > 12:
            break
    # stall fallback: shrink a 3x3 stencil in modulus around the best point
    z = best
    h = max(home.width, home.height) / 8.0
    for _ in range(60):
        offsets = np.array(
            [0, h, -h, 1j * h, -1j * h, h + 1j * h, h - 1j * h, -h + 1j * h, -h - 1j * h]
        )
        cand = z + offsets
        vals = np.abs(q.eval_array(cand))
        i = int(np.argmin(vals))
        if i == 0:
            h /= 2.0
        else:
            z = complex(cand[i])
        if h < 1e-17 * (1.0 + abs(z)):
            break
    # one more Newton-on-u pass from the descended point
    for _ in range(50):
        f = q(z)
        if abs(f) / max(q.magnitude_scale(z), 1e-300) < 1e-16:
            return z, True
        fp = qp(z)
        if fp == 0:
            break
        u = f / fp
        denom = 1.0 - f * qpp(z) / (fp * fp)
        step = u / denom if abs(denom) > 1e-3 else 0.5 * u
        z = z - step
        if abs(step) <= 5e-16 * (1.0 + abs(z)):
            return z, True
    converged = abs(q(z)) <= _RESIDUAL_REL * q.magnitude_scale(z)
    return z, converged


def _polish_multiple(derivs: list[Quasipolynomial], z: complex, mult: int, radius: float) -> complex:
    """Final polish of a root of known multiplicity.

    A root of multiplicity m is a simple zero of the (m-1)-th derivative,
    where plain Newton is quadratic and free of the epsilon^(1/m) accuracy
    ceiling that limits refinement through q itself.
    """
    while len(derivs) < mult + 1:
        derivs.append(derivs[-1].derivative())
    f, fp = derivs[mult - 1], derivs[mult]
    zk = complex(z)
    for _ in range(60):
        v = f(zk)
        d = fp(zk)
        if d == 0:
            break
        step = v / d
        zk = zk - step
        if abs(zk - z) > radius:
            return z
        if abs(step) <= 5e-16 * (1.0 + abs(zk)):
            break
    return zk if abs(f(zk)) <= abs(f(z)) else z


def _stable_count_around(q: Quasipolynomial, z: complex, h0: float) -> int:
    """Multiplicity of the root at z by counting on shrinking squares.

    Accepts once two consecutive shrink levels agree on a positive count;
    squares grazing another root are nudged in size and retried.  Shrinking
    stops once |q| on the square falls into cancellation territory (where
    phases carry no information), keeping the last trustworthy count.
    """
    h = h0
    prev = -1
    for _ in range(9):
        count = None
        hh = h
        for _ in range(6):
            try:
                count = _count_exact(
                    q, Rectangle(z.real - hh, z.real + hh, z.imag - hh, z.imag + hh)
                )
                break
            except _BoundaryProximity:
                hh *= 1.0173
        if count is None:
            # every nudge grazed the cancellation floor; smaller squares
            # would only be worse, so settle for the last stable count
            break
        if count == prev and count > 0:
            return count
        prev = count
        h /= 5.0
        if h < 1e3 * np.finfo(float).eps * (1.0 + abs(z)):
            break
    if prev > 0:
        return prev
    raise LocalizationError(f"could not stabilize a multiplicity count around {z}")


_SPLIT_FRACTIONS = (0.5, 0.53, 0.47, 0.58, 0.42, 0.64, 0.36, 0.31, 0.69, 0.72, 0.28)


def _ranked_splits(q: Quasipolynomial, lo: float, hi: float, fixed_lo: float, fixed_hi: float,
                   vertical: bool) -> list[float]:
    """Candidate split coordinates in (lo, hi), best boundary clearance first.

    Clearance is the minimal |q|/scale along the would-be grid line; the
    actual arbiter is the subsequent child count, which rejects lines that
    still graze a root.
    """
    t = np.linspace(fixed_lo, fixed_hi, 65)
    ranked = []
    for frac in _SPLIT_FRACTIONS:
        x = lo + frac * (hi - lo)
        z = (x + 1j * t) if vertical else (t + 1j * x)
        vals = np.abs(q.eval_array(z))
        scale = q.magnitude_scale_array(z)
        clear = float((vals / np.maximum(scale, 1e-300)).min())
        ranked.append((clear, x))
    ranked.sort(key=lambda c: -c[0])
    return [x for _, x in ranked]


def _split_and_count(
    q: Quasipolynomial, box: Rectangle, m: int
) -> list[tuple[Rectangle, int]]:
    """Quadrisect box along root-free grid lines; children tile box exactly
    and their counts add up to m.  Candidate lines are tried in clearance
    order until the four child counts succeed and are additive."""
    xs = _ranked_splits(q, box.re_min, box.re_max, box.im_min, box.im_max, vertical=True)
    ys = _ranked_splits(q, box.im_min, box.im_max, box.re_min, box.re_max, vertical=False)
    for k in range(max(len(xs), len(ys))):
        xm = xs[min(k, len(xs) - 1)]
        ym = ys[min(k, len(ys) - 1)]
        children = [
            Rectangle(box.re_min, xm, box.im_min, ym),
            Rectangle(xm, box.re_max, box.im_min, ym),
            Rectangle(box.re_min, xm, ym, box.im_max),
            Rectangle(xm, box.re_max, ym, box.im_max),
        ]
        try:
            counts = [_count_exact(q, c) for c in children]
        except (_BoundaryProximity, LocalizationError):
            continue
        if sum(counts) == m:
            return list(zip(children, counts))
    raise LocalizationError(f"could not quadrisect {box} along root-free lines")


def find_roots(q: Quasipolynomial, rect: Rectangle, tol: float = 1e-9) -> list[Root]:
    """All roots of q in rect with multiplicities, by recursive quadrisection.

    Boxes are split until they carry a single root location; a box whose
    contour count matches the stabilized shrinking-square count at its
    Newton-refined point is accepted without further splitting, so multiple
    roots do not force subdivision down to the diameter floor.  The returned
    multiplicities always sum to the total contour count of rect.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    if q.is_zero:
        raise ValueError("cannot locate roots of the zero quasipolynomial")

    # top-level count, inflating per the boundary-root policy
    total = None
    for attempt in _inflation_steps(rect):
        try:
            total = _count_exact(q, attempt)
            break
        except _BoundaryProximity:
            continue
    if total is None:
        raise LocalizationError("root remains on the boundary after 5 inflation retries")
    if total == 0:
        return []

    qp = q.derivative()
    qpp = qp.derivative()
    derivs = [q, qp, qpp]
    roots: list[Root] = []
    stack: list[tuple[Rectangle, int]] = [(attempt, total)]
    floor = 1e3 * np.finfo(float).eps

    def finish(z: complex, mult: int) -> Root:
        if mult > 1:
            z = _polish_multiple(derivs, z, mult, radius=0.1 * (1.0 + abs(z)))
        return Root(z, mult, abs(q(z)))

    while stack:
        box, m = stack.pop()
        if m == 0:
            continue
        z0, converged = _refine_newton(q, qp, qpp, box.center, box)
        accepted = False
        # strict containment: boxes tile the search region with root-free
        # boundaries, so each box's roots lie strictly inside it and a
        # refined point outside means Newton escaped to a neighbor's root
        if converged and box.contains(z0, slack=1e-12 * (1.0 + box.diameter)):
            h0 = max(0.45 * min(box.width, box.height), 64.0 * floor * (1.0 + abs(z0)))
            try:
                mult = _stable_count_around(q, z0, h0)
            except LocalizationError:
                mult = -1
            if mult == m:
                roots.append(finish(z0, m))
                accepted = True
        if accepted:
            continue
        if box.diameter < max(tol, floor * (1.0 + abs(box.center))):
            # diameter floor: keep the best available point for the whole count
            if not converged:
                raise LocalizationError(
                    f"Newton refinement failed in a terminal box at {box.center}"
                )
            roots.append(finish(z0, m))
            continue
        stack.extend((c, k) for c, k in _split_and_count(q, box, m) if k > 0)

    roots = _symmetrize_conjugates(roots)
    if sum(r.multiplicity for r in roots) != total:
        raise LocalizationError("assembled multiplicities do not match the total count")
    return sorted(roots, key=lambda r: (-r.location.real, r.location.imag))


def _symmetrize_conjugates(roots: list[Root]) -> list[Root]:
    """Snap near-real roots onto the axis and average conjugate pairs.

    Real-coefficient quasipolynomials have conjugate-symmetric spectra; the
    refined locations are made to honor that exactly.
    """
    out: list[Root] = []
    used = [False] * len(roots)
    for i, r in enumerate(roots):
        if used[i]:
            continue
        z = r.location
        if abs(z.imag) <= 1e-10 * (1.0 + abs(z)):
            out.append(Root(complex(z.real, 0.0), r.multiplicity, r.residual))
            used[i] = True
            continue
        partner = None
        for j in range(i + 1, len(roots)):
            if used[j]:
                continue
            w = roots[j].location
            if abs(w - z.conjugate()) <= 1e-7 * (1.0 + abs(z)):
                partner = j
                break
        if partner is None:
            out.append(r)
            used[i] = True
            continue
        mean = 0.5 * (z + roots[partner].location.conjugate())
        out.append(Root(mean, r.multiplicity, r.residual))
        out.append(Root(mean.conjugate(), roots[partner].multiplicity, roots[partner].residual))
        used[i] = used[partner] = True
    return out


def spectral_abscissa(q: Quasipolynomial, region: Rectangle) -> float:
    """Largest real part among the roots of q inside region."""
    roots = find_roots(q, region)
    if not roots:
        raise LocalizationError("no roots in region")
    return max(r.location.real for r in roots)


def _modulus_growth_radius(n: int, weights: list[float]) -> float:
    """Smallest R with r^n > sum_k weights[k] r^k for every r >= R.

    Any root z with the corresponding coefficient weights satisfies
    |z|^n <= sum weights[k] |z|^k, so no root has modulus beyond R.  The gap
    polynomial has a single sign change, located by doubling and bisection.
    """
    def gap(r: float) -> float:
        return r**n - sum(w * r**k for k, w in enumerate(weights))

    hi = 1.0
    while gap(hi) <= 0.0:
        hi *= 2.0
        if hi > 1e12:  # pragma: no cover - absurd coefficients
            return hi
    lo = hi / 2.0
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if gap(mid) <= 0.0:
            lo = mid
        else:
            hi = mid
    return hi + 0.25


def certify_dominance(
    sys: RetardedSystem, s0: float, bound: "BoundReport", re_floor: float
) -> SpectrumReport:
    """Certify that s0 is the strictly dominant root of the system.

    Works on the delay-1 normalized form at s0, where roots s with
    Re s >= re_floor map to Re z >= sigma_min = tau (re_floor - s0).  The
    supplied bound confines such roots to |Im z| <= bound.value, and a
    Cauchy-type modulus cut confines them to Re z <= R: for Re z >= sigma_min,
    |z|^n <= sum (|b_k| + |beta_k| e^(-sigma_min)) |z|^k forces |z| <= R with
    R = 1 + max_k (|b_k| + |beta_k| e^(-sigma_min)).  Locating all roots in
    the remaining rectangle decides the verdict: strict dominance holds iff
    the only root with Re z >= 0 is z = 0 with the full multiplicity 2n.
    """
    s0 = float(s0)
    tau = sys.tau
    nsys = normalize(sys, s0)
    nq = nsys.quasipolynomial()
    sigma_min = tau * (float(re_floor) - s0)
    amp = math.exp(-min(0.0, sigma_min))
    radius = _modulus_growth_radius(
        nsys.n, [abs(b) + abs(be) * amp for b, be in zip(nsys.b, nsys.beta)]
    )
    B = bound.value + 0.1
    margin = 0.25
    region_n = Rectangle(sigma_min - margin, max(radius, sigma_min + 1.0) + 0.1, -B, B)

    try:
        roots_n = find_roots(nq, region_n)
    except LocalizationError as exc:
        raise LocalizationError(f"dominance certification inconclusive: {exc}") from exc

    q_orig = sys.quasipolynomial()
    roots = [
        Root(s0 + r.location / tau, r.multiplicity, abs(q_orig(s0 + r.location / tau)))
        for r in roots_n
    ]
    region = Rectangle(
        s0 + region_n.re_min / tau,
        s0 + region_n.re_max / tau,
        region_n.im_min / tau,
        region_n.im_max / tau,
    )

    zero_tol = 1e-6
    right = [r for r in roots_n if r.location.real >= -zero_tol]
    strictly = (
        len(right) == 1
        and abs(right[0].location) <= zero_tol
        and right[0].multiplicity == 2 * sys.n
    )

    roots_sorted = tuple(sorted(roots, key=lambda r: (-r.location.real, r.location.imag)))
    gamma0 = max(r.location.real for r in roots_sorted) if roots_sorted else -math.inf
    dominant = None
    if strictly:
        dominant = next(r for r in roots_sorted if abs(r.location - s0) <= zero_tol / tau + 1e-12)
    elif roots_sorted:
        tie = 1e-9 * (1.0 + abs(gamma0))
        attaining = [r for r in roots_sorted if r.location.real >= gamma0 - tie]
        dominant = attaining[0] if len(attaining) == 1 else None
    return SpectrumReport(roots_sorted, region, gamma0, dominant, strictly)
