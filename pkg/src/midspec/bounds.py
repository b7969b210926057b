"""A priori bounds on imaginary parts of right-half-plane characteristic roots.

Every root z of det(zI - A0 - A1 e^(-z)) is an eigenvalue of A0 + A1 e^(-z),
so |z| <= rho(A0 + A1 e^(-z)) and, through Gelfand's formula, also
|z|^p <= ||(A0 + A1 e^(-z))^p|| for any submultiplicative norm and power p.
Sweeping these feasibility inequalities over the half-plane Re z >= sigma_min
yields computable bounds on |Im z|.  Alongside these, the module implements
the classical logarithmic-norm bounds mu(-iA0) + ||A1|| and the refined
variant with max_theta mu(A1 e^(i theta)), plus the analytic Frobenius
power-2 chain that certifies |Im z| < 2 pi for the standard normalized
quartic design.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

import numpy as np

from .spectral import CompanionPair

__all__ = [
    "Norm",
    "BoundMethod",
    "BoundReport",
    "Lemma3Report",
    "log_norm",
    "matrix_norm",
    "bound_mori_kokame",
    "bound_tissir_hmamed",
    "bound_norm_power",
    "bound_spectral_radius_curve",
    "boundary_curve",
    "lemma3_analytic_bound",
]


class Norm(str, Enum):
    ONE = "one"
    TWO = "two"
    FROBENIUS = "frobenius"
    INFINITY = "infinity"
    NONE = "none"


class BoundMethod(str, Enum):
    SPECTRAL_RADIUS_CURVE = "rho"
    NORM_POWER = "norm-power"
    MORI_KOKAME = "mori-kokame"
    TISSIR_HMAMED = "tissir-hmamed"
    LEMMA3_ANALYTIC = "lemma3"


#: Norms induced by a vector norm; the logarithmic norm is defined for these.
INDUCED_NORMS = (Norm.ONE, Norm.TWO, Norm.INFINITY)

#: Submultiplicative matrix norms usable in the Gelfand power inequality.
SUBMULTIPLICATIVE_NORMS = (Norm.ONE, Norm.TWO, Norm.FROBENIUS, Norm.INFINITY)


@dataclass(frozen=True)
class BoundReport:
    """One computed bound on |Im z| over {Re z >= sigma_min}."""

    method: BoundMethod
    norm: Norm
    power: int
    sigma_min: float
    value: float

    def __post_init__(self):
        if self.value < 0:
            raise ValueError("bound value must be nonnegative")


@dataclass(frozen=True)
class Lemma3Report:
    """Pieces of the analytic Frobenius power-2 chain for the standard pair.

    coarse. . . . . . . . .  fourth root of the discriminant-step constant
    refined . . . . . . . .  fourth root of the contradiction-step constant,
                             valid on |omega| in the excluded interval
    excluded_interval . . .  (2 pi, coarse): refined < 2 pi rules it out
    certified . . . . . . .  the resulting bound, 2 pi
    """

    coarse: float
    coarse_fourth_power: float
    refined: float
    refined_fourth_power: float
    excluded_interval: tuple[float, float]
    certified: float


def _check_square(M: np.ndarray) -> np.ndarray:
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError("expected a square matrix")
    return M


def log_norm(M: np.ndarray, norm: Norm) -> float:
    """Logarithmic norm mu(M) = lim_{eps->0+} (||I + eps M|| - 1)/eps.

    Closed forms: column sums of off-diagonal moduli plus diagonal real part
    (one norm), the same over rows (infinity norm), and the largest eigenvalue
    of the Hermitian part (two norm).
    """
    M = _check_square(M)
    norm = Norm(norm)
    if norm == Norm.ONE:
        absM = np.abs(M)
        cols = M.real.diagonal() + absM.sum(axis=0) - absM.diagonal()
        return float(cols.max())
    if norm == Norm.INFINITY:
        absM = np.abs(M)
        rows = M.real.diagonal() + absM.sum(axis=1) - absM.diagonal()
        return float(rows.max())
    if norm == Norm.TWO:
        herm = (M + M.conj().T) / 2.0
        return float(np.linalg.eigvalsh(herm).max())
    raise ValueError(f"logarithmic norm undefined for the {norm.value} norm")


def matrix_norm(M: np.ndarray, norm: Norm) -> float:
    M = _check_square(M)
    norm = Norm(norm)
    if norm == Norm.ONE:
        return float(np.abs(M).sum(axis=0).max())
    if norm == Norm.INFINITY:
        return float(np.abs(M).sum(axis=1).max())
    if norm == Norm.FROBENIUS:
        return float(np.sqrt((np.abs(M) ** 2).sum()))
    if norm == Norm.TWO:
        return float(np.linalg.svd(M, compute_uv=False)[0])
    raise ValueError(f"unsupported matrix norm: {norm.value}")


def bound_mori_kokame(pair: CompanionPair, norm: Norm) -> BoundReport:
    """|Im z| <= mu(-i A0) + ||A1|| for roots with Re z >= 0 (induced norms only)."""
    norm = Norm(norm)
    if norm not in INDUCED_NORMS:
        raise ValueError("bound requires a norm induced by a vector norm")
    value = log_norm(-1j * pair.A0, norm) + matrix_norm(pair.A1, norm)
    return BoundReport(BoundMethod.MORI_KOKAME, norm, 1, 0.0, value)


def _golden_max(f, lo: float, hi: float, tol: float) -> float:
    """Golden-section maximization of a unimodal-enough f on [lo, hi]."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = hi - invphi * (hi - lo)
    x2 = lo + invphi * (hi - lo)
    f1, f2 = f(x1), f(x2)
    while hi - lo > tol:
        if f1 < f2:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + invphi * (hi - lo)
            f2 = f(x2)
        else:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - invphi * (hi - lo)
            f1 = f(x1)
    return max(f1, f2)


def bound_tissir_hmamed(pair: CompanionPair, norm: Norm) -> BoundReport:
    """|Im z| <= mu(-i A0) + max_theta mu(A1 e^(i theta)) (induced norms only).

    The theta maximum is located on a 720-point grid and polished by
    golden-section search to 1e-8.
    """
    norm = Norm(norm)
    if norm not in INDUCED_NORMS:
        raise ValueError("bound requires a norm induced by a vector norm")
    A1 = pair.A1

    def f(theta: float) -> float:
        return log_norm(A1 * np.exp(1j * theta), norm)

    thetas = np.linspace(0.0, 2.0 * math.pi, 720, endpoint=False)
    values = [f(t) for t in thetas]
    i = int(np.argmax(values))
    step = thetas[1] - thetas[0]
    best = _golden_max(f, thetas[i] - step, thetas[i] + step, 1e-8)
    best = max(best, values[i])
    value = log_norm(-1j * pair.A0, norm) + best
    return BoundReport(BoundMethod.TISSIR_HMAMED, norm, 1, 0.0, value)


# --- feasibility sweeps -----------------------------------------------------
#
# For fixed sigma = Re z the function H(phi) = ||(A0 + A1 e^(-sigma) e^(-i phi))^p||^(1/p)
# depends on omega = Im z only through phi = omega mod 2 pi.  A point is
# feasible iff sigma^2 + omega^2 <= H(phi)^2, so the largest feasible omega in
# the residue class of phi is phi + 2 pi floor((W(phi) - phi)/(2 pi)) with
# W = sqrt(H^2 - sigma^2).  Maximizing over classes on a fine phi grid and
# bisecting the active crossing W(phi) = phi + 2 pi k gives sup |Im z| at
# that sigma; the bound is the sup over sigma >= sigma_min.

_COARSE_SIGMA_STEP = 1e-2
_FINE_SIGMA_STEP = 1e-4
_TAIL_CUT_STEPS = 100


def _stacked_h(A0: np.ndarray, A1: np.ndarray, c: np.ndarray, norm, power: int) -> np.ndarray:
    """||M(c)^power||^(1/power) with M(c) = A0 + c A1 for an array of scalars c.

    norm is a Norm member or the string "rho" for the spectral radius (where
    power is irrelevant and forced to 1).
    """
    n = A0.shape[0]
    use_rho = norm == "rho"
    M = A0[None, :, :] + c[:, None, None] * A1[None, :, :]
    if n == 2:
        # closed forms keep the sweeps cheap for the ubiquitous 2x2 pairs
        if use_rho:
            tr = M[:, 0, 0] + M[:, 1, 1]
            det = M[:, 0, 0] * M[:, 1, 1] - M[:, 0, 1] * M[:, 1, 0]
            disc = np.sqrt(tr * tr - 4.0 * det)
            return np.maximum(np.abs((tr + disc) / 2.0), np.abs((tr - disc) / 2.0))
        Mp = M if power == 1 else np.linalg.matrix_power(M, power)
        if norm == Norm.TWO:
            f2 = (np.abs(Mp) ** 2).sum(axis=(1, 2))
            det = Mp[:, 0, 0] * Mp[:, 1, 1] - Mp[:, 0, 1] * Mp[:, 1, 0]
            smax2 = (f2 + np.sqrt(np.maximum(f2 * f2 - 4.0 * np.abs(det) ** 2, 0.0))) / 2.0
            return np.sqrt(smax2) ** (1.0 / power)
    else:
        Mp = M if (use_rho or power == 1) else np.linalg.matrix_power(M, power)
    if use_rho:
        return np.abs(np.linalg.eigvals(Mp)).max(axis=1)
    if norm == Norm.ONE:
        h = np.abs(Mp).sum(axis=1).max(axis=1)
    elif norm == Norm.INFINITY:
        h = np.abs(Mp).sum(axis=2).max(axis=1)
    elif norm == Norm.FROBENIUS:
        h = np.sqrt((np.abs(Mp) ** 2).sum(axis=(1, 2)))
    elif norm == Norm.TWO:
        h = np.linalg.svd(Mp, compute_uv=False)[:, 0]
    else:
        raise ValueError(f"unsupported norm: {norm}")
    return h ** (1.0 / power)


def _omega_sup_at_sigma(A0, A1, sigma: float, norm, power: int, grid: int) -> tuple[float, float]:
    """(sup, envelope) of |Im z| on the line Re z = sigma.

    sup is over the feasible set { |z|^p <= ||M(z)^p|| } (-inf if empty);
    envelope = max_phi sqrt(H^2 - sigma^2) bounds every feasible omega at any
    sigma' >= sigma with the same H, and drives the scan's tail cut.
    """
    phis = np.linspace(0.0, 2.0 * math.pi, grid, endpoint=False)
    c = math.exp(-sigma) * np.exp(-1j * phis)
    H = _stacked_h(A0, A1, c, norm, power)
    W2 = H * H - sigma * sigma
    if not (W2 >= 0.0).any():
        return -math.inf, -math.inf
    W = np.sqrt(np.maximum(W2, 0.0))
    envelope = float(W.max())
    feasible = W >= phis
    if not feasible.any():
        return -math.inf, envelope
    kmax = np.floor((W - phis) / (2.0 * math.pi))
    omega = np.where(feasible, phis + 2.0 * math.pi * kmax, -math.inf)
    i = int(np.argmax(omega))
    best = float(omega[i])
    kstar = float(kmax[i])

    # polish the active crossing W(phi) = phi + 2 pi k* within the winning class
    def g(phi: float) -> float:
        cc = math.exp(-sigma) * np.exp(-1j * np.array([phi % (2.0 * math.pi)]))
        h = float(_stacked_h(A0, A1, cc, norm, power)[0])
        w = math.sqrt(max(h * h - sigma * sigma, 0.0))
        return w - (phi + 2.0 * math.pi * kstar)

    garr = W - (phis + 2.0 * math.pi * kstar)
    phis_ext = np.append(phis, 2.0 * math.pi)
    garr_ext = np.append(garr, W[0] - (2.0 * math.pi + 2.0 * math.pi * kstar))
    crossings = np.nonzero((garr_ext[:-1] >= 0.0) & (garr_ext[1:] < 0.0))[0]
    if crossings.size:
        j = int(crossings[-1])
        lo, hi = float(phis_ext[j]), float(phis_ext[j + 1])
        for _ in range(50):
            mid = 0.5 * (lo + hi)
            if g(mid) >= 0.0:
                lo = mid
            else:
                hi = mid
        best = max(best, lo + 2.0 * math.pi * kstar)
    return best, envelope


def _feasibility_sup(A0, A1, norm, power: int, sigma_min: float) -> float:
    """sup |Im z| over the feasible set in {Re z >= sigma_min}.

    Coarse sigma scan (step 1e-2) with the tail cut once the feasibility
    envelope stays below the running maximum for 100 consecutive steps,
    then a fine rescan (step 1e-4, denser phi grid) around the argmax.
    """
    # no feasible z beyond sigma_cap: |z| >= sigma there exceeds every
    # attainable ||M^p||^(1/p) <= ||A0|| + ||A1|| e^(-sigma)
    capnorm = Norm.FROBENIUS if (norm == "rho" or norm == Norm.TWO) else norm
    na0 = matrix_norm(A0, capnorm)
    na1 = matrix_norm(A1, capnorm)
    sigma_cap = na0 + na1 * math.exp(-min(0.0, sigma_min)) + 1.0

    best = -math.inf
    best_sigma = sigma_min
    sigma = sigma_min
    below = 0
    while sigma <= sigma_cap:
        v, env = _omega_sup_at_sigma(A0, A1, sigma, norm, power, grid=2048)
        if v > best:
            best, best_sigma = v, sigma
        if env < best:
            below += 1
            if below >= _TAIL_CUT_STEPS:
                break
        else:
            below = 0
        sigma += _COARSE_SIGMA_STEP
    if best == -math.inf:
        return 0.0
    lo = max(sigma_min, best_sigma - _COARSE_SIGMA_STEP)
    hi = best_sigma + _COARSE_SIGMA_STEP
    for s in np.arange(lo, hi + _FINE_SIGMA_STEP / 2, _FINE_SIGMA_STEP):
        v, _ = _omega_sup_at_sigma(A0, A1, float(s), norm, power, grid=16384)
        if v > best:
            best = v
    return float(best)


def bound_norm_power(
    pair: CompanionPair, norm: Norm, power: int, sigma_min: float = 0.0
) -> BoundReport:
    """Gelfand-type bound: sup |Im z| subject to |z|^p <= ||(A0 + A1 e^(-z))^p||."""
    norm = Norm(norm)
    if norm not in SUBMULTIPLICATIVE_NORMS:
        raise ValueError(f"norm {norm.value} not usable in the power inequality")
    power = int(power)
    if power < 1:
        raise ValueError("power must be a positive integer")
    value = _feasibility_sup(pair.A0.astype(complex), pair.A1.astype(complex), norm, power, float(sigma_min))
    return BoundReport(BoundMethod.NORM_POWER, norm, power, float(sigma_min), value)


def bound_spectral_radius_curve(pair: CompanionPair, sigma_min: float = 0.0) -> BoundReport:
    """Sharper sweep with the spectral radius in place of a norm:
    sup |Im z| subject to |z| <= rho(A0 + A1 e^(-z))."""
    value = _feasibility_sup(pair.A0.astype(complex), pair.A1.astype(complex), "rho", 1, float(sigma_min))
    return BoundReport(BoundMethod.SPECTRAL_RADIUS_CURVE, Norm.NONE, 1, float(sigma_min), value)


def boundary_curve(
    pair: CompanionPair,
    sigmas,
    norm: Norm | None = None,
    power: int = 1,
) -> np.ndarray:
    """Feasibility-boundary samples (sigma, omega_sup) for curve plots.

    norm=None selects the spectral-radius curve.  Infeasible sigmas yield NaN.
    """
    A0 = pair.A0.astype(complex)
    A1 = pair.A1.astype(complex)
    key = "rho" if norm is None else Norm(norm)
    out = []
    for s in sigmas:
        v, _ = _omega_sup_at_sigma(A0, A1, float(s), key, int(power), grid=8192)
        out.append((float(s), v if v > -math.inf else math.nan))
    return np.array(out)


# --- the analytic chain for the standard pair -------------------------------

_COS_FLOOR = 0.893  # floor of cos(omega) for omega in [2 pi, 6.75]


def lemma3_analytic_bound(pair: CompanionPair) -> Lemma3Report:
    """Certified |Im z| < 2 pi for right-half-plane roots of the standard
    normalized quartic design, via the Frobenius norm of the squared matrix.

    Chain: omega^4 <= ||(A0 + A1 e^(-z))^2||_F^2 expands to a quadratic in
    e^(-sigma) cos(omega) with negative leading coefficient; nonnegativity of
    its discriminant gives the coarse constant 64190/31, so |omega| < 6.75.
    On [2 pi, 6.75] one has cos(omega) > 0.893, and re-instating that floor in
    the quadratic caps omega^4 at 1000 + (1164 - 992 * 0.893^2) + 160, whose
    fourth root lies below 2 pi - a contradiction that excludes [2 pi, 6.75]
    entirely and certifies the 2 pi bound.
    """
    A0_ref = np.array([[0.0, 1.0], [-6.0, 4.0]])
    A1_ref = np.array([[0.0, 0.0], [6.0, 2.0]])
    if not (
        pair.A0.shape == (2, 2)
        and np.allclose(pair.A0, A0_ref, rtol=0.0, atol=1e-12)
        and np.allclose(pair.A1, A1_ref, rtol=0.0, atol=1e-12)
    ):
        raise ValueError("analytic chain applies only to the standard normalized pair")

    coarse4 = Fraction(728 + 1164 + 160) + Fraction((464 - 192) ** 2, 4 * 992)
    assert coarse4 == Fraction(64190, 31)
    coarse = float(coarse4) ** 0.25

    # validity of the cosine floor on the excluded interval
    assert math.cos(6.75 - 2.0 * math.pi) > _COS_FLOOR

    refined4 = (272 + 728) + (1164 - 992 * _COS_FLOOR**2) + 160
    refined = refined4**0.25

    two_pi = 2.0 * math.pi
    if not refined < two_pi:  # pragma: no cover - fixed constants
        raise ArithmeticError("contradiction step failed; chain constants inconsistent")
    return Lemma3Report(
        coarse=coarse,
        coarse_fourth_power=float(coarse4),
        refined=refined,
        refined_fourth_power=float(refined4),
        excluded_interval=(two_pi, coarse),
        certified=two_pi,
    )
