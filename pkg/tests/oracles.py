"""Independent brute-force oracles used to cross-check the contour machinery.

Root locations come from a dense modulus scan (grid points where |q| falls
below the term-magnitude scale) polished by a plain Newton iteration on q/q';
a modulus scan can pin a root of multiplicity m only to within the
cancellation plateau (~1e-16)^(1/m), so each polished cluster is resolved by
trying candidate multiplicities: refine on the (m-1)-th derivative, then
confirm with the derivative-based multiplicity test.  None of this shares
code with the argument-principle path it validates.
"""

import numpy as np

from midspec.quasipoly import multiplicity_at


def newton_on_ratio(q, qp, qpp, z0, steps=80, leash=2.0):
    """Newton iteration on q/q' (simple zero at any root of q)."""
    z = complex(z0)
    for _ in range(steps):
        f = q(z)
        fp = qp(z)
        if fp == 0:
            break
        u = f / fp
        d = 1.0 - f * qpp(z) / (fp * fp)
        step = u / d if abs(d) > 1e-3 else u
        z = z - step
        if abs(z - z0) > leash * (1.0 + abs(z0)):
            return complex(np.inf)
        if abs(step) <= 1e-15 * (1.0 + abs(z)):
            break
    return z


def _plain_newton(f, fp, z0, steps=60, leash=1.0):
    z = complex(z0)
    for _ in range(steps):
        d = fp(z)
        if d == 0:
            break
        step = f(z) / d
        z = z - step
        if abs(z - z0) > leash:
            return complex(np.inf)
        if abs(step) <= 1e-15 * (1.0 + abs(z)):
            break
    return z


def resolve_root(q, z0, wander=0.3):
    """(location, multiplicity) of the root of q near z0, or None.

    Tries multiplicities from the degree down: a root of multiplicity m is a
    simple zero of the (m-1)-th derivative, so refining there and confirming
    with multiplicity_at pins both the location and the order.
    """
    derivs = [q]
    for _ in range(max(q.degree, 1)):
        derivs.append(derivs[-1].derivative())
    leash = wander * (1.0 + abs(z0))
    for m in range(q.degree, 0, -1):
        z = _plain_newton(derivs[m - 1], derivs[m], z0, leash=leash)
        if not (np.isfinite(z.real) and np.isfinite(z.imag)):
            continue
        if multiplicity_at(q, z) == m:
            return z, m
    return None


def scan_roots(q, rect, grid=0.01, rel_cut=1e-2, cluster=0.05):
    """Distinct (location, multiplicity) pairs of the roots of q in rect."""
    qp = q.derivative()
    qpp = qp.derivative()
    xs = np.arange(rect.re_min, rect.re_max + grid / 2.0, grid)
    ys = np.arange(rect.im_min, rect.im_max + grid / 2.0, grid)

    seeds = {}
    block = max(1, int(4.0e5 / max(ys.size, 1)))
    for lo in range(0, xs.size, block):
        X = xs[lo : lo + block]
        Z = X[None, :] + 1j * ys[:, None]
        rel = np.abs(q.eval_array(Z)) / np.maximum(q.magnitude_scale_array(Z), 1e-300)
        hits = Z[rel < rel_cut]
        for z in hits:
            key = (round(z.real / cluster), round(z.imag / cluster))
            seeds.setdefault(key, complex(z))

    polished = []
    for z0 in seeds.values():
        z = newton_on_ratio(q, qp, qpp, z0)
        if not (np.isfinite(z.real) and np.isfinite(z.imag)):
            continue
        if abs(q(z)) <= 1e-10 * q.magnitude_scale(z):
            polished.append(z)

    # merge the cancellation-plateau cloud around each root
    reps = []
    for z in sorted(polished, key=lambda w: (w.real, w.imag)):
        if all(abs(z - r) > cluster for r in reps):
            reps.append(z)

    roots = {}
    for z0 in reps:
        resolved = resolve_root(q, z0)
        if resolved is None:
            continue
        z, m = resolved
        if not (rect.re_min < z.real < rect.re_max and rect.im_min < z.imag < rect.im_max):
            continue
        roots[(round(z.real, 6), round(z.imag, 6))] = (z, m)
    return list(roots.values())


def scan_count(q, rect, grid=0.01):
    """Brute-force root count with multiplicity inside rect."""
    return sum(m for _, m in scan_roots(q, rect, grid=grid))
