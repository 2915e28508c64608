"""Simultaneous polynomial root finding at arbitrary precision.

Aberth-Ehrlich iteration on ``gmpy2.mpc`` values, seeded by double-precision
companion-matrix eigenvalues when the coefficients fit in a double.  Close
approximations are merged into clusters (multiple roots) and each cluster
centre is polished with Newton's method on the appropriate derivative.
"""

from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass

import gmpy2
import numpy as np
from gmpy2 import mpc

from .numerics import ToleranceContext

__all__ = ["Root", "RootFindingError", "find_roots", "residual"]

log = logging.getLogger(__name__)


class RootFindingError(ArithmeticError):
    def __init__(self, message: str, residuals: list[float]):
        super().__init__(message)
        self.residuals = residuals


@dataclass(frozen=True)
class Root:
    value: object
    multiplicity: int
    residual: float


def _horner2(coeffs: list, x):
    p = coeffs[-1]
    dp = 0
    for c in reversed(coeffs[:-1]):
        dp = dp * x + p
        p = p * x + c
    return p, dp


def _real_horner(abs_coeffs: list, r):
    acc = 0
    for c in reversed(abs_coeffs):
        acc = acc * r + c
    return acc


def _scale(coeffs: list, x) -> float:
    r = abs(x)
    acc = 0
    for c in reversed(coeffs):
        acc = acc * r + abs(c)
    return float(acc)


def residual(coeffs: list, x) -> float:
    """``|p(x)| / sum |a_k| |x|^k``, the backward-error style residual."""
    p, _ = _horner2(coeffs, x)
    s = _scale(coeffs, x)
    return float(abs(p)) / s if s else float(abs(p))


def _initial_guesses(coeffs: list) -> list[complex]:
    n = len(coeffs) - 1
    try:
        desc = np.array([complex(c) for c in reversed(coeffs)], dtype=complex)
        if np.all(np.isfinite(desc)) and desc[0] != 0:
            guesses = list(np.roots(desc))
            if len(guesses) == n and all(cmath.isfinite(g) for g in guesses):
                return _separate(guesses)
    except (OverflowError, ValueError, np.linalg.LinAlgError):
        pass
    # circle of radius from the Fujiwara bound, with an irrational phase
    lead = abs(complex(coeffs[-1]))
    radius = max(
        (2 * (abs(complex(coeffs[n - k])) / lead) ** (1.0 / k) for k in range(1, n + 1)),
        default=1.0,
    )
    return [radius * cmath.exp(1j * (2 * math.pi * k / n + 0.4)) for k in range(n)]


def _separate(guesses: list[complex]) -> list[complex]:
    seen = set()
    out = []
    for k, g in enumerate(guesses):
        key = (round(g.real, 12), round(g.imag, 12))
        if key in seen:
            g = g + 1e-6 * cmath.exp(1j * (k + 0.5))
        seen.add(key)
        out.append(g)
    return out


def _aberth(coeffs: list, z: list, tol, max_iter: int) -> tuple[list, bool]:
    """Gauss-Seidel style Aberth sweeps.

    An approximation is frozen once its correction is below ``tol`` or its
    value is within rounding error of a root (backward residual below
    ``tol``), whichever comes first.
    """
    n = len(z)
    done = [False] * n
    abs_coeffs = [abs(c) for c in coeffs]
    for _ in range(max_iter):
        moved = False
        for i in range(n):
            if done[i]:
                continue
            zi = z[i]
            p, dp = _horner2(coeffs, zi)
            if p == 0 or abs(p) <= tol * _real_horner(abs_coeffs, abs(zi)):
                done[i] = True
                continue
            s = 0
            for j in range(n):
                if j != i:
                    diff = zi - z[j]
                    if diff != 0:
                        s += 1 / diff
            denom = dp - p * s
            step = p / denom if denom != 0 else p
            z[i] = zi - step
            if abs(step) <= tol * max(1, abs(z[i])):
                done[i] = True
            else:
                moved = True
        if not moved:
            return z, True
    return z, False


def _cluster(z: list, radius) -> list[list]:
    groups: list[list] = []
    for x in z:
        for g in groups:
            if any(abs(x - y) <= radius for y in g):
                g.append(x)
                break
        else:
            groups.append([x])
    # merge groups that became linked transitively
    merged = True
    while merged:
        merged = False
        for a in range(len(groups)):
            for b in range(a + 1, len(groups)):
                if any(abs(x - y) <= radius for x in groups[a] for y in groups[b]):
                    groups[a].extend(groups.pop(b))
                    merged = True
                    break
            if merged:
                break
    return groups


def _derivative(coeffs: list, k: int) -> list:
    out = list(coeffs)
    for _ in range(k):
        out = [j * c for j, c in enumerate(out) if j]
    return out


def _newton_polish(coeffs: list, x, tol, steps: int = 60):
    for _ in range(steps):
        p, dp = _horner2(coeffs, x)
        if p == 0 or dp == 0:
            break
        step = p / dp
        x = x - step
        if abs(step) <= tol * max(1, abs(x)):
            break
    return x


def _sort_key(r: Root):
    v = r.value
    return (round(float(v.real), 12), round(float(v.imag), 12))


def find_roots(poly_coeffs, ctx: ToleranceContext, max_iter: int = 1000) -> list[Root]:
    """All roots of ``sum(poly_coeffs[k] x^k)`` with multiplicities.

    Roots are sorted lexicographically by (real, imaginary) part.  Raises
    :class:`RootFindingError` if some root's residual exceeds ``eps_root``.
    """
    ctx = ctx.as_float()
    with ctx.working():
        coeffs = [ctx.coerce(c) for c in poly_coeffs]
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        n = len(coeffs) - 1
        if n < 1:
            raise ValueError("need a nonconstant polynomial")
        roots: list[Root] = []
        zero_mult = 0
        while coeffs[zero_mult] == 0:
            zero_mult += 1
        if zero_mult:
            roots.append(Root(mpc(0), zero_mult, 0.0))
        work = coeffs[zero_mult:]
        if len(work) > 1:
            lead = work[-1]
            monic = [c / lead for c in work]
            z = [mpc(g) for g in _initial_guesses(monic)]
            tol = gmpy2.mpfr(2) ** (-(ctx.precision_bits - 8))
            z, converged = _aberth(monic, z, tol, max_iter)
            if not converged:
                log.debug("Aberth iteration hit the cap at degree %d", len(monic) - 1)
            radius = gmpy2.mpfr(2) ** (-(ctx.precision_bits // 8))
            for group in _cluster(z, radius):
                m = len(group)
                centre = sum(group, mpc(0)) / m
                polished = _newton_polish(_derivative(monic, m - 1), centre, tol)
                if abs(polished - centre) <= radius:
                    centre = polished
                roots.append(Root(centre, m, residual(monic, centre)))
        bad = [r.residual for r in roots if r.residual > ctx.eps_root]
        if bad:
            raise RootFindingError(
                f"{len(bad)} root(s) above residual threshold {ctx.eps_root:g}",
                [r.residual for r in roots],
            )
        if sum(r.multiplicity for r in roots) != n:
            raise RootFindingError("multiplicities do not add up to the degree", [r.residual for r in roots])
    return sorted(roots, key=_sort_key)
