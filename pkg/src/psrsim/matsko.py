"""Phenomenological cross-phase rotation model of the orthogonal vacuum mode.

The medium is reduced to two numbers: a rotation strength Gl (the
self-rotation per unit ellipticity accumulated over the cell) and an
intensity absorption alpha*l.  The output variance of the orthogonally
polarized mode as a function of the homodyne phase chi is

    V(chi) = (1 - 2 Gl sin(chi) cos(chi) + Gl^2 cos^2(chi)) e^{-alpha l}
             + (1 - e^{-alpha l})

with the quantum noise limit at 1.  For suitable chi this dips below 1,
which is the squeezing this model predicts; the full Langevin treatment
in :mod:`psrsim.fluct` shows what atomic noise does to that prediction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .core import ValidationError, _require


@dataclass(frozen=True)
class PhenomenologicalParams:
    """Rotation strength Gl, intensity absorption alpha*l and phase chi."""

    rotation_strength: float
    absorption: float = 0.0
    phase: float = 0.0

    def __post_init__(self):
        _require(self.absorption >= 0, "absorption", "must be >= 0")


def psr_angle(g_l: float, ellipticity: float) -> float:
    """Self-rotation angle of the polarization ellipse: phi = Gl * epsilon."""
    return g_l * ellipticity


def variance(params: PhenomenologicalParams) -> float:
    """Output quadrature variance at phase chi, QNL = 1."""
    g, chi, al = params.rotation_strength, params.phase, params.absorption
    bare = 1.0 - 2.0 * g * math.sin(chi) * math.cos(chi) \
        + g * g * math.cos(chi) ** 2
    return bare * math.exp(-al) + (1.0 - math.exp(-al))


def variance_extrema(g_l: float, alpha_l: float = 0.0) -> tuple[float, float]:
    """(min, max) of the variance over chi, in closed form.

    The chi-dependence is 1 + Gl^2/2 + R cos(2 chi + psi) with
    R = |Gl| sqrt(1 + Gl^2/4), so the extrema are analytic.
    """
    r = abs(g_l) * math.sqrt(1.0 + g_l * g_l / 4.0)
    base = 1.0 + g_l * g_l / 2.0
    att = math.exp(-alpha_l)
    lost = 1.0 - att
    return (base - r) * att + lost, (base + r) * att + lost


def optimal_phase(g_l: float, alpha_l: float = 0.0) -> tuple[float, float]:
    """Phase chi* minimizing the variance, and the minimum itself.

    Raises for Gl = 0, where the variance is flat and no optimum exists.
    """
    if g_l == 0.0:
        raise ValidationError("rotation_strength",
                              "variance is flat at Gl = 0; no optimal phase")
    # V - base = A cos(2chi) + B sin(2chi) = R cos(2chi - psi),
    # A = Gl^2/2, B = -Gl, psi = atan2(B, A); minimum at 2chi = pi + psi
    psi = math.atan2(-g_l, g_l * g_l / 2.0)
    chi_star = ((math.pi + psi) / 2.0) % math.pi
    v_min, _ = variance_extrema(g_l, alpha_l)
    return chi_star, v_min


def min_variance_db(g_l: float, alpha_l: float = 0.0) -> float:
    """Minimum variance in dB relative to the QNL (negative = squeezing)."""
    v_min, _ = variance_extrema(g_l, alpha_l)
    return 10.0 * math.log10(v_min)


def rotation_strength_for_db(target_db: float, alpha_l: float = 0.0,
                             bracket: tuple[float, float] = (1e-6, 1e3)
                             ) -> float:
    """Smallest Gl whose optimal-phase variance reaches ``target_db``.

    Bisection on the closed-form minimum; the minimum decreases
    monotonically with Gl at fixed absorption.
    """
    lo, hi = bracket
    if min_variance_db(hi, alpha_l) > target_db:
        raise ValidationError("rotation_strength",
                              f"target {target_db} dB unreachable in bracket")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if min_variance_db(mid, alpha_l) > target_db:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
