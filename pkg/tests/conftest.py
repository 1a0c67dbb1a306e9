"""Shared test oracles: brute-force time integration and exact arithmetic."""

from __future__ import annotations

from fractions import Fraction

import numpy as np
from scipy.integrate import solve_ivp

from psrsim import bloch


def evolve_density_matrix(ens, a_plus, a_minus, detuning,
                          t_end=1000.0, method="expm"):
    """Time-domain integration of the Bloch equations (noise dropped).

    Starts from the unpolarized ground manifold and marches the full
    master equation to ``t_end`` (units of 1/gamma).  ``expm`` (default)
    takes exact fixed unit time steps with the matrix exponential of
    the constant generator; ``ivp`` uses an adaptive Runge-Kutta solver
    (slow at strong drives, used to cross-check the stepper).  Returns
    the 4x4 density matrix.
    """
    g = ens.coupling_normalized
    liou = bloch.liouvillian(g * complex(a_plus), g * complex(a_minus),
                             detuning)
    rho0 = np.diag([0.5, 0.5, 0.0, 0.0]).astype(complex).reshape(-1)
    if method == "expm":
        from scipy.linalg import expm
        steps = int(round(t_end))
        prop = expm(liou)  # one unit of gamma t per step
        rho = rho0
        for _ in range(steps):
            rho = prop @ rho
        return rho.reshape(4, 4)
    lre = np.block([[liou.real, -liou.imag], [liou.imag, liou.real]])
    y0 = np.concatenate([rho0.real, rho0.imag])
    sol = solve_ivp(lambda _t, y: lre @ y, (0.0, t_end), y0, method="DOP853",
                    rtol=1e-10, atol=1e-12)
    assert sol.success, sol.message
    yf = sol.y[:, -1]
    return (yf[:16] + 1j * yf[16:]).reshape(4, 4)


def oracle_steady_values(ens, a_plus, a_minus, detuning, **kw):
    """(populations, <sigma_14>, <sigma_23>) from the time-domain oracle."""
    rho = evolve_density_matrix(ens, a_plus, a_minus, detuning, **kw)
    pops = np.diag(rho).real
    return pops, rho[3, 0], rho[2, 1]


class QC:
    """Exact complex arithmetic over rationals, for formula oracles."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = Fraction(re)
        self.im = Fraction(im)

    def __add__(self, o):
        o = _qc(o)
        return QC(self.re + o.re, self.im + o.im)

    def __sub__(self, o):
        o = _qc(o)
        return QC(self.re - o.re, self.im - o.im)

    def __rsub__(self, o):
        return _qc(o) - self

    def __mul__(self, o):
        o = _qc(o)
        return QC(self.re * o.re - self.im * o.im,
                  self.re * o.im + self.im * o.re)

    def __truediv__(self, o):
        o = _qc(o)
        den = o.re * o.re + o.im * o.im
        if den == 0:
            raise ZeroDivisionError("exact pole")
        return QC((self.re * o.re + self.im * o.im) / den,
                  (self.im * o.re - self.re * o.im) / den)

    __radd__ = __add__
    __rmul__ = __mul__

    def to_complex(self):
        return complex(self.re) + 1j * complex(self.im)


def _qc(v):
    if isinstance(v, QC):
        return v
    return QC(v)


_I = QC(0, 1)


def exact_denominator(ix: Fraction, de: Fraction, w: Fraction) -> QC:
    one = QC(1)
    return (QC(2) * QC(ix) * (one - _I * QC(w)) * (one - _I * QC(w))
            - _I * QC(w) * (QC(2) - _I * QC(w))
            * ((one - _I * QC(w)) * (one - _I * QC(w)) + QC(de) * QC(de)))


def exact_lambda(ix, de, w) -> QC:
    one = QC(1)
    return (QC(ix) * (one - _I * QC(w)) * (QC(2) - _I * QC(w))
            / exact_denominator(ix, de, w))


def exact_lambda_prime(ix, de, w) -> QC:
    one = QC(1)
    num = (QC(ix) * (one - _I * QC(w))
           - (one - _I * QC(de)) * (one - _I * QC(de) - _I * QC(w))
           * (QC(2) - _I * QC(w)))
    return _I * QC(w) * num / exact_denominator(ix, de, w)


def exact_a_coef(ix, de, w) -> QC:
    one = QC(1)
    return ((one - _I * QC(de) - _I * QC(w)) * (QC(0) - _I * QC(w))
            * (QC(2) - _I * QC(w)) / exact_denominator(ix, de, w))


def exact_b_coef(ix, de, w) -> QC:
    one = QC(1)
    return QC(ix) * (one - _I * QC(w)) / exact_denominator(ix, de, w)
