"""Semi-classical dynamics of the driven 4-level system.

Level scheme: two stable ground states |1>, |2> and two excited states
|3>, |4>.  The sigma+ circular component couples 1<->4 and the sigma-
component couples 2<->3.  Each excited state decays at a total rate
2*gamma, feeding both ground states at gamma each, so optical coherences
relax at gamma.  With gamma = 1 the coherent part of the dynamics is
fixed by the two complex Rabi-scale amplitudes Omega+- = g <a+-> and the
common detuning Delta.

This module provides the steady state of those equations in closed
form, the Liouvillian (used by the tests as a brute-force time-domain
oracle and by :mod:`psrsim.fluct` for the noise correlators), the
adiabatic mean-field propagation through the cell, and the
single-velocity-class self-rotation parameter Gl.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .core import DriveParams, EnsembleParams, NumericalError

#: Sign convention for Gl.  The medium's linear response kappa(0) has
#: Im kappa(0) < 0 for Delta > 0; figures and fits use the convention
#: that Gl is positive at positive detuning, hence the extra sign here.
PSR_SIGN = +1.0


def sigma_op(i: int, j: int) -> np.ndarray:
    """|i><j| on the 4-level space, 1-based labels."""
    m = np.zeros((4, 4), dtype=complex)
    m[i - 1, j - 1] = 1.0
    return m


def hamiltonian(omega_plus: complex, omega_minus: complex,
                detuning: float) -> np.ndarray:
    """Rotating-frame Hamiltonian (units of hbar*gamma)."""
    h = detuning * (sigma_op(3, 3) + sigma_op(4, 4))
    h -= omega_plus * sigma_op(4, 1) + np.conj(omega_plus) * sigma_op(1, 4)
    h -= omega_minus * sigma_op(3, 2) + np.conj(omega_minus) * sigma_op(2, 3)
    return h


def jump_operators() -> list[np.ndarray]:
    """Four independent decay channels, each at rate gamma = 1."""
    return [sigma_op(g, e) for e in (3, 4) for g in (1, 2)]


def liouvillian(omega_plus: complex, omega_minus: complex,
                detuning: float) -> np.ndarray:
    """16x16 generator L with vec(rho_dot) = L vec(rho) (row-major vec)."""
    h = hamiltonian(omega_plus, omega_minus, detuning)
    eye = np.eye(4)
    L = -1j * (np.kron(h, eye) - np.kron(eye, h.T))
    for j in jump_operators():
        jdj = j.conj().T @ j
        L += np.kron(j, j.conj()) - 0.5 * (np.kron(jdj, eye)
                                           + np.kron(eye, jdj.T))
    return L


def adjoint_dissipator(x: np.ndarray) -> np.ndarray:
    """Dissipative part of the Heisenberg-picture generator on operator x."""
    out = np.zeros((4, 4), dtype=complex)
    for j in jump_operators():
        jd = j.conj().T
        out += jd @ x @ j - 0.5 * (jd @ j @ x + x @ jd @ j)
    return out


@dataclass(frozen=True)
class SteadyState:
    """Stationary populations and optical coherences.

    ``coh_14`` is <sigma_14> (ground-excited coherence of the sigma+
    transition), ``coh_23`` the sigma- one.  Populations sum to 1.
    """

    populations: tuple[float, float, float, float]
    coh_14: complex
    coh_23: complex

    def density_matrix(self) -> np.ndarray:
        rho = np.diag(self.populations).astype(complex)
        # rho_ij = <sigma_ji>
        rho[3, 0] = self.coh_14
        rho[0, 3] = np.conj(self.coh_14)
        rho[2, 1] = self.coh_23
        rho[1, 2] = np.conj(self.coh_23)
        return rho


def steady_state(ens: EnsembleParams, drive_plus: complex,
                 drive_minus: complex, detuning: float) -> SteadyState:
    """Stationary solution of the optical Bloch equations.

    ``drive_plus``/``drive_minus`` are the mean circular amplitudes
    <a+->; the Rabi scales are Omega+- = g <a+-> with g from ``ens``.
    With both drives off the stationary manifold is degenerate and the
    unpolarized convention pop1 = pop2 = 1/2 is returned.  With only
    one drive on, optical pumping empties the driven ground state into
    the undriven one.
    """
    if not (np.isfinite(drive_plus) and np.isfinite(drive_minus)
            and math.isfinite(detuning)):
        raise NumericalError("non-finite steady-state inputs",
                             {"a_plus": drive_plus, "a_minus": drive_minus,
                              "detuning": detuning})
    g = ens.coupling_normalized
    om_p = g * complex(drive_plus)
    om_m = g * complex(drive_minus)
    den = 1.0 + detuning**2
    sp = abs(om_p) ** 2 / den
    sm = abs(om_m) ** 2 / den
    if sp == 0.0 and sm == 0.0:
        pops = (0.5, 0.5, 0.0, 0.0)
    elif sm == 0.0:
        pops = (0.0, 1.0, 0.0, 0.0)
    elif sp == 0.0:
        pops = (1.0, 0.0, 0.0, 0.0)
    else:
        # excited populations are equal in steady state; the ground
        # populations balance the per-transition pump rates
        t = 1.0 / ((1.0 + sp) / sp + (1.0 + sm) / sm + 2.0)
        pops = (t * (1.0 + sp) / sp, t * (1.0 + sm) / sm, t, t)
    coh_14 = 1j * om_p * (pops[0] - pops[3]) / (1.0 + 1j * detuning)
    coh_23 = 1j * om_m * (pops[1] - pops[2]) / (1.0 + 1j * detuning)
    return SteadyState(populations=pops, coh_14=coh_14, coh_23=coh_23)


def symmetric_steady_state(ens: EnsembleParams,
                           drive: DriveParams) -> SteadyState:
    """Steady state for the linearly polarized drive of intensity I_x.

    The two circular Rabi scales are Omega and -Omega with
    Omega = sqrt(I_x/2); this is the stationary point the fluctuation
    analysis linearizes around.
    """
    g = ens.coupling_normalized
    if g == 0.0:
        raise NumericalError("coupling g = 0: cannot form drive amplitudes",
                             {"cooperativity": ens.cooperativity})
    om = math.sqrt(drive.intensity / 2.0)
    return steady_state(ens, om / g, -om / g, drive.detuning)


@dataclass(frozen=True)
class FieldState:
    """Mean circular field amplitudes <a+>, <a-> at one position."""

    amp_plus: complex
    amp_minus: complex

    @classmethod
    def from_intensity(cls, ens: EnsembleParams, intensity: float,
                       ellipticity: float = 0.0) -> "FieldState":
        """Elliptical input with I_x = |g a_x|^2 split over sigma+-.

        The circular intensities are I_x (1 -+ sin 2eps)/2; the
        relative sign between the amplitudes matches the convention of
        the fluctuation analysis.
        """
        g = ens.coupling_normalized
        if g == 0.0:
            raise NumericalError("coupling g = 0", {})
        i_plus = intensity * (1.0 - math.sin(2.0 * ellipticity)) / 2.0
        i_minus = intensity * (1.0 + math.sin(2.0 * ellipticity)) / 2.0
        return cls(amp_plus=math.sqrt(i_plus) / g,
                   amp_minus=-math.sqrt(i_minus) / g)

    def total_intensity(self, ens: EnsembleParams) -> float:
        g = ens.coupling_normalized
        return g * g * (abs(self.amp_plus) ** 2 + abs(self.amp_minus) ** 2)


def propagate_mean_field(ens: EnsembleParams, field: FieldState,
                         detuning: float, rtol: float = 1e-8
                         ) -> tuple[FieldState, float]:
    """Adiabatic mean-field propagation through the cell.

    At each position the atoms are taken in the steady state of the
    local field, and d<a+>/dz = i (g N l / c) <sigma_14> (mirror for
    <a->), with z in cell-length units.  Returns the output field and
    the transmission T in [0, 1].
    """
    if not (np.isfinite(field.amp_plus) and np.isfinite(field.amp_minus)):
        raise NumericalError("non-finite input field",
                             {"a_plus": field.amp_plus,
                              "a_minus": field.amp_minus})
    g = ens.coupling_normalized
    pref = 1j * ens.cooperativity / g if g > 0 else 0.0

    def rhs(_z, y):
        st = steady_state(ens, y[0], y[1], detuning)
        return [pref * st.coh_14, pref * st.coh_23]

    y0 = np.array([field.amp_plus, field.amp_minus], dtype=complex)
    p_in = abs(y0[0]) ** 2 + abs(y0[1]) ** 2
    if p_in == 0.0 or ens.cooperativity == 0.0:
        return field, 1.0
    sol = solve_ivp(rhs, (0.0, 1.0), y0, method="RK45",
                    rtol=rtol, atol=rtol * math.sqrt(p_in) * 1e-3)
    if not sol.success:
        raise NumericalError(f"mean-field integration failed: {sol.message}",
                             {"detuning": detuning,
                              "cooperativity": ens.cooperativity})
    out = FieldState(amp_plus=sol.y[0, -1], amp_minus=sol.y[1, -1])
    t = (abs(out.amp_plus) ** 2 + abs(out.amp_minus) ** 2) / p_in
    return out, float(min(max(t, 0.0), 1.0))


def kappa_zero(ens: EnsembleParams, drive: DriveParams) -> complex:
    """Zero-sideband response kappa(0) = C/(2(1 + i Delta)(1 + s))."""
    s = drive.saturation
    return ens.cooperativity / (2.0 * (1.0 + 1j * drive.detuning)) / (1.0 + s)


def psr_gl_single_class(ens: EnsembleParams, drive: DriveParams) -> float:
    """Self-rotation parameter Gl of one velocity class.

    Gl is the imaginary part of kappa(0) with the sign fixed by
    :data:`PSR_SIGN` so that Gl > 0 at positive detuning.  Its maximum
    over detuning at fixed intensity sits at Delta^2 = gamma^2 + I_x.
    """
    return -PSR_SIGN * kappa_zero(ens, drive).imag
