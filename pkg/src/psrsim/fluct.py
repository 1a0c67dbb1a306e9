"""Quadrature noise of the orthogonally polarized vacuum mode.

Linearizing the Bloch-Maxwell system around the symmetric steady state
gives a closed 2x2 propagation equation for the sideband fluctuations
(da_y, da_y^dag) of the y-polarized vacuum mode,

    d(da_y)/dz = -Gamma(w) da_y + kappa(w) (da_y - da_y^dag) + F_y ,

with z in cell lengths.  kappa(w) = kappa(0) Lambda(w) is the
cross-Kerr coupling, Gamma(w) collects the transit phase, kappa(w) and
the dephasing/absorption term kappa(0)* Lambda'(w).  F_y is the atomic
Langevin source, a fixed frequency-dependent combination of the
coherence noises f_y = (F_14 + F_23)/sqrt(2), their adjoints, and the
population-difference noises f_z = (F_22 - F_11)/sqrt(2),
f_z' = (F_44 - F_33)/sqrt(2).

Second moments are transported deterministically: the 2x2 sideband
covariance obeys a linear equation with a source given by the atomic
diffusion matrix (generalized Einstein relations evaluated in the
steady state), scaled by the cooperativity.  Output quadrature spectra
are QNL-normalized; commutator preservation ([da_y, da_y^dag] = 1 at
the output) holds identically and is exposed as a diagnostic.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.linalg import expm

from . import bloch
from .core import DriveParams, EnsembleParams, NumericalError, ValidationError

# noise basis order used throughout: (f_y, f_y^dag, f_z, f_z')
FY, FYD, FZ, FZP = 0, 1, 2, 3

_SIGMA_BASIS = [(1, 4), (2, 3), (4, 1), (3, 2), (1, 1), (2, 2), (3, 3), (4, 4)]

# rows: f_y, f_y^dag, f_z, f_z' as combinations of the sigma-basis noises
_R2 = 1.0 / math.sqrt(2.0)
_COMBINE = np.zeros((4, 8))
_COMBINE[FY, 0] = _R2
_COMBINE[FY, 1] = _R2
_COMBINE[FYD, 2] = _R2
_COMBINE[FYD, 3] = _R2
_COMBINE[FZ, 5] = _R2
_COMBINE[FZ, 4] = -_R2
_COMBINE[FZP, 7] = _R2
_COMBINE[FZP, 6] = -_R2


def _denominator(intensity: float, detuning: float, omega: float) -> complex:
    w, de = omega, detuning
    return (2.0 * intensity * (1.0 - 1j * w) ** 2
            - 1j * w * (2.0 - 1j * w) * ((1.0 - 1j * w) ** 2 + de * de))


def _lambda(intensity: float, detuning: float, omega: float) -> complex:
    if omega == 0.0:
        return 1.0 + 0.0j
    d = _denominator(intensity, detuning, omega)
    if d == 0.0:
        raise NumericalError("response pole: D(omega) = 0",
                             {"intensity": intensity, "detuning": detuning,
                              "omega": omega})
    return intensity * (1.0 - 1j * omega) * (2.0 - 1j * omega) / d


def _lambda_prime(intensity: float, detuning: float, omega: float) -> complex:
    if omega == 0.0:
        return 0.0 + 0.0j
    w, de = omega, detuning
    d = _denominator(intensity, de, w)
    if d == 0.0:
        raise NumericalError("response pole: D(omega) = 0",
                             {"intensity": intensity, "detuning": detuning,
                              "omega": omega})
    num = (intensity * (1.0 - 1j * w)
           - (1.0 - 1j * de) * (1.0 - 1j * de - 1j * w) * (2.0 - 1j * w))
    return 1j * w * num / d


@dataclass(frozen=True)
class ComplexResponse:
    """Propagation coefficients at one sideband frequency."""

    omega: float
    kappa: complex
    gamma_prop: complex
    lam: complex
    lam_prime: complex
    kappa0: complex


def response(ens: EnsembleParams, drive: DriveParams,
             omega: float) -> ComplexResponse:
    """kappa(0), Lambda, Lambda', kappa(w), Gamma(w) at sideband w >= 0.

    Gamma includes the pure transit phase -i w gamma l / c.  At w = 0
    the continuity values Lambda = 1, Lambda' = 0 are used (they are
    forced by the formulas whenever I_x > 0).
    """
    if omega < 0:
        raise ValidationError("omega", "must be >= 0")
    k0 = bloch.kappa_zero(ens, drive)
    lam = _lambda(drive.intensity, drive.detuning, omega)
    lamp = _lambda_prime(drive.intensity, drive.detuning, omega)
    kap = k0 * lam
    gam = -1j * omega * ens.transit_time + kap + np.conj(k0) * lamp
    return ComplexResponse(omega=omega, kappa=kap, gamma_prop=gam,
                           lam=lam, lam_prime=lamp, kappa0=k0)


@dataclass(frozen=True)
class LangevinCoeffs:
    """Rational coefficients A, B and their common denominator D."""

    a_coef: complex
    b_coef: complex
    d_denom: complex


def langevin_coeffs(ens: EnsembleParams, drive: DriveParams,
                    omega: float) -> LangevinCoeffs:
    """A(w), B(w), D(w) of the Langevin source decomposition.

    A multiplies the coherence noise together with B; B alone couples
    the adjoint coherence noise.  A(0) = 0 and B(0) = 1/(2 gamma).
    """
    w, de, ix = omega, drive.detuning, drive.intensity
    d = _denominator(ix, de, w)
    if d == 0.0:
        raise NumericalError("Langevin coefficient pole: D(omega) = 0",
                             {"intensity": ix, "detuning": de, "omega": w})
    a = (1.0 - 1j * de - 1j * w) * (-1j * w) * (2.0 - 1j * w) / d
    b = ix * (1.0 - 1j * w) / d
    return LangevinCoeffs(a_coef=a, b_coef=b, d_denom=d)


def _source_row(drive: DriveParams, omega: float) -> np.ndarray:
    """Coefficients of (f_y, f_y^dag, f_z, f_z') in F_y, any real omega.

    These follow from eliminating the atomic fluctuations in favour of
    the field; the population-noise coefficients are finite at w = 0
    because A carries an overall factor of w.  (The f_z weight is
    -i sqrt(I_x/2) A/(-i w): commutator preservation of the propagated
    field pins both its sign and its magnitude.)
    """
    w, de, ix = omega, drive.detuning, drive.intensity
    d = _denominator(ix, de, w)
    if d == 0.0:
        raise NumericalError("Langevin source pole: D(omega) = 0",
                             {"intensity": ix, "detuning": de, "omega": w})
    a = (1.0 - 1j * de - 1j * w) * (-1j * w) * (2.0 - 1j * w) / d
    b = ix * (1.0 - 1j * w) / d
    a_red = (1.0 - 1j * de - 1j * w) * (2.0 - 1j * w) / d  # A / (-i w)
    om = math.sqrt(ix / 2.0)
    row = np.empty(4, dtype=complex)
    row[FY] = a + b
    row[FYD] = b
    row[FZ] = -1j * om * a_red
    row[FZP] = -1j * om * a / (2.0 - 1j * w)
    return row


def _source_rows_pair(drive: DriveParams, omega: float) -> np.ndarray:
    """2x4 coefficient matrix for (F_y, F_y^dag) over the noise basis."""
    r1 = _source_row(drive, omega)
    r1m = _source_row(drive, -omega)
    r2 = np.array([np.conj(r1m[FYD]), np.conj(r1m[FY]),
                   np.conj(r1m[FZ]), np.conj(r1m[FZP])])
    return np.vstack([r1, r2])


@dataclass(frozen=True)
class DiffusionMatrix:
    """Atomic noise correlators in the basis (f_y, f_y^dag, f_z, f_z').

    ``gram[i, j]`` is the spectral density of <f_i f_j^dag> (Hermitian,
    positive semidefinite); ``ordered[i, j]`` the density of the plain
    ordered product <f_i f_j>, which is what the covariance transport
    consumes.  Per-atom normalization, gamma = 1 units.
    """

    gram: np.ndarray
    ordered: np.ndarray

    def __post_init__(self):
        herm = np.abs(self.gram - self.gram.conj().T).max()
        if herm > 1e-10:
            raise NumericalError(f"diffusion table not Hermitian ({herm:.2e})")
        eigs = np.linalg.eigvalsh(0.5 * (self.gram + self.gram.conj().T))
        if eigs.min() < -1e-10:
            raise NumericalError(
                f"diffusion table not positive semidefinite "
                f"(min eigenvalue {eigs.min():.2e})")

    def excess(self) -> np.ndarray:
        """Ordered table with creation noises moved left (normal order).

        Only the <f_y f_y^dag> entry is anti-normal; swapping it leaves
        the excess (fluorescence-fed) correlators, which all vanish
        when the excited states are empty.
        """
        out = self.ordered.copy()
        out[FY, FYD] = self.ordered[FYD, FY]
        return out


def diffusion(ens: EnsembleParams, drive: DriveParams) -> DiffusionMatrix:
    """Diffusion matrix from generalized Einstein relations.

    For operator pairs (P, Q) the white-noise density of <F_P F_Q> is
    <D+(PQ) - D+(P)Q - P D+(Q)> in the steady state, with D+ the
    dissipative part of the Heisenberg generator (the Hamiltonian part
    cancels identically).  Evaluated at the symmetric working point of
    the fluctuation analysis.
    """
    st = bloch.symmetric_steady_state(ens, drive)
    rho = st.density_matrix()
    ops = [bloch.sigma_op(i, j) for (i, j) in _SIGMA_BASIS]
    n = len(ops)
    d8 = np.empty((n, n), dtype=complex)
    diss = [bloch.adjoint_dissipator(p) for p in ops]
    for a in range(n):
        for b in range(n):
            term = (bloch.adjoint_dissipator(ops[a] @ ops[b])
                    - diss[a] @ ops[b] - ops[a] @ diss[b])
            d8[a, b] = np.trace(rho @ term)
    ordered = _COMBINE @ d8 @ _COMBINE.T
    dag = [FYD, FY, FZ, FZP]
    gram = np.array([[ordered[i, dag[j]] for j in range(4)]
                     for i in range(4)])
    return DiffusionMatrix(gram=gram, ordered=ordered)


def noise_inflow(ens: EnsembleParams, drive: DriveParams, omega: float,
                 diff: DiffusionMatrix | None = None) -> np.ndarray:
    """2x2 source density N_ij(w) feeding the sideband covariance."""
    if ens.cooperativity == 0.0:
        return np.zeros((2, 2), dtype=complex)
    if diff is None:
        diff = diffusion(ens, drive)
    rows_w = _source_rows_pair(drive, omega)
    rows_mw = _source_rows_pair(drive, -omega)
    return ens.cooperativity * (rows_w @ diff.ordered @ rows_mw.T)


def _drift(ens: EnsembleParams, drive: DriveParams, omega: float,
           truncate_dephasing: bool = False) -> np.ndarray:
    """2x2 drift matrix M(w) for (da_y, da_y^dag)."""
    k0 = bloch.kappa_zero(ens, drive)
    tbar = ens.transit_time

    def m11(w):
        if truncate_dephasing:
            return 1j * w * tbar
        return 1j * w * tbar - np.conj(k0) * _lambda_prime(
            drive.intensity, drive.detuning, w)

    def m12(w):
        return -k0 * _lambda(drive.intensity, drive.detuning, w)

    return np.array([[m11(omega), m12(omega)],
                     [np.conj(m12(-omega)), np.conj(m11(-omega))]])


def _transport(m_w: np.ndarray, m_mw: np.ndarray, src: np.ndarray,
               sigma0: np.ndarray) -> np.ndarray:
    """Solve dS/dz = M S + S Mm^T + src over z in [0, 1], constant coeffs."""
    k = np.kron(m_w, np.eye(2)) + np.kron(np.eye(2), m_mw)
    aug = np.zeros((5, 5), dtype=complex)
    aug[:4, :4] = k
    aug[:4, 4] = src.reshape(-1)
    e = expm(aug)
    out = e[:4, :4] @ sigma0.reshape(-1) + e[:4, 4]
    return out.reshape(2, 2)


def _sigma_out(ens: EnsembleParams, drive: DriveParams, omega: float,
               diff: DiffusionMatrix | None, include_noise: bool,
               truncate_dephasing: bool) -> np.ndarray:
    m_w = _drift(ens, drive, omega, truncate_dephasing)
    m_mw = _drift(ens, drive, -omega, truncate_dephasing)
    if include_noise and ens.cooperativity > 0.0:
        src = noise_inflow(ens, drive, omega, diff)
    else:
        src = np.zeros((2, 2), dtype=complex)
    sigma0 = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
    return _transport(m_w, m_mw, src, sigma0)


@dataclass(frozen=True)
class QuadratureSpectrum:
    """Quadrature variances S_theta(w), QNL-normalized.

    ``values[i, j]`` is S at ``omegas[i]``, ``thetas[j]``; the closed
    form extrema over theta are kept alongside.  ``low_omega`` flags
    frequencies below the reporting floor where the linearized model
    accumulates very large pumping noise.
    """

    omegas: np.ndarray
    thetas: np.ndarray
    values: np.ndarray
    s_min: np.ndarray
    s_max: np.ndarray
    low_omega: np.ndarray

    def __post_init__(self):
        if (self.values < -1e-9).any():
            raise NumericalError(
                f"negative quadrature variance ({self.values.min():.3e})")

    def to_db(self) -> np.ndarray:
        return 10.0 * np.log10(np.maximum(self.values, 1e-300))

    def min_db(self) -> np.ndarray:
        return 10.0 * np.log10(np.maximum(self.s_min, 1e-300))

    def max_db(self) -> np.ndarray:
        return 10.0 * np.log10(np.maximum(self.s_max, 1e-300))


def propagate_noise(ens: EnsembleParams, drive: DriveParams,
                    omega_grid, theta_grid, include_noise: bool = True,
                    truncate_dephasing: bool = False, deplete: bool = False,
                    omega_floor: float = 0.01) -> QuadratureSpectrum:
    """Output quadrature spectra S_theta(w) of the y-polarized vacuum.

    The input is vacuum (<da da^dag> = 1, all other moments zero); the
    Langevin sources act throughout the cell.  Spectra are symmetrized
    over +-w (what a spectrum analyzer reports).  ``include_noise``
    off drops the atomic sources; ``truncate_dephasing`` additionally
    reduces Gamma to its kappa part, leaving the bare cross-Kerr
    squeezing interaction.  ``deplete`` feeds the mean-field depletion
    of the drive along the cell into the coefficients (default keeps
    them constant, i.e. an undepleted drive).
    """
    omegas = np.atleast_1d(np.asarray(omega_grid, dtype=float))
    thetas = np.atleast_1d(np.asarray(theta_grid, dtype=float))
    if (omegas < 0).any():
        raise ValidationError("omega_grid", "sideband frequencies must be >= 0")
    diff = None
    if include_noise and ens.cooperativity > 0.0 and not deplete:
        diff = diffusion(ens, drive)

    values = np.empty((omegas.size, thetas.size))
    s_min = np.empty(omegas.size)
    s_max = np.empty(omegas.size)
    for i, w in enumerate(omegas):
        if deplete:
            sig_p = _sigma_out_depleted(ens, drive, w, include_noise,
                                        truncate_dephasing)
            sig_m = _sigma_out_depleted(ens, drive, -w, include_noise,
                                        truncate_dephasing)
        else:
            sig_p = _sigma_out(ens, drive, w, diff, include_noise,
                               truncate_dephasing)
            sig_m = _sigma_out(ens, drive, -w, diff, include_noise,
                               truncate_dephasing)
        iso = 0.5 * (sig_p[0, 1] + sig_p[1, 0] + sig_m[0, 1] + sig_m[1, 0])
        anom = 0.5 * (sig_p[1, 1] + sig_m[1, 1])
        if abs(iso.imag) > 1e-8 * max(1.0, abs(iso.real)):
            raise NumericalError(
                f"non-real quadrature variance (imag {iso.imag:.2e})",
                {"omega": w})
        s_theta = iso.real + 2.0 * np.real(np.exp(2j * thetas) * anom)
        values[i] = np.maximum(s_theta, 0.0)
        s_min[i] = max(iso.real - 2.0 * abs(anom), 0.0)
        s_max[i] = iso.real + 2.0 * abs(anom)
    return QuadratureSpectrum(omegas=omegas, thetas=thetas, values=values,
                              s_min=s_min, s_max=s_max,
                              low_omega=omegas < omega_floor)


def _sigma_out_depleted(ens: EnsembleParams, drive: DriveParams, omega: float,
                        include_noise: bool, truncate_dephasing: bool
                        ) -> np.ndarray:
    """Covariance transport with the drive intensity depleting along z."""
    field0 = bloch.FieldState.from_intensity(ens, drive.intensity,
                                             drive.ellipticity)
    g = ens.coupling_normalized
    pref = 1j * ens.cooperativity / g if g > 0 else 0.0

    def rhs(_z, y):
        a_p, a_m = y[0], y[1]
        st = bloch.steady_state(ens, a_p, a_m, drive.detuning)
        ix_loc = g * g * (abs(a_p) ** 2 + abs(a_m) ** 2)
        d_loc = DriveParams(intensity=ix_loc, detuning=drive.detuning,
                            ellipticity=drive.ellipticity)
        m_w = _drift(ens, d_loc, omega, truncate_dephasing)
        m_mw = _drift(ens, d_loc, -omega, truncate_dephasing)
        sig = y[2:].reshape(2, 2)
        dsig = m_w @ sig + sig @ m_mw.T
        if include_noise and ens.cooperativity > 0.0:
            dsig = dsig + noise_inflow(ens, d_loc, omega)
        return np.concatenate(([pref * st.coh_14, pref * st.coh_23],
                               dsig.reshape(-1)))

    y0 = np.concatenate(([field0.amp_plus, field0.amp_minus],
                         [0.0, 1.0, 0.0, 0.0])).astype(complex)
    sol = solve_ivp(rhs, (0.0, 1.0), y0, method="RK45", rtol=1e-8, atol=1e-10)
    if not sol.success:
        raise NumericalError(
            f"depleted noise transport failed: {sol.message}",
            {"omega": omega, "detuning": drive.detuning})
    return sol.y[2:, -1].reshape(2, 2)


def commutator_residual(ens: EnsembleParams, drive: DriveParams,
                        omega: float) -> float:
    """Max deviation of the output commutator matrix from its vacuum value.

    Transports the commutators of (da_y, da_y^dag) through the cell
    with the full diffusion; absorption loss is exactly compensated by
    the noise inflow, so the result is zero up to roundoff (amplified
    at strongly amplifying parameter points).
    """
    m_w = _drift(ens, drive, omega)
    m_mw = _drift(ens, drive, -omega)
    if ens.cooperativity > 0.0:
        diff = diffusion(ens, drive)
        n_w = noise_inflow(ens, drive, omega, diff)
        n_mw = noise_inflow(ens, drive, -omega, diff)
        src = n_w - n_mw.T
    else:
        src = np.zeros((2, 2), dtype=complex)
    c0 = np.array([[0.0, 1.0], [-1.0, 0.0]], dtype=complex)
    out = _transport(m_w, m_mw, src, c0)
    return float(np.abs(out - c0).max())


# ---------------------------------------------------------------------------
# limit regimes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LowSidebandLimit:
    """w << gamma evolution: pure two-mode coupling plus pumping noise."""

    coef_aydag: complex        # i delta0/(1+s) on da_y^dag
    noise_scale: float         # the C/(g l) pumping-noise scale
    note: str


def limit_low_sideband(ens: EnsembleParams,
                       drive: DriveParams) -> LowSidebandLimit:
    """Low-sideband evolution coefficients (Delta >> gamma).

    The y-mode couples to its adjoint with strength i delta0/(1+s);
    the accompanying optical-pumping noise scales at least like
    C/(g l), far above the QNL for cell-sized ensembles, which is why
    no squeezing survives at low analysis frequencies.
    """
    d0 = drive.linear_dephasing(ens)
    s = drive.saturation
    scale = ens.cooperativity / (ens.coupling * ens.cell_length) \
        if ens.coupling > 0 else float("inf")
    return LowSidebandLimit(
        coef_aydag=1j * d0 / (1.0 + s),
        noise_scale=scale,
        note="pumping noise scale ~ C/(g l); grows with optical depth")


@dataclass(frozen=True)
class HighSidebandLimit:
    """w >= gamma, Delta >> gamma response pair (kappa, Gamma)."""

    kappa: complex
    gamma_prop: complex
    kappa_compact: complex     # deep-limit form, w >> gamma
    gamma_compact: complex


def limit_high_sideband(ens: EnsembleParams, drive: DriveParams,
                        omega: float) -> HighSidebandLimit:
    """High-sideband (kappa, Gamma) in the far-detuned regime.

    ``kappa`` keeps the finite-w/gamma structure
    kappa(0) * s (1-iw)(2-iw) / (2 s (1-iw)^2 - iw(2-iw)); for
    w >> gamma it contracts to the compact
    -i delta0 s/((1+s)(1+2s)).  ``gamma_prop`` is exactly
    -i delta0/(1+s): the finite-w corrections cancel in Gamma.
    """
    d0 = drive.linear_dephasing(ens)
    s = drive.saturation
    w = omega
    e = 2.0 * s * (1.0 - 1j * w) ** 2 - 1j * w * (2.0 - 1j * w)
    k0 = bloch.kappa_zero(ens, drive)
    kap = k0 * s * (1.0 - 1j * w) * (2.0 - 1j * w) / e
    return HighSidebandLimit(
        kappa=kap,
        gamma_prop=-1j * d0 / (1.0 + s),
        kappa_compact=-1j * d0 * s / ((1.0 + s) * (1.0 + 2.0 * s)),
        gamma_compact=-1j * d0 / (1.0 + s))


@dataclass(frozen=True)
class KerrLimit:
    """Dispersive (Kerr) regime coefficients, Delta >> sqrt(I_x) >> gamma."""

    dephasing: complex         # i delta0 on da_y
    kerr_ay: complex           # -2 i delta0 s on da_y
    kerr_aydag: complex        # +i delta0 s on da_y^dag
    noise_scale: float         # ~ C gamma^2 / Delta^2
    in_regime: bool


def limit_kerr(ens: EnsembleParams, drive: DriveParams) -> KerrLimit:
    """Kerr-limit evolution coefficients.

    Linear dephasing i delta0, cross-Kerr -i delta0 s (2 da_y -
    da_y^dag) and a coherence-noise scale C gamma^2/Delta^2.  Squeezing
    becomes possible when delta0 s ~ 1 while the noise scale stays
    small, the cold-atom operating point.  Warns outside
    Delta >= 10 sqrt(I_x), sqrt(I_x) >= 10 gamma.
    """
    d0 = drive.linear_dephasing(ens)
    s = drive.saturation
    sq_ix = math.sqrt(drive.intensity)
    in_regime = abs(drive.detuning) >= 10.0 * sq_ix and sq_ix >= 10.0
    if not in_regime:
        warnings.warn("Kerr limit outside its validity gate "
                      "(need Delta >= 10 sqrt(I_x) >= 100 gamma)",
                      stacklevel=2)
    return KerrLimit(dephasing=1j * d0,
                     kerr_ay=-2j * d0 * s,
                     kerr_aydag=1j * d0 * s,
                     noise_scale=ens.cooperativity / drive.detuning**2,
                     in_regime=in_regime)


@dataclass(frozen=True)
class HighSaturationLimit:
    """I_x >> Delta^2 evolution coefficients at sideband w."""

    coef_ay: complex           # drift on da_y
    coef_aydag: complex        # coupling to da_y^dag
    compact: complex           # i delta0/(2s): the w >> gamma form of both
    noise_scale: float         # ~ C gamma^2 / w^2


def limit_high_saturation(ens: EnsembleParams, drive: DriveParams,
                          omega: float) -> HighSaturationLimit:
    """Saturated-regime coefficients (I_x >> Delta^2, w >= gamma).

    In the I_x -> infinity limit the response factorizes:
    coupling -kappa -> -kappa(0) (2-iw)/(2(1-iw)) and drift
    -> -kappa(0)^* iw/(2(1-iw)); both contract to i delta0/(2 s) for
    w >> gamma.  The accompanying pumping noise scales like
    C gamma^2 / w^2 >> 1 for cell-sized C, which is what forbids
    squeezing at all sideband frequencies in hot vapour.
    """
    d0 = drive.linear_dephasing(ens)
    s = drive.saturation
    w = omega
    k0 = bloch.kappa_zero(ens, drive)
    coef_aydag = -k0 * (2.0 - 1j * w) / (2.0 * (1.0 - 1j * w))
    coef_ay = -np.conj(k0) * 1j * w / (2.0 * (1.0 - 1j * w))
    scale = ens.cooperativity / omega**2 if omega > 0 else float("inf")
    return HighSaturationLimit(coef_ay=coef_ay, coef_aydag=coef_aydag,
                               compact=1j * d0 / (2.0 * s),
                               noise_scale=scale)
