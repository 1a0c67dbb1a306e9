"""Shared parameter types, unit conventions and validation.

Internal unit system: the coherence decay rate gamma is 1, all
frequencies (detuning, drive intensity as a squared Rabi scale,
sideband frequencies) are expressed in units of gamma, and positions
along the cell are measured in units of the cell length.  The quantum
noise limit is 1.

Laboratory quantities enter only through :func:`normalize_units`,
which converts a :class:`LabParams` record (SI units) into the
dimensionless :class:`EnsembleParams` / :class:`DriveParams` pair used
by every solver.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

C_LIGHT = 299_792_458.0          # m/s
HBAR = 1.054_571_817e-34         # J s
KB = 1.380_649e-23               # J/K
MASS_RB87 = 1.443_160_6e-25      # kg


class ValidationError(ValueError):
    """A parameter record violates its contract; carries the field name."""

    def __init__(self, field_name: str, message: str):
        self.field_name = field_name
        super().__init__(f"{field_name}: {message}")


class NumericalError(RuntimeError):
    """A solver failed; carries the parameter point that triggered it."""

    def __init__(self, message: str, point: dict | None = None):
        self.point = dict(point) if point else {}
        if self.point:
            message = f"{message} at {self.point}"
        super().__init__(message)


class DataError(ValueError):
    """Malformed measured-data input (CSV ingestion)."""


def _require(cond: bool, field_name: str, message: str) -> None:
    if not cond:
        raise ValidationError(field_name, message)


@dataclass(frozen=True)
class EnsembleParams:
    """Atomic-ensemble parameters.

    ``gamma`` is the working decay rate (1.0 after normalization);
    ``gamma_raw`` keeps the laboratory value in rad/s so lab-unit
    conversions (GHz detunings, transit phases) stay available.  The
    cooperativity is tied to the microscopic parameters through
    C = g^2 N l / (gamma_raw c), enforced at construction.
    """

    gamma: float = 1.0                 # working units (normalized to 1)
    cooperativity: float = 0.0         # C, dimensionless
    cell_length: float = 0.075         # l, metres
    density: float = 1.0e17            # n, atoms / m^3
    temperature: float = 300.0         # K
    coupling: float = 0.0              # g, rad/s
    atom_number: float = 0.0           # N
    gamma_raw: float = 1.0             # rad/s

    _REL_TOL = 1e-9

    def __post_init__(self):
        _require(self.gamma > 0, "gamma", "must be > 0")
        _require(self.cooperativity >= 0, "cooperativity", "must be >= 0")
        _require(self.cell_length > 0, "cell_length", "must be > 0")
        _require(self.density > 0, "density", "must be > 0")
        _require(self.temperature > 0, "temperature", "must be > 0")
        _require(self.gamma_raw > 0, "gamma_raw", "must be > 0")
        c_check = self.coupling**2 * self.atom_number * self.cell_length / (
            self.gamma_raw * C_LIGHT)
        scale = max(abs(self.cooperativity), abs(c_check), 1e-300)
        _require(abs(c_check - self.cooperativity) <= self._REL_TOL * scale,
                 "cooperativity",
                 f"inconsistent with g^2 N l/(gamma c) = {c_check!r}")

    @classmethod
    def from_cooperativity(cls, cooperativity: float, *, gamma_raw: float = 1.0,
                           cell_length: float = 0.075, density: float = 1.0e17,
                           temperature: float = 300.0,
                           beam_area: float | None = None) -> "EnsembleParams":
        """Build a consistent record from C alone.

        The atom number follows from density, cell length and beam
        area; the coupling g is then fixed by the cooperativity
        identity.  Convenient for theory work where only C matters.
        """
        if beam_area is None:
            beam_area = math.pi * (425e-6) ** 2
        n_atoms = density * beam_area * cell_length
        if cooperativity > 0:
            g = math.sqrt(cooperativity * gamma_raw * C_LIGHT /
                          (n_atoms * cell_length))
        else:
            g = 0.0
        return cls(gamma=1.0, cooperativity=cooperativity,
                   cell_length=cell_length, density=density,
                   temperature=temperature, coupling=g,
                   atom_number=n_atoms, gamma_raw=gamma_raw)

    @property
    def coupling_normalized(self) -> float:
        """g in units of gamma."""
        return self.coupling / self.gamma_raw

    @property
    def transit_time(self) -> float:
        """gamma * l / c: the cell transit time in 1/gamma units."""
        return self.gamma_raw * self.cell_length / C_LIGHT


@dataclass(frozen=True)
class DriveParams:
    """Drive-field parameters in gamma units.

    ``intensity`` is the mean-field intensity I_x = |g <a_x>|^2 in
    units of gamma^2.  The saturation s and the linear dephasing
    delta0 are always recomputed from the stored fields, never cached.
    """

    intensity: float                   # I_x, units of gamma^2
    detuning: float                    # Delta, units of gamma
    ellipticity: float = 0.0           # radians

    def __post_init__(self):
        _require(self.intensity >= 0, "intensity", "must be >= 0")
        _require(math.isfinite(self.detuning), "detuning", "must be finite")
        _require(-math.pi / 4 < self.ellipticity < math.pi / 4,
                 "ellipticity", "must lie in (-pi/4, pi/4)")

    @property
    def saturation(self) -> float:
        """s = I_x / (gamma^2 + Delta^2), gamma = 1."""
        return self.intensity / (1.0 + self.detuning**2)

    def linear_dephasing(self, ens: EnsembleParams) -> float:
        """delta0 = C gamma / (2 Delta).  Undefined on resonance."""
        if self.detuning == 0.0:
            raise ValidationError("detuning",
                                  "linear dephasing undefined at Delta = 0")
        return ens.cooperativity / (2.0 * self.detuning)


@dataclass(frozen=True)
class SidebandGrid:
    """Ordered grid of sideband frequencies (units of gamma)."""

    frequencies: tuple[float, ...]

    def __post_init__(self):
        freqs = tuple(float(f) for f in self.frequencies)
        object.__setattr__(self, "frequencies", freqs)
        _require(len(freqs) > 0, "frequencies", "must be non-empty")
        _require(all(f >= 0 for f in freqs), "frequencies",
                 "must be >= 0")
        _require(all(b > a for a, b in zip(freqs, freqs[1:])),
                 "frequencies", "must be strictly increasing")


@dataclass(frozen=True)
class LabParams:
    """Raw laboratory parameters (SI units throughout)."""

    gamma: float                       # coherence decay rate, rad/s
    cell_length: float                 # m
    density: float                     # atoms / m^3
    temperature: float                 # K
    beam_waist: float = 425e-6         # m
    power: float = 0.0                 # W
    wavelength: float = 780.241e-9     # m
    detuning: float = 0.0              # rad/s
    ellipticity: float = 0.0           # rad
    cooperativity: float | None = None
    coupling: float | None = None      # rad/s


def beam_area(waist: float) -> float:
    """Effective beam cross-section pi w0^2 used for the atom number."""
    return math.pi * waist**2


def intensity_from_power(power: float, coupling: float, cell_length: float,
                         wavelength: float) -> float:
    """Convert beam power to the drive intensity I_x = |g <a_x>|^2 (rad^2/s^2).

    The coherent amplitude is referred to the photon number in the
    quantization volume (beam area x cell length), so
    I_x = g^2 P l / (hbar omega_L c).  The power-to-intensity map is a
    documented modelling assumption; fits treat its scale as a free
    parameter.
    """
    omega_l = 2.0 * math.pi * C_LIGHT / wavelength
    n_photon = power * cell_length / (HBAR * omega_l * C_LIGHT)
    return coupling**2 * n_photon


def doppler_width(temperature: float, wavelength: float, gamma: float,
                  mass: float = MASS_RB87) -> float:
    """1/e half-width of the Doppler detuning distribution, in gamma units."""
    _require(temperature > 0, "temperature", "must be > 0")
    u = math.sqrt(2.0 * KB * temperature / mass)
    return (2.0 * math.pi / wavelength) * u / gamma


def normalize_units(raw: LabParams) -> tuple[EnsembleParams, DriveParams]:
    """Scale a laboratory parameter set to gamma = 1 working units.

    Exactly one of ``cooperativity`` and ``coupling`` may be omitted;
    the other is derived from C = g^2 N l / (gamma c).
    """
    _require(raw.gamma > 0, "gamma", "must be > 0")
    _require(raw.cell_length > 0, "cell_length", "must be > 0")
    _require(raw.temperature > 0, "temperature", "must be > 0")
    _require(raw.density > 0, "density", "must be > 0")
    _require(raw.beam_waist > 0, "beam_waist", "must be > 0")
    _require(raw.power >= 0, "power", "must be >= 0")

    n_atoms = raw.density * beam_area(raw.beam_waist) * raw.cell_length
    if raw.coupling is not None:
        g = raw.coupling
        coop = g**2 * n_atoms * raw.cell_length / (raw.gamma * C_LIGHT)
        if raw.cooperativity is not None:
            _require(abs(coop - raw.cooperativity) <= 1e-9 * max(coop, 1e-300),
                     "cooperativity", "inconsistent with given coupling")
    elif raw.cooperativity is not None:
        coop = raw.cooperativity
        g = math.sqrt(coop * raw.gamma * C_LIGHT /
                      (n_atoms * raw.cell_length)) if coop > 0 else 0.0
    else:
        raise ValidationError("cooperativity",
                              "give either cooperativity or coupling")

    ens = EnsembleParams(gamma=1.0, cooperativity=coop,
                         cell_length=raw.cell_length, density=raw.density,
                         temperature=raw.temperature, coupling=g,
                         atom_number=n_atoms, gamma_raw=raw.gamma)
    intensity = intensity_from_power(raw.power, g, raw.cell_length,
                                     raw.wavelength) / raw.gamma**2
    drive = DriveParams(intensity=intensity, detuning=raw.detuning / raw.gamma,
                        ellipticity=raw.ellipticity)
    return ens, drive


def denormalize_units(ens: EnsembleParams, drive: DriveParams,
                      wavelength: float = 780.241e-9) -> LabParams:
    """Invert :func:`normalize_units` (round-trips to 1e-12 relative)."""
    omega_l = 2.0 * math.pi * C_LIGHT / wavelength
    intensity_si = drive.intensity * ens.gamma_raw**2
    if ens.coupling > 0:
        power = intensity_si * HBAR * omega_l * C_LIGHT / (
            ens.coupling**2 * ens.cell_length)
    else:
        power = 0.0
    waist = math.sqrt(ens.atom_number /
                      (ens.density * ens.cell_length) / math.pi)
    return LabParams(gamma=ens.gamma_raw, cell_length=ens.cell_length,
                     density=ens.density, temperature=ens.temperature,
                     beam_waist=waist, power=power, wavelength=wavelength,
                     detuning=drive.detuning * ens.gamma_raw,
                     ellipticity=drive.ellipticity,
                     cooperativity=ens.cooperativity, coupling=ens.coupling)
