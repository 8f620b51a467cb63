"""Tunable meta-atom reflection model.

A meta-atom is one sub-wavelength cell of the reconfigurable surface.  Its
complex reflection coefficient is obtained three ways:

- analytically from the surface admittance of the equivalent circuit,
- from a tabulated full-wave dataset swept over (frequency, C, R) of the
  embedded tunable diode,
- as one point of an M-ary PSK reflection constellation.

Angles are radians in the API and degrees in CSV files.  Phases are wrapped
to [-pi, pi) everywhere.
"""

from dataclasses import dataclass
from importlib import resources

import numpy as np

from .errors import ConfigError
from .util import wrap_phase

FREE_SPACE_ADMITTANCE = 1.0 / (120.0 * np.pi)  # siemens

# Sweep ranges of the tabulated diode model.
CAPACITANCE_RANGE_PF = (0.01, 1.50)
RESISTANCE_RANGE_OHM = (0.1, 4.0)


@dataclass(frozen=True)
class SurfaceAdmittance:
    """Complex surface admittance in siemens.

    ``pec_limit`` marks the perfect-electric-conductor limit (admittance
    diverging to infinity); the stored value is ignored in that case.
    """

    value: complex
    pec_limit: bool = False

    def __post_init__(self):
        if self.pec_limit:
            return
        if not np.isfinite(self.value):
            raise ValueError("admittance must be finite unless flagged as the PEC limit")
        if self.value.real < -1e-15:
            raise ValueError(f"negative conductance {self.value.real} (active surface)")


@dataclass(frozen=True)
class ReflectionState:
    """Reflection coefficient as (amplitude, phase), phase in [-pi, pi)."""

    amplitude: float
    phase: float

    def __post_init__(self):
        if not 0.0 <= self.amplitude <= 1.0 + 1e-12:
            raise ValueError(f"amplitude {self.amplitude} outside [0, 1] (passive surface)")
        object.__setattr__(self, "phase", float(wrap_phase(self.phase)))

    @classmethod
    def from_complex(cls, gamma: complex) -> "ReflectionState":
        return cls(abs(gamma), float(np.angle(gamma)))

    @property
    def value(self) -> complex:
        return self.amplitude * np.exp(1j * self.phase)


@dataclass(frozen=True)
class DiodeState:
    """Tunable series (R, C) state of the embedded diode chip."""

    capacitance_pf: float
    resistance_ohm: float

    def __post_init__(self):
        lo, hi = CAPACITANCE_RANGE_PF
        if not lo <= self.capacitance_pf <= hi:
            raise ValueError(f"capacitance {self.capacitance_pf} pF outside [{lo}, {hi}] pF")
        lo, hi = RESISTANCE_RANGE_OHM
        if not lo <= self.resistance_ohm <= hi:
            raise ValueError(f"resistance {self.resistance_ohm} ohm outside [{lo}, {hi}] ohm")


def reflection_from_admittance(ys: SurfaceAdmittance) -> ReflectionState:
    """Reflection coefficient of a surface with admittance ``ys``.

    Gamma = (Y0 - Ys) / (Y0 + Ys) with Y0 the free-space admittance.  A
    purely reactive surface reflects with unit amplitude; the PEC limit
    gives Gamma = -1 exactly.
    """
    if ys.pec_limit:
        return ReflectionState(1.0, np.pi)  # wraps to -pi, i.e. Gamma = -1
    gamma = (FREE_SPACE_ADMITTANCE - ys.value) / (FREE_SPACE_ADMITTANCE + ys.value)
    # Round-off can push |Gamma| infinitesimally above 1 for reactive surfaces.
    mag = min(abs(gamma), 1.0)
    return ReflectionState(mag, float(np.angle(gamma)))


def serrodyne_admittance(t: float, omega_m: float) -> SurfaceAdmittance:
    """Time-varying admittance that frequency-shifts the reflection.

    Ys(t) = -j * Y0 * tan(omega_m * t / 2) makes the reflection coefficient
    a pure rotating phasor: Gamma(t) = exp(j * omega_m * t).  At
    omega_m * t = pi (mod 2 pi) the tangent diverges; the PEC-limit flag is
    returned there so the caller still gets the continuous value Gamma = -1.
    """
    if omega_m <= 0:
        raise ValueError("omega_m must be positive")
    theta = omega_m * t
    if abs(np.cos(theta / 2.0)) < 1e-12:
        return SurfaceAdmittance(0j, pec_limit=True)
    return SurfaceAdmittance(-1j * FREE_SPACE_ADMITTANCE * np.tan(theta / 2.0))


def psk_constellation(order: int, amplitude: float = 1.0) -> list[ReflectionState]:
    """M-ary PSK reflection constellation with uniform 2*pi/M spacing.

    Point m reflects with Gamma_m = A * exp(j * 2 * pi * m / M).  Mean
    constellation energy is A**2 exactly.
    """
    if order < 2 or order & (order - 1):
        raise ConfigError(f"PSK order must be a power of two >= 2, got {order}")
    if not 0.0 < amplitude <= 1.0:
        raise ConfigError(f"amplitude must be in (0, 1], got {amplitude}")
    return [
        ReflectionState(amplitude, float(wrap_phase(2.0 * np.pi * m / order)))
        for m in range(order)
    ]


class GridBoundsError(ValueError):
    """Query outside the tabulated grid; message names the offending axis."""


class ResponseTable:
    """Tabulated complex reflection over (frequency, capacitance, resistance).

    Built from CSV rows ``freq_ghz,c_pf,r_ohm,mag_linear,phase_deg`` forming a
    full regular grid.  Phases are stored unwrapped along the sweep axes so
    trilinear interpolation is meaningful; magnitudes interpolate linearly,
    which keeps every interpolated magnitude inside the bracketing cell range.
    """

    def __init__(self, freq_ghz, c_pf, r_ohm, mag, phase_rad):
        self.freq_ghz = np.asarray(freq_ghz, dtype=float)
        self.c_pf = np.asarray(c_pf, dtype=float)
        self.r_ohm = np.asarray(r_ohm, dtype=float)
        self.mag = np.asarray(mag, dtype=float)
        self.phase_rad = np.asarray(phase_rad, dtype=float)
        for name, grid in (("freq_ghz", self.freq_ghz), ("c_pf", self.c_pf), ("r_ohm", self.r_ohm)):
            if grid.ndim != 1 or len(grid) < 2 or np.any(np.diff(grid) <= 0):
                raise ValueError(f"{name} grid must be 1-D and strictly increasing")
        shape = (len(self.freq_ghz), len(self.c_pf), len(self.r_ohm))
        if self.mag.shape != shape or self.phase_rad.shape != shape:
            raise ValueError(f"data shape {self.mag.shape} does not match grids {shape}")
        if np.any(self.mag > 1.0 + 1e-12):
            worst = float(self.mag.max())
            raise ValueError(f"table contains |Gamma| = {worst} > 1; lossless gain is a data bug")
        if np.any(self.mag < 0.0):
            raise ValueError("table contains negative magnitudes")
        # Interpolating phases across a wrap jump would be ambiguous.
        for axis in range(3):
            if np.any(np.abs(np.diff(self.phase_rad, axis=axis)) >= np.pi):
                raise ValueError("phase table has a >= 180 deg jump between adjacent nodes")

    @classmethod
    def from_csv(cls, path) -> "ResponseTable":
        rows = np.genfromtxt(path, delimiter=",", names=True, dtype=float)
        expected = ("freq_ghz", "c_pf", "r_ohm", "mag_linear", "phase_deg")
        if rows.dtype.names != expected:
            raise ValueError(f"CSV header must be {','.join(expected)}, got {rows.dtype.names}")
        freq = np.unique(rows["freq_ghz"])
        cap = np.unique(rows["c_pf"])
        res = np.unique(rows["r_ohm"])
        shape = (len(freq), len(cap), len(res))
        if len(rows) != np.prod(shape):
            raise ValueError(f"CSV rows do not form a full {shape} grid")
        mag = np.full(shape, np.nan)
        phase = np.full(shape, np.nan)
        fi = np.searchsorted(freq, rows["freq_ghz"])
        ci = np.searchsorted(cap, rows["c_pf"])
        ri = np.searchsorted(res, rows["r_ohm"])
        mag[fi, ci, ri] = rows["mag_linear"]
        phase[fi, ci, ri] = np.deg2rad(rows["phase_deg"])
        if np.any(np.isnan(mag)):
            raise ValueError("CSV has duplicate or missing grid points")
        return cls(freq, cap, res, mag, phase)

    def lookup(self, freq_ghz: float, diode: DiodeState) -> ReflectionState:
        """Trilinear interpolation of the tabulated reflection; exact at nodes."""
        coords = (
            ("freq_ghz", self.freq_ghz, float(freq_ghz)),
            ("c_pf", self.c_pf, diode.capacitance_pf),
            ("r_ohm", self.r_ohm, diode.resistance_ohm),
        )
        idx = []
        frac = []
        for name, grid, value in coords:
            if value < grid[0] or value > grid[-1]:
                raise GridBoundsError(
                    f"{name} = {value} outside table range [{grid[0]}, {grid[-1]}]"
                )
            i = min(int(np.searchsorted(grid, value, side="right")) - 1, len(grid) - 2)
            idx.append(i)
            frac.append((value - grid[i]) / (grid[i + 1] - grid[i]))

        def interp(cube):
            block = cube[idx[0]:idx[0] + 2, idx[1]:idx[1] + 2, idx[2]:idx[2] + 2]
            for t in reversed(frac):
                block = block[..., 0] * (1.0 - t) + block[..., 1] * t
            return float(block)

        mag = interp(self.mag)
        phase = interp(self.phase_rad)
        return ReflectionState(min(mag, 1.0), float(wrap_phase(phase)))

    def phase_span_deg(self, freq_ghz: float, resistance_ohm: float) -> float:
        """Phase tuning span (degrees) over the full capacitance sweep."""
        states = [
            self.lookup(freq_ghz, DiodeState(c, resistance_ohm)) for c in self.c_pf
        ]
        phases = np.unwrap([s.phase for s in states])
        return float(np.rad2deg(phases.max() - phases.min()))

    def worst_loss_db(self, freq_ghz: float) -> float:
        """Largest reflection loss (dB) over every tabulated tuning state."""
        fi = np.searchsorted(self.freq_ghz, freq_ghz)
        if fi >= len(self.freq_ghz) or self.freq_ghz[fi] != freq_ghz:
            raise GridBoundsError(f"freq_ghz = {freq_ghz} is not a table node")
        return float(-20.0 * np.log10(self.mag[fi].min()))


def default_response_table() -> ResponseTable:
    """The dataset shipped with the package (see data/metaatom_response.csv)."""
    with resources.as_file(
        resources.files("risim.data").joinpath("metaatom_response.csv")
    ) as path:
        return ResponseTable.from_csv(path)
