"""Aperture phase composition, far-field patterns, and beam scanning.

Geometry convention: element (p, q) of an M x N aperture sits at
x = p * dx, y = q * dy (0-based p along axis 0).  The far-field direction
(theta, phi) uses elevation theta in [0, pi/2] measured from broadside and
azimuth phi in [0, 2*pi); the reflect-array radiates into the z > 0
half-space only.

A steering sawtooth with positive per-cell increment g = delta_phi_e / Q
moves the beam peak to elevation asin(lambda * g / (2 * pi * d)) in the
phi = 180 deg half-plane (the array-factor phase grows with +x, so the
positive surface gradient compensates it on the -x side).
"""

from dataclasses import dataclass, field

import numpy as np

from .util import SPEED_OF_LIGHT, mag_to_db, wrap_phase

_CHUNK_DIRECTIONS = 65536


class UnsteerableGradientError(ValueError):
    """Phase gradient requests an evanescent (|sin| > 1) scan direction."""


@dataclass(frozen=True)
class ApertureGeometry:
    rows: int          # elements along x
    cols: int          # elements along y
    dx: float          # m
    dy: float          # m
    fc: float          # Hz

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise ValueError("aperture needs at least one element per axis")
        if self.dx <= 0 or self.dy <= 0 or self.fc <= 0:
            raise ValueError("spacings and carrier frequency must be positive")

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.fc

    @property
    def wavenumber(self) -> float:
        return 2.0 * np.pi / self.wavelength


@dataclass(frozen=True)
class SteeringSpec:
    """Sawtooth gradient repeating every ``period_cells`` elements of
    spacing ``spacing`` with total phase excursion ``phase_range`` (rad)."""

    period_cells: int
    phase_range: float
    spacing: float

    def __post_init__(self):
        if self.period_cells < 1:
            raise ValueError("period_cells must be >= 1")
        if not 0.0 <= self.phase_range <= 2.0 * np.pi + 1e-12:
            raise ValueError("phase_range must lie in [0, 2*pi]")
        if self.spacing <= 0:
            raise ValueError("spacing must be positive")


@dataclass(frozen=True)
class PhaseCoding:
    """Per-element reflection amplitude and phase of one aperture state."""

    amplitude: np.ndarray
    phase: np.ndarray

    def __post_init__(self):
        amp = np.asarray(self.amplitude, dtype=float)
        ph = np.asarray(self.phase, dtype=float)
        if amp.shape != ph.shape or amp.ndim != 2:
            raise ValueError("amplitude and phase must be equal-shape 2-D arrays")
        if np.any(amp <= 0) or np.any(amp > 1.0 + 1e-12):
            raise ValueError("amplitudes must lie in (0, 1]")
        object.__setattr__(self, "amplitude", amp)
        object.__setattr__(self, "phase", wrap_phase(ph))

    @classmethod
    def uniform(cls, rows: int, cols: int, phase: float = 0.0, amplitude: float = 1.0):
        return cls(np.full((rows, cols), amplitude), np.full((rows, cols), phase))

    @property
    def excitation(self) -> np.ndarray:
        return self.amplitude * np.exp(1j * self.phase)


@dataclass(frozen=True)
class FarFieldGrid:
    """Complex field samples on a regular (theta, phi) grid."""

    theta: np.ndarray  # rad, ascending, within [0, pi/2]
    phi: np.ndarray    # rad, ascending, within [0, 2*pi)
    field: np.ndarray  # complex, shape (len(theta), len(phi))

    def __post_init__(self):
        th = np.asarray(self.theta, dtype=float)
        ph = np.asarray(self.phi, dtype=float)
        f = np.asarray(self.field, dtype=complex)
        if th.ndim != 1 or ph.ndim != 1 or f.shape != (len(th), len(ph)):
            raise ValueError("field shape must be (len(theta), len(phi))")
        if th.min() < 0 or th.max() > np.pi / 2 + 1e-9:
            raise ValueError("theta must stay in the z > 0 hemisphere [0, pi/2]")
        object.__setattr__(self, "theta", th)
        object.__setattr__(self, "phi", ph)
        object.__setattr__(self, "field", f)

    def peak_direction(self) -> tuple[float, float]:
        """(theta, phi) of the largest |field| sample."""
        it, ip = np.unravel_index(np.argmax(np.abs(self.field)), self.field.shape)
        return float(self.theta[it]), float(self.phi[ip])

    def to_csv(self, path) -> None:
        """Rows of theta_deg,phi_deg,mag_db,phase_deg (floor at -300 dB)."""
        th, ph = np.meshgrid(np.rad2deg(self.theta), np.rad2deg(self.phi), indexing="ij")
        mag = np.abs(self.field)
        mag_db = np.where(mag > 0, mag_to_db(np.maximum(mag, 1e-15)), -300.0)
        phase = np.rad2deg(np.angle(self.field))
        rows = np.column_stack([th.ravel(), ph.ravel(), mag_db.ravel(), phase.ravel()])
        np.savetxt(path, rows, delimiter=",", fmt="%.6f",
                   header="theta_deg,phi_deg,mag_db,phase_deg", comments="")

    def to_uv_csv(self, path) -> None:
        """Rows of u,v,mag_db with u = sin(theta)cos(phi), v = sin(theta)sin(phi)."""
        th, ph = np.meshgrid(self.theta, self.phi, indexing="ij")
        u = np.sin(th) * np.cos(ph)
        v = np.sin(th) * np.sin(ph)
        mag = np.abs(self.field)
        mag_db = np.where(mag > 0, mag_to_db(np.maximum(mag, 1e-15)), -300.0)
        rows = np.column_stack([u.ravel(), v.ravel(), mag_db.ravel()])
        np.savetxt(path, rows, delimiter=",", fmt="%.6f", header="u,v,mag_db", comments="")


def direction_grid(theta_step_deg: float = 1.0, phi_step_deg: float = 1.0):
    """Default hemisphere grid: theta 0..90 deg inclusive, phi 0..360 deg exclusive."""
    theta = np.deg2rad(np.arange(0.0, 90.0 + 1e-9, theta_step_deg))
    phi = np.deg2rad(np.arange(0.0, 360.0, phi_step_deg))
    return theta, phi


def scan_angle(spec: SteeringSpec, wavelength: float) -> float:
    """Beam-scan elevation (rad) produced by a sawtooth phase gradient.

    theta_r = asin(lambda/(2*pi) * phase_range / (period_cells * spacing)),
    i.e. the grating-free reading of the generalized reflection law at
    normal incidence.  Zero phase range means broadside.
    """
    if spec.phase_range == 0.0:
        return 0.0
    s = wavelength * spec.phase_range / (2.0 * np.pi * spec.period_cells * spec.spacing)
    if abs(s) > 1.0:
        raise UnsteerableGradientError(
            f"gradient asks for sin(theta) = {s:.4f}; |sin| > 1 is evanescent"
        )
    return float(np.arcsin(s))


def steering_phase(geom: ApertureGeometry, spec: SteeringSpec) -> np.ndarray:
    """Per-element steering phase along x: p * (phase_range / Q), wrapped.

    Returns one value per element of axis 0 (length ``rows``); every element
    sharing an x position takes the same value.  The per-cell increment is
    phase_range / period_cells; with the full 2*pi range this wraps into a
    sawtooth repeating every ``period_cells`` elements, and the synthesized
    beam lands exactly where :func:`scan_angle` predicts.  (A sawtooth that
    resets the running index every Q cells instead of wrapping at 2*pi
    concentrates power on the integer grating order lambda/(Q*d) and does
    not satisfy the scan equation; see the beam-steering tests.)
    """
    p = np.arange(geom.rows)
    return wrap_phase(p * (spec.phase_range / spec.period_cells))


def far_field_phase(geom: ApertureGeometry, theta: float, phi: float) -> np.ndarray:
    """Array-factor phase of each element toward direction (theta, phi)."""
    if not 0.0 <= theta <= np.pi / 2 + 1e-12:
        raise ValueError("theta must lie in [0, pi/2]")
    p = np.arange(geom.rows)[:, None]
    q = np.arange(geom.cols)[None, :]
    kc = geom.wavenumber
    return kc * np.sin(theta) * (p * geom.dx * np.cos(phi) + q * geom.dy * np.sin(phi))


def compose_phase(modulation, steering, farfield, amplitude=None) -> PhaseCoding:
    """Sum the modulation, steering, and array-factor phase terms.

    ``steering`` may be the per-x vector from :func:`steering_phase`; it is
    broadcast across axis 1.  The sum is wrapped to [-pi, pi); amplitudes
    default to 1 and pass through unchanged.
    """
    modulation = np.asarray(modulation, dtype=float)
    farfield = np.asarray(farfield, dtype=float)
    steering = np.asarray(steering, dtype=float)
    if steering.ndim == 1:
        steering = steering[:, None]
    try:
        total = modulation + steering + farfield
    except ValueError as exc:
        raise ValueError(
            f"shape mismatch: modulation {modulation.shape}, steering {steering.shape}, "
            f"far-field {farfield.shape}"
        ) from exc
    if amplitude is None:
        amplitude = np.ones_like(total)
    return PhaseCoding(amplitude, total)


def _array_factor(excitation: np.ndarray, geom: ApertureGeometry, theta, phi,
                  element_exponent: float = 0.0) -> FarFieldGrid:
    """Coherent sum over elements for every grid direction (chunked over
    directions so large grids stay within memory; order-independent)."""
    excitation = np.asarray(excitation, dtype=complex)
    if excitation.shape != (geom.rows, geom.cols):
        raise ValueError(
            f"excitation shape {excitation.shape} does not match geometry "
            f"({geom.rows}, {geom.cols})"
        )
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    th, ph = np.meshgrid(theta, phi, indexing="ij")
    u = (np.sin(th) * np.cos(ph)).ravel()
    v = (np.sin(th) * np.sin(ph)).ravel()

    kc = geom.wavenumber
    x = np.arange(geom.rows) * geom.dx
    y = np.arange(geom.cols) * geom.dy
    out = np.empty(u.size, dtype=complex)
    for start in range(0, u.size, _CHUNK_DIRECTIONS):
        sl = slice(start, min(start + _CHUNK_DIRECTIONS, u.size))
        ex = np.exp(1j * kc * np.outer(x, u[sl]))         # (rows, D)
        ey = np.exp(1j * kc * np.outer(y, v[sl]))         # (cols, D)
        out[sl] = np.einsum("qd,qd->d", excitation.T @ ex, ey)

    field = out.reshape(len(theta), len(phi))
    if element_exponent > 0:
        field = field * np.cos(theta)[:, None] ** element_exponent
    return FarFieldGrid(theta, phi, field)


def radiation_pattern(coding: PhaseCoding, geom: ApertureGeometry,
                      theta=None, phi=None, element_exponent: float = 0.0) -> FarFieldGrid:
    """Reflected far-field pattern of one aperture state.

    f(theta, phi) = sum_pq a_e(p,q) exp(j phi_e(p,q))
                    exp(j kc sin(theta) (x_p cos(phi) + y_q sin(phi)))
    with an optional cos(theta)**q element factor (isotropic by default).
    """
    if theta is None or phi is None:
        default_theta, default_phi = direction_grid()
        theta = default_theta if theta is None else theta
        phi = default_phi if phi is None else phi
    return _array_factor(coding.excitation, geom, theta, phi, element_exponent)


def directivity_map(grid: FarFieldGrid) -> np.ndarray:
    """Directivity over the grid: 4*pi*|f|^2 / integral(|f|^2 sin(theta)).

    The hemisphere integral uses the trapezoid rule in theta and a periodic
    uniform rule in phi, matching the grid the field was evaluated on.
    """
    power = np.abs(grid.field) ** 2
    total = _hemisphere_integral(power, grid.theta, grid.phi)
    if total <= 0.0:
        raise ValueError("all-zero field has undefined directivity")
    return 4.0 * np.pi * power / total


def peak_directivity(grid: FarFieldGrid) -> tuple[float, float]:
    """Peak directivity as (linear, dBi)."""
    peak = float(directivity_map(grid).max())
    return peak, float(10.0 * np.log10(peak))


def _hemisphere_integral(values: np.ndarray, theta: np.ndarray, phi: np.ndarray) -> float:
    """Integrate values(theta, phi) * sin(theta) over the hemisphere."""
    by_theta = np.trapezoid(values * np.sin(theta)[:, None], theta, axis=0)
    dphi = 2.0 * np.pi / len(phi)   # phi grid is periodic and uniform
    return float(np.sum(by_theta) * dphi)


def directivity_normalization(grid: FarFieldGrid) -> float:
    """integral(Dir sin(theta) dtheta dphi) / (4*pi); 1.0 for a consistent grid."""
    return _hemisphere_integral(directivity_map(grid), grid.theta, grid.phi) / (4.0 * np.pi)


def quantize_phase(phase, bits: int):
    """Snap phases to the nearest of 2**bits uniform levels (coded surfaces)."""
    if bits < 1:
        raise ValueError("bits must be >= 1")
    step = 2.0 * np.pi / (1 << bits)
    return wrap_phase(np.round(np.asarray(phase) / step) * step)


def pseudo_random_codings(count: int, geom: ApertureGeometry, seed: int,
                          phase_levels: int = 4) -> list[PhaseCoding]:
    """Reproducible pseudo-random aperture states for pattern-state signaling.

    Each coding draws i.i.d. phases uniformly from ``phase_levels`` quantized
    values; coding i depends only on (seed, i), so subsets are stable as
    ``count`` grows.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    codings = []
    for index in range(count):
        rng = np.random.default_rng([seed, index])
        levels = rng.integers(0, phase_levels, size=(geom.rows, geom.cols))
        phase = wrap_phase(levels * (2.0 * np.pi / phase_levels))
        codings.append(PhaseCoding(np.ones((geom.rows, geom.cols)), phase))
    return codings


def coding_to_csv(coding: PhaseCoding, path) -> None:
    """Write the phase matrix in degrees, one aperture row per CSV row."""
    np.savetxt(path, np.rad2deg(coding.phase), delimiter=",", fmt="%.3f")
