"""Periodic time codings of the surface reflection and their harmonics.

A coding sequence holds L per-step reflection coefficients Gamma^n
(n = 1..L); step n occupies the interval [(n-1)*T0/L, n*T0/L) of the
modulation period T0, so harmonics are spaced f0 = 1/T0 apart.  The
Fourier coefficient of harmonic m is

    a^m = sum_n (Gamma^n / L) * sinc(pi*m/L) * exp(-j*pi*m*(2n-1)/L)

with the unnormalized sinc(x) = sin(x)/x, sinc(0) = 1; a^0 is then the
plain time average of the sequence.  Circularly delaying the sequence by
s steps leaves every |a^m| untouched and rotates arg a^m by -2*pi*m*s/L;
that sign convention (delay = negative rotation for positive m) is fixed
here and verified against a quadrature oracle in the tests.
"""

from dataclasses import dataclass

import numpy as np

from .aperture import ApertureGeometry, FarFieldGrid, _array_factor
from .util import mag_to_db


@dataclass(frozen=True)
class CodingSequence:
    """L-step periodic coding: ``steps`` has the step axis last."""

    steps: np.ndarray
    period: float  # T0, seconds

    def __post_init__(self):
        steps = np.asarray(self.steps, dtype=complex)
        if steps.shape[-1] < 1:
            raise ValueError("sequence needs at least one step")
        if self.period <= 0:
            raise ValueError("period must be positive")
        if np.any(np.abs(steps) > 1.0 + 1e-12):
            raise ValueError("|Gamma| > 1 violates passivity")
        object.__setattr__(self, "steps", steps)

    @property
    def num_steps(self) -> int:
        return self.steps.shape[-1]

    @property
    def harmonic_spacing(self) -> float:
        return 1.0 / self.period


@dataclass(frozen=True)
class HarmonicSpectrum:
    """Map from harmonic index m to the complex coefficient a^m."""

    coeffs: dict

    def __getitem__(self, m: int) -> complex:
        return self.coeffs[m]

    def __iter__(self):
        return iter(sorted(self.coeffs))

    def magnitude(self, m: int) -> float:
        return abs(self.coeffs[m])

    def dominant(self) -> int:
        return max(self.coeffs, key=lambda m: abs(self.coeffs[m]))

    def power(self) -> float:
        return float(sum(abs(a) ** 2 for a in self.coeffs.values()))

    def to_csv(self, path) -> None:
        """Rows of m,mag_db,phase_deg sorted by harmonic index."""
        rows = []
        for m in sorted(self.coeffs):
            a = self.coeffs[m]
            mag_db_val = mag_to_db(abs(a)) if abs(a) > 1e-15 else -300.0
            rows.append((m, mag_db_val, np.rad2deg(np.angle(a))))
        np.savetxt(path, rows, delimiter=",", fmt=("%d", "%.6f", "%.6f"),
                   header="m,mag_db,phase_deg", comments="")


def _coefficient_weights(num_steps: int, harmonics: np.ndarray) -> np.ndarray:
    """Weight matrix W[k, n] with a^{m_k} = sum_n Gamma^n W[k, n]."""
    n = np.arange(1, num_steps + 1)
    m = harmonics[:, None]
    sinc = np.sinc(m / num_steps)  # np.sinc(x) = sin(pi x)/(pi x) = our sinc(pi m / L)
    return (sinc / num_steps) * np.exp(-1j * np.pi * m * (2 * n[None, :] - 1) / num_steps)


def harmonic_coefficients(steps, harmonics) -> HarmonicSpectrum:
    """Exact Fourier coefficients of one element's L-step coding."""
    steps = np.asarray(steps, dtype=complex)
    if steps.ndim != 1:
        raise ValueError("steps must be a 1-D per-step sequence")
    ms = np.asarray(list(harmonics), dtype=int)
    coeffs = _coefficient_weights(len(steps), ms) @ steps
    return HarmonicSpectrum(dict(zip(ms.tolist(), coeffs.tolist())))


def default_harmonic_range(num_steps: int) -> range:
    """Reporting range |m| <= L; energy beyond sits in sinc sidelobes."""
    return range(-num_steps, num_steps + 1)


def synthesize_single_harmonic(m: int, num_steps: int) -> np.ndarray:
    """Phase ramp whose slope places the dominant harmonic at index m.

    Gamma^n = exp(j*2*pi*m*n/L); the commanded harmonic retains amplitude
    sinc(pi*|m|/L) and the nearest image sits L indices away.
    """
    if abs(m) >= num_steps / 2:
        raise ValueError(
            f"harmonic {m} aliases for L = {num_steps}; need |m| < L/2"
        )
    n = np.arange(1, num_steps + 1)
    return np.exp(2j * np.pi * m * n / num_steps)


def phase_shift_harmonic(steps, n_shift) -> np.ndarray:
    """Circularly delay the coding by an integer number of steps.

    Magnitudes of all harmonics are invariant; arg a^m picks up exactly
    -2*pi*m*n_shift/L.  Fractional shifts are outside the coded model.
    """
    if not isinstance(n_shift, (int, np.integer)):
        raise ValueError(f"n_shift must be an integer step count, got {n_shift!r}")
    steps = np.asarray(steps, dtype=complex)
    num = steps.shape[-1]
    if not 0 <= n_shift <= num:
        raise ValueError(f"n_shift must lie in [0, L], got {n_shift}")
    return np.roll(steps, int(n_shift), axis=-1)


def shift_for_phase(phase_des_rad: float, num_steps: int) -> int:
    """Step count realizing a commanded phase of the m = +1 harmonic.

    n_shift = -phase * L / (2*pi) mod L, the delay whose rotation
    -2*pi*n_shift/L equals the commanded phase.  The commanded phase must
    land on the L-point grid.
    """
    ticks = -phase_des_rad * num_steps / (2.0 * np.pi)
    nearest = round(ticks)
    if abs(ticks - nearest) > 1e-9:
        raise ValueError(
            f"phase {np.rad2deg(phase_des_rad):.3f} deg is not a multiple of "
            f"{360.0 / num_steps} deg"
        )
    return int(nearest % num_steps)


@dataclass(frozen=True)
class MultiHarmonicResult:
    steps: np.ndarray
    residual: float
    iterations: int


def synthesize_multi_harmonic(targets, num_steps: int, max_iterations: int = 200,
                              tolerance: float = 1e-3, seed: int = 0) -> MultiHarmonicResult:
    """Phase-only coding whose spectrum approximates the target harmonics.

    Alternating projection between the target spectrum constraint (set the
    requested bins in the frequency domain) and the unit-modulus constraint
    (time domain).  ``targets`` is a list of (m, complex weight) pairs; the
    requested power must fit the unit budget sum |w|^2 <= 1.  Deterministic:
    the start point is the unit-modulus projection of the target spectrum
    alone (``seed`` only perturbs zero-magnitude samples).

    Returns the final sequence together with the residual
    max_k |a^{m_k} - w_k| actually achieved; the sinc roll-off makes small
    residuals unreachable for weights near 1, so iteration also stops once
    the sequence reaches a fixed point.
    """
    targets = [(int(m), complex(w)) for m, w in targets]
    if not targets:
        return MultiHarmonicResult(np.ones(num_steps, dtype=complex), 0.0, 0)
    ms = [m for m, _ in targets]
    if len(set(ms)) != len(ms):
        raise ValueError("duplicate target harmonics")
    for m in ms:
        if abs(m) >= num_steps / 2:
            raise ValueError(f"harmonic {m} aliases for L = {num_steps}; need |m| < L/2")
    budget = sum(abs(w) ** 2 for _, w in targets)
    if budget > 1.0 + 1e-12:
        raise ValueError(f"requested harmonic power {budget:.4f} exceeds the unit budget")

    # a^m = sinc(m/L)/L * exp(-j*pi*m/L) * FFT(steps)[m mod L]; invert for the
    # frequency-domain projection values.
    bins = np.array([m % num_steps for m in ms])
    weights = np.array([w for _, w in targets])
    sinc = np.sinc(np.array(ms, dtype=float) / num_steps)
    desired_bins = weights * num_steps * np.exp(1j * np.pi * np.array(ms) / num_steps) / sinc

    rng = np.random.default_rng(seed)

    def project_unit(x):
        mag = np.abs(x)
        out = np.where(mag > 1e-12, x / np.where(mag > 0, mag, 1.0), 0.0)
        dead = mag <= 1e-12
        if np.any(dead):
            out[dead] = np.exp(2j * np.pi * rng.random(int(dead.sum())))
        return out

    spectrum0 = np.zeros(num_steps, dtype=complex)
    spectrum0[bins] = desired_bins
    x = project_unit(np.fft.ifft(spectrum0))

    def achieved(x):
        f = np.fft.fft(x)
        return sinc / num_steps * np.exp(-1j * np.pi * np.array(ms) / num_steps) * f[bins]

    residual = float(np.max(np.abs(achieved(x) - weights)))
    iterations = 0
    for iterations in range(1, max_iterations + 1):
        spectrum = np.fft.fft(x)
        spectrum[bins] = desired_bins
        x_new = project_unit(np.fft.ifft(spectrum))
        stalled = np.max(np.abs(x_new - x)) < 1e-12
        x = x_new
        residual = float(np.max(np.abs(achieved(x) - weights)))
        if residual < tolerance or stalled:
            break
    return MultiHarmonicResult(x, residual, iterations)


def element_harmonic_amplitudes(sequences, m: int) -> np.ndarray:
    """a^m of every element of an (..., L) array of codings."""
    arr = np.asarray(sequences)
    if arr.dtype == object:
        raise ValueError("every element must share the same number of steps")
    arr = arr.astype(complex)
    num = arr.shape[-1]
    weights = _coefficient_weights(num, np.array([m]))[0]
    return arr @ weights


def harmonic_pattern(sequences, m: int, geom: ApertureGeometry,
                     theta=None, phi=None, element_exponent: float = 0.0) -> FarFieldGrid:
    """Far-field pattern of the aperture at harmonic m.

    ``sequences`` holds one L-step coding per element, shape
    (rows, cols, L); the per-element a^m replace the static reflection
    coefficients in the aperture sum, so harmonic 0 of static codings
    reproduces the ordinary radiation pattern.
    """
    arr = np.asarray(sequences)
    if arr.dtype == object or arr.ndim != 3:
        raise ValueError(
            "sequences must be a (rows, cols, L) array; mismatched step counts "
            "across elements are not representable"
        )
    amplitudes = element_harmonic_amplitudes(arr, m)
    if theta is None or phi is None:
        from .aperture import direction_grid

        default_theta, default_phi = direction_grid()
        theta = default_theta if theta is None else theta
        phi = default_phi if phi is None else phi
    return _array_factor(amplitudes, geom, theta, phi, element_exponent)


def sequence_to_csv(steps, path) -> None:
    """Rows of step,phase_deg,mag (step index 1-based)."""
    steps = np.asarray(steps, dtype=complex)
    rows = [
        (n + 1, np.rad2deg(np.angle(g)), abs(g)) for n, g in enumerate(steps)
    ]
    np.savetxt(path, rows, delimiter=",", fmt=("%d", "%.6f", "%.6f"),
               header="step,phase_deg,mag", comments="")
