"""Config-driven Monte Carlo experiments with deterministic parallelism.

Trials are simulated in fixed-size batches; batch b of SNR point p draws
its generator from (seed, p, b) only, and the early-stop rule is applied
to batches folded in index order.  Which batches count toward an estimate
is therefore a pure function of the config, so any thread count produces
byte-identical result files.
"""

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import aperture, detection, im_schemes, metaatom, spacetime
from .channel import los_matrix, rician, stream_rng
from .errors import ConfigError
from .util import db_to_linear

DEFAULT_MAX_TRIALS = 10_000_000
DEFAULT_MIN_ERRORS = 200
DEFAULT_BATCH_SIZE = 65_536

# keep per-batch hypothesis tensors near this many complex entries
_HYPOTHESIS_BUDGET = 1 << 21


# --------------------------------------------------------------------------
# configuration
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class TrialPolicy:
    max_trials: int = DEFAULT_MAX_TRIALS
    min_errors: int = DEFAULT_MIN_ERRORS
    batch_size: int = DEFAULT_BATCH_SIZE


@dataclass(frozen=True)
class ChannelSpec:
    model: str                    # "awgn" | "rayleigh" | "rician"
    k_factor: float = 0.0
    los_structure: str = "dft"


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    seed: int = 1
    output: str | None = None
    scheme: dict | None = None
    channel: ChannelSpec | None = None
    n_rx: int = 1
    snr_db: tuple = ()
    trials: TrialPolicy = field(default_factory=TrialPolicy)
    antennas: tuple = ()
    capacity_trials: int = 50_000
    geometry: dict | None = None
    scan_angles_deg: tuple = ()
    period_cells: int = 4
    grid_step_deg: tuple = (1.0, 1.0)
    element_exponent: float = 0.0
    couple_atom_loss: bool = False
    quantize_bits: int | None = None
    num_steps: int = 16
    single_harmonics: tuple = ()
    shift_fractions: tuple = ()
    multi_targets: tuple = ()
    harmonic_range: int | None = None
    output_dir: str | None = None


class _Section:
    """Pops keys from one config mapping, rejecting leftovers with paths."""

    def __init__(self, data, path):
        if not isinstance(data, dict):
            raise ConfigError(f"{path or 'config'} must be an object")
        self._data = dict(data)
        self._path = path

    def _name(self, key):
        return f"{self._path}.{key}" if self._path else key

    def take(self, key, default=None, required=False, kind=None):
        if key not in self._data:
            if required:
                raise ConfigError(f"missing required key: {self._name(key)}")
            return default
        value = self._data.pop(key)
        if kind is not None and not isinstance(value, kind):
            names = kind if isinstance(kind, tuple) else (kind,)
            raise ConfigError(
                f"{self._name(key)} must be {'/'.join(k.__name__ for k in names)}"
            )
        return value

    def finish(self):
        if self._data:
            extras = ", ".join(self._name(k) for k in sorted(self._data))
            raise ConfigError(f"unknown key(s): {extras}")


def _parse_trials(raw) -> TrialPolicy:
    if raw is None:
        return TrialPolicy()
    sec = _Section(raw, "trials")
    policy = TrialPolicy(
        max_trials=int(sec.take("max_trials", DEFAULT_MAX_TRIALS, kind=int)),
        min_errors=int(sec.take("min_errors", DEFAULT_MIN_ERRORS, kind=int)),
        batch_size=int(sec.take("batch_size", DEFAULT_BATCH_SIZE, kind=int)),
    )
    sec.finish()
    if policy.max_trials < 1 or policy.min_errors < 1 or policy.batch_size < 1:
        raise ConfigError("trials.* values must be >= 1")
    return policy


def _parse_channel(raw) -> ChannelSpec:
    sec = _Section(raw if raw is not None else {"model": "rayleigh"}, "channel")
    model = sec.take("model", required=True, kind=str)
    if model not in ("awgn", "rayleigh", "rician"):
        raise ConfigError(f"channel.model must be awgn/rayleigh/rician, got {model!r}")
    k_factor = 0.0
    los_structure = "dft"
    if model == "rician":
        k_factor = float(sec.take("K", required=True, kind=(int, float)))
        if k_factor < 0:
            raise ConfigError("channel.K must be >= 0")
        los_raw = sec.take("los")
        if los_raw is not None:
            los_sec = _Section(los_raw, "channel.los")
            los_structure = los_sec.take("structure", "dft", kind=str)
            los_sec.finish()
            if los_structure not in ("dft", "ones"):
                raise ConfigError("channel.los.structure must be 'dft' or 'ones'")
    sec.finish()
    return ChannelSpec(model, k_factor, los_structure)


def _parse_snr_grid(raw) -> tuple:
    if not isinstance(raw, list) or not raw:
        raise ConfigError("snr_db must be a non-empty list of numbers")
    values = []
    for v in raw:
        if not isinstance(v, (int, float)) or not math.isfinite(v):
            raise ConfigError(f"snr_db entries must be finite numbers, got {v!r}")
        values.append(float(v))
    return tuple(values)


def parse_config(source) -> ExperimentConfig:
    """Load and strictly validate an experiment file (or pre-parsed dict).

    Infeasible scheme parameters surface here, before any trial runs;
    unknown keys are rejected with their full dotted path.
    """
    if isinstance(source, (str, Path)):
        try:
            raw = json.loads(Path(source).read_text())
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from None
    else:
        raw = source
    sec = _Section(raw, "")
    experiment = sec.take("experiment", required=True, kind=str)
    seed = sec.take("seed", 1, kind=int)
    if seed < 0:
        raise ConfigError("seed must be a non-negative integer")

    if experiment == "ber":
        scheme_cfg = sec.take("scheme", required=True)
        scheme = im_schemes.build_scheme(scheme_cfg)  # validates feasibility
        if scheme.model == "analytic":
            raise ConfigError(
                f"scheme type {scheme_cfg.get('type')!r} has no statistical-channel "
                "transmit model; it is exercised through the harmonic toolchain"
            )
        channel = _parse_channel(sec.take("channel"))
        n_rx = int(sec.take("n_rx", 1, kind=int))
        if n_rx < 1:
            raise ConfigError("n_rx must be >= 1")
        if channel.model == "awgn" and scheme.model not in ("vector", "subcarrier"):
            raise ConfigError("awgn channel supports only single-stream schemes")
        if channel.model == "awgn" and getattr(scheme, "n_tx", 1) != 1:
            raise ConfigError("awgn channel cannot separate transmit antennas; use fading")
        if channel.model == "rician" and scheme.model == "state":
            raise ConfigError(
                "channel-state schemes define their own per-state fading draws; "
                "use the rayleigh model"
            )
        config = ExperimentConfig(
            experiment="ber",
            seed=seed,
            scheme=dict(scheme_cfg),
            channel=channel,
            n_rx=n_rx,
            snr_db=_parse_snr_grid(sec.take("snr_db", required=True)),
            trials=_parse_trials(sec.take("trials")),
            output=sec.take("output", kind=str),
        )
    elif experiment == "capacity":
        antennas_raw = sec.take("antennas", required=True)
        if not isinstance(antennas_raw, list) or not antennas_raw:
            raise ConfigError("antennas must be a non-empty list of [n_tx, n_rx] pairs")
        antennas = []
        for pair in antennas_raw:
            if (not isinstance(pair, list) or len(pair) != 2
                    or not all(isinstance(v, int) and v >= 1 for v in pair)):
                raise ConfigError(f"antennas entries must be [n_tx, n_rx] pairs, got {pair!r}")
            antennas.append((pair[0], pair[1]))
        channel = _parse_channel(sec.take("channel"))
        if channel.model != "rayleigh":
            raise ConfigError("capacity sweeps support only the rayleigh model")
        trials = int(sec.take("trials", 50_000, kind=int))
        if trials < 2:
            raise ConfigError("trials must be >= 2")
        config = ExperimentConfig(
            experiment="capacity",
            seed=seed,
            antennas=tuple(antennas),
            snr_db=_parse_snr_grid(sec.take("snr_db", required=True)),
            capacity_trials=trials,
            channel=channel,
            output=sec.take("output", kind=str),
        )
    elif experiment == "pattern":
        geo_sec = _Section(sec.take("geometry", required=True), "geometry")
        geometry = {
            "rows": geo_sec.take("rows", required=True, kind=int),
            "cols": geo_sec.take("cols", required=True, kind=int),
            "dx_mm": float(geo_sec.take("dx_mm", required=True, kind=(int, float))),
            "dy_mm": float(geo_sec.take("dy_mm", required=True, kind=(int, float))),
            "fc_ghz": float(geo_sec.take("fc_ghz", required=True, kind=(int, float))),
        }
        geo_sec.finish()
        angles = sec.take("scan_angles_deg", required=True)
        if not isinstance(angles, list) or not angles:
            raise ConfigError("scan_angles_deg must be a non-empty list")
        grid_raw = sec.take("grid")
        theta_step, phi_step = 1.0, 1.0
        if grid_raw is not None:
            grid_sec = _Section(grid_raw, "grid")
            theta_step = float(grid_sec.take("theta_step_deg", 1.0, kind=(int, float)))
            phi_step = float(grid_sec.take("phi_step_deg", 1.0, kind=(int, float)))
            grid_sec.finish()
        quantize_bits = sec.take("quantize_bits", kind=int)
        config = ExperimentConfig(
            experiment="pattern",
            seed=seed,
            geometry=geometry,
            scan_angles_deg=tuple(float(a) for a in angles),
            period_cells=int(sec.take("period_cells", 4, kind=int)),
            grid_step_deg=(theta_step, phi_step),
            element_exponent=float(sec.take("element_exponent", 0.0, kind=(int, float))),
            couple_atom_loss=bool(sec.take("couple_atom_loss", False, kind=bool)),
            quantize_bits=quantize_bits,
            output_dir=sec.take("output_dir", "patterns", kind=str),
        )
    elif experiment == "harmonics":
        num_steps = int(sec.take("num_steps", 16, kind=int))
        if num_steps < 2:
            raise ConfigError("num_steps must be >= 2")
        singles = sec.take("single_harmonics", [])
        shifts = sec.take("shift_fractions", [])
        multi = sec.take("multi_targets", [])
        targets = []
        for group in multi:
            one = []
            for entry in group:
                if not isinstance(entry, list) or len(entry) != 2:
                    raise ConfigError("multi_targets entries must be [m, weight] pairs")
                m, w = entry
                weight = complex(w[0], w[1]) if isinstance(w, list) else complex(w)
                one.append((int(m), weight))
            targets.append(tuple(one))
        config = ExperimentConfig(
            experiment="harmonics",
            seed=seed,
            num_steps=num_steps,
            single_harmonics=tuple(int(m) for m in singles),
            shift_fractions=tuple(float(f) for f in shifts),
            multi_targets=tuple(targets),
            harmonic_range=sec.take("harmonic_range", kind=int),
            output_dir=sec.take("output_dir", "harmonics", kind=str),
        )
    elif experiment in ("codebook", "rate"):
        scheme_cfg = sec.take("scheme", required=True)
        im_schemes.rate_of(scheme_cfg)  # full validation
        config = ExperimentConfig(
            experiment=experiment,
            seed=seed,
            scheme=dict(scheme_cfg),
            output=sec.take("output", kind=str),
        )
    else:
        raise ConfigError(
            f"experiment must be ber/capacity/pattern/harmonics/codebook/rate, got {experiment!r}"
        )
    sec.finish()
    return config


# --------------------------------------------------------------------------
# BER engine
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class BerPoint:
    snr_db: float
    trials: int
    bit_errors: int
    ber: float
    ci_low: float
    ci_high: float


@dataclass(frozen=True)
class BerCurve:
    scheme: str
    bits_per_trial: int
    points: tuple

    def to_csv(self, path) -> None:
        lines = ["snr_db,trials,bit_errors,ber,ci_low,ci_high"]
        for p in self.points:
            lines.append(
                f"{p.snr_db:.6f},{p.trials},{p.bit_errors},"
                f"{p.ber:.10e},{p.ci_low:.10e},{p.ci_high:.10e}"
            )
        Path(path).write_text("\n".join(lines) + "\n")


def _complex_normal(rng, shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def _popcount(values: np.ndarray) -> np.ndarray:
    return np.bitwise_count(values.astype(np.uint64))


class _BerModel:
    """Precomputed transmit codebook plus one vectorized batch simulator."""

    def __init__(self, scheme, channel: ChannelSpec, n_rx: int):
        self.scheme = scheme
        self.channel = channel
        self.n_rx = n_rx
        self.codebook = scheme.codebook()
        self.count = self.codebook.count
        if scheme.model == "vector":
            self.x = self.codebook.vectors                      # (n_tx, C)
            self.n_tx = self.x.shape[0]
            self.los = los_matrix(n_rx, self.n_tx, channel.los_structure)
        elif scheme.model == "subcarrier":
            self.x = self.codebook.vectors                      # (n, C)
            self.block = self.x.shape[0]
        elif scheme.model == "matrix":
            self.mats = self.codebook.vectors.reshape(scheme.n_tx, scheme.n_slots, -1)
            self.n_tx = scheme.n_tx
            self.n_slots = scheme.n_slots
            self.los = los_matrix(n_rx, self.n_tx, channel.los_structure)
        elif scheme.model == "state":
            pairs = [scheme.state_and_symbol(w) for w in range(self.count)]
            self.state_of = np.array([p[0] for p in pairs])
            self.sym_of = np.array([p[1] for p in pairs])
            self.num_states = scheme.num_states
        else:
            raise ConfigError(f"scheme model {scheme.model!r} has no BER transmit model")

    def _draw_channel(self, rng, shape):
        if self.channel.model == "awgn":
            return np.ones(shape, dtype=complex)
        h = _complex_normal(rng, shape)
        if self.channel.model == "rician":
            los = self.los if len(shape) == 3 else np.ones(shape[-1], dtype=complex)
            return rician(self.channel.k_factor, np.broadcast_to(los, shape), h)
        return h

    def simulate(self, rng, batch: int, snr_linear: float) -> int:
        """Bit errors over one batch of independent trials."""
        words = rng.integers(0, self.count, batch)
        amp = np.sqrt(snr_linear)
        if self.scheme.model == "vector":
            h = self._draw_channel(rng, (batch, self.n_rx, self.n_tx))
            noise = _complex_normal(rng, (batch, self.n_rx))
            tx = self.x[:, words].T                              # (B, n_tx)
            y = amp * np.einsum("bri,bi->br", h, tx) + noise
            detected = self._detect_vector(y, h, amp)
        elif self.scheme.model == "subcarrier":
            h = self._draw_channel(rng, (batch, self.block))
            noise = _complex_normal(rng, (batch, self.block))
            y = amp * h * self.x[:, words].T + noise
            cross = (np.conj(y) * h) @ self.x                    # (B, C)
            power = (np.abs(h) ** 2) @ (np.abs(self.x) ** 2)
            detected = np.argmin(snr_linear * power - 2.0 * amp * cross.real, axis=1)
        elif self.scheme.model == "matrix":
            h = self._draw_channel(rng, (batch, self.n_rx, self.n_tx))
            noise = _complex_normal(rng, (batch, self.n_rx, self.n_slots))
            tx = np.moveaxis(self.mats[:, :, words], 2, 0)       # (B, n_tx, n_slots)
            y = amp * np.einsum("bri,bit->brt", h, tx) + noise
            detected = self._detect_matrix(y, h, amp)
        else:  # state
            h = _complex_normal(rng, (batch, self.n_rx, self.num_states))
            noise = _complex_normal(rng, (batch, self.n_rx))
            rows = np.arange(batch)
            y = amp * h[rows, :, self.state_of[words]] * self.sym_of[words][:, None] + noise
            detected = self._detect_state(y, h, amp)
        return int(_popcount(words.astype(np.uint64) ^ detected.astype(np.uint64)).sum())

    def _chunk(self, per_trial: int, batch: int) -> int:
        return max(1, min(batch, _HYPOTHESIS_BUDGET // max(per_trial, 1)))

    def _detect_vector(self, y, h, amp):
        batch = y.shape[0]
        out = np.empty(batch, dtype=np.int64)
        step = self._chunk(self.n_rx * self.count, batch)
        for lo in range(0, batch, step):
            sl = slice(lo, min(lo + step, batch))
            mus = amp * np.einsum("bri,ic->brc", h[sl], self.x)
            d = np.sum(np.abs(y[sl][:, :, None] - mus) ** 2, axis=1)
            out[sl] = np.argmin(d, axis=1)
        return out

    def _detect_matrix(self, y, h, amp):
        batch = y.shape[0]
        out = np.empty(batch, dtype=np.int64)
        step = self._chunk(self.n_rx * self.n_slots * self.count, batch)
        for lo in range(0, batch, step):
            sl = slice(lo, min(lo + step, batch))
            mus = amp * np.einsum("bri,itc->brtc", h[sl], self.mats)
            d = np.sum(np.abs(y[sl][:, :, :, None] - mus) ** 2, axis=(1, 2))
            out[sl] = np.argmin(d, axis=1)
        return out

    def _detect_state(self, y, h, amp):
        batch = y.shape[0]
        out = np.empty(batch, dtype=np.int64)
        step = self._chunk(self.n_rx * self.count, batch)
        for lo in range(0, batch, step):
            sl = slice(lo, min(lo + step, batch))
            mus = amp * h[sl][:, :, self.state_of] * self.sym_of[None, None, :]
            d = np.sum(np.abs(y[sl][:, :, None] - mus) ** 2, axis=1)
            out[sl] = np.argmin(d, axis=1)
        return out


def run_ber(config: ExperimentConfig, threads: int = 1) -> BerCurve:
    """BER curve over the configured SNR grid.

    Each trial maps a fresh uniform codeword, sends it through an
    independent channel draw plus AWGN, detects with the exhaustive MLD,
    and counts errored bits (index and symbol bits alike).
    """
    scheme = im_schemes.build_scheme(config.scheme)
    model = _BerModel(scheme, config.channel, config.n_rx)
    bits = scheme.bits_per_interval
    points = []
    for p_idx, snr_db in enumerate(config.snr_db):
        snr = db_to_linear(snr_db)
        policy = config.trials
        n_batches = math.ceil(policy.max_trials / policy.batch_size)

        def batch_sizes(b):
            return min(policy.batch_size, policy.max_trials - b * policy.batch_size)

        def run_batch(b):
            rng = stream_rng(config.seed, p_idx, b)
            return model.simulate(rng, batch_sizes(b), snr)

        trials = errors = 0
        if threads <= 1:
            for b in range(n_batches):
                errors += run_batch(b)
                trials += batch_sizes(b)
                if errors >= policy.min_errors:
                    break
        else:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                done = False
                for wave_start in range(0, n_batches, threads):
                    wave = range(wave_start, min(wave_start + threads, n_batches))
                    for b, result in zip(wave, pool.map(run_batch, wave)):
                        if done:
                            continue  # computed but never counted: keeps prefix rule exact
                        errors += result
                        trials += batch_sizes(b)
                        if errors >= policy.min_errors:
                            done = True
                    if done:
                        break
        points.append(_ber_point(snr_db, trials, errors, bits))
    return BerCurve(config.scheme.get("type", "?"), bits, tuple(points))


def _ber_point(snr_db: float, trials: int, errors: int, bits_per_trial: int) -> BerPoint:
    n_bits = trials * bits_per_trial
    ber = errors / n_bits
    half = 1.96 * math.sqrt(max(ber * (1.0 - ber), 0.0) / n_bits)
    return BerPoint(snr_db, trials, errors, ber, max(ber - half, 0.0), min(ber + half, 1.0))


# --------------------------------------------------------------------------
# capacity / pattern / harmonics runners
# --------------------------------------------------------------------------

def run_capacity(config: ExperimentConfig):
    """Ergodic capacity for every (n_tx, n_rx) pair over the SNR grid."""
    rows = []
    for n_tx, n_rx in config.antennas:
        for snr_db in config.snr_db:
            est = detection.ergodic_capacity(
                n_tx, n_rx, db_to_linear(snr_db), config.capacity_trials, config.seed
            )
            rows.append((n_tx, n_rx, snr_db, est.mean, est.std_err, est.trials))
    return rows


def capacity_csv(rows, path) -> None:
    lines = ["nt,nr,snr_db,capacity_bit_s_hz,std_err,trials"]
    for n_tx, n_rx, snr_db, mean, err, trials in rows:
        lines.append(f"{n_tx},{n_rx},{snr_db:.6f},{mean:.10e},{err:.10e},{trials}")
    Path(path).write_text("\n".join(lines) + "\n")


def _atom_loss_amplitudes(phases: np.ndarray, table, freq_ghz: float,
                          resistance_ohm: float = 0.5) -> np.ndarray:
    """Per-element amplitudes of the nearest realizable tuning states.

    For each commanded phase, picks the capacitance whose tabulated phase is
    closest (wrapped distance) and returns that state's amplitude, modeling
    the finite tuning range of the physical cell.
    """
    states = [
        table.lookup(freq_ghz, metaatom.DiodeState(float(c), resistance_ohm))
        for c in table.c_pf
    ]
    available = np.array([s.phase for s in states])
    amps = np.array([s.amplitude for s in states])
    distance = np.abs(
        np.angle(np.exp(1j * (phases.reshape(-1)[:, None] - available[None, :])))
    )
    return amps[np.argmin(distance, axis=1)].reshape(phases.shape)


def run_pattern(config: ExperimentConfig, out_base: Path):
    """Steered-pattern exports for each commanded scan angle.

    Writes per-angle coding, far-field, and UV CSVs plus a summary with the
    scan-equation prediction, realized peak, and peak directivity.
    """
    geo = config.geometry
    geom = aperture.ApertureGeometry(
        geo["rows"], geo["cols"], geo["dx_mm"] * 1e-3, geo["dy_mm"] * 1e-3,
        geo["fc_ghz"] * 1e9,
    )
    theta, phi = aperture.direction_grid(*config.grid_step_deg)
    table = metaatom.default_response_table() if config.couple_atom_loss else None
    out_dir = out_base / config.output_dir
    out_dir.mkdir(parents=True, exist_ok=True)

    summary = ["angle_cmd_deg,angle_pred_deg,peak_theta_deg,peak_phi_deg,"
               "peak_directivity_dbi,normalization"]
    written = []
    for angle_deg in config.scan_angles_deg:
        angle = np.deg2rad(angle_deg)
        gradient = geom.wavenumber * geom.dx * np.sin(angle)   # rad per cell
        phase_range = gradient * config.period_cells
        if phase_range > 2.0 * np.pi + 1e-12:
            raise ConfigError(
                f"scan angle {angle_deg} deg needs {np.rad2deg(phase_range):.1f} deg "
                f"of range over {config.period_cells} cells; reduce period_cells"
            )
        spec = aperture.SteeringSpec(config.period_cells, phase_range, geom.dx)
        predicted = aperture.scan_angle(spec, geom.wavelength)
        steer = aperture.steering_phase(geom, spec)
        coding = aperture.compose_phase(
            np.zeros((geom.rows, geom.cols)), steer, np.zeros((geom.rows, geom.cols))
        )
        phase = coding.phase
        if config.quantize_bits is not None:
            phase = aperture.quantize_phase(phase, config.quantize_bits)
        amplitude = coding.amplitude
        if table is not None:
            amplitude = _atom_loss_amplitudes(phase, table, geo["fc_ghz"])
        coding = aperture.PhaseCoding(amplitude, phase)

        grid = aperture.radiation_pattern(coding, geom, theta, phi,
                                          config.element_exponent)
        peak_theta, peak_phi = grid.peak_direction()
        peak_lin, peak_dbi = aperture.peak_directivity(grid)
        norm = aperture.directivity_normalization(grid)

        tag = f"scan{angle_deg:+06.1f}".replace(".", "p")
        coding_path = out_dir / f"coding_{tag}.csv"
        field_path = out_dir / f"farfield_{tag}.csv"
        uv_path = out_dir / f"farfield_uv_{tag}.csv"
        aperture.coding_to_csv(coding, coding_path)
        grid.to_csv(field_path)
        grid.to_uv_csv(uv_path)
        written += [coding_path, field_path, uv_path]
        summary.append(
            f"{angle_deg:.3f},{np.rad2deg(predicted):.6f},{np.rad2deg(peak_theta):.6f},"
            f"{np.rad2deg(peak_phi):.6f},{peak_dbi:.6f},{norm:.8f}"
        )
    summary_path = out_dir / "summary.csv"
    summary_path.write_text("\n".join(summary) + "\n")
    return written + [summary_path]


def run_harmonics(config: ExperimentConfig, out_base: Path):
    """Harmonic-synthesis exports: single tones, phase shifts, multi-tone."""
    num = config.num_steps
    m_range = config.harmonic_range if config.harmonic_range is not None else num
    harmonics = range(-m_range, m_range + 1)
    out_dir = out_base / config.output_dir
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    summary = ["kind,param,dominant_m,dominant_mag,residual"]

    for m in config.single_harmonics:
        steps = spacetime.synthesize_single_harmonic(m, num)
        spectrum = spacetime.harmonic_coefficients(steps, harmonics)
        seq_path = out_dir / f"sequence_m{m:+d}.csv"
        spec_path = out_dir / f"spectrum_m{m:+d}.csv"
        spacetime.sequence_to_csv(steps, seq_path)
        spectrum.to_csv(spec_path)
        written += [seq_path, spec_path]
        dom = spectrum.dominant()
        summary.append(f"single,{m},{dom},{spectrum.magnitude(dom):.8f},")

    if config.shift_fractions:
        base = spacetime.synthesize_single_harmonic(1, num)
        for frac in config.shift_fractions:
            ticks = frac * num
            if abs(ticks - round(ticks)) > 1e-9:
                raise ConfigError(
                    f"shift fraction {frac} is not an integer number of steps for L = {num}"
                )
            shifted = spacetime.phase_shift_harmonic(base, int(round(ticks)) % num)
            spectrum = spacetime.harmonic_coefficients(shifted, harmonics)
            spec_path = out_dir / f"spectrum_shift{frac:.3f}.csv"
            spectrum.to_csv(spec_path)
            written.append(spec_path)
            summary.append(
                f"shift,{frac},{spectrum.dominant()},"
                f"{spectrum.magnitude(spectrum.dominant()):.8f},"
            )

    for i, targets in enumerate(config.multi_targets):
        result = spacetime.synthesize_multi_harmonic(list(targets), num, seed=config.seed)
        spectrum = spacetime.harmonic_coefficients(result.steps, harmonics)
        seq_path = out_dir / f"sequence_multi{i}.csv"
        spec_path = out_dir / f"spectrum_multi{i}.csv"
        spacetime.sequence_to_csv(result.steps, seq_path)
        spectrum.to_csv(spec_path)
        written += [seq_path, spec_path]
        dom = spectrum.dominant()
        summary.append(f"multi,{i},{dom},{spectrum.magnitude(dom):.8f},{result.residual:.8f}")

    summary_path = out_dir / "summary.csv"
    summary_path.write_text("\n".join(summary) + "\n")
    return written + [summary_path]


def codebook_csv(scheme_config: dict, path) -> None:
    scheme = im_schemes.build_scheme(scheme_config)
    rows = im_schemes.codebook_rows(scheme)
    lines = ["bits,indices,symbols"]
    lines += [f"{bits},{indices},{symbols}" for bits, indices, symbols in rows]
    Path(path).write_text("\n".join(lines) + "\n")
