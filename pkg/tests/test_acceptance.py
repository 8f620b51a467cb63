"""Acceptance gate: every shipped claim checked at its stated tolerance.

Each criterion prints one ``ACCEPTANCE nn <name>: PASS/FAIL`` line (visible
with ``pytest -s tests/test_acceptance.py``).  Statistical checks run from
fixed seeds, so outcomes are reproducible bit for bit.
"""

import math
import time
from contextlib import contextmanager
from math import comb
from pathlib import Path

import numpy as np
import pytest
from scipy.special import exp1

from risim import aperture, spacetime
from risim.combinatorics import subset_rank, subset_unrank
from risim.detection import ergodic_capacity
from risim.harness import parse_config, run_ber
from risim.im_schemes import build_scheme
from risim.metaatom import default_response_table

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


@contextmanager
def criterion(num, name):
    try:
        yield
    except BaseException:
        print(f"\nACCEPTANCE {num:02d} {name}: FAIL")
        raise
    print(f"\nACCEPTANCE {num:02d} {name}: PASS")


def qfunc(x):
    return 0.5 * math.erfc(x / math.sqrt(2.0))


def ber_config(scheme, channel, snr_db, *, n_rx=1, seed=1, max_trials=1_000_000,
               min_errors=10 ** 9):
    return parse_config({
        "experiment": "ber",
        "scheme": scheme,
        "channel": channel,
        "n_rx": n_rx,
        "snr_db": snr_db,
        "seed": seed,
        "trials": {"max_trials": max_trials, "min_errors": min_errors,
                   "batch_size": 65_536},
    })


def test_01_awgn_ber_oracle():
    with criterion(1, "awgn-ber-q-function"):
        start = time.monotonic()
        snrs = [0.0, 4.0, 8.0, 10.0]
        cases = [
            ({"type": "psk", "order": 2}, lambda g: qfunc(math.sqrt(2 * g))),
            ({"type": "psk", "order": 4}, lambda g: qfunc(math.sqrt(g))),
        ]
        for scheme, closed_form in cases:
            curve = run_ber(ber_config(scheme, {"model": "awgn"}, snrs, seed=101))
            for point in curve.points:
                assert point.trials >= 1_000_000
                p = closed_form(10 ** (point.snr_db / 10))
                n_bits = point.trials * curve.bits_per_trial
                sigma = math.sqrt(n_bits * p * (1 - p))
                assert abs(point.bit_errors - n_bits * p) <= 3 * sigma, (
                    f"{scheme['order']}-PSK at {point.snr_db} dB: "
                    f"{point.bit_errors} errors vs {n_bits * p:.1f} expected"
                )
        assert time.monotonic() - start < 120.0


def test_02_rayleigh_ber_oracle():
    with criterion(2, "rayleigh-bpsk-closed-form"):
        curve = run_ber(ber_config({"type": "psk", "order": 2},
                                   {"model": "rayleigh"}, [10.0], seed=102))
        point = curve.points[0]
        assert point.trials >= 1_000_000
        gbar = 10.0
        p = 0.5 * (1 - math.sqrt(gbar / (1 + gbar)))
        assert p == pytest.approx(0.02327, abs=5e-6)
        sigma = math.sqrt(point.trials * p * (1 - p))
        assert abs(point.bit_errors - point.trials * p) <= 3 * sigma


def test_03_sm_advantage_over_siso_qam():
    with criterion(3, "sm-beats-siso-16qam-at-4bpcu"):
        snrs = [15.0, 20.0, 25.0]
        sm = run_ber(ber_config({"type": "sm", "n_tx": 4, "order": 4},
                                {"model": "rayleigh"}, snrs, n_rx=2, seed=11,
                                max_trials=4_000_000, min_errors=400))
        qam = run_ber(ber_config({"type": "qam", "order": 16},
                                 {"model": "rayleigh"}, snrs, n_rx=1, seed=11,
                                 max_trials=4_000_000, min_errors=400))
        assert sm.bits_per_trial == qam.bits_per_trial == 4  # matched 4 bpcu
        for sm_pt, qam_pt in zip(sm.points, qam.points):
            assert sm_pt.ber < qam_pt.ber
            assert sm_pt.ci_high < qam_pt.ci_low, (
                f"CIs overlap at {sm_pt.snr_db} dB"
            )


def test_04_ofdm_im_loopback_and_advantage():
    with criterion(4, "ofdm-im-loopback-and-advantage"):
        for order in (2, 4):
            scheme = build_scheme({"type": "ofdm_im", "n": 4, "k": 2, "order": order})
            for word in range(1 << scheme.bits_per_interval):
                assert scheme.demap_word(scheme.map_word(word)) == word
        snrs = [20.0, 25.0, 30.0]
        im = run_ber(ber_config({"type": "ofdm_im", "n": 4, "k": 2, "order": 2},
                                {"model": "rayleigh"}, snrs, seed=11,
                                max_trials=5_000_000, min_errors=300))
        classic = run_ber(ber_config({"type": "ofdm_im", "n": 4, "k": 4, "order": 2},
                                     {"model": "rayleigh"}, snrs, seed=11,
                                     max_trials=5_000_000, min_errors=300))
        # matched spectral efficiency: both carry 1 bit per subcarrier
        assert im.bits_per_trial == classic.bits_per_trial == 4
        for im_pt, ofdm_pt in zip(im.points, classic.points):
            assert im_pt.ci_high < ofdm_pt.ci_low, (
                f"no CI-separated advantage at {im_pt.snr_db} dB"
            )


def test_05_rician_continuum():
    with criterion(5, "rician-k-continuum"):
        snrs = [0.0, 5.0, 10.0]
        curves = {}
        for k in (0.0, 0.5, 1.0):
            curves[k] = run_ber(ber_config(
                {"type": "sm", "n_tx": 4, "order": 4},
                {"model": "rician", "K": k}, snrs, n_rx=4, seed=3,
                max_trials=1_000_000, min_errors=300,
            ))
        rayleigh_curve = run_ber(ber_config(
            {"type": "sm", "n_tx": 4, "order": 4},
            {"model": "rayleigh"}, snrs, n_rx=4, seed=3,
            max_trials=1_000_000, min_errors=300,
        ))
        # K = 0 degeneracy is exact: same seeds give the identical curve
        assert curves[0.0] == rayleigh_curve
        # higher K no worse at the top of the SNR grid
        top = {k: c.points[-1] for k, c in curves.items()}
        assert top[1.0].ber <= top[0.5].ber <= top[0.0].ber
        assert top[1.0].ci_high < top[0.0].ci_low  # strict end-to-end separation


def test_06_ergodic_capacity():
    with criterion(6, "ergodic-capacity-oracle"):
        snr = 10.0
        oracle = math.exp(1.0 / snr) * exp1(1.0 / snr) / math.log(2.0)
        assert oracle == pytest.approx(2.906, abs=1e-3)
        est = ergodic_capacity(1, 1, snr, trials=200_000, seed=6)
        assert est.mean == pytest.approx(2.906, abs=0.02)
        assert est.mean == pytest.approx(oracle, abs=0.02)
        means = [ergodic_capacity(n, n, snr, trials=20_000, seed=6).mean
                 for n in (1, 2, 4, 8)]
        assert all(b > a for a, b in zip(means, means[1:]))


def test_07_single_harmonic_synthesis():
    with criterion(7, "single-harmonic-synthesis"):
        num = 16
        harmonics = range(-8, 9)
        for m in (-2, -1, 0, 1, 2):
            steps = spacetime.synthesize_single_harmonic(m, num)
            spectrum = spacetime.harmonic_coefficients(steps, harmonics)
            assert spectrum.dominant() == m
            expected = 1.0 if m == 0 else math.sin(math.pi * abs(m) / num) / (math.pi * abs(m) / num)
            assert abs(spectrum.magnitude(m) - expected) < 1e-12
            # independent oracle: per-step quadrature of the ZOH waveform
            nodes, weights = np.polynomial.legendre.leggauss(12)
            oracle = 0.0 + 0.0j
            for n, gamma in enumerate(steps):
                a, b = n / num, (n + 1) / num
                t = 0.5 * (b - a) * nodes + 0.5 * (a + b)
                oracle += gamma * 0.5 * (b - a) * np.sum(weights * np.exp(-2j * np.pi * m * t))
            assert abs(spectrum[m] - oracle) < 1e-9
            floor = max(spectrum.magnitude(mp) for mp in harmonics if mp != m)
            assert spectrum.magnitude(m) / max(floor, 1e-300) > 10 ** (13 / 20)


def test_08_harmonic_phase_control():
    with criterion(8, "gfh-phase-control"):
        num = 16
        ramp = spacetime.synthesize_single_harmonic(1, num)
        base = spacetime.harmonic_coefficients(ramp, [1])[1]
        expected_rotation = {0: 0.0, num // 4: -90.0, num // 2: 180.0,
                             3 * num // 4: 90.0}
        for shift, rotation_deg in expected_rotation.items():
            shifted = spacetime.harmonic_coefficients(
                spacetime.phase_shift_harmonic(ramp, shift), [1]
            )[1]
            rotation = math.degrees(np.angle(shifted / base))
            assert abs(abs(rotation) - abs(rotation_deg)) < 1e-9
            if shift not in (0, num // 2):
                assert rotation == pytest.approx(rotation_deg, abs=1e-9)
            assert abs(abs(shifted) - abs(base)) < 1e-12


def test_09_beam_steering():
    with criterion(9, "beam-steering-20x20"):
        geom = aperture.ApertureGeometry(20, 20, 2.8e-3, 2.8e-3, 28e9)
        # steering gradient is along x only, so the global peak lies in the
        # phi in {0, 180 deg} plane; scan it finely there
        theta_cut = np.deg2rad(np.arange(0.0, 90.0 + 1e-9, 0.05))
        phi_cut = np.array([0.0, np.pi])
        for commanded in (0.0, 15.0, 30.0, 45.0):
            gradient = geom.wavenumber * geom.dx * math.sin(math.radians(commanded))
            spec = aperture.SteeringSpec(4, gradient * 4, geom.dx)
            predicted = aperture.scan_angle(spec, geom.wavelength)
            assert math.degrees(predicted) == pytest.approx(commanded, abs=1e-9)
            coding = aperture.compose_phase(
                np.zeros((20, 20)), aperture.steering_phase(geom, spec),
                np.zeros((20, 20)),
            )
            cut = aperture.radiation_pattern(coding, geom, theta_cut, phi_cut)
            peak_theta, _ = cut.peak_direction()
            assert abs(math.degrees(peak_theta) - commanded) <= 1.0
            full = aperture.radiation_pattern(coding, geom)
            norm = aperture.directivity_normalization(full)
            assert abs(norm - 1.0) <= 0.01


def test_10_meta_atom_data_gate():
    with criterion(10, "meta-atom-dataset-gate"):
        table = default_response_table()
        assert table.phase_span_deg(28.0, 0.5) == pytest.approx(310.0, abs=2.0)
        assert table.worst_loss_db(28.0) <= 2.2
        band = table.freq_ghz[(table.freq_ghz >= 26.8) & (table.freq_ghz <= 30.1)]
        assert band.size >= 2
        for f in band:
            assert table.phase_span_deg(float(f), 0.5) >= 270.0


def test_11_universal_codec_properties():
    with criterion(11, "universal-codec-property-suite"):
        start = time.monotonic()
        scheme_configs = [
            {"type": "psk", "order": 2},
            {"type": "psk", "order": 4},
            {"type": "qam", "order": 16},
            {"type": "sm", "n_tx": 2, "order": 2},
            {"type": "sm", "n_tx": 4, "order": 4},
            {"type": "ssk", "n_tx": 8},
            {"type": "gsm", "n_tx": 4, "n_active": 2, "order": 4},
            {"type": "qsm", "n_tx": 4, "order": 16},
            {"type": "ofdm_im", "n": 4, "k": 2, "order": 2},
            {"type": "ofdm_im", "n": 4, "k": 2, "order": 4},
            {"type": "ofdm_im", "n": 8, "k": 4, "order": 4},  # 2^14 codewords
            {"type": "sc_im", "slots": 4, "k": 2, "order": 2,
             "symbols_per_frame": 16, "cp_length": 4},
            {"type": "stsk", "q_matrices": 4, "p_active": 1, "order": 2,
             "n_tx": 2, "n_slots": 2},
            {"type": "stsk", "q_matrices": 4, "p_active": 2, "order": 4,
             "n_tx": 2, "n_slots": 2},
            {"type": "mbm", "num_states": 16},
            {"type": "mbm", "num_states": 4, "order": 4},
            {"type": "sim_ook", "harmonics": [-2, -1, 1, 2], "order": 4,
             "num_steps": 16},
        ]
        for cfg in scheme_configs:
            scheme = build_scheme(dict(cfg))
            count = 1 << scheme.bits_per_interval
            assert count <= 1 << 14
            for word in range(count):
                assert scheme.demap_word(scheme.map_word(word)) == word, cfg
            book = scheme.codebook()
            assert book.count == count  # rate consistency: log2|codebook| = bits
            energy = np.mean(np.sum(np.abs(book.vectors) ** 2, axis=0)) / scheme.channel_uses
            assert energy == pytest.approx(1.0, abs=1e-12), cfg
        for n in range(1, 17):
            for k in range(1, n + 1):
                for rank in range(comb(n, k)):
                    assert subset_rank(subset_unrank(rank, n, k), n) == rank
        assert time.monotonic() - start < 60.0


def test_12_determinism_across_threads(tmp_path):
    with criterion(12, "thread-count-determinism"):
        config = parse_config(CONFIGS / "ber_rayleigh_bpsk.json")
        outputs = []
        for threads in (1, 4):
            curve = run_ber(config, threads=threads)
            path = tmp_path / f"threads{threads}.csv"
            curve.to_csv(path)
            outputs.append(path.read_bytes())
        assert outputs[0] == outputs[1]
        repeat = run_ber(config, threads=4)
        path = tmp_path / "repeat.csv"
        repeat.to_csv(path)
        assert path.read_bytes() == outputs[0]
