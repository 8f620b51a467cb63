"""Maximum-likelihood detection and capacity metrics.

The detector scans a finite candidate codebook and returns the label whose
hypothesis minimizes the Euclidean distance

    r(x) = sum_l | y_l - sum_i H_{l,i} x_i |^2.

Ties break deterministically toward the lowest label (a measure-zero event
under continuous noise; determinism keeps parallel runs reproducible).
"""

from dataclasses import dataclass

import numpy as np

from . import channel as channel_mod


@dataclass(frozen=True)
class CandidateSet:
    """Transmit hypotheses in label order.

    ``labels`` are unique integers sorted ascending; ``vectors`` holds one
    column per candidate (shape (dim, count)).
    """

    labels: np.ndarray
    vectors: np.ndarray

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=np.int64)
        vectors = np.asarray(self.vectors, dtype=complex)
        if labels.ndim != 1 or labels.size == 0:
            raise ValueError("candidate set must be non-empty")
        if vectors.ndim != 2 or vectors.shape[1] != labels.size:
            raise ValueError("vectors must be (dim, n_candidates)")
        if len(np.unique(labels)) != labels.size:
            raise ValueError("candidate labels must be unique")
        if np.any(np.diff(labels) <= 0):
            order = np.argsort(labels)
            labels = labels[order]
            vectors = vectors[:, order]
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "vectors", vectors)

    @property
    def count(self) -> int:
        return int(self.labels.size)


def nearest_hypothesis(y: np.ndarray, hypotheses: np.ndarray) -> int:
    """Index of the column of ``hypotheses`` closest to ``y`` in Euclidean
    distance; first (lowest) index wins ties."""
    d = np.sum(np.abs(y[:, None] - hypotheses) ** 2, axis=0)
    return int(np.argmin(d))


def mld(y: np.ndarray, h: np.ndarray, candidates: CandidateSet) -> int:
    """Maximum-likelihood label for received vector y under channel h."""
    y = np.asarray(y, dtype=complex).reshape(-1)
    h = np.asarray(h, dtype=complex)
    if h.shape != (y.size, candidates.vectors.shape[0]):
        raise ValueError(
            f"channel shape {h.shape} inconsistent with y ({y.size}) and "
            f"candidates ({candidates.vectors.shape[0]})"
        )
    idx = nearest_hypothesis(y, h @ candidates.vectors)
    return int(candidates.labels[idx])


def detect_ofdm_im(y, h, scheme) -> np.ndarray:
    """Joint index+symbol ML detection of subcarrier-IM blocks.

    ``y`` and ``h`` have shape (n_blocks, n) (or (n,) for a single block)
    with one flat-fading coefficient per subcarrier.  Only valid activation
    sets (rank below the index-bit budget) are ever returned.
    """
    y = np.atleast_2d(np.asarray(y, dtype=complex))
    h = np.atleast_2d(np.asarray(h, dtype=complex))
    if y.shape != h.shape or y.shape[1] != scheme.block_size:
        raise ValueError(
            f"y/h must be (n_blocks, {scheme.block_size}), got {y.shape} and {h.shape}"
        )
    codebook = scheme.codebook()
    x = codebook.vectors  # (n, C)
    bits = []
    for block in range(y.shape[0]):
        hyp = h[block][:, None] * x
        idx = nearest_hypothesis(y[block], hyp)
        word = int(codebook.labels[idx])
        bits.append(word)
    out = np.concatenate(
        [_word_bits(w, scheme.bits_per_interval) for w in bits]
    )
    return out


def _word_bits(word: int, width: int) -> np.ndarray:
    return np.array([(word >> (width - 1 - i)) & 1 for i in range(width)], dtype=np.int8)


@dataclass(frozen=True)
class CapacityEstimate:
    mean: float      # bit/s/Hz
    std_err: float
    trials: int


def instantaneous_capacity(h: np.ndarray, snr_linear: float) -> float:
    """log2 det(I + gamma/Nt * H H^H) for one channel realization."""
    h = np.asarray(h, dtype=complex)
    n_rx, n_tx = h.shape
    gram = np.eye(n_rx) + (snr_linear / n_tx) * (h @ h.conj().T)
    sign, logdet = np.linalg.slogdet(gram)
    return float(logdet / np.log(2.0))


def ergodic_capacity(n_tx: int, n_rx: int, snr_linear: float, trials: int,
                     seed: int, model: str = "rayleigh") -> CapacityEstimate:
    """Monte Carlo mean of the instantaneous capacity over channel draws.

    Reports the standard error of the mean so consumers can set principled
    tolerances.  Deterministic in (seed, n_tx, n_rx, trials).
    """
    if model != "rayleigh":
        raise ValueError(f"unsupported capacity channel model {model!r}")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = channel_mod.stream_rng(seed, n_tx, n_rx)
    batch = 4096
    values = np.empty(trials)
    done = 0
    eye = np.eye(n_rx)
    while done < trials:
        n = min(batch, trials - done)
        h = (rng.standard_normal((n, n_rx, n_tx)) + 1j * rng.standard_normal((n, n_rx, n_tx))) / np.sqrt(2.0)
        gram = eye[None] + (snr_linear / n_tx) * (h @ np.conj(np.transpose(h, (0, 2, 1))))
        _, logdet = np.linalg.slogdet(gram)
        values[done:done + n] = logdet / np.log(2.0)
        done += n
    mean = float(values.mean())
    std_err = float(values.std(ddof=1) / np.sqrt(trials)) if trials > 1 else float("inf")
    return CapacityEstimate(mean, std_err, trials)
