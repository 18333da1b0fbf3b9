import logging
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from .channels import KrausChannel, validate_channel
from .errors import DimensionTooSmall
from .hermitian import DensityMatrix, validate_density

logger = logging.getLogger(__name__)

RNG_ALGORITHM = "numpy.random.Philox-4x64"
ENSEMBLES = ("ginibre_mixed", "haar_pure", "rank_limited")
SEED_MASK = (1 << 64) - 1


def make_generator(seed: int, *stream: int) -> np.random.Generator:
    """
    A Philox generator keyed by (seed, *stream).

    Every draw index gets its own stream, so parallel callers partition the
    index space instead of sharing generator state.
    """
    entropy = [int(seed) & SEED_MASK] + [int(s) & SEED_MASK for s in stream]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))


@dataclass(frozen=True)
class SamplerConfig:
    """
    Parameters
    ----------
    dim : int
        Hilbert-space dimension (>= 2)
    seed : int
        64-bit seed
    ensemble : str
        One of "ginibre_mixed", "haar_pure", "rank_limited"
    rank : int, optional
        Column count of the Ginibre factor for "rank_limited"
    """

    dim: int
    seed: int
    ensemble: str = "ginibre_mixed"
    rank: int = 0

    def __post_init__(self):
        if self.dim < 2:
            raise DimensionTooSmall(f"sampler needs dim >= 2, got {self.dim}")
        if self.ensemble not in ENSEMBLES:
            raise ValueError(
                f"Unknown ensemble {self.ensemble!r}. Supported: {', '.join(ENSEMBLES)}"
            )
        if self.ensemble == "rank_limited" and not 1 <= self.rank <= self.dim:
            raise ValueError(f"rank must lie in [1, {self.dim}], got {self.rank}")

    def metadata(self) -> dict:
        return {
            "dim": self.dim,
            "seed": self.seed,
            "ensemble": self.ensemble,
            "rank": self.rank,
            "rng": RNG_ALGORITHM,
        }


def _ginibre(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    return rng.normal(size=(rows, cols)) + 1j * rng.normal(size=(rows, cols))


def random_density(cfg: SamplerConfig, index: int = 0) -> DensityMatrix:
    """
    Draw state number `index` of the configured ensemble.

    Parameters
    ----------
    cfg : SamplerConfig
        Dimension, seed and ensemble
    index : int
        Draw index; the same (cfg, index) always gives the same state

    Returns
    -------
    DensityMatrix
        GG†/Tr(GG†) for the Ginibre ensembles, |ψ⟩⟨ψ| for haar_pure
    """
    rng = make_generator(cfg.seed, 0, index)
    if cfg.ensemble == "haar_pure":
        psi = _ginibre(rng, cfg.dim, 1)[:, 0]
        psi /= np.linalg.norm(psi)
        return validate_density(np.outer(psi, psi.conj()))

    cols = cfg.rank if cfg.ensemble == "rank_limited" else cfg.dim
    g = _ginibre(rng, cfg.dim, cols)
    m = g @ g.conj().T
    m = 0.5 * (m + m.conj().T)
    return validate_density(m / np.trace(m).real)


def random_incoherent_channel(dim: int, n_ops: int, seed: int) -> KrausChannel:
    """
    Draw a channel of weighted partial permutations.

    Operator n sends column j to row π_n(j) with complex weight w_nj, where
    π_n is a permutation and Σ_n |w_nj|² = 1 for every column j, so
    Σ_n K_n†K_n = I holds by construction.

    Parameters
    ----------
    dim : int
        Dimension of the system
    n_ops : int
        Number of Kraus operators (>= 1)
    seed : int
        64-bit seed

    Returns
    -------
    KrausChannel
        A channel flagged incoherent
    """
    if n_ops < 1:
        raise ValueError(f"n_ops must be at least 1, got {n_ops}")
    rng = make_generator(seed, 1)
    weights = _ginibre(rng, n_ops, dim)
    weights /= np.linalg.norm(weights, axis=0, keepdims=True)

    columns = np.arange(dim)
    operators = []
    for n in range(n_ops):
        targets = rng.permutation(dim)
        k = np.zeros((dim, dim), dtype=np.complex128)
        k[targets, columns] = weights[n]
        operators.append(k)
    return validate_channel(operators, tol=1e-12)


def random_ensemble(dim: int, size: int, seed: int) -> List[Tuple[float, DensityMatrix]]:
    """Dirichlet(1) weights paired with Ginibre-mixed states."""
    if size < 1:
        raise ValueError(f"ensemble size must be at least 1, got {size}")
    rng = make_generator(seed, 2)
    weights = rng.dirichlet(np.ones(size))
    cfg = SamplerConfig(dim=dim, seed=seed)
    return [
        (float(weight), random_density(cfg, index=1_000_000 + i))
        for i, weight in enumerate(weights)
    ]
