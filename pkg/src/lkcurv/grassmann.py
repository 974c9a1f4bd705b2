"""Haar-uniform random subspaces and Monte Carlo means over them.

``haar_sample`` draws a uniformly distributed k-plane through the origin of
R^n by Gram-Schmidt orthonormalization of independent Gaussian vectors;
``grassmann_mean`` averages a function of such planes with a standard error.

Determinism contract: sample ``i`` of a run is generated from a counter-based
Philox stream keyed by ``(seed, i)``, so the estimate is bit-identical for a
given ``(n, k, n_samples, seed)`` no matter how the samples are scheduled
across workers.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from math import sqrt
from typing import Callable, Optional

import numpy as np

from .errors import DegenerateSample, GenericityError, UnstableLink

ORTHONORMAL_TOL = 1e-10
# smallest allowed residual norm before normalization in Gram-Schmidt
RANK_DEFICIENCY_TOL = 1e-8
DEGENERATE_BUDGET = 0.01
MAX_RETRIES_PER_SLOT = 64

# stream domains, kept distinct so different modules never share a substream
STREAM_GRASSMANN = 1
STREAM_VERTEX = 2
STREAM_NORMAL_SPHERE = 3
STREAM_GENERIC = 4


def substream(seed: int, domain: int, index: int = 0, sub: int = 0) -> np.random.Generator:
    """Counter-based generator keyed by (seed, domain, index, sub).

    Distinct keys give statistically independent streams, so per-sample and
    per-vertex draws can be evaluated in any order or in parallel.
    """
    if not 0 <= index < (1 << 32):
        raise ValueError("substream index out of range")
    if not 0 <= sub < (1 << 24):
        raise ValueError("substream sub-index out of range")
    if not 0 <= domain < (1 << 8):
        raise ValueError("substream domain out of range")
    word = (domain << 56) | (index << 24) | sub
    key = np.array([np.uint64(seed & 0xFFFFFFFFFFFFFFFF), np.uint64(word)], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


@dataclass(frozen=True, eq=False)
class Subspace:
    """A k-dimensional linear subspace of R^n held as an orthonormal frame.

    ``frame`` has shape (k, n) with orthonormal rows.  Everything downstream
    must be invariant under re-orthonormalization of the same subspace.
    """

    n: int
    k: int
    frame: np.ndarray

    def __post_init__(self):
        frame = np.asarray(self.frame, dtype=float)
        object.__setattr__(self, "frame", frame)
        if frame.shape != (self.k, self.n):
            raise ValueError(f"frame shape {frame.shape} != ({self.k}, {self.n})")
        if self.k > 0:
            gram = frame @ frame.T
            if np.max(np.abs(gram - np.eye(self.k))) > ORTHONORMAL_TOL:
                raise ValueError("frame rows are not orthonormal")

    def project(self, x: np.ndarray) -> np.ndarray:
        """Orthogonal projection of ambient points onto the subspace."""
        x = np.asarray(x, dtype=float)
        return (x @ self.frame.T) @ self.frame

    def coords(self, x: np.ndarray) -> np.ndarray:
        """Coordinates of ambient points in the frame basis."""
        return np.asarray(x, dtype=float) @ self.frame.T

    def normal_basis(self) -> np.ndarray:
        """Orthonormal basis of the orthogonal complement, shape (n-k, n)."""
        if self.k == self.n:
            return np.zeros((0, self.n))
        q, _ = np.linalg.qr(self.frame.T, mode="complete")
        return q[:, self.k:].T


@dataclass(frozen=True, eq=False)
class AffineFlat:
    """An affine flat base + H for a linear subspace H."""

    subspace: Subspace
    base: np.ndarray

    def __post_init__(self):
        base = np.asarray(self.base, dtype=float)
        object.__setattr__(self, "base", base)
        if base.shape != (self.subspace.n,):
            raise ValueError("base point dimension mismatch")
        if not np.all(np.isfinite(base)):
            raise ValueError("base point must be finite")

    def contains(self, x: np.ndarray, tol: float = 1e-9) -> bool:
        rel = np.asarray(x, dtype=float) - self.base
        residual = rel - self.subspace.project(rel)
        return float(np.linalg.norm(residual)) <= tol * (1.0 + np.linalg.norm(rel))


def shift_subspace(subspace: Subspace, x0) -> AffineFlat:
    """The affine flat x0 + H through x0 with direction subspace H."""
    return AffineFlat(subspace=subspace, base=np.asarray(x0, dtype=float))


def _gram_schmidt(rows: np.ndarray) -> Optional[np.ndarray]:
    """Modified Gram-Schmidt; None when a residual norm falls below tolerance."""
    q = np.array(rows, dtype=float)
    k = q.shape[0]
    for i in range(k):
        for j in range(i):
            q[i] -= np.dot(q[i], q[j]) * q[j]
        norm = np.linalg.norm(q[i])
        if norm < RANK_DEFICIENCY_TOL:
            return None
        q[i] /= norm
    return q


def haar_sample(n: int, k: int, rng: np.random.Generator) -> Subspace:
    """Draw a rotation-invariant random k-plane in R^n.

    Orthonormalizes k independent standard-normal n-vectors; numerically
    rank-deficient draws (a probability-zero event) are redrawn.
    """
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    while True:
        frame = _gram_schmidt(rng.standard_normal((k, n)))
        if frame is not None:
            return Subspace(n=n, k=k, frame=frame)


@dataclass(eq=False)
class MonteCarloEstimate:
    """Sample mean with its standard error and full sampling provenance."""

    mean: float
    stderr: float
    n_samples: int
    seed: int
    n_rejected: int = 0
    values: Optional[np.ndarray] = field(default=None, repr=False)


def grassmann_mean(
    n: int,
    k: int,
    f: Callable[[Subspace], float],
    n_samples: int,
    seed: int,
    workers: int = 1,
    stream: int = 0,
    collect: bool = False,
) -> MonteCarloEstimate:
    """Monte Carlo estimate of the Haar mean of ``f`` over k-planes in R^n.

    ``f`` may raise :class:`DegenerateSample` (or :class:`UnstableLink`) on a
    measure-zero set of planes; those draws are rejected and redrawn from the
    same per-slot stream.  If more than ``DEGENERATE_BUDGET`` of all draws are
    rejected the run aborts with :class:`GenericityError`, since that level of
    degeneracy indicates the input violates the genericity assumptions.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be positive")
    values = np.empty(n_samples, dtype=float)
    rejected = np.zeros(n_samples, dtype=np.int64)

    def run_slot(i: int) -> None:
        rng = substream(seed, STREAM_GRASSMANN, i, stream)
        for _ in range(MAX_RETRIES_PER_SLOT):
            subspace = haar_sample(n, k, rng)
            try:
                values[i] = float(f(subspace))
                return
            except (DegenerateSample, UnstableLink):
                rejected[i] += 1
        raise GenericityError(
            f"sample slot {i} exhausted {MAX_RETRIES_PER_SLOT} redraws; "
            "the set appears to violate genericity assumptions"
        )

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(run_slot, range(n_samples)))
    else:
        for i in range(n_samples):
            run_slot(i)

    n_rejected = int(rejected.sum())
    total_draws = n_samples + n_rejected
    if n_rejected > DEGENERATE_BUDGET * total_draws:
        raise GenericityError(
            f"{n_rejected} of {total_draws} draws were degenerate "
            f"(> {DEGENERATE_BUDGET:.0%} budget)"
        )

    mean = float(np.mean(values))
    if n_samples > 1:
        stderr = float(np.std(values, ddof=1) / sqrt(n_samples))
    else:
        stderr = 0.0
    return MonteCarloEstimate(
        mean=mean,
        stderr=stderr,
        n_samples=n_samples,
        seed=seed,
        n_rejected=n_rejected,
        values=values if collect else None,
    )
