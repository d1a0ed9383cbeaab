"""Random instance generators for property sweeps and verification suites.

All generators take an explicit numpy Generator so sweeps are reproducible
end to end.  Distributions are the standard unitarily invariant ones:
Ginibre-induced density operators, Haar-projected subspaces, GUE-style
Hermitian matrices rescaled to a fixed spectral window.
"""

from __future__ import annotations

import numpy as np

from .qcore import DensityOperator, HermitianObservable, ProjectionOperator, StateVector


def random_state(rng: np.random.Generator, dim: int) -> StateVector:
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return StateVector(v / np.linalg.norm(v))


def random_density(rng: np.random.Generator, dim: int, rank: int | None = None) -> DensityOperator:
    """Ginibre-induced random density operator of the given rank (full by default)."""
    r = dim if rank is None else rank
    m = rng.standard_normal((dim, r)) + 1j * rng.standard_normal((dim, r))
    rho = m @ m.conj().T
    rho /= rho.trace().real
    return DensityOperator((rho + rho.conj().T) / 2.0)


def _haar_columns(rng: np.random.Generator, dim: int, count: int) -> np.ndarray:
    m = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(m)
    q = q * (np.diag(r) / np.abs(np.diag(r)))  # fix phases for Haar measure
    return q[:, :count]


def random_projector(rng: np.random.Generator, dim: int, rank: int) -> ProjectionOperator:
    """Projector onto a Haar-random subspace of the given rank."""
    assert 1 <= rank <= dim
    cols = _haar_columns(rng, dim, rank)
    p = cols @ cols.conj().T
    return ProjectionOperator((p + p.conj().T) / 2.0)


def random_hermitian(rng: np.random.Generator, dim: int) -> HermitianObservable:
    """Random Hermitian observable with spectrum rescaled exactly to [-1, 1]."""
    m = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    h = (m + m.conj().T) / 2.0
    vals = np.linalg.eigvalsh(h)
    center = (vals[-1] + vals[0]) / 2.0
    half_span = (vals[-1] - vals[0]) / 2.0
    assert half_span > 0.0
    h = (h - center * np.eye(dim)) / half_span
    return HermitianObservable((h + h.conj().T) / 2.0)


def random_projector_observable(rng: np.random.Generator, dim: int) -> HermitianObservable:
    """Observable that is itself a projector of random rank in [1, dim - 1]."""
    rank = int(rng.integers(1, dim))
    return HermitianObservable.from_projector(random_projector(rng, dim, rank))
