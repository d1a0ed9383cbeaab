"""Finite-dimensional state and operator primitives.

Conventions used throughout the package: hbar = 1, all Hilbert spaces are
finite dimensional with 2 <= d <= 8 wherever a spectral decomposition is
required, and entropies are reported in bits (base-2 logarithms).

The classes here are thin, validated, immutable wrappers around complex
numpy arrays.  Validation happens once at construction; downstream modules
then trust the invariants (unit norm, hermiticity, idempotency, ...) and
only re-check what is cheap.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError

# Construction-time tolerances.  Hermiticity/trace/norm checks are at the
# rounding floor; idempotency and PSD checks are looser because they square
# the input.
_ATOL_NORM = 1e-12
_ATOL_HERMITIAN = 1e-12
_ATOL_TRACE = 1e-12
_ATOL_IDEMPOTENT = 1e-10
_MIN_EIGENVALUE = -1e-10

# Spectral decompositions are restricted to desk scale.
_MAX_SPECTRAL_DIM = 8

# Relative gap below which adjacent eigenvalues are treated as degenerate.
_DEGENERACY_GAP = 1e-9


def _as_complex_matrix(matrix: object, what: str) -> np.ndarray:
    m = np.asarray(matrix, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValidationError(f"{what}: expected a square matrix, got shape {m.shape}")
    if m.shape[0] < 2:
        raise ValidationError(f"{what}: dimension must be >= 2, got {m.shape[0]}")
    if not np.all(np.isfinite(m.view(float))):
        raise ValidationError(f"{what}: matrix contains non-finite entries")
    return m


def _check_hermitian(m: np.ndarray, what: str, atol: float = _ATOL_HERMITIAN) -> None:
    asym = float(np.max(np.abs(m - m.conj().T)))
    if asym > atol:
        raise ValidationError(f"{what}: not Hermitian (max asymmetry {asym:.3e} > {atol:.1e})")


def _freeze(a: np.ndarray) -> np.ndarray:
    a = a.copy()
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class StateVector:
    """A normalized pure state |psi> on a d-dimensional Hilbert space.

    Parameters
    ----------
    amplitudes : array_like of complex, shape (d,)
        Components in the computational basis.  Must have unit norm within
        1e-12; d >= 2.
    """

    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        a = np.asarray(self.amplitudes, dtype=complex)
        if a.ndim != 1:
            raise ValidationError(f"state vector: expected a 1-d array, got shape {a.shape}")
        if a.shape[0] < 2:
            raise ValidationError(f"state vector: dimension must be >= 2, got {a.shape[0]}")
        if not np.all(np.isfinite(a.view(float))):
            raise ValidationError("state vector: non-finite amplitude")
        norm = float(np.linalg.norm(a))
        if abs(norm - 1.0) > _ATOL_NORM:
            raise ValidationError(f"state vector: norm {norm!r} differs from 1 by more than 1e-12")
        object.__setattr__(self, "amplitudes", _freeze(a))

    @property
    def dimension(self) -> int:
        return self.amplitudes.shape[0]

    @classmethod
    def basis_state(cls, dimension: int, index: int) -> "StateVector":
        """Computational basis vector |index> in dimension `dimension`."""
        if not 0 <= index < dimension:
            raise ValidationError(f"basis index {index} out of range for dimension {dimension}")
        a = np.zeros(dimension, dtype=complex)
        a[index] = 1.0
        return cls(a)

    @classmethod
    def normalized(cls, amplitudes: object) -> "StateVector":
        """Normalize an arbitrary nonzero vector into a StateVector."""
        a = np.asarray(amplitudes, dtype=complex)
        norm = np.linalg.norm(a)
        if norm == 0.0:
            raise ValidationError("cannot normalize the zero vector")
        return cls(a / norm)

    def density(self) -> "DensityOperator":
        """The rank-one density operator |psi><psi|."""
        return DensityOperator(np.outer(self.amplitudes, self.amplitudes.conj()))

    def projector(self) -> "ProjectionOperator":
        """The rank-one projector |psi><psi|."""
        return ProjectionOperator(np.outer(self.amplitudes, self.amplitudes.conj()))


@dataclass(frozen=True)
class DensityOperator:
    """A density operator: Hermitian, positive semidefinite, unit trace.

    Hermiticity and trace are enforced within 1e-12; eigenvalues may dip to
    -1e-10 to absorb rounding from upstream algebra.
    """

    matrix: np.ndarray

    def __post_init__(self) -> None:
        m = _as_complex_matrix(self.matrix, "density operator")
        _check_hermitian(m, "density operator")
        tr = m.trace()
        if abs(tr - 1.0) > _ATOL_TRACE:
            raise ValidationError(f"density operator: trace {tr!r} differs from 1 by more than 1e-12")
        lo = float(np.linalg.eigvalsh(m)[0])
        if lo < _MIN_EIGENVALUE:
            raise ValidationError(f"density operator: negative eigenvalue {lo:.3e} < -1e-10")
        object.__setattr__(self, "matrix", _freeze(m))

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def from_state(cls, state: StateVector) -> "DensityOperator":
        return state.density()

    def eigen_ensemble(self, weight_floor: float = 1e-15) -> tuple[np.ndarray, np.ndarray]:
        """Spectral ensemble of the state.

        Returns
        -------
        weights : ndarray, shape (k,)
            Eigenvalues above `weight_floor`, in descending order.
        vectors : ndarray, shape (k, d)
            Matching unit eigenvectors, one per row.
        """
        vals, vecs = np.linalg.eigh(self.matrix)
        order = np.argsort(vals)[::-1]
        vals, vecs = vals[order], vecs[:, order]
        keep = vals > weight_floor
        return vals[keep], vecs[:, keep].T

    def is_pure(self, tol: float = 1e-12) -> bool:
        """True when the largest eigenvalue is within `tol` of 1."""
        top = float(np.linalg.eigvalsh(self.matrix)[-1])
        return top > 1.0 - tol


@dataclass(frozen=True)
class ProjectionOperator:
    """An orthogonal projector: Hermitian and idempotent within 1e-10."""

    matrix: np.ndarray

    def __post_init__(self) -> None:
        m = _as_complex_matrix(self.matrix, "projector")
        _check_hermitian(m, "projector")
        drift = float(np.max(np.abs(m @ m - m)))
        if drift > _ATOL_IDEMPOTENT:
            raise ValidationError(f"projector: not idempotent (max |P^2 - P| = {drift:.3e} > 1e-10)")
        object.__setattr__(self, "matrix", _freeze(m))

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]

    @property
    def rank(self) -> int:
        # trace of a projector is its rank, up to rounding
        return int(round(float(self.matrix.trace().real)))

    @classmethod
    def from_state(cls, state: StateVector) -> "ProjectionOperator":
        return state.projector()

    @classmethod
    def identity(cls, dimension: int) -> "ProjectionOperator":
        return cls(np.eye(dimension, dtype=complex))

    def complement(self) -> "ProjectionOperator":
        """The projector onto the orthogonal complement, I - P."""
        return ProjectionOperator(np.eye(self.dimension, dtype=complex) - self.matrix)


def spectral_decompose(matrix: object) -> list[tuple[float, ProjectionOperator]]:
    """Spectral decomposition H = sum_i a_i P_i with degenerate levels merged.

    Eigenvalues within 1e-9 * ||H|| of each other (chained through adjacent
    gaps) are treated as one degenerate level and get a single rank-r
    projector.  Levels are returned in ascending eigenvalue order.

    Parameters
    ----------
    matrix : array_like, shape (d, d), d <= 8
        Hermitian within 1e-10 (scaled by max(1, ||H||)).

    Raises
    ------
    ValidationError
        If the matrix is not square, not Hermitian within tolerance, or
        d > 8.
    """
    m = _as_complex_matrix(matrix, "observable")
    d = m.shape[0]
    if d > _MAX_SPECTRAL_DIM:
        raise ValidationError(f"observable: spectral decomposition supports d <= 8, got d = {d}")
    scale = max(1.0, float(np.max(np.abs(m))))
    _check_hermitian(m, "observable", atol=1e-10 * scale)

    vals, vecs = np.linalg.eigh((m + m.conj().T) / 2.0)
    norm = float(np.max(np.abs(vals)))
    gap_tol = _DEGENERACY_GAP * norm

    levels: list[tuple[float, ProjectionOperator]] = []
    start = 0
    for stop in range(1, d + 1):
        if stop == d or vals[stop] - vals[stop - 1] > gap_tol:
            block = vecs[:, start:stop]
            proj = block @ block.conj().T
            proj = (proj + proj.conj().T) / 2.0
            levels.append((float(np.mean(vals[start:stop])), ProjectionOperator(proj)))
            start = stop

    # eigh guarantees both identities to rounding; recheck because callers
    # lean on them for completeness sums.
    total = sum(p.matrix for _, p in levels)
    rebuilt = sum(a * p.matrix for a, p in levels)
    assert float(np.max(np.abs(total - np.eye(d)))) <= 1e-10
    assert float(np.max(np.abs(rebuilt - m))) <= 1e-10 * max(1.0, norm)
    return levels


@dataclass(frozen=True)
class HermitianObservable:
    """A Hermitian observable together with its cached spectral decomposition.

    Parameters
    ----------
    matrix : array_like of complex, shape (d, d), 2 <= d <= 8
        Hermitian within 1e-10 (relative to scale).

    Attributes
    ----------
    spectrum : list of (eigenvalue, ProjectionOperator)
        Distinct levels in ascending order, degeneracies merged
        (see :func:`spectral_decompose`).
    """

    matrix: np.ndarray
    spectrum: list[tuple[float, ProjectionOperator]] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        levels = spectral_decompose(self.matrix)
        m = _as_complex_matrix(self.matrix, "observable")
        object.__setattr__(self, "matrix", _freeze(m))
        object.__setattr__(self, "spectrum", levels)

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]

    @property
    def eigenvalues(self) -> tuple[float, ...]:
        """Distinct eigenvalues, ascending."""
        return tuple(a for a, _ in self.spectrum)

    @property
    def max_abs_eigenvalue(self) -> float:
        return max(abs(a) for a in self.eigenvalues)

    def is_projector(self, tol: float = 1e-10) -> bool:
        """True when A^2 = A within `tol` (max-abs entrywise)."""
        m = self.matrix
        return float(np.max(np.abs(m @ m - m))) <= tol

    @classmethod
    def from_projector(cls, projector: ProjectionOperator) -> "HermitianObservable":
        return cls(projector.matrix)


def von_neumann_entropy(rho: DensityOperator) -> float:
    """Von Neumann entropy S(rho) = -sum_i p_i log2 p_i, in bits.

    Eigenvalues at or below 1e-15 are dropped (0 * log 0 = 0).  The result
    lies in [0, log2 d].
    """
    vals = np.linalg.eigvalsh(rho.matrix)
    vals = vals[vals > 1e-15]
    s = float(-np.sum(vals * np.log2(vals)))
    return max(s, 0.0)


def tensor_product(x, y):
    """Kronecker product of two states or two like-kind operators.

    The left factor owns the slow (most significant) index: basis state
    |j> (x) |k> lands at flat index j * dim(y) + k.

    Supported pairings: StateVector (x) StateVector, and matching operator
    types (ProjectionOperator, DensityOperator, HermitianObservable).
    Mixed kinds raise ValidationError.
    """
    if isinstance(x, StateVector) and isinstance(y, StateVector):
        return StateVector(np.kron(x.amplitudes, y.amplitudes))
    for kind in (ProjectionOperator, DensityOperator, HermitianObservable):
        if isinstance(x, kind) and isinstance(y, kind):
            return kind(np.kron(x.matrix, y.matrix))
    raise ValidationError(
        f"tensor_product: unsupported pairing {type(x).__name__} (x) {type(y).__name__}"
    )
