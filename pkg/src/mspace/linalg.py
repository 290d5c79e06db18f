"""Complex linear-algebra primitives shared by the rest of the package.

Conventions used everywhere:

* Composite indices are row-major with subsystem 0 as the most significant
  factor, i.e. ``index(i0, i1) = i0 * d1 + i1``. This matches ``numpy.kron``.
* Eigenvalues are returned in descending order and each eigenvector is
  rephased so that its largest-magnitude component is real and positive,
  which makes decompositions reproducible across runs and platforms.
* Random generation only happens through explicitly passed seeds.
"""

from __future__ import annotations

import dataclasses
import math
from typing import Iterable, Sequence

import numpy as np

DEFAULT_TOL = 1e-10
NORM_TOL = 1e-10

PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
PAULI_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)


class ValidationError(ValueError):
    """A value violates one of its declared invariants.

    ``invariant`` carries a short machine-readable name so callers (notably
    the CLI) can report exactly which check failed.
    """

    def __init__(self, invariant: str, message: str):
        super().__init__(f"{invariant}: {message}")
        self.invariant = invariant


def _as_rng(seed: int | np.random.Generator) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def dag(a: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return np.asarray(a).conj().T


def is_hermitian(a: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        return False
    return float(np.max(np.abs(a - a.conj().T))) <= tol


def is_unitary(a: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        return False
    eye = np.eye(a.shape[0])
    return float(np.max(np.abs(a.conj().T @ a - eye))) <= tol


def is_psd(a: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    if not is_hermitian(a, tol):
        return False
    return float(np.min(np.linalg.eigvalsh(np.asarray(a)))) >= -tol


def tensor(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product under the row-major index convention."""
    return np.kron(np.asarray(a), np.asarray(b))


def tensor_all(factors: Iterable[np.ndarray]) -> np.ndarray:
    out: np.ndarray | None = None
    for f in factors:
        out = np.asarray(f) if out is None else np.kron(out, f)
    if out is None:
        raise ValueError("tensor_all needs at least one factor")
    return out


@dataclasses.dataclass(frozen=True)
class PureState:
    """Normalized complex amplitude vector over an ordered list of subsystems.

    ``dims`` lists the subsystem dimensions; the amplitude vector has length
    ``prod(dims)`` and unit Euclidean norm within ``1e-10``.
    """

    dims: tuple[int, ...]
    vector: np.ndarray

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        vec = np.asarray(self.vector, dtype=complex).reshape(-1)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "vector", vec)
        if not dims or any(d < 1 for d in dims):
            raise ValidationError("state-dims", f"subsystem dimensions must be >= 1, got {dims}")
        if vec.size != math.prod(dims):
            raise ValidationError(
                "state-length",
                f"amplitude vector has length {vec.size}, expected {math.prod(dims)}",
            )
        norm = float(np.linalg.norm(vec))
        if abs(norm - 1.0) > NORM_TOL:
            raise ValidationError("state-normalization", f"norm is {norm!r}, expected 1")

    @property
    def dim(self) -> int:
        return math.prod(self.dims)

    def reshaped(self) -> np.ndarray:
        """Amplitudes as a tensor with one axis per subsystem."""
        return self.vector.reshape(self.dims)

    def density(self) -> "DensityMatrix":
        return DensityMatrix(self.dims, np.outer(self.vector, self.vector.conj()))

    @classmethod
    def from_amplitudes(cls, dims: Sequence[int], amplitudes: Sequence[complex]) -> "PureState":
        return cls(tuple(dims), np.asarray(amplitudes, dtype=complex))

    @classmethod
    def basis(cls, dims: Sequence[int], index: int) -> "PureState":
        vec = np.zeros(math.prod(dims), dtype=complex)
        vec[index] = 1.0
        return cls(tuple(dims), vec)


def bell_phi_plus() -> PureState:
    """The two-qubit state (|00> + |11>) / sqrt(2)."""
    return PureState((2, 2), np.array([1.0, 0.0, 0.0, 1.0]) / np.sqrt(2.0))


@dataclasses.dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, unit-trace, positive-semidefinite matrix over subsystems."""

    dims: tuple[int, ...]
    matrix: np.ndarray

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        mat = np.asarray(self.matrix, dtype=complex)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "matrix", mat)
        d = math.prod(dims)
        if mat.shape != (d, d):
            raise ValidationError("density-shape", f"matrix shape {mat.shape}, expected {(d, d)}")
        if not is_hermitian(mat, DEFAULT_TOL):
            raise ValidationError("density-hermitian", "matrix is not Hermitian within 1e-10")
        tr = complex(np.trace(mat))
        if abs(tr - 1.0) > DEFAULT_TOL:
            raise ValidationError("density-trace", f"trace is {tr!r}, expected 1")
        lo = float(np.min(np.linalg.eigvalsh(mat)))
        if lo < -DEFAULT_TOL:
            raise ValidationError("density-positivity", f"smallest eigenvalue {lo!r} < -1e-10")

    @property
    def dim(self) -> int:
        return math.prod(self.dims)

    @classmethod
    def from_pure(cls, psi: PureState) -> "DensityMatrix":
        return psi.density()


def ptrace_matrix(mat: np.ndarray, dims: Sequence[int], keep: Iterable[int]) -> np.ndarray:
    """Partial trace of a square matrix over the subsystems not in ``keep``.

    Kept subsystems stay in their original relative order.
    """
    dims = tuple(int(d) for d in dims)
    keep_sorted = sorted(set(int(k) for k in keep))
    n = len(dims)
    if not keep_sorted:
        raise ValidationError("ptrace-keep", "keep set must be nonempty")
    if keep_sorted[0] < 0 or keep_sorted[-1] >= n:
        raise ValidationError("ptrace-keep", f"subsystem index out of range for {n} subsystems")
    mat = np.asarray(mat, dtype=complex)
    d = math.prod(dims)
    if mat.shape != (d, d):
        raise ValidationError("ptrace-shape", f"matrix shape {mat.shape}, expected {(d, d)}")
    t = mat.reshape(dims + dims)
    # einsum: traced subsystems share a letter between row and column axes
    letters = "abcdefghijklmnopqrstuvwxyz"
    row = []
    col = []
    out = []
    next_letter = 0
    for i in range(n):
        if i in keep_sorted:
            row.append(letters[next_letter])
            col.append(letters[next_letter + 1])
            out.append((letters[next_letter], letters[next_letter + 1]))
            next_letter += 2
        else:
            row.append(letters[next_letter])
            col.append(letters[next_letter])
            next_letter += 1
    spec = "".join(row) + "".join(col) + "->" + "".join(r for r, _ in out) + "".join(c for _, c in out)
    reduced = np.einsum(spec, t)
    dk = math.prod(dims[i] for i in keep_sorted)
    return reduced.reshape(dk, dk)


def partial_trace(rho: DensityMatrix, keep: Iterable[int]) -> DensityMatrix:
    """Reduced density matrix over the kept subsystems."""
    keep_sorted = sorted(set(int(k) for k in keep))
    reduced = ptrace_matrix(rho.matrix, rho.dims, keep_sorted)
    new_dims = tuple(rho.dims[i] for i in keep_sorted)
    return DensityMatrix(new_dims, reduced)


def eig_hermitian(h: np.ndarray, tol: float = 1e-8) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix.

    Returns ``(eigenvalues, eigenvectors)`` with eigenvalues descending and
    eigenvectors as orthonormal columns, each rephased so its
    largest-magnitude component is real and positive.
    """
    h = np.asarray(h, dtype=complex)
    if not is_hermitian(h, tol):
        raise ValidationError("hermitian", f"matrix is not Hermitian within {tol!r}")
    w, v = np.linalg.eigh((h + h.conj().T) / 2.0)
    w = w[::-1].copy()
    v = v[:, ::-1].copy()
    for j in range(v.shape[1]):
        k = int(np.argmax(np.abs(v[:, j])))
        pivot = v[k, j]
        if abs(pivot) > 0:
            v[:, j] *= pivot.conjugate() / abs(pivot)
    return w, v


def schmidt(
    psi: PureState, split: tuple[Sequence[int], Sequence[int]]
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Schmidt decomposition of a pure state across a bipartition.

    ``split`` is a pair of index groups that together partition the
    subsystems. Returns ``(coefficients, left, right)`` where coefficients
    are descending nonnegative reals with unit square-sum and the columns of
    ``left``/``right`` are orthonormal vectors in the (reordered) left and
    right factors, so the state equals ``sum_k c_k |L_k>|R_k>`` in the
    ``(left..., right...)`` subsystem ordering.
    """
    left_idx = [int(i) for i in split[0]]
    right_idx = [int(i) for i in split[1]]
    combined = left_idx + right_idx
    if sorted(combined) != list(range(len(psi.dims))) or not left_idx or not right_idx:
        raise ValidationError(
            "schmidt-split",
            f"split {split!r} does not partition subsystems 0..{len(psi.dims) - 1}",
        )
    d_left = math.prod(psi.dims[i] for i in left_idx)
    d_right = math.prod(psi.dims[i] for i in right_idx)
    mat = psi.reshaped().transpose(combined).reshape(d_left, d_right)
    u, s, vh = np.linalg.svd(mat, full_matrices=False)
    return s, u, vh.T


def fourier_matrix(n: int) -> np.ndarray:
    """Unitary with entries exp(2*pi*i*j*k/n) / sqrt(n), indices from 0."""
    if n < 1:
        raise ValidationError("fourier-size", f"n must be >= 1, got {n}")
    j, k = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    return np.exp(2.0j * np.pi * j * k / n) / np.sqrt(n)


def haar_unitary(n: int, seed: int | np.random.Generator) -> np.ndarray:
    """Haar-distributed n x n unitary, deterministic for a given seed.

    QR of a complex Gaussian matrix, with column phases fixed so that the
    triangular factor has a positive diagonal.
    """
    rng = _as_rng(seed)
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    q = q * (d / np.abs(d))
    return q


def haar_state(dims: Sequence[int], seed: int | np.random.Generator) -> PureState:
    """Haar-random pure state: normalized vector of iid complex Gaussians."""
    rng = _as_rng(seed)
    n = math.prod(int(d) for d in dims)
    z = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return PureState(tuple(int(d) for d in dims), z / np.linalg.norm(z))
