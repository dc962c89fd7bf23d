"""Dense complex linear algebra for small Hilbert spaces.

Everything here works on plain ``numpy`` arrays. Norms written ``||.||_max``
are the largest absolute entry of a matrix.

Tensor products use the row-major, first-factor-slowest convention of
``numpy.kron``: entry ``(i*dB + k, j*dB + l)`` of ``A (x) B`` is
``A[i, j] * B[k, l]``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import DimMismatch, NotHermitian

DEFAULT_TOL = 1e-8

# Pauli matrices and friends, used all over the test-suite and scenarios.
I2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def as_matrix(M, name="matrix"):
    """Return ``M`` as a finite, square complex ``ndarray``."""
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] < 1:
        raise DimMismatch(f"{name} must be a non-empty square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError(f"{name} has non-finite entries")
    return M


def max_norm(M) -> float:
    M = np.asarray(M)
    if M.size == 0:
        return 0.0
    return float(np.max(np.abs(M)))


def dagger(M):
    return np.conj(np.swapaxes(M, -1, -2))


def hermitian_deviation(M) -> float:
    M = np.asarray(M)
    return max_norm(M - dagger(M))


def is_hermitian(M, tol=1e-10) -> bool:
    return hermitian_deviation(M) <= tol


def is_unitary(U, tol=1e-10) -> bool:
    U = np.asarray(U)
    return max_norm(dagger(U) @ U - np.eye(U.shape[0])) <= tol


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """Distinct eigenvalues (ascending) with their orthogonal projectors.

    ``bases[k]`` is an orthonormal basis (``dim x rank``) of the eigenspace of
    ``eigenvalues[k]``; ``projectors[k] == bases[k] @ bases[k].conj().T``.
    """

    eigenvalues: np.ndarray
    projectors: tuple
    bases: tuple = field(repr=False)

    @property
    def dim(self) -> int:
        return self.projectors[0].shape[0]

    @property
    def ranks(self) -> tuple:
        return tuple(b.shape[1] for b in self.bases)

    def reconstruct(self):
        return sum(x * P for x, P in zip(self.eigenvalues, self.projectors))

    def __len__(self):
        return len(self.eigenvalues)


def spectral_decompose(M, tol=DEFAULT_TOL) -> SpectralDecomposition:
    """Spectral decomposition ``M = sum_x x E(x)`` of a Hermitian matrix.

    ``tol`` is relative to ``max(1, ||M||_max)``; it bounds the allowed
    non-Hermiticity and is the gap below which neighbouring eigenvalues are
    merged into a single projector.
    """
    M = as_matrix(M)
    scale = max(1.0, max_norm(M))
    dev = hermitian_deviation(M)
    if dev > tol * scale:
        raise NotHermitian(dev, tol * scale)
    w, V = np.linalg.eigh(0.5 * (M + dagger(M)))

    groups = [[0]]
    for k in range(1, len(w)):
        if w[k] - w[groups[-1][-1]] <= tol * scale:
            groups[-1].append(k)
        else:
            groups.append([k])

    eigenvalues = np.array([w[g].mean() for g in groups])
    bases = tuple(V[:, g] for g in groups)
    projectors = tuple(B @ dagger(B) for B in bases)
    return SpectralDecomposition(eigenvalues, projectors, bases)


def commutator(A, B):
    A = as_matrix(A, "A")
    B = as_matrix(B, "B")
    if A.shape != B.shape:
        raise DimMismatch(f"commutator of {A.shape} and {B.shape} matrices")
    return A @ B - B @ A


def tensor_product(*factors):
    """Kronecker product of one or more matrices (or vectors)."""
    if not factors:
        raise ValueError("tensor_product needs at least one factor")
    out = np.asarray(factors[0], dtype=complex)
    for f in factors[1:]:
        out = np.kron(out, np.asarray(f, dtype=complex))
    return out


def _keep_index(keep):
    if keep in (0, "first", "system", "S"):
        return 0
    if keep in (1, "second", "probe", "K"):
        return 1
    raise ValueError(f"keep must select the first or second factor, got {keep!r}")


def partial_trace(M, dims, keep=0):
    """Trace out one factor of a bipartite operator on ``C^dA (x) C^dB``.

    ``keep`` selects the surviving factor: ``0``/``"first"`` or ``1``/``"second"``.
    """
    M = as_matrix(M)
    dA, dB = (int(d) for d in dims)
    if dA < 1 or dB < 1 or dA * dB != M.shape[0]:
        raise DimMismatch(f"dims {dA}x{dB} do not factor a {M.shape[0]}-dim operator")
    T = M.reshape(dA, dB, dA, dB)
    if _keep_index(keep) == 0:
        return np.einsum("ikjk->ij", T)
    return np.einsum("kikj->ij", T)


def matrix_exp(M, tol=1e-12):
    """Matrix exponential.

    Hermitian and anti-Hermitian inputs go through an eigendecomposition,
    which keeps ``exp(-iH)`` unitary to working precision; anything else is
    handed to ``scipy.linalg.expm``.
    """
    M = as_matrix(M)
    n = M.shape[0]
    if not np.any(M):
        return np.eye(n, dtype=complex)
    scale = max(1.0, max_norm(M))
    if hermitian_deviation(M) <= tol * scale:
        w, V = np.linalg.eigh(0.5 * (M + dagger(M)))
        return (V * np.exp(w)) @ dagger(V)
    K = 1j * M
    if hermitian_deviation(K) <= tol * scale:
        w, V = np.linalg.eigh(0.5 * (K + dagger(K)))
        return (V * np.exp(-1j * w)) @ dagger(V)
    return scipy.linalg.expm(M)


def unitary_from_hamiltonian(H, t=1.0):
    """``exp(-i t H)`` for a Hermitian ``H``."""
    return matrix_exp(-1j * t * as_matrix(H, "H"))


def trace_distance(rho, sigma) -> float:
    """Half the trace norm of ``rho - sigma`` (both Hermitian)."""
    d = np.asarray(rho) - np.asarray(sigma)
    return 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(0.5 * (d + dagger(d))))))


def random_hermitian(dim, rng, scale=1.0):
    """Gaussian (GUE-like) Hermitian matrix."""
    X = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return scale * 0.5 * (X + dagger(X))


def random_unitary(dim, rng):
    """Haar-random unitary via QR of a complex Ginibre matrix."""
    Z = (rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))) / np.sqrt(2)
    Q, R = np.linalg.qr(Z)
    d = np.diag(R)
    return Q * (d / np.abs(d))


def random_pure_vector(dim, rng):
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def random_density(dim, rng, rank=None):
    rank = dim if rank is None else rank
    G = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = G @ dagger(G)
    return rho / np.trace(rho).real


# JSON wire format: {"dim": n, "re": [[...]], "im": [[...]]}

def matrix_to_json(M) -> dict:
    M = as_matrix(M)
    return {"dim": int(M.shape[0]), "re": M.real.tolist(), "im": M.imag.tolist()}


def matrix_from_json(obj) -> np.ndarray:
    try:
        re = np.asarray(obj["re"], dtype=float)
        im = np.asarray(obj.get("im", np.zeros_like(re)), dtype=float)
    except (KeyError, TypeError, AttributeError) as exc:
        raise ValueError(f"matrix JSON needs 're' (and optionally 'im'): {exc}") from None
    if re.shape != im.shape:
        raise DimMismatch(f"'re' {re.shape} and 'im' {im.shape} differ in shape")
    M = as_matrix(re + 1j * im)
    if "dim" in obj and int(obj["dim"]) != M.shape[0]:
        raise DimMismatch(f"declared dim {obj['dim']} but entries are {M.shape[0]}x{M.shape[0]}")
    return M
