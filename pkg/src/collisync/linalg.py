"""Dense complex linear algebra for registers of spin-1/2 subsystems.

All operators are plain ``complex128`` ndarrays in the computational basis.
A register of n spins lives in dimension 2**n; the leftmost subsystem label
owns the most significant bit of the basis index, and |0> is the +1
eigenvector of sigma_z.

Everything here is a pure function of its inputs and returns fresh arrays,
so values are safe to share read-only across threads or processes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "PAULI_X",
    "PAULI_Y",
    "PAULI_Z",
    "IDENTITY_2",
    "SWAP_2",
    "PAULI",
    "HERMITICITY_TOL",
    "TRACE_TOL",
    "PSD_VALIDATION_TOL",
    "POSITIVITY_HARD_TOL",
    "NumericalDriftError",
    "PositivityError",
    "DensityMatrix",
    "kron",
    "embed",
    "partial_trace",
    "hermitian_eig",
    "unitary_from_hamiltonian",
    "psd_sqrt",
    "von_neumann_entropy",
]

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
IDENTITY_2 = np.eye(2, dtype=complex)

# two-spin exchange in the computational basis: |01><10| + |10><01| + diag
SWAP_2 = np.array(
    [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
)

PAULI = {"x": PAULI_X, "y": PAULI_Y, "z": PAULI_Z}

HERMITICITY_TOL = 1e-10
TRACE_TOL = 1e-10
# Spectral dust below this magnitude is expected from rounding and validates
# as positive; anything more negative than the hard tolerance is an error,
# not drift.
PSD_VALIDATION_TOL = 1e-10
POSITIVITY_HARD_TOL = 1e-8


class NumericalDriftError(RuntimeError):
    """A density-matrix invariant was violated beyond tolerance."""


class PositivityError(NumericalDriftError):
    """An eigenvalue fell below the allowed negativity tolerance."""


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """A density operator together with the ordered labels of its spins.

    ``labels`` fixes the tensor factorization: label k owns bit
    ``n - 1 - k`` of the basis index (leftmost label most significant).
    Structural constraints are enforced at construction; the numerical
    invariants (unit trace, Hermiticity, positivity) are checked on demand
    via :meth:`check`.
    """

    mat: np.ndarray
    labels: tuple[str, ...]

    def __post_init__(self) -> None:
        mat = np.asarray(self.mat, dtype=complex)
        labels = tuple(self.labels)
        object.__setattr__(self, "mat", mat)
        object.__setattr__(self, "labels", labels)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ValueError(f"density matrix must be square, got shape {mat.shape}")
        if len(set(labels)) != len(labels):
            raise ValueError(f"subsystem labels must be unique, got {labels}")
        if mat.shape[0] != 2 ** len(labels):
            raise ValueError(
                f"dimension {mat.shape[0]} does not match {len(labels)} spin-1/2 labels"
            )
        if not np.all(np.isfinite(mat)):
            raise ValueError("density matrix contains non-finite entries")

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    @property
    def n_spins(self) -> int:
        return len(self.labels)

    def check(
        self,
        trace_tol: float = TRACE_TOL,
        herm_tol: float = HERMITICITY_TOL,
        psd_tol: float | None = None,
    ) -> "DensityMatrix":
        """Raise :class:`NumericalDriftError` if an invariant is out of tolerance.

        The positivity check is optional (it costs an eigendecomposition);
        pass e.g. ``psd_tol=PSD_VALIDATION_TOL`` to enable it.
        """
        tr = complex(np.trace(self.mat))
        if abs(tr - 1.0) > trace_tol:
            raise NumericalDriftError(
                f"trace invariant violated: |tr - 1| = {abs(tr - 1.0):.3e}"
            )
        herm_dev = float(np.abs(self.mat - self.mat.conj().T).max())
        if herm_dev > herm_tol:
            raise NumericalDriftError(
                f"Hermiticity invariant violated: max |A - A^dag| = {herm_dev:.3e}"
            )
        if psd_tol is not None:
            w_min = float(np.linalg.eigvalsh(self.mat).min())
            if w_min < -psd_tol:
                raise PositivityError(
                    f"positivity invariant violated: min eigenvalue = {w_min:.3e}"
                )
        return self


def kron(a: np.ndarray, b: np.ndarray, *more: np.ndarray) -> np.ndarray:
    """Kronecker product of two or more operators (leftmost most significant)."""
    out = np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))
    for factor in more:
        out = np.kron(out, factor)
    return out


def _require_hermitian(mat: np.ndarray, tol: float, what: str) -> None:
    dev = float(np.abs(mat - mat.conj().T).max())
    if dev > tol:
        raise ValueError(f"{what} must be Hermitian; max |A - A^dag| = {dev:.3e}")


def embed(op: np.ndarray, n_spins: int, targets: Sequence[int]) -> np.ndarray:
    """Lift an operator acting on ``targets`` to the full n-spin register.

    ``targets`` are register positions (0 = most significant); their order
    matters and must match the tensor-factor order of ``op``.
    """
    targets = tuple(targets)
    k = len(targets)
    if len(set(targets)) != k:
        raise ValueError(f"duplicate target positions {targets}")
    if any(t < 0 or t >= n_spins for t in targets):
        raise ValueError(f"targets {targets} outside register of {n_spins} spins")
    op = np.asarray(op, dtype=complex)
    if op.shape != (2**k, 2**k):
        raise ValueError(f"operator shape {op.shape} does not match {k} targets")
    perm = list(targets) + [q for q in range(n_spins) if q not in targets]
    dim = 2**n_spins
    src = np.arange(dim)
    # P reorders the register so that the targets occupy the leading slots
    permuted = np.zeros(dim, dtype=np.int64)
    for j, q in enumerate(perm):
        bit = (src >> (n_spins - 1 - q)) & 1
        permuted |= bit << (n_spins - 1 - j)
    p = np.zeros((dim, dim), dtype=complex)
    p[permuted, src] = 1.0
    big = np.kron(op, np.eye(2 ** (n_spins - k), dtype=complex))
    return p.conj().T @ big @ p


def ptrace_mat(mat: np.ndarray, n_spins: int, keep: Sequence[int]) -> np.ndarray:
    """Partial trace on a raw 2**n x 2**n matrix, keeping register positions
    ``keep`` (ascending) in their original order."""
    keep = sorted(keep)
    t = mat.reshape([2] * (2 * n_spins))
    keep_set = set(keep)
    row_ids = list(range(n_spins))
    col_ids = [q + n_spins if q in keep_set else q for q in range(n_spins)]
    out_ids = keep + [q + n_spins for q in keep]
    out = np.einsum(t, row_ids + col_ids, out_ids)
    d = 2 ** len(keep)
    return np.ascontiguousarray(out.reshape(d, d))


def partial_trace(rho: DensityMatrix, keep: Iterable[str]) -> DensityMatrix:
    """Reduced state on the ``keep`` subsystems, in the layout-induced order."""
    keep = tuple(keep)
    if not keep:
        raise ValueError("keep must name at least one subsystem")
    unknown = [lab for lab in keep if lab not in rho.labels]
    if unknown:
        raise ValueError(f"unknown subsystem label(s) {unknown}; state has {rho.labels}")
    keep_idx = sorted(rho.labels.index(lab) for lab in keep)
    out = ptrace_mat(rho.mat, rho.n_spins, keep_idx)
    return DensityMatrix(out, tuple(rho.labels[i] for i in keep_idx))


def hermitian_eig(
    mat: np.ndarray, herm_tol: float = HERMITICITY_TOL
) -> tuple[np.ndarray, np.ndarray]:
    """Spectral decomposition of a Hermitian matrix.

    Returns ``(w, v)`` with eigenvalues ``w`` sorted descending and the
    matching eigenvectors in the columns of ``v``.
    """
    mat = np.asarray(mat, dtype=complex)
    _require_hermitian(mat, herm_tol, "eigendecomposition input")
    w, v = np.linalg.eigh(mat)
    return w[::-1].copy(), np.ascontiguousarray(v[:, ::-1])


def unitary_from_hamiltonian(h: np.ndarray, t: float) -> np.ndarray:
    """exp(-i h t) for Hermitian h, via the spectral decomposition.

    The spectral route keeps the result unitary to rounding for any t.
    """
    h = np.asarray(h, dtype=complex)
    _require_hermitian(h, HERMITICITY_TOL, "Hamiltonian")
    w, v = np.linalg.eigh(h)
    return (v * np.exp(-1j * w * t)) @ v.conj().T


def _clamped_spectrum(w: np.ndarray, what: str) -> np.ndarray:
    w_min = float(w.min())
    if w_min < -POSITIVITY_HARD_TOL:
        raise PositivityError(f"{what}: eigenvalue {w_min:.3e} below -{POSITIVITY_HARD_TOL:g}")
    return np.clip(w, 0.0, None)


def psd_sqrt(mat: np.ndarray) -> np.ndarray:
    """Hermitian square root of a positive-semidefinite matrix.

    Eigenvalues inside the rounding band [-1e-8, 0) are clamped to zero;
    more negative ones raise :class:`PositivityError`.
    """
    mat = np.asarray(mat, dtype=complex)
    _require_hermitian(mat, HERMITICITY_TOL, "psd_sqrt input")
    w, v = np.linalg.eigh(mat)
    w = _clamped_spectrum(w, "psd_sqrt")
    root = (v * np.sqrt(w)) @ v.conj().T
    return 0.5 * (root + root.conj().T)


def von_neumann_entropy(rho: DensityMatrix | np.ndarray) -> float:
    """Entropy -sum p log2 p of the state's spectrum (0 log 0 := 0).

    Base 2, so a maximally mixed spin has entropy exactly 1.
    """
    mat = rho.mat if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    w = np.linalg.eigvalsh(mat)
    w = _clamped_spectrum(w, "entropy")
    nz = w[w > 0.0]
    return float(-(nz * np.log2(nz)).sum())
