"""Local spin expectations and two-spin correlation measures."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .linalg import (
    PAULI,
    PAULI_Y,
    DensityMatrix,
    NumericalDriftError,
    partial_trace,
    ptrace_mat,
)

__all__ = [
    "ObservableSelector",
    "expectation",
    "concurrence",
    "mutual_information",
]

_YY = np.kron(PAULI_Y, PAULI_Y)
_IMAG_TOL = 1e-10


@dataclass(frozen=True)
class ObservableSelector:
    """Which Pauli axis to measure on which subsystem."""

    axis: str
    subsystem: str

    def __post_init__(self) -> None:
        if self.axis not in PAULI:
            raise ValueError(f"axis must be one of {sorted(PAULI)}, got {self.axis!r}")


def expectation(rho: DensityMatrix, sel: ObservableSelector) -> float:
    """Tr[rho_reduced sigma_axis] for the selected subsystem."""
    if sel.subsystem not in rho.labels:
        raise ValueError(f"subsystem {sel.subsystem!r} not in layout {rho.labels}")
    reduced = rho if rho.n_spins == 1 else partial_trace(rho, (sel.subsystem,))
    val = complex(np.trace(reduced.mat @ PAULI[sel.axis]))
    if abs(val.imag) > _IMAG_TOL:
        raise NumericalDriftError(
            f"expectation has imaginary residue {val.imag:.3e} beyond {_IMAG_TOL:g}"
        )
    return float(val.real)


def _as_two_spin_mat(rho: DensityMatrix | np.ndarray, what: str) -> np.ndarray:
    mat = rho.mat if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    if mat.shape != (4, 4):
        raise ValueError(f"{what} needs a two-spin (4x4) state, got shape {mat.shape}")
    return mat


def concurrence(rho: DensityMatrix | np.ndarray) -> float:
    """Entanglement of a two-spin state from its spin-flipped companion.

    With rho_f = (sy (x) sy) rho* (sy (x) sy), the eigenvalues of
    rho . rho_f are obtained as the spectrum of the Hermitian matrix
    sqrt(rho) rho_f sqrt(rho); sorted descending they give
    max{0, sqrt(l1) - sqrt(l2) - sqrt(l3) - sqrt(l4)}.

    Complex conjugation is taken in the fixed computational basis.
    """
    mat = _as_two_spin_mat(rho, "concurrence")
    flipped = _YY @ mat.conj() @ _YY
    root = linalg.psd_sqrt(mat)
    m = root @ flipped @ root
    m = 0.5 * (m + m.conj().T)
    w = np.linalg.eigvalsh(m)[::-1]
    w = linalg._clamped_spectrum(w, "concurrence")
    s = np.sqrt(w)
    return float(max(0.0, s[0] - s[1] - s[2] - s[3]))


def mutual_information(rho: DensityMatrix | np.ndarray) -> float:
    """Total correlations S(rho_1) + S(rho_2) - S(rho_12), in bits."""
    mat = _as_two_spin_mat(rho, "mutual_information")
    s_joint = linalg.von_neumann_entropy(mat)
    s_1 = linalg.von_neumann_entropy(ptrace_mat(mat, 2, (0,)))
    s_2 = linalg.von_neumann_entropy(ptrace_mat(mat, 2, (1,)))
    val = s_1 + s_2 - s_joint
    if val < -_IMAG_TOL:
        raise NumericalDriftError(
            f"mutual information {val:.3e} negative beyond tolerance (subadditivity)"
        )
    return max(0.0, float(val))
