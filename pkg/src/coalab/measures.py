"""Concurrence-type entanglement quantities for two qubits and 2x2xn pure states."""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from . import numkernel as nk
from .errors import BadDims, DimMismatch, NotPSD
from .states import TripartiteState, fidelity, partial_trace, qubits_to_tripartite, schmidt_numbers

SIGMA_Y = np.array([[0, -1j], [1j, 0]])
YY = np.kron(SIGMA_Y, SIGMA_Y)
RANK_TOL = 1e-10


class CoaResult(NamedTuple):
    value: float
    lambdas: np.ndarray  # eigenvalues of R, descending (length 4)
    via_fidelity: float


class Tangle(NamedTuple):
    tau_ckw: float
    tau_dual: float


def _as_rho(rho) -> np.ndarray:
    if isinstance(rho, TripartiteState):
        return partial_trace(rho, "AB")
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise DimMismatch(f"expected a 4x4 density matrix, got {rho.shape}")
    return rho


def spin_flip(rho: np.ndarray) -> np.ndarray:
    rho = _as_rho(rho)
    return YY @ rho.conj() @ YY


def tilde_overlap(vectors: np.ndarray) -> np.ndarray:
    """Symmetric matrix ``<x_k | x~_k'> = x_k^dagger (sy (x) sy) conj(x_k')`` for columns ``x_k``."""
    return vectors.conj().T @ YY @ vectors.conj()


def support_vectors(rho: np.ndarray, rank_tol: float = RANK_TOL) -> np.ndarray:
    """Columns ``sqrt(p_k) v_k`` over eigenvalues ``p_k > rank_tol``; ``rho = W W^dagger``."""
    p, v = nk.eig_hermitian(rho)
    if p[-1] < -nk.PSD_TOL:
        raise NotPSD(f"smallest eigenvalue {p[-1]:.3e}")
    keep = p > rank_tol
    return v[:, keep] * np.sqrt(p[keep])


def r_eigenvalues(rho: np.ndarray, rank_tol: float = RANK_TOL) -> np.ndarray:
    """Eigenvalues of ``R = sqrt(sqrt(rho) rho~ sqrt(rho))``, descending, padded to 4.

    These are the singular values of the tilde-overlap matrix of any
    decomposition ``rho = W W^dagger``, because the nonzero spectrum of
    ``rho rho~`` equals that of ``T T^dagger`` with ``T = W^dagger YY conj(W)``.
    """
    w = support_vectors(_as_rho(rho), rank_tol)
    lam = np.zeros(4)
    if w.shape[1]:
        sv = nk.singular_values(tilde_overlap(w))
        lam[: sv.size] = sv
    return lam


def concurrence_pure(phi) -> float:
    """``2 |det|`` of the 2x2 amplitude matrix (equivalently ``|<phi|phi~>|``)."""
    phi = np.asarray(phi, dtype=complex)
    if phi.size != 4:
        raise DimMismatch(f"expected a two-qubit state, got {phi.size} amplitudes")
    return float(2.0 * abs(np.linalg.det(phi.reshape(2, 2))))


def concurrence_mixed(rho, rank_tol: float = RANK_TOL) -> float:
    """Wootters concurrence ``max(0, l1 - l2 - l3 - l4)``."""
    lam = r_eigenvalues(rho, rank_tol)
    return float(max(0.0, lam[0] - lam[1:].sum()))


def coa(rho, rank_tol: float = RANK_TOL) -> CoaResult:
    """Concurrence of assistance ``Tr R``, cross-checked against ``F(rho, rho~)``."""
    rho = _as_rho(rho)
    lam = r_eigenvalues(rho, rank_tol)
    via = fidelity(rho, spin_flip(rho))
    return CoaResult(float(lam.sum()), lam, via)


def coa_value(rho, rank_tol: float = RANK_TOL) -> float:
    return float(r_eigenvalues(_as_rho(rho), rank_tol).sum())


def linear_entropy_concurrence_sq(rho_x: np.ndarray) -> float:
    """``C^2`` of a qubit with the rest of a pure state: ``2 (1 - Tr rho_x^2)``."""
    rho_x = np.asarray(rho_x, dtype=complex)
    return float(max(0.0, 2.0 * (1.0 - np.real(np.trace(rho_x @ rho_x)))))


def tangle3(psi, pivot: str | int = "A") -> Tangle:
    """Three-tangle from the CKW side and from the assisted (dual) side.

    ``psi`` is a :class:`TripartiteState` with ``n = 2`` or an 8-amplitude
    vector (qubits A, B, S).  ``pivot`` selects the qubit playing Alice.
    """
    if isinstance(psi, TripartiteState):
        if psi.n != 2:
            raise BadDims(f"3-tangle needs a 2x2x2 state, got n = {psi.n}")
        vec = psi.to_vector()
    else:
        vec = np.asarray(psi, dtype=complex).reshape(-1)
        if vec.size != 8:
            raise BadDims(f"3-tangle needs 8 amplitudes, got {vec.size}")
    p = {"A": 0, "B": 1, "S": 2}.get(pivot, pivot)
    others = [q for q in range(3) if q != p]
    c2_pivot = linear_entropy_concurrence_sq(partial_trace(vec, [p]))
    rho1 = partial_trace(vec, [p, others[0]])
    rho2 = partial_trace(vec, [p, others[1]])
    tau_ckw = c2_pivot - concurrence_mixed(rho1) ** 2 - concurrence_mixed(rho2) ** 2
    tau_dual = coa_value(rho1) ** 2 + coa_value(rho2) ** 2 - c2_pivot
    return Tangle(float(tau_ckw), float(tau_dual))


def coa_for_sapna(psi3: np.ndarray, sapna: int) -> float:
    """CoA of a three-qubit vector when Sapna holds qubit ``sapna`` (0-based)."""
    return coa_value(qubits_to_tripartite(psi3, sapna=sapna))


def vidal_monotones(phi) -> np.ndarray:
    """Tail sums ``E_l = sum_{k >= l} lambda_k`` of the descending Schmidt numbers."""
    lam = schmidt_numbers(phi)
    return np.cumsum(lam[::-1])[::-1]


def e_d_normalized(phi) -> float:
    """``d * lambda_min`` (smallest Schmidt number, zero included) for a d x d pure state."""
    phi = np.asarray(phi, dtype=complex)
    if phi.ndim == 1:
        d = int(round(np.sqrt(phi.size)))
        phi = phi.reshape(d, d)
    if phi.shape[0] != phi.shape[1]:
        raise DimMismatch(f"expected a d x d state, got {phi.shape}")
    return float(phi.shape[0] * schmidt_numbers(phi)[-1])


def e2(phi) -> float:
    """``2 lambda_min`` of a (possibly unnormalised) two-qubit amplitude matrix, normalised first."""
    phi = np.asarray(phi, dtype=complex).reshape(2, 2)
    lam = schmidt_numbers(phi)
    return float(2.0 * lam[-1])
