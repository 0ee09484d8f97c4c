"""Pure-state ensembles of two-qubit density matrices.

An :class:`Ensemble` holds subnormalised vectors ``x_k`` (rows, Kronecker
order on A (x) B) with ``rho = sum_k |x_k><x_k|``; member weights are the
squared norms.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import numkernel as nk
from .errors import EnsembleMismatch, NotUnitary
from .locc import KrausSet
from .measures import RANK_TOL, _as_rho, support_vectors, tilde_overlap
from .states import TripartiteState

MAX_MEMBERS = 16


@dataclass(frozen=True)
class Ensemble:
    vectors: np.ndarray  # shape (m, 4)

    @property
    def weights(self) -> np.ndarray:
        return np.real(np.sum(np.abs(self.vectors) ** 2, axis=1))

    def __len__(self):
        return self.vectors.shape[0]

    def density(self) -> np.ndarray:
        return self.vectors.T @ self.vectors.conj()

    def members(self) -> list[np.ndarray]:
        """Normalised member states as 2x2 amplitude matrices (zero-weight members skipped)."""
        return [(v / np.linalg.norm(v)).reshape(2, 2) for v, w in zip(self.vectors, self.weights) if w > 0]

    def preconcurrences(self) -> np.ndarray:
        """``<x_k | x~_k>`` for every member (unnormalised)."""
        return np.diag(tilde_overlap(self.vectors.T))

    def concurrences(self) -> np.ndarray:
        """Concurrence of each normalised member."""
        w = self.weights
        c = np.abs(self.preconcurrences())
        return np.divide(c, w, out=np.zeros_like(c), where=w > 0)

    def average_concurrence(self) -> float:
        return float(np.sum(np.abs(self.preconcurrences())))


def canonical_decomposition(rho, rank_tol: float = RANK_TOL) -> tuple[Ensemble, np.ndarray]:
    """Members with ``<x_k | x~_k'> = lambda_k delta_kk'``.

    Start from the eigen-ensemble ``W`` (eigenvalues above ``rank_tol``),
    Takagi-factorise its tilde-overlap ``T = U diag(lambda) U^T`` and rotate
    to ``X = W U``.
    """
    rho = _as_rho(rho)
    w = support_vectors(rho, rank_tol)
    if w.shape[1] == 0:
        return Ensemble(np.zeros((0, 4), dtype=complex)), np.zeros(0)
    u, lam = nk.takagi(tilde_overlap(w))
    x = w @ u
    return Ensemble(x.T.copy()), lam


def mix(ensemble: Ensemble, u: np.ndarray, tol: float = 1e-10) -> Ensemble:
    """New members ``chi_l = sum_k conj(U[l, k]) x_k`` (missing members count as zero)."""
    u = np.asarray(u)
    m = u.shape[0]
    if u.shape != (m, m) or m < len(ensemble):
        raise NotUnitary(f"need a square unitary of size >= {len(ensemble)}, got {u.shape}")
    if np.max(np.abs(u @ u.conj().T - np.eye(m))) > tol:
        raise NotUnitary("mixing matrix is not unitary")
    padded = np.zeros((m, 4), dtype=complex)
    padded[: len(ensemble)] = ensemble.vectors
    return Ensemble(u.conj() @ padded)


def equal_concurrence_decomposition(rho, rank_tol: float = RANK_TOL,
                                    drop: float = 1e-13) -> Ensemble:
    """Optimal ensemble whose members all have concurrence ``sum(lambda)``.

    A real orthogonal ``O`` applied to the canonical members keeps the average
    concurrence.  Member ``l`` then has preconcurrence ``(O L O^T)_ll`` and
    weight ``(O Re(G) O^T)_ll`` (``L = diag(lambda)``, ``G`` the Gram matrix),
    so equal concurrences ``C_a`` means ``O (L - C_a Re G) O^T`` has zero
    diagonal; that trace-zero real symmetric problem is solved exactly by
    :func:`numkernel.zero_diagonal_unitary`.
    """
    ens, lam = canonical_decomposition(rho, rank_tol)
    if len(ens) <= 1:
        return ens
    x = ens.vectors
    gram = np.real(x.conj() @ x.T)
    target = lam.sum() / np.trace(gram)
    defect = np.diag(lam) - target * gram
    defect -= np.trace(defect) / len(lam) * np.eye(len(lam))
    o = nk.zero_diagonal_unitary(defect)
    mixed = mix(ens, o)
    keep = mixed.weights > drop
    return Ensemble(mixed.vectors[keep])


def realize_by_measurement(psi: TripartiteState, ensemble: Ensemble,
                           tol: float = 1e-9) -> KrausSet:
    """Sapna measurement whose outcome ``i`` leaves Alice and Bob in member ``i``.

    With ``Psi`` the 4 x n matrix of slices and ``X`` the member matrix,
    ``C = pinv(Psi) X`` gives ``K_i = <c_i|`` (rows ``c_i^T``, mapping Sapna to
    a one-dimensional output); ``sum K^dagger K`` is the projector onto
    Sapna's support and a final operator completes it to the identity.
    """
    if len(ensemble) > MAX_MEMBERS:
        raise EnsembleMismatch(f"at most {MAX_MEMBERS} members supported")
    big_psi = psi.psi_matrix()
    rho = big_psi @ big_psi.conj().T
    if np.max(np.abs(ensemble.density() - rho)) > tol:
        raise EnsembleMismatch("ensemble does not realise Tr_S |psi><psi|")
    # pseudo-inverse restricted to the same support used for the ensemble
    u, s, vh = np.linalg.svd(big_psi, full_matrices=False)
    keep = s**2 > RANK_TOL
    pinv = (vh[keep].conj().T / s[keep]) @ u[:, keep].conj().T
    coeffs = pinv @ ensemble.vectors.T  # column i: amplitudes on Sapna's basis
    ops = [coeffs[:, i].reshape(1, -1) for i in range(coeffs.shape[1])]
    rest = np.eye(psi.n) - sum(k.conj().T @ k for k in ops)
    w, v = np.linalg.eigh((rest + rest.conj().T) / 2)
    if w[-1] > 1e-12:
        ops.append((v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T)
    return KrausSet(tuple(ops), "S")
