"""Small dense complex linear algebra used throughout coalab.

Everything here works on plain ``numpy`` arrays of modest size (n <= 64).
Tolerances are relative to a matrix norm unless the input is a unit-trace
density matrix, in which case they are absolute.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import ConvergenceError, NonzeroTrace, NotHermitian, NotPSD, NotSymmetric

HERMITIAN_TOL = 1e-10
PSD_TOL = 1e-10


class HermitianEig(NamedTuple):
    """Eigenvalues (descending) and eigenvectors (as columns)."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def _scale(m: np.ndarray) -> float:
    return max(1.0, float(np.max(np.abs(m)))) if m.size else 1.0


def check_hermitian(h: np.ndarray, tol: float = HERMITIAN_TOL) -> np.ndarray:
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise NotHermitian(f"expected a square matrix, got shape {h.shape}")
    if not np.all(np.isfinite(h)):
        raise NotHermitian("matrix has non-finite entries")
    dev = float(np.max(np.abs(h - h.conj().T))) if h.size else 0.0
    if dev > tol * _scale(h):
        raise NotHermitian(f"max |H - H^dagger| = {dev:.3e}")
    return h


def _sorted_desc(w: np.ndarray, v: np.ndarray) -> HermitianEig:
    order = np.argsort(w)[::-1]
    return HermitianEig(np.ascontiguousarray(w[order]), np.ascontiguousarray(v[:, order]))


def jacobi_eigh(h: np.ndarray, tol: float = 1e-14, max_sweeps: int = 100) -> HermitianEig:
    """Cyclic Jacobi diagonalisation of a Hermitian matrix.

    Each (p, q) step first removes the phase of ``H[p, q]`` with a diagonal
    unitary and then applies the real Jacobi rotation that annihilates it.
    Sweeps stop once the off-diagonal Frobenius mass falls below
    ``tol * ||H||_F``.
    """
    a = check_hermitian(h).copy()
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    norm = np.linalg.norm(a)
    if n < 2 or norm == 0.0:
        return _sorted_desc(np.real(np.diag(a)).copy(), v)

    for _ in range(max_sweeps):
        off = np.linalg.norm(a - np.diag(np.diag(a)))
        if off <= tol * norm:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag <= 1e-300:
                    continue
                phase = apq / mag
                app = a[p, p].real
                aqq = a[q, q].real
                theta = (aqq - app) / (2.0 * mag)
                t = np.sign(theta) / (abs(theta) + np.sqrt(1.0 + theta * theta)) if theta != 0 else 1.0
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                # U = diag(1, conj(phase)) @ [[c, s], [-s, c]] on the (p, q) plane
                u2 = np.array([[c, s], [-s * np.conj(phase), c * np.conj(phase)]])
                idx = [p, q]
                a[:, idx] = a[:, idx] @ u2
                a[idx, :] = u2.conj().T @ a[idx, :]
                a[p, q] = a[q, p] = 0.0
                v[:, idx] = v[:, idx] @ u2
    else:
        raise ConvergenceError(f"Jacobi did not converge in {max_sweeps} sweeps")
    return _sorted_desc(np.real(np.diag(a)).copy(), v)


def eig_hermitian(h: np.ndarray, method: str = "lapack") -> HermitianEig:
    """Eigen-decomposition of a Hermitian matrix, eigenvalues descending.

    ``method="lapack"`` (default) calls ``numpy.linalg.eigh``;
    ``method="jacobi"`` runs :func:`jacobi_eigh`.
    """
    h = check_hermitian(h)
    if method == "jacobi":
        return jacobi_eigh(h)
    if method != "lapack":
        raise ValueError(f"unknown method {method!r}")
    w, v = np.linalg.eigh((h + h.conj().T) / 2)
    return HermitianEig(w[::-1].copy(), v[:, ::-1].copy())


def sqrt_psd(m: np.ndarray, cutoff: float = PSD_TOL) -> np.ndarray:
    """Principal square root of a positive semidefinite matrix.

    Eigenvalues at or below ``cutoff`` (scaled by ``max(1, ||M||)``) are set to
    zero; anything below ``-cutoff`` is rejected.
    """
    w, v = eig_hermitian(m)
    scale = max(1.0, float(w[0])) if w.size else 1.0
    if w.size and w[-1] < -PSD_TOL * scale:
        raise NotPSD(f"smallest eigenvalue {w[-1]:.3e}")
    root = np.where(w > cutoff * scale, np.sqrt(np.clip(w, 0.0, None)), 0.0)
    return (v * root) @ v.conj().T


def singular_values(m: np.ndarray) -> np.ndarray:
    return np.linalg.svd(np.asarray(m, dtype=complex), compute_uv=False)


def takagi(s: np.ndarray, tol: float = 1e-10) -> tuple[np.ndarray, np.ndarray]:
    """Autonne-Takagi factorisation ``S = U diag(lam) U^T`` of a complex symmetric matrix.

    Writing ``S = A + iB`` and ``u = x + iy``, the condition ``S conj(u) = lam u``
    is the real symmetric eigenproblem ``[[A, B], [B, -A]] [x; y] = lam [x; y]``,
    whose spectrum is ``{+-sigma_k}``.  Eigenvectors for positive eigenvalues
    give the columns of ``U`` directly (degenerate values included); columns for
    numerically zero singular values are completed from the orthogonal
    complement, which ``S`` annihilates.

    Returns ``(U, lam)`` with ``lam`` descending.
    """
    s = np.asarray(s, dtype=complex)
    if s.ndim != 2 or s.shape[0] != s.shape[1]:
        raise NotSymmetric(f"expected a square matrix, got shape {s.shape}")
    n = s.shape[0]
    if n and np.max(np.abs(s - s.T)) > tol * _scale(s):
        raise NotSymmetric(f"max |S - S^T| = {np.max(np.abs(s - s.T)):.3e}")
    s = (s + s.T) / 2
    if n == 0:
        return np.zeros((0, 0), dtype=complex), np.zeros(0)

    a, b = s.real, s.imag
    big = np.block([[a, b], [b, -a]])
    w, vecs = np.linalg.eigh(big)
    w, vecs = w[::-1], vecs[:, ::-1]
    norm = float(np.linalg.norm(s, 2))
    zero_tol = 1e-13 * max(norm, 1e-300)
    keep = int(np.sum(w[:n] > zero_tol))
    u = vecs[:n, :keep] + 1j * vecs[n:, :keep]
    lam = np.zeros(n)
    lam[:keep] = w[:keep]
    if keep < n:
        # orthonormal basis of the complement of the kept columns
        proj = np.eye(n) - u @ u.conj().T
        q, _, _ = np.linalg.svd(proj)
        u = np.hstack([u, q[:, : n - keep]])
    return u, lam


def zero_diagonal_unitary(m: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """Unitary ``U`` such that ``U M U^dagger`` has zero diagonal, for trace-zero ``M``.

    Works one basis vector at a time.  With diagonal entries ``d_1..d_k`` of the
    current trailing block, a sequence of two-dimensional unitaries on planes
    ``(1, j)`` moves ``d_1`` to the running mean ``(d_1 + ... + d_j)/j``; after
    the last plane ``d_1`` equals ``trace/k = 0``.  Each plane rotation is found
    in closed form.  Then recurse on the trailing block, whose trace is still
    zero.  Real symmetric input yields a real orthogonal ``U``.
    """
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise NonzeroTrace(f"expected a square matrix, got shape {m.shape}")
    real = np.isrealobj(m)
    a = np.array(m, dtype=float if real else complex)
    n = a.shape[0]
    norm = float(np.linalg.norm(a, 2)) if n else 0.0
    if abs(np.trace(a)) > tol * max(norm, 1e-300) and abs(np.trace(a)) > 1e-300:
        raise NonzeroTrace(f"|Tr M| = {abs(np.trace(a)):.3e}")
    w = np.eye(n, dtype=a.dtype)  # columns: new basis, current = W^dagger M W
    negligible = 1e-15 * norm

    for k in range(n - 1):
        for j in range(k + 1, n):
            d1, dj = a[k, k], a[j, j]
            gap = dj - d1
            if abs(gap) <= negligible:
                continue
            frac = 1.0 / (j - k + 1)  # target d1 + frac * gap
            beta = a[k, j] / gap
            gamma = a[j, k] / gap
            if real:
                e, r = 1.0, beta + gamma
            else:
                # choose phi with Im(e^{i phi} beta + e^{-i phi} gamma) = 0
                ca = beta.imag + gamma.imag
                cb = beta.real - gamma.real
                e = np.exp(1j * np.arctan2(-ca, cb)) if (abs(ca) > 0 or abs(cb) > 0) else 1.0
                r = (e * beta + np.conj(e) * gamma).real
            # solve sin^2 t + r sin t cos t = frac for theta = 2t in [0, pi]
            rr = np.hypot(1.0, r)
            delta = np.arctan2(1.0, r)
            theta = delta + np.arcsin(np.clip((2.0 * frac - 1.0) / rr, -1.0, 1.0))
            t = theta / 2.0
            c, s = np.cos(t), np.sin(t)
            g = np.array([[c, -np.conj(e) * s], [e * s, c]])
            idx = [k, j]
            a[:, idx] = a[:, idx] @ g
            a[idx, :] = g.conj().T @ a[idx, :]
            w[:, idx] = w[:, idx] @ g
    return w.conj().T
