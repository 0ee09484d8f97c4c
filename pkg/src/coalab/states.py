"""Pure tripartite states on 2 x 2 x n, bipartite reductions and helpers.

Index convention
----------------
A :class:`TripartiteState` stores amplitudes ``a[l, i, j] = <i|_A <j|_B <l|_S |psi>``
in an array of shape ``(n, 2, 2)``: Sapna's index is the slowest, so
``amplitudes[l]`` is the 2x2 slice ``A^l`` with Alice on rows and Bob on
columns.  Flattening the array (C order) gives the on-disk amplitude order.

Two-party vectors and density matrices use the usual Kronecker order
``|i>_A |j>_B -> 2*i + j``.  Multi-qubit state vectors put qubit 0 first
(most significant).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy.stats import unitary_group

from . import numkernel as nk
from .errors import BadCut, BadDims, BadSubsystem, DimMismatch, NotNormalized, NotPSD

NORM_TOL = 1e-12
FILE_NORM_TOL = 1e-9


def as_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


@dataclass(frozen=True)
class TripartiteState:
    """Pure state of Alice (qubit), Bob (qubit) and Sapna (dimension n)."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex)
        if amps.ndim != 3 or amps.shape[1:] != (2, 2) or amps.shape[0] < 1:
            raise BadDims(f"amplitudes must have shape (n, 2, 2), got {amps.shape}")
        if not np.all(np.isfinite(amps)):
            raise BadDims("amplitudes contain non-finite values")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > NORM_TOL:
            raise NotNormalized(f"state norm {norm:.15f}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_unnormalized(cls, amps) -> "TripartiteState":
        amps = np.asarray(amps, dtype=complex)
        return cls(amps / np.linalg.norm(amps))

    @classmethod
    def from_vector(cls, vec, n: int | None = None) -> "TripartiteState":
        """Build from a Kronecker-ordered vector on A (x) B (x) S."""
        vec = np.asarray(vec, dtype=complex).reshape(-1)
        if n is None:
            n = vec.size // 4
        if vec.size != 4 * n:
            raise BadDims(f"vector of length {vec.size} is not 2x2x{n}")
        return cls(vec.reshape(2, 2, n).transpose(2, 0, 1))

    @property
    def n(self) -> int:
        return self.amplitudes.shape[0]

    @property
    def dims(self) -> tuple[int, int, int]:
        return (2, 2, self.n)

    def to_vector(self) -> np.ndarray:
        """Kronecker-ordered vector on A (x) B (x) S."""
        return self.amplitudes.transpose(1, 2, 0).reshape(-1).copy()

    def slices(self) -> list[np.ndarray]:
        return [self.amplitudes[l].copy() for l in range(self.n)]

    def psi_matrix(self) -> np.ndarray:
        """4 x n matrix whose column l is vec(A^l) on A (x) B."""
        return self.amplitudes.reshape(self.n, 4).T.copy()

    def rho_ab(self) -> np.ndarray:
        return partial_trace(self, "AB")


def ghz(a: float = 0.5, b: float | None = None) -> TripartiteState:
    """sqrt(a)|000> + sqrt(b)|111>; ``b`` defaults to ``1 - a``."""
    if b is None:
        b = 1.0 - a
    vec = np.zeros(8, dtype=complex)
    vec[0], vec[7] = np.sqrt(a), np.sqrt(b)
    return TripartiteState.from_vector(_checked(vec))


def w_state(a: float = 1 / 3, b: float = 1 / 3, c: float | None = None) -> TripartiteState:
    """sqrt(a)|100> + sqrt(b)|010> + sqrt(c)|001>; ``c`` defaults to ``1 - a - b``."""
    if c is None:
        c = 1.0 - a - b
    vec = np.zeros(8, dtype=complex)
    vec[4], vec[2], vec[1] = np.sqrt(a), np.sqrt(b), np.sqrt(c)
    return TripartiteState.from_vector(_checked(vec))


def bell(kind: str = "phi+") -> np.ndarray:
    """Two-qubit Bell state as a 2x2 amplitude matrix."""
    s = 1 / np.sqrt(2)
    table = {
        "phi+": [[s, 0], [0, s]],
        "phi-": [[s, 0], [0, -s]],
        "psi+": [[0, s], [s, 0]],
        "psi-": [[0, s], [-s, 0]],
    }
    return np.array(table[kind], dtype=complex)


def schmidt_state(p0: float) -> np.ndarray:
    """sqrt(p0)|00> + sqrt(1 - p0)|11> as an amplitude matrix."""
    return np.diag([np.sqrt(p0), np.sqrt(1.0 - p0)]).astype(complex)


def with_sapna(phi: np.ndarray, n: int = 1) -> TripartiteState:
    """|phi>_AB (x) |0>_S with Sapna of dimension n."""
    amps = np.zeros((n, 2, 2), dtype=complex)
    amps[0] = np.asarray(phi, dtype=complex).reshape(2, 2)
    return TripartiteState(amps)


def entanglement_swap_state() -> TripartiteState:
    """|Phi+>_{A S1} |Phi+>_{B S2}, Sapna holding S1 S2 (n = 4, l = 2*s1 + s2)."""
    amps = np.zeros((4, 2, 2), dtype=complex)
    for i in range(2):
        for j in range(2):
            amps[2 * i + j, i, j] = 0.5
    return TripartiteState(amps)


def qubits_to_tripartite(psi: np.ndarray, sapna: int | Sequence[int] = -1,
                         alice: int | None = None, bob: int | None = None) -> TripartiteState:
    """View an m-qubit vector as 2 x 2 x 2^(m-2) with chosen qubits for A and B.

    By default Sapna holds the last qubit (or the listed qubits); Alice and Bob
    are the first two remaining qubits in order.
    """
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    m = int(round(np.log2(psi.size)))
    if 2**m != psi.size or m < 2:
        raise BadDims(f"length {psi.size} is not a multi-qubit vector")
    sap = [sapna] if isinstance(sapna, (int, np.integer)) else list(sapna)
    sap = [q % m for q in sap]
    rest = [q for q in range(m) if q not in sap]
    if alice is None or bob is None:
        if len(rest) != 2:
            raise BadSubsystem("Alice and Bob must each hold exactly one qubit")
        alice, bob = rest
    order = [alice, bob] + sorted(set(range(m)) - {alice, bob})
    tensor = psi.reshape([2] * m).transpose(order)
    return TripartiteState.from_vector(tensor.reshape(-1))


_PARTY = {"A": 0, "B": 1, "S": 2}


def partial_trace(state, keep, dims: Sequence[int] | None = None) -> np.ndarray:
    """Reduced density matrix of the parties in ``keep`` (output in that order).

    ``state`` is a :class:`TripartiteState` with ``keep`` made of letters from
    ``"ABS"``, or a state vector with ``dims`` (qubits if omitted) and ``keep``
    a sequence of subsystem indices.
    """
    if isinstance(state, TripartiteState):
        if isinstance(keep, str):
            try:
                keep = [_PARTY[c] for c in keep]
            except KeyError:
                raise BadSubsystem(f"unknown party in {keep!r}") from None
        tensor = state.to_vector().reshape(2, 2, state.n)
    else:
        vec = np.asarray(state, dtype=complex).reshape(-1)
        if dims is None:
            m = int(round(np.log2(vec.size)))
            if 2**m != vec.size:
                raise BadSubsystem("dims required for non-qubit vectors")
            dims = [2] * m
        if int(np.prod(dims)) != vec.size:
            raise BadSubsystem(f"dims {tuple(dims)} do not match length {vec.size}")
        tensor = vec.reshape(dims)
    keep = list(keep)
    nsub = tensor.ndim
    if not keep or len(set(keep)) != len(keep) or any(not 0 <= k < nsub for k in keep):
        raise BadSubsystem(f"invalid subsystem selection {keep!r}")
    traced = [k for k in range(nsub) if k not in keep]
    t = tensor.transpose(keep + traced)
    dk = int(np.prod([tensor.shape[k] for k in keep]))
    mat = t.reshape(dk, -1)
    return mat @ mat.conj().T


@dataclass(frozen=True)
class SchmidtDecomposition:
    coefficients: np.ndarray  # descending, sum to one
    local_basis: np.ndarray  # columns
    partner_states: np.ndarray  # columns, orthonormal vectors on the complement

    def reconstruct(self) -> np.ndarray:
        """Vector with the cut party first (Kronecker order)."""
        return sum(
            np.sqrt(p) * np.kron(self.local_basis[:, k], self.partner_states[:, k])
            for k, p in enumerate(self.coefficients)
        )


def schmidt(state, cut: str | int = "A") -> SchmidtDecomposition:
    """Schmidt decomposition of a pure state across one qubit versus the rest.

    Coefficients are the eigenvalues of the 2x2 reduced density matrix of the
    cut party; partner states are ``(<i| (x) 1)|psi> / sqrt(p_i)``, completed
    orthonormally when ``p_i`` vanishes.
    """
    if isinstance(state, TripartiteState):
        if cut not in ("A", "B", "S"):
            raise BadCut(f"unknown party {cut!r}")
        if cut == "S" and state.n != 2:
            raise BadCut("Schmidt cut requires a two-dimensional party")
        axis = _PARTY[cut]
        tensor = state.to_vector().reshape(2, 2, state.n)
    else:
        vec = np.asarray(state, dtype=complex).reshape(-1)
        if vec.ndim != 1 or vec.size % 2:
            raise BadCut("state is not cuttable into a qubit and the rest")
        m = int(round(np.log2(vec.size)))
        if 2**m != vec.size:
            raise BadCut("vector must be multi-qubit")
        axis = int(cut)
        if not 0 <= axis < m:
            raise BadCut(f"no qubit {cut}")
        tensor = vec.reshape([2] * m)
    mat = np.moveaxis(tensor, axis, 0).reshape(2, -1)
    rho = mat @ mat.conj().T
    p, basis = nk.eig_hermitian(rho)
    p = np.clip(p, 0.0, None)
    p = p / p.sum()
    partners = basis.conj().T @ mat  # rows: unnormalised partner states
    out = np.zeros((mat.shape[1], 2), dtype=complex)
    norms = np.linalg.norm(partners, axis=1)
    out[:, 0] = partners[0] / norms[0]
    if norms[1] > 1e-7:
        second = partners[1] - (out[:, 0].conj() @ partners[1]) * out[:, 0]
        out[:, 1] = second / np.linalg.norm(second)
    else:
        # any unit vector orthogonal to the first partner
        e = np.zeros(mat.shape[1], dtype=complex)
        e[int(np.argmin(np.abs(out[:, 0])))] = 1.0
        e -= (out[:, 0].conj() @ e) * out[:, 0]
        out[:, 1] = e / np.linalg.norm(e)
    return SchmidtDecomposition(p, basis, out)


def schmidt_numbers(phi: np.ndarray) -> np.ndarray:
    """Descending Schmidt numbers (squared Schmidt coefficients) of a bipartite amplitude matrix."""
    phi = np.asarray(phi, dtype=complex)
    if phi.ndim == 1:
        d = int(round(np.sqrt(phi.size)))
        phi = phi.reshape(d, d)
    s = nk.singular_values(phi) ** 2
    return s / s.sum()


def slices(state: TripartiteState) -> list[np.ndarray]:
    return state.slices()


def change_sapna_basis(state: TripartiteState, u: np.ndarray) -> TripartiteState:
    """Slices after Sapna's basis change ``|l> -> U|l>``: ``A'^l = sum_l' conj(U[l, l']) A^l'``."""
    u = np.asarray(u, dtype=complex)
    if u.shape != (state.n, state.n):
        raise DimMismatch(f"unitary shape {u.shape} does not match n = {state.n}")
    return TripartiteState(np.einsum("ab,bij->aij", u.conj(), state.amplitudes))


def random_pure(dims: Sequence[int] | int, seed=None) -> np.ndarray:
    """Haar-random pure state: independent complex Gaussians, normalised.

    Returns a tensor of shape ``dims`` (a flat vector when ``dims`` is an int).
    """
    rng = as_rng(seed)
    shape = (dims,) if isinstance(dims, (int, np.integer)) else tuple(dims)
    z = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    return z / np.linalg.norm(z)


def random_tripartite(n: int, seed=None) -> TripartiteState:
    return TripartiteState.from_unnormalized(random_pure((n, 2, 2), seed))


def random_qubits(m: int, seed=None) -> np.ndarray:
    return random_pure(2**m, seed)


def random_unitary(n: int, seed=None) -> np.ndarray:
    if n == 1:
        return np.exp(2j * np.pi * as_rng(seed).random()).reshape(1, 1)
    return unitary_group.rvs(n, random_state=as_rng(seed))


def fidelity(rho: np.ndarray, sigma: np.ndarray) -> float:
    """Root fidelity ``Tr sqrt(sqrt(sigma) rho sqrt(sigma))``.

    Evaluated as the trace norm of ``sqrt(rho) sqrt(sigma)``, which is the same
    quantity but avoids square-rooting the near-zero eigenvalues of the inner
    product matrix.
    """
    rho = np.asarray(rho, dtype=complex)
    sigma = np.asarray(sigma, dtype=complex)
    if rho.shape != sigma.shape:
        raise DimMismatch(f"{rho.shape} vs {sigma.shape}")
    return float(np.sum(nk.singular_values(nk.sqrt_psd(rho) @ nk.sqrt_psd(sigma))))


def check_density(rho: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    rho = nk.check_hermitian(rho, tol)
    if abs(np.trace(rho).real - 1.0) > tol:
        raise NotNormalized(f"trace {np.trace(rho).real:.12f}")
    w = np.linalg.eigvalsh(rho)
    if w[0] < -tol:
        raise NotPSD(f"smallest eigenvalue {w[0]:.3e}")
    return rho


# -- JSON state files ------------------------------------------------------

def _checked(vec: np.ndarray) -> np.ndarray:
    norm = np.linalg.norm(vec)
    if abs(norm - 1.0) > FILE_NORM_TOL:
        raise NotNormalized(f"norm {norm:.12f} differs from 1 by more than {FILE_NORM_TOL}")
    return vec / norm


def _pairs_to_complex(pairs) -> np.ndarray:
    arr = np.asarray(pairs, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise BadDims("amplitudes must be a list of [re, im] pairs")
    return arr[:, 0] + 1j * arr[:, 1]


def state_from_json(obj: dict) -> TripartiteState:
    """Parse ``{"dims": [2, 2, n], "amplitudes": [[re, im], ...]}`` (Sapna index slowest)."""
    dims = obj.get("dims")
    if not isinstance(dims, list) or len(dims) != 3 or dims[:2] != [2, 2] or int(dims[2]) < 1:
        raise BadDims(f"dims must be [2, 2, n], got {dims!r}")
    n = int(dims[2])
    amps = _pairs_to_complex(obj.get("amplitudes", []))
    if amps.size != 4 * n:
        raise BadDims(f"expected {4 * n} amplitudes, got {amps.size}")
    return TripartiteState(_checked(amps).reshape(n, 2, 2))


def state_to_json(state: TripartiteState) -> dict:
    flat = state.amplitudes.reshape(-1)
    return {"dims": [2, 2, state.n], "amplitudes": [[z.real, z.imag] for z in flat]}


def bipartite_from_json(obj: dict) -> np.ndarray:
    """Parse ``{"dims": [dA, dB], "amplitudes": [...]}`` with Alice's index slowest."""
    dims = obj.get("dims")
    if not isinstance(dims, list) or len(dims) != 2:
        raise BadDims(f"dims must be [dA, dB], got {dims!r}")
    amps = _pairs_to_complex(obj.get("amplitudes", []))
    if amps.size != int(dims[0]) * int(dims[1]):
        raise BadDims("amplitude count does not match dims")
    return _checked(amps).reshape(int(dims[0]), int(dims[1]))


def bipartite_to_json(phi: np.ndarray) -> dict:
    phi = np.asarray(phi, dtype=complex)
    return {"dims": list(phi.shape), "amplitudes": [[z.real, z.imag] for z in phi.reshape(-1)]}


def load_json(path: str | Path) -> dict:
    with open(path) as fh:
        return json.load(fh)
