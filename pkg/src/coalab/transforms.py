"""Deciding and realising tripartite -> bipartite conversions.

Covers deterministic distillation by CoA, conversion probabilities from the
Vidal monotones, the slice-diagonalising bases for Sapna, class-A membership
and the maximum Bell-distillation probability.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.linalg import expm
from scipy.optimize import least_squares

from . import numkernel as nk
from .decompositions import equal_concurrence_decomposition, realize_by_measurement
from .errors import BadDims, DimMismatch
from .locc import KrausSet, ProtocolNode, apply_operator, run_protocol
from .measures import coa_value, concurrence_pure
from .parallel import map_jobs
from .states import TripartiteState, partial_trace, random_unitary, schmidt_numbers

FEASIBILITY_TOL = 1e-9
MAJORIZATION_TOL = 1e-10
ORDER_TOL = 1e-9
SCHMIDT_MATCH_TOL = 1e-7
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)


def _bipartite(phi) -> np.ndarray:
    phi = np.asarray(phi, dtype=complex)
    if phi.ndim == 1:
        d = int(round(np.sqrt(phi.size)))
        if d * d != phi.size:
            raise DimMismatch(f"cannot read {phi.size} amplitudes as d x d")
        phi = phi.reshape(d, d)
    return phi


def _padded_numbers(phi, d: int) -> np.ndarray:
    lam = np.zeros(d)
    s = schmidt_numbers(phi)
    lam[: s.size] = s
    return lam


# -- bipartite pure-state conversions ---------------------------------------

def nielsen_feasible(psi, phi, tol: float = MAJORIZATION_TOL) -> bool:
    """True when psi -> phi is possible deterministically (psi's Schmidt vector majorised by phi's)."""
    psi, phi = _bipartite(psi), _bipartite(phi)
    if psi.shape != phi.shape:
        raise DimMismatch(f"{psi.shape} vs {phi.shape}")
    d = max(psi.shape)
    a = np.cumsum(_padded_numbers(psi, d))
    b = np.cumsum(_padded_numbers(phi, d))
    return bool(np.all(a <= b + tol))


def vidal_from_numbers(src: np.ndarray, tgt: np.ndarray, zero: float = 1e-12,
                       tol: float = MAJORIZATION_TOL) -> float:
    """``min_l E_l(src) / E_l(tgt)`` over tail sums, skipping ``E_l(tgt) = 0``; clamped to [0, 1].

    Exactly 1 when every tail of ``src`` dominates within ``tol``, so the
    answer agrees with :func:`nielsen_feasible`.
    """
    d = max(len(src), len(tgt))
    a = np.zeros(d)
    b = np.zeros(d)
    a[: len(src)] = np.sort(src)[::-1]
    b[: len(tgt)] = np.sort(tgt)[::-1]
    ea = np.cumsum(a[::-1])[::-1]
    eb = np.cumsum(b[::-1])[::-1]
    if np.all(ea >= eb - tol):
        return 1.0
    mask = eb > zero
    ratio = np.min(ea[mask] / eb[mask]) if mask.any() else 1.0
    return float(np.clip(ratio, 0.0, 1.0))


def vidal_probability(psi, phi) -> float:
    """Maximum probability of converting the pure state psi into phi by LOCC."""
    psi, phi = _bipartite(psi), _bipartite(phi)
    if psi.shape != phi.shape:
        raise DimMismatch(f"{psi.shape} vs {phi.shape}")
    d = max(psi.shape)
    return vidal_from_numbers(_padded_numbers(psi, d), _padded_numbers(phi, d))


@dataclass
class QubitConversion:
    """Alice's measurement (with Bob's corrections as children) converting one 2x2 state to another."""

    node: ProtocolNode
    probability: float
    deterministic: bool
    source_numbers: np.ndarray
    target_numbers: np.ndarray

    def describe(self) -> dict:
        return {
            "probability": self.probability,
            "deterministic": self.deterministic,
            "source_schmidt": self.source_numbers.tolist(),
            "target_schmidt": self.target_numbers.tolist(),
        }


def qubit_conversion(src, tgt, band: float = 1e-8) -> QubitConversion:
    """Two-outcome LOCC step taking ``src`` to ``tgt`` exactly (not only up to local unitaries).

    Deterministic when the source Schmidt vector is majorised by the target's
    (within ``band``): Alice measures ``diag(x0, x1)`` / ``X diag(y0, y1)`` in
    her Schmidt basis and Bob flips on outcome 1.  Otherwise Alice keeps the
    optimal success branch of probability ``alpha_1 / beta_1``; the failure
    branch is left without children.
    """
    src = _bipartite(src)
    tgt = _bipartite(tgt)
    if src.shape != (2, 2) or tgt.shape != (2, 2):
        raise DimMismatch("qubit conversion needs 2x2 states")
    us, s, vsh = np.linalg.svd(src / np.linalg.norm(src))
    ut, t, vth = np.linalg.svd(tgt / np.linalg.norm(tgt))
    alpha, beta = s**2, t**2
    alice_in = us.conj().T
    bob_in = vsh.conj()  # V_s^T: rotates Bob's Schmidt vectors onto |k>
    bob_out = vth.T  # conj(V_t)
    alice_out = ut

    if alpha[0] <= beta[0] + band:
        gap = beta[0] - beta[1]
        q = 1.0 if gap < 1e-12 else float(np.clip((alpha[0] - beta[1]) / gap, 0.0, 1.0))
        x0 = np.sqrt(np.clip(q * beta[0] / alpha[0], 0.0, 1.0))
        x1 = np.sqrt(np.clip(q * beta[1] / alpha[1], 0.0, 1.0)) if alpha[1] > 1e-15 else 0.0
        m0 = np.diag([x0, x1])
        m1 = PAULI_X @ np.diag([np.sqrt(1 - x0**2), np.sqrt(1 - x1**2)])
        alice = KrausSet((alice_out @ m0 @ alice_in, alice_out @ m1 @ alice_in), "A")
        kids = {
            "0": ProtocolNode(KrausSet((bob_out @ bob_in,), "B")),
            "1": ProtocolNode(KrausSet((bob_out @ PAULI_X @ bob_in,), "B")),
        }
        return QubitConversion(ProtocolNode(alice, kids), 1.0, True, alpha, beta)

    prob = float(alpha[1] / beta[1])
    x0 = np.sqrt(np.clip(alpha[1] * beta[0] / (beta[1] * alpha[0]), 0.0, 1.0))
    success = np.diag([x0, 1.0])
    failure = np.diag([np.sqrt(1 - x0**2), 0.0])
    alice = KrausSet((alice_out @ success @ alice_in, failure @ alice_in), "A")
    kids = {"0": ProtocolNode(KrausSet((bob_out @ bob_in,), "B"))}
    return QubitConversion(ProtocolNode(alice, kids), prob, False, alpha, beta)


def reaches_target(state: TripartiteState, target, tol: float = SCHMIDT_MATCH_TOL) -> bool:
    """Branch state is pure on AB with the target's Schmidt numbers."""
    rho_s = partial_trace(state, "S")
    if state.n > 1 and np.sort(np.linalg.eigvalsh(rho_s))[-1] < 1 - tol:
        return False
    ab = np.einsum("l,lij->ij", _dominant_sapna_vector(state).conj(), state.amplitudes)
    return bool(np.max(np.abs(schmidt_numbers(ab) - _padded_numbers(target, 2))) <= tol)


def _dominant_sapna_vector(state: TripartiteState) -> np.ndarray:
    if state.n == 1:
        return np.ones(1, dtype=complex)
    w, v = np.linalg.eigh(partial_trace(state, "S"))
    return v[:, -1]


# -- deterministic distillation ---------------------------------------------

@dataclass
class FeasibilityVerdict:
    feasible: bool
    coa_value: float
    target_concurrence: float
    protocol: Optional[ProtocolNode] = None
    conversions: list = field(default_factory=list)

    def to_json(self) -> dict:
        out = {
            "feasible": self.feasible,
            "coa": self.coa_value,
            "target_concurrence": self.target_concurrence,
            "margin": self.coa_value - self.target_concurrence,
        }
        if self.conversions:
            out["outcomes"] = self.conversions
        return out


def deterministic_feasible(psi: TripartiteState, phi, tol: float = FEASIBILITY_TOL,
                           build_protocol: bool = True) -> FeasibilityVerdict:
    """Decide ``C_a(psi) >= C(phi)`` and, when it holds, build the LOCC protocol.

    Sapna measures the equal-concurrence ensemble of ``rho_AB``; on every
    outcome the pair holds a state of concurrence ``C_a >= C(phi)``, which
    Alice and Bob convert to ``phi`` deterministically.
    """
    if not isinstance(psi, TripartiteState):
        raise BadDims("psi must be a 2x2xn TripartiteState")
    phi = _bipartite(phi)
    if phi.shape != (2, 2):
        raise BadDims(f"target must be 2x2, got {phi.shape}")
    ca = coa_value(psi)
    c_phi = concurrence_pure(phi / np.linalg.norm(phi))
    feasible = ca >= c_phi - tol
    verdict = FeasibilityVerdict(bool(feasible), ca, c_phi)
    if not feasible or not build_protocol:
        return verdict

    ensemble = equal_concurrence_decomposition(partial_trace(psi, "AB"))
    sapna = realize_by_measurement(psi, ensemble)
    children = {}
    for i in range(len(ensemble)):
        amps = apply_operator(psi, sapna.operators[i], "S")
        prob = float(np.real(np.vdot(amps, amps)))
        if prob < 1e-14:
            continue
        conv = qubit_conversion(amps[0] / np.sqrt(prob), phi)
        children[str(i)] = conv.node
        verdict.conversions.append({"outcome": str(i), "weight": prob, **conv.describe()})
    verdict.protocol = ProtocolNode(sapna, children)
    return verdict


# -- slice-diagonalising bases ----------------------------------------------

@dataclass
class SliceBasis:
    """Local frames in which every ``A^l^dagger A^l`` (side B) or ``A^l A^l^dagger`` (side A) is diagonal.

    ``sapna``, ``alice`` and ``bob`` are the unitaries applied to the state:
    new slices are ``sum_l' sapna[l, l'] alice @ A^l' @ bob.T``.  ``pairs[l]``
    holds the diagonal of the relevant product, labelled by the global
    Schmidt basis (index 0 = larger coefficient), and ``schmidt`` the
    corresponding global coefficients.
    """

    side: str
    sapna: np.ndarray
    alice: np.ndarray
    bob: np.ndarray
    slices: np.ndarray
    pairs: np.ndarray
    schmidt: np.ndarray
    offdiag: float
    tau_traces: np.ndarray
    ordered: bool

    def ordering_slack(self) -> float:
        """``min_l (pairs[l, 0] - pairs[l, 1])``; nonnegative means the class-A ordering holds."""
        return float(np.min(self.pairs[:, 0] - self.pairs[:, 1]))


def _side_frame(psi: TripartiteState, side: str):
    """Slices in the Schmidt frame of the relevant party, transposed so that party is on columns."""
    party = "B" if side == "B" else "A"
    q, vecs = nk.eig_hermitian(partial_trace(psi, party))
    q = np.clip(q, 0.0, None)
    rot = vecs.conj().T  # applied to the state: rotates Schmidt vectors onto |0>, |1>
    amps = psi.amplitudes
    if side == "B":
        frame = np.einsum("lij,kj->lik", amps, rot)
    else:
        frame = np.einsum("ki,lij->ljk", rot, amps)  # transpose: Alice's index on columns
    return q, rot, frame


def _tau(frame: np.ndarray):
    """``N = tau^(0,1)`` and ``D = tau^(0,0) - tau^(1,1)`` (n x n) for slices with the party on columns."""
    b0 = frame[:, :, 0].T  # 2 x n, column l = a^l_{., 0}
    b1 = frame[:, :, 1].T
    return b0.conj().T @ b1, b0.conj().T @ b0 - b1.conj().T @ b1, (b0, b1)


def _diag_residuals(v: np.ndarray, n_mat: np.ndarray, d_mat: np.ndarray) -> np.ndarray:
    dn = np.einsum("ij,jk,ik->i", v, n_mat, v.conj())
    dd = np.einsum("ij,jk,ik->i", v, d_mat, v.conj()).real
    return np.concatenate([dn.real, dn.imag, np.minimum(dd, 0.0)])


def _ordered_sapna_unitary(n_mat, d_mat, restarts: int = 12, seed: int = 0):
    """Unitary ``V`` with ``diag(V N V^dagger) = 0`` and ``diag(V D V^dagger) >= 0``, or None.

    Tries the direct zero-diagonal construction, the equal-diagonal
    construction when ``N`` vanishes, then a least-squares search over
    ``V = expm(iH) V0`` from several starts.  Any candidate is polished so
    that ``N`` has an exactly zero diagonal before being accepted.
    """
    n = n_mat.shape[0]
    scale = max(1.0, float(np.max(np.abs(d_mat))))

    def accept(v):
        v = nk.zero_diagonal_unitary(v @ n_mat @ v.conj().T) @ v
        dd = np.einsum("ij,jk,ik->i", v, d_mat, v.conj()).real
        return v if dd.min() >= -ORDER_TOL * scale else None

    v0 = nk.zero_diagonal_unitary(n_mat)
    found = accept(v0)
    if found is not None:
        return found
    if np.max(np.abs(n_mat)) < 1e-13:
        shifted = d_mat - np.trace(d_mat).real / n * np.eye(n)
        found = accept(nk.zero_diagonal_unitary(shifted))
        if found is not None:
            return found

    rng = np.random.default_rng(seed)
    iu = np.triu_indices(n, 1)

    def herm(x):
        h = np.zeros((n, n), dtype=complex)
        h[np.diag_indices(n)] = x[:n]
        k = len(iu[0])
        h[iu] = x[n:n + k] + 1j * x[n + k:]
        return h + np.triu(h, 1).conj().T

    starts = [v0] + [random_unitary(n, rng) for _ in range(restarts)]
    for start in starts:
        fun = lambda x: _diag_residuals(expm(1j * herm(x)) @ start, n_mat, d_mat)  # noqa: E731
        sol = least_squares(fun, np.zeros(n * n), method="trf", xtol=1e-15, ftol=1e-15, gtol=1e-15,
                            max_nfev=200 * n * n)
        if np.max(np.abs(sol.fun)) < 1e-10 * scale:
            found = accept(expm(1j * herm(sol.x)) @ start)
            if found is not None:
                return found
    return None


def slice_basis(psi: TripartiteState, side: str = "B", ordered: bool = False) -> SliceBasis:
    """Sapna basis in which all slice products ``A^l^dagger A^l`` (or ``A^l A^l^dagger``) are diagonal.

    Bob (side ``"B"``) or Alice (side ``"A"``) is put in her/his Schmidt
    basis, where ``tau^(0,1)`` is trace-free; Sapna's basis then makes its
    diagonal vanish.  With ``ordered=True`` the basis is additionally chosen,
    when possible, so that the larger-Schmidt label dominates in every slice.
    """
    if side not in ("A", "B"):
        raise ValueError("side must be 'A' or 'B'")
    q, rot, frame = _side_frame(psi, side)
    n_mat, d_mat, _ = _tau(frame)
    # Tr N is an off-diagonal element of the diagonalised reduced state: zero up to rounding
    n_mat = n_mat - np.trace(n_mat) / psi.n * np.eye(psi.n)
    v = _ordered_sapna_unitary(n_mat, d_mat) if ordered else None
    found = v is not None
    if v is None:
        v = nk.zero_diagonal_unitary(n_mat)
    sapna = v.conj()
    new_frame = np.einsum("ml,lij->mij", sapna, frame)
    gram = np.einsum("lij,lik->ljk", new_frame.conj(), new_frame)  # per-l 2x2 products
    offdiag = float(np.max(np.abs(gram[:, 0, 1])))
    pairs = np.real(np.stack([gram[:, 0, 0], gram[:, 1, 1]], axis=1))
    _, _, (b0, b1) = _tau(new_frame)
    taus = np.array([[np.trace(b0.conj().T @ b0), np.trace(b0.conj().T @ b1)],
                     [np.trace(b1.conj().T @ b0), np.trace(b1.conj().T @ b1)]])
    if side == "B":
        alice, bob = np.eye(2, dtype=complex), rot
        slices = new_frame
    else:
        alice, bob = rot, np.eye(2, dtype=complex)
        slices = new_frame.transpose(0, 2, 1)
    return SliceBasis(side, sapna, alice, bob, slices, pairs, q, offdiag, taus, found)


# -- class A and maximal Bell distillation -----------------------------------

@dataclass
class ClassAReport:
    p_schmidt: np.ndarray
    q_schmidt: np.ndarray
    basis_A_side: SliceBasis
    basis_B_side: SliceBasis
    in_class: bool
    branch: Optional[str]
    p_max: float

    @property
    def bound(self) -> float:
        return float(2 * min(self.p_schmidt[1], self.q_schmidt[1]))

    def to_json(self) -> dict:
        return {
            "p_schmidt": self.p_schmidt.tolist(),
            "q_schmidt": self.q_schmidt.tolist(),
            "E_A(BS)": float(2 * self.p_schmidt[1]),
            "E_B(AS)": float(2 * self.q_schmidt[1]),
            "p_pairs": self.basis_A_side.pairs.tolist(),
            "q_pairs": self.basis_B_side.pairs.tolist(),
            "in_class": self.in_class,
            "branch": self.branch,
            "p_max": self.p_max,
        }


def projective_value(slices: np.ndarray, beta1: float = 0.5) -> float:
    """``sum_l ||A^l||^2 P(A^l / ||A^l|| -> phi)`` for a two-qubit target with smaller Schmidt number ``beta1``."""
    w = np.real(np.einsum("lij,lij->l", slices.conj(), slices))
    det = np.abs(slices[:, 0, 0] * slices[:, 1, 1] - slices[:, 0, 1] * slices[:, 1, 0])
    disc = np.sqrt(np.clip(w**2 - 4 * det**2, 0.0, None))
    lam_min = np.divide(2 * det**2, w + disc, out=np.zeros_like(w), where=(w + disc) > 0)
    if beta1 <= 1e-12:
        return float(w.sum())
    return float(np.sum(np.minimum(w, lam_min / beta1)))


def class_a_membership(psi: TripartiteState) -> ClassAReport:
    """Evaluate the two class-A branches with ordering-aware slice bases on each side."""
    p = np.clip(nk.eig_hermitian(partial_trace(psi, "A"))[0], 0.0, None)
    q = np.clip(nk.eig_hermitian(partial_trace(psi, "B"))[0], 0.0, None)
    e_a, e_b = 2 * p[1], 2 * q[1]
    basis_b = slice_basis(psi, "B", ordered=e_a >= e_b - ORDER_TOL)
    basis_a = slice_basis(psi, "A", ordered=e_a <= e_b + ORDER_TOL)
    branch = None
    if e_a >= e_b - ORDER_TOL and basis_b.ordering_slack() >= -ORDER_TOL:
        branch = "(i)+(ii)"
    elif e_a <= e_b + ORDER_TOL and basis_a.ordering_slack() >= -ORDER_TOL:
        branch = "(i')+(ii')"
    in_class = branch is not None
    if in_class:
        p_max = float(min(e_a, e_b))
    else:
        p_max = max(projective_value(basis_a.slices), projective_value(basis_b.slices))
    return ClassAReport(p, q, basis_a, basis_b, in_class, branch, p_max)


def bell_distillation_protocol(psi: TripartiteState, sapna: np.ndarray) -> ProtocolNode:
    """Sapna measures the rows of ``sapna``; each outcome is converted to a Bell pair optimally."""
    ops = tuple(sapna[m].reshape(1, -1) for m in range(sapna.shape[0]))
    kraus = KrausSet(ops, "S")
    children = {}
    for m, op in enumerate(ops):
        amps = apply_operator(psi, op, "S")[0]
        w = float(np.real(np.vdot(amps, amps)))
        if w < 1e-14:
            continue
        children[str(m)] = qubit_conversion(amps / np.sqrt(w), BELL).node
    return ProtocolNode(kraus, children)


BELL = np.eye(2, dtype=complex) / np.sqrt(2)


def simulated_success(psi: TripartiteState, tree: ProtocolNode, target) -> float:
    """Total probability of protocol leaves that hold ``target`` (up to local unitaries)."""
    return float(sum(o.probability for o in run_protocol(psi, tree) if reaches_target(o.state, target)))


@dataclass
class DistillResult:
    p_max: float
    lower_bound: float
    upper_bound: float
    certified: bool
    protocol: Optional[ProtocolNode]
    simulated: Optional[float]
    report: ClassAReport

    def to_json(self) -> dict:
        return {
            "p_max": self.p_max,
            "certified": self.certified,
            "lower_bound": self.lower_bound,
            "upper_bound": self.upper_bound,
            "simulated": self.simulated,
            "class_A": self.report.to_json(),
        }


BATCH = 250


def random_basis_search(psi: TripartiteState, beta1: float, samples: int, seed) -> float:
    """Best projective-measurement value over Haar-random Sapna bases.

    Samples are split into fixed batches with spawned seeds, so the result
    does not depend on how many worker threads (``COALAB_THREADS``) run them.
    """
    if samples <= 0:
        return 0.0
    nb = -(-samples // BATCH)
    seqs = np.random.SeedSequence(seed).spawn(nb)
    sizes = [min(BATCH, samples - k * BATCH) for k in range(nb)]

    def batch(args):
        seq, size = args
        rng = np.random.default_rng(seq)
        best = 0.0
        for _ in range(size):
            u = random_unitary(psi.n, rng)
            best = max(best, projective_value(np.einsum("ml,lij->mij", u, psi.amplitudes), beta1))
        return best

    return float(max(map_jobs(batch, list(zip(seqs, sizes)))))


def max_distill_probability(psi: TripartiteState, samples: int = 2000, seed=0) -> DistillResult:
    """Maximum probability of distilling a Bell pair (Sapna measures first, then Alice and Bob).

    Class-A states get the exact value ``min(E_A(BS), E_B(AS))`` with the
    projective protocol in the ordered slice basis.  Otherwise the best of the
    slice-basis protocols and a Monte-Carlo search over Sapna bases is
    reported as a lower bound, with the same cut bound as upper bound.
    """
    report = class_a_membership(psi)
    upper = report.bound
    if report.in_class:
        basis = report.basis_B_side if report.branch == "(i)+(ii)" else report.basis_A_side
        tree = bell_distillation_protocol(psi, basis.sapna)
        sim = simulated_success(psi, tree, BELL)
        return DistillResult(report.p_max, report.p_max, upper, True, tree, sim, report)
    mc = random_basis_search(psi, 0.5, samples, seed)
    best_basis = max((report.basis_A_side, report.basis_B_side), key=lambda b: projective_value(b.slices))
    lower = max(report.p_max, mc)
    if mc > report.p_max:
        tree, sim = None, None
    else:
        tree = bell_distillation_protocol(psi, best_basis.sapna)
        sim = simulated_success(psi, tree, BELL)
    return DistillResult(lower, lower, upper, False, tree, sim, report)


@dataclass
class DistillBounds:
    lower_bound: float
    upper_bound: float

    def to_json(self) -> dict:
        return {"lower_bound": self.lower_bound, "upper_bound": self.upper_bound}


def _measurement_value(psi: TripartiteState, kraus: KrausSet, phi) -> float:
    total = 0.0
    for op in kraus.operators:
        if op.shape[0] != 1:
            continue  # completion operators carry no usable pure branch; counting zero keeps a lower bound
        amps = apply_operator(psi, op, "S")[0]
        w = float(np.real(np.vdot(amps, amps)))
        if w > 1e-14:
            total += w * vidal_probability(amps / np.sqrt(w), phi)
    return total


def distill_probability_general(psi: TripartiteState, phi, samples: int = 2000, seed=0) -> DistillBounds:
    """Bounds on the probability of obtaining ``phi`` when Sapna measures first.

    Lower bound: best average conversion probability over the ordered slice
    bases, the equal-concurrence measurement and random projective bases.
    Upper bound: the conversion probability allowed by each one-versus-rest cut.
    """
    phi = _bipartite(phi)
    if phi.shape != (2, 2):
        raise BadDims("target must be 2x2")
    tgt = _padded_numbers(phi, 2)
    upper = min(vidal_from_numbers(np.clip(nk.eig_hermitian(partial_trace(psi, x))[0], 0, None), tgt)
                for x in ("A", "B"))
    beta1 = float(tgt[1])
    report = class_a_membership(psi)
    cands = [projective_value(report.basis_A_side.slices, beta1),
             projective_value(report.basis_B_side.slices, beta1)]
    ens = equal_concurrence_decomposition(partial_trace(psi, "AB"))
    cands.append(_measurement_value(psi, realize_by_measurement(psi, ens), phi))
    cands.append(random_basis_search(psi, beta1, samples, seed))
    return DistillBounds(float(max(cands)), float(upper))
