"""Kraus-operator simulation of multi-round LOCC protocols on 2x2xn pure states.

A protocol is an explicit tree of :class:`ProtocolNode` objects.  Each node
names the measuring party and its Kraus operators; ``children`` maps an
outcome label (``"0"``, ``"1"``, ...) to the node executed next on that
branch.  Missing children end the branch.  Trees round-trip through JSON::

    {"party": "S", "operators": [[[[re, im], ...], ...], ...],
     "children": {"0": {...}, "1": {...}}}
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .errors import DimMismatch, NotUnitary
from .measures import coa_value, concurrence_mixed, concurrence_pure
from .states import TripartiteState, as_rng, partial_trace, random_unitary

PRUNE_TOL = 1e-14
COMPLETENESS_TOL = 1e-10
PARTIES = ("A", "B", "S")


@dataclass(frozen=True)
class KrausSet:
    """Measurement on one party; operators map that party's space to its output space."""

    operators: tuple
    party: str

    def __post_init__(self):
        if self.party not in PARTIES:
            raise ValueError(f"party must be one of {PARTIES}, got {self.party!r}")
        ops = tuple(np.array(k, dtype=complex) for k in self.operators)
        if not ops:
            raise ValueError("a KrausSet needs at least one operator")
        din = ops[0].shape[1]
        if any(k.ndim != 2 or k.shape[1] != din for k in ops):
            raise DimMismatch("Kraus operators must share an input dimension")
        if self.party != "S" and any(k.shape != (2, 2) for k in ops):
            raise DimMismatch("Alice and Bob act with 2x2 operators")
        dev = self.completeness_error(ops)
        if dev > COMPLETENESS_TOL:
            raise NotUnitary(f"sum K^dagger K deviates from identity by {dev:.3e}")
        object.__setattr__(self, "operators", ops)

    @staticmethod
    def completeness_error(ops) -> float:
        total = sum(k.conj().T @ k for k in ops)
        return float(np.max(np.abs(total - np.eye(total.shape[0]))))

    @property
    def input_dim(self) -> int:
        return self.operators[0].shape[1]

    def __len__(self):
        return len(self.operators)


class ProtocolOutcome(NamedTuple):
    labels: tuple
    probability: float
    state: TripartiteState


@dataclass
class ProtocolNode:
    kraus: KrausSet
    children: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "party": self.kraus.party,
            "operators": [_matrix_to_json(k) for k in self.kraus.operators],
            "children": {key: child.to_json() for key, child in self.children.items()},
        }

    @classmethod
    def from_json(cls, obj: dict) -> "ProtocolNode":
        ops = [_matrix_from_json(m) for m in obj["operators"]]
        kids = {str(key): cls.from_json(val) for key, val in obj.get("children", {}).items()}
        return cls(KrausSet(tuple(ops), obj["party"]), kids)

    def dumps(self) -> str:
        return json.dumps(self.to_json())


def _matrix_to_json(m: np.ndarray) -> list:
    return [[[z.real, z.imag] for z in row] for row in np.asarray(m, dtype=complex)]


def _matrix_from_json(rows) -> np.ndarray:
    arr = np.asarray(rows, dtype=float)
    if arr.ndim != 3 or arr.shape[2] != 2:
        raise DimMismatch("operators must be matrices of [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def apply_operator(state: TripartiteState, op: np.ndarray, party: str) -> np.ndarray:
    """Unnormalised amplitudes (shape ``(n', 2, 2)``) after ``op`` acts on ``party``."""
    amps = state.amplitudes
    if party == "A":
        return np.einsum("ab,lbj->laj", op, amps)
    if party == "B":
        return np.einsum("ab,lib->lia", op, amps)
    return np.einsum("ml,lij->mij", op, amps)


def apply_round(state: TripartiteState, kraus: KrausSet,
                prune: float = PRUNE_TOL) -> list[ProtocolOutcome]:
    """Branch ``state`` over the outcomes of one measurement.

    Branch probabilities are squared norms; branches below ``prune`` are dropped.
    """
    expected = 2 if kraus.party != "S" else state.n
    if kraus.input_dim != expected:
        raise DimMismatch(f"{kraus.party} operators act on dimension {kraus.input_dim}, state has {expected}")
    out = []
    for idx, op in enumerate(kraus.operators):
        amps = apply_operator(state, op, kraus.party)
        prob = float(np.real(np.vdot(amps, amps)))
        if prob < prune:
            continue
        out.append(ProtocolOutcome((str(idx),), prob, TripartiteState(amps / np.sqrt(prob))))
    return out


def run_protocol(psi: TripartiteState, tree: ProtocolNode | None,
                 prune: float = PRUNE_TOL) -> list[ProtocolOutcome]:
    """Execute a protocol tree and return every leaf with its joint probability."""
    if tree is None:
        return [ProtocolOutcome((), 1.0, psi)]
    leaves = []
    stack = [((), 1.0, psi, tree)]
    while stack:
        labels, prob, state, node = stack.pop()
        for outcome in apply_round(state, node.kraus, prune):
            lab = labels + outcome.labels
            p = prob * outcome.probability
            child = node.children.get(outcome.labels[0])
            if child is None:
                leaves.append(ProtocolOutcome(lab, p, outcome.state))
            elif p >= prune:
                stack.append((lab, p, outcome.state, child))
    leaves.sort(key=lambda o: o.labels)
    return leaves


def average_concurrence(outcomes: Iterable[ProtocolOutcome]) -> float:
    return float(sum(o.probability * concurrence_mixed(partial_trace(o.state, "AB")) for o in outcomes))


def det_identity_residual(a: np.ndarray, b: np.ndarray, phi: np.ndarray) -> float:
    """``|C(A (x) B phi) - |det A| |det B| C(phi)|`` with ``C = 2|det|`` on unnormalised vectors."""
    phi = np.asarray(phi, dtype=complex).reshape(2, 2)
    vec = np.kron(a, b) @ phi.reshape(-1)
    lhs = 2.0 * abs(np.linalg.det(vec.reshape(2, 2)))
    rhs = abs(np.linalg.det(a)) * abs(np.linalg.det(b)) * concurrence_pure(phi)
    return float(abs(lhs - rhs))


def random_kraus(dim: int, count: int, seed=None, party: str = "S") -> KrausSet:
    """Complete Kraus set cut from the first ``dim`` columns of a Haar unitary on ``dim * count``."""
    u = random_unitary(dim * count, seed)
    iso = u[:, :dim]
    ops = tuple(iso[k * dim:(k + 1) * dim, :] for k in range(count))
    return KrausSet(ops, party)


def random_protocol(n: int, seed=None, order: Sequence[str] = ("S", "A", "B", "S"),
                    max_outcomes: int = 3) -> ProtocolNode:
    """Random conditional protocol: every branch gets fresh random Kraus sets in ``order``."""
    rng = as_rng(seed)

    def build(depth: int) -> ProtocolNode | None:
        if depth == len(order):
            return None
        party = order[depth]
        count = int(rng.integers(1, max_outcomes + 1))
        dim = n if party == "S" else 2
        kraus = random_kraus(dim, count, rng, party)
        kids = {}
        for k in range(count):
            child = build(depth + 1)
            if child is not None:
                kids[str(k)] = child
        return ProtocolNode(kraus, kids)

    return build(0)


def identity_protocol(n: int, order: Sequence[str] = ("S", "A", "B", "S")) -> ProtocolNode:
    node = None
    for party in reversed(order):
        dim = n if party == "S" else 2
        node = ProtocolNode(KrausSet((np.eye(dim),), party), {"0": node} if node else {})
    return node


def qubit_kraus_sets(tree: ProtocolNode) -> list[KrausSet]:
    found, stack = [], [tree]
    while stack:
        node = stack.pop()
        if node.kraus.party in ("A", "B"):
            found.append(node.kraus)
        stack.extend(node.children.values())
    return found


def det_sum(kraus: KrausSet) -> float:
    """``sum_k |det K_k|``; at most one for complete qubit sets."""
    return float(sum(abs(np.linalg.det(k)) for k in kraus.operators))


class TrialResult(NamedTuple):
    avg_c: float
    coa: float
    ok: bool
    total_probability: float
    max_det_sum: float


def monotonicity_trial(psi: TripartiteState, seed=None, tol: float = 1e-8,
                       tree: ProtocolNode | None = None) -> TrialResult:
    """Run one (random, unless given) S-A-B-S protocol and compare ``<C_AB>`` with the CoA of ``psi``."""
    if tree is None:
        tree = random_protocol(psi.n, seed)
    outcomes = run_protocol(psi, tree)
    avg = average_concurrence(outcomes)
    ca = coa_value(psi)
    dets = [det_sum(k) for k in qubit_kraus_sets(tree)]
    total = float(sum(o.probability for o in outcomes))
    return TrialResult(avg, ca, avg <= ca + tol, total, max(dets, default=0.0))
