"""Monogamy of concurrence for n-qubit pure states.

For a pivot qubit ``p`` of a pure state, with ``C^2_p(rest) = 2 (1 - Tr rho_p^2)``:

* CKW slack:  ``C^2_p(rest) - sum_j C^2(rho_pj)``  (proven nonnegative)
* dual slack: ``sum_j C_a^2(rho_pj) - C^2_p(rest)`` (nonnegative for three
  qubits; only conjectured beyond that, so scans report it as evidence)
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .errors import BadDims, NotNormalized, TooManyQubits
from .measures import RANK_TOL, coa_value, concurrence_mixed, linear_entropy_concurrence_sq
from .parallel import map_jobs
from .states import partial_trace, random_qubits

MAX_QUBITS = 6
VIOLATION_TOL = -1e-8
TIGHT_RANK_TOL = 1e-14
CSV_COLUMNS = ("seed", "index", "n", "ckw_slack", "dual_slack", "tau_residual")


def _qubit_vector(psi) -> tuple[np.ndarray, int]:
    vec = np.asarray(psi, dtype=complex).reshape(-1)
    n = int(round(np.log2(vec.size))) if vec.size else 0
    if vec.size < 4 or 2**n != vec.size:
        raise BadDims(f"need an n-qubit vector with n >= 2, got {vec.size} amplitudes")
    if n > MAX_QUBITS:
        raise TooManyQubits(f"n = {n} exceeds the dense limit of {MAX_QUBITS}")
    return vec, n


def _pair_terms(vec, n, pivot, fn):
    return [fn(partial_trace(vec, [pivot, j])) for j in range(n) if j != pivot]


def ckw_slack(psi, pivot: int = 0, rank_tol: float = RANK_TOL) -> float:
    vec, n = _qubit_vector(psi)
    whole = linear_entropy_concurrence_sq(partial_trace(vec, [pivot]))
    pairs = _pair_terms(vec, n, pivot, lambda r: concurrence_mixed(r, rank_tol) ** 2)
    return float(whole - sum(pairs))


def dual_slack(psi, pivot: int = 0, rank_tol: float = RANK_TOL) -> float:
    vec, n = _qubit_vector(psi)
    whole = linear_entropy_concurrence_sq(partial_trace(vec, [pivot]))
    pairs = _pair_terms(vec, n, pivot, lambda r: coa_value(r, rank_tol) ** 2)
    return float(sum(pairs) - whole)


def wclass_state(alpha, tol: float = 1e-9) -> np.ndarray:
    """``sum_i alpha_i |0..1_i..0>`` with qubit 0 the most significant."""
    alpha = np.asarray(alpha, dtype=complex).reshape(-1)
    n = alpha.size
    if n < 2:
        raise BadDims("need at least two qubits")
    if n > MAX_QUBITS:
        raise TooManyQubits(f"n = {n} exceeds the dense limit of {MAX_QUBITS}")
    if abs(np.sum(np.abs(alpha) ** 2) - 1) > tol:
        raise NotNormalized("sum |alpha_i|^2 must be 1")
    vec = np.zeros(2**n, dtype=complex)
    for i, a in enumerate(alpha):
        vec[1 << (n - 1 - i)] = a
    return vec


@dataclass
class MonogamySample:
    n: int
    ckw_slack: float
    dual_slack: float
    tau_residual: float | None = None


def evaluate(psi, pivot: int = 0, violation_tol: float = VIOLATION_TOL) -> MonogamySample:
    """Both slacks; re-checked with a tighter rank cut when either looks violated."""
    vec, n = _qubit_vector(psi)
    ckw = ckw_slack(vec, pivot)
    dual = dual_slack(vec, pivot)
    if ckw < violation_tol:
        ckw = ckw_slack(vec, pivot, TIGHT_RANK_TOL)
    if dual < violation_tol:
        dual = dual_slack(vec, pivot, TIGHT_RANK_TOL)
    resid = abs(ckw - dual) if n == 3 else None
    return MonogamySample(n, ckw, dual, resid)


@dataclass
class ScanSummary:
    n: int
    samples: int
    seed: int
    ckw_min: float
    ckw_mean: float
    dual_min: float
    dual_mean: float
    ckw_violations: int
    dual_violations: int
    worst_index: int
    worst_state: list
    violation_tol: float = VIOLATION_TOL
    rows: list = field(default_factory=list, repr=False)

    def to_json(self) -> dict:
        out = {k: getattr(self, k) for k in (
            "n", "samples", "seed", "ckw_min", "ckw_mean", "dual_min", "dual_mean",
            "ckw_violations", "dual_violations", "worst_index", "worst_state")}
        out["violation_tolerance"] = self.violation_tol
        out["dual_status"] = "proven" if self.n == 3 else "conjecture (evidence only)"
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for idx, s in enumerate(self.rows):
            resid = "" if s.tau_residual is None else f"{s.tau_residual:.17g}"
            writer.writerow([self.seed, idx, s.n, f"{s.ckw_slack:.17g}", f"{s.dual_slack:.17g}", resid])
        return buf.getvalue()


def scan(n: int, samples: int, seed: int, batch: int = 500,
         violation_tol: float = VIOLATION_TOL) -> ScanSummary:
    """Haar-random n-qubit states, one spawned seed per sample."""
    if n > MAX_QUBITS:
        raise TooManyQubits(f"n = {n} exceeds the dense limit of {MAX_QUBITS}")
    if n < 3:
        raise BadDims("monogamy scans need n >= 3")
    if samples < 1:
        raise ValueError("samples must be positive")
    seqs = np.random.SeedSequence(seed).spawn(samples)
    chunks = [seqs[k:k + batch] for k in range(0, samples, batch)]

    def run(chunk):
        return [evaluate(random_qubits(n, np.random.default_rng(s)), 0, violation_tol) for s in chunk]

    rows = [r for part in map_jobs(run, chunks) for r in part]
    ckw = np.array([r.ckw_slack for r in rows])
    dual = np.array([r.dual_slack for r in rows])
    worst = int(np.argmin(np.minimum(ckw, dual)))
    worst_vec = random_qubits(n, np.random.default_rng(seqs[worst]))
    return ScanSummary(
        n, samples, seed,
        float(ckw.min()), float(ckw.mean()), float(dual.min()), float(dual.mean()),
        int(np.sum(ckw < violation_tol)), int(np.sum(dual < violation_tol)),
        worst, [[z.real, z.imag] for z in worst_vec], violation_tol, rows,
    )


def read_csv(text: str) -> list[dict]:
    """Parse scan CSV back into typed rows (empty ``tau_residual`` becomes None)."""
    out = []
    for rec in csv.DictReader(io.StringIO(text)):
        out.append({
            "seed": int(rec["seed"]), "index": int(rec["index"]), "n": int(rec["n"]),
            "ckw_slack": float(rec["ckw_slack"]), "dual_slack": float(rec["dual_slack"]),
            "tau_residual": float(rec["tau_residual"]) if rec["tau_residual"] else None,
        })
    return out
