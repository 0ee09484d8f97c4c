"""Command-line front end: ``coalab <command> [options]``.

Exit codes: 0 success or affirmative verdict, 1 well-formed negative verdict,
2 input error, 3 internal invariant violation.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import monogamy, states, transforms
from .errors import CoalabError, ConvergenceError
from .locc import ProtocolNode, monotonicity_trial, random_protocol, run_protocol
from .measures import RANK_TOL, coa_value, concurrence_mixed, linear_entropy_concurrence_sq, tangle3
from .parallel import map_jobs

EXIT_OK, EXIT_NEGATIVE, EXIT_INPUT, EXIT_INVARIANT = 0, 1, 2, 3

DEFAULT_TOLERANCES = {
    "rank": RANK_TOL,
    "feasibility": transforms.FEASIBILITY_TOL,
    "schmidt_match": transforms.SCHMIDT_MATCH_TOL,
    "bound": 1e-9,
    "monotone": 1e-8,
    "violation": monogamy.VIOLATION_TOL,
    "probability": 1e-9,
}


class InputError(CoalabError):
    pass


class InvariantError(Exception):
    pass


# -- parsing helpers ---------------------------------------------------------

def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise InputError(f"cannot parse numbers from {text!r}") from None


def parse_state(spec: str, seed: int | None = None) -> states.TripartiteState:
    """Named state (``ghz:a``, ``w:a,b,c``, ``wclass:a1,...``, ``bell``, ``swap``, ``random:n``) or a JSON file."""
    name, _, args = spec.partition(":")
    if name == "ghz":
        vals = _floats(args) if args else [0.5]
        return states.ghz(*vals[:2])
    if name == "w":
        vals = _floats(args) if args else [1 / 3, 1 / 3]
        if len(vals) == 3:
            total = sum(vals)
            vals = [v / total for v in vals]
        return states.w_state(*vals)
    if name == "wclass":
        vec = monogamy.wclass_state(np.sqrt(np.asarray(_floats(args))))
        n = int(round(np.log2(vec.size)))
        return states.qubits_to_tripartite(vec, sapna=list(range(2, n)))
    if name == "bell":
        return states.with_sapna(states.bell(args or "phi+"), 1)
    if name == "swap":
        return states.entanglement_swap_state()
    if name == "random":
        if seed is None:
            raise InputError("random states need --seed")
        return states.random_tripartite(int(args or 2), seed)
    return states.state_from_json(_load(spec))


def parse_target(spec: str) -> np.ndarray:
    """``bell``, ``product``, ``schmidt:p0`` or a bipartite JSON file."""
    name, _, args = spec.partition(":")
    if name == "bell":
        return states.bell(args or "phi+").reshape(2, 2)
    if name == "product":
        return states.schmidt_state(1.0).reshape(2, 2)
    if name == "schmidt":
        return states.schmidt_state(_floats(args)[0]).reshape(2, 2)
    return states.bipartite_from_json(_load(spec))


def _load(path: str) -> dict:
    try:
        return states.load_json(path)
    except FileNotFoundError:
        raise InputError(f"no such file or named state: {path!r}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON in {path}: {exc}") from None


def parse_tolerances(items: list[str] | None) -> dict:
    tol = dict(DEFAULT_TOLERANCES)
    for item in items or []:
        key, sep, val = item.partition("=")
        if not sep or key not in tol:
            raise InputError(f"unknown tolerance {item!r}; keys: {', '.join(sorted(tol))}")
        try:
            tol[key] = float(val)
        except ValueError:
            raise InputError(f"bad tolerance value in {item!r}") from None
    return tol


def _need_seed(args) -> int:
    if args.seed is None:
        raise InputError(f"{args.command} is stochastic and needs --seed")
    return args.seed


# -- commands ----------------------------------------------------------------

def cmd_analyze(args, tol):
    psi = parse_state(args.state, args.seed)
    rank = tol["rank"]
    ca = coa_value(psi, rank)
    c_ab = concurrence_mixed(states.partial_trace(psi, "AB"), rank)
    cuts = {x: np.clip(np.linalg.eigvalsh(states.partial_trace(psi, x))[::-1], 0, None).tolist() for x in "ABS"}
    c_a = np.sqrt(linear_entropy_concurrence_sq(states.partial_trace(psi, "A")))
    c_b = np.sqrt(linear_entropy_concurrence_sq(states.partial_trace(psi, "B")))
    report = {
        "dims": [2, 2, psi.n],
        "coa": {"S": ca},
        "concurrence_ab": c_ab,
        "schmidt": cuts,
        "bound": {"C_A(BS)": float(c_a), "C_B(AS)": float(c_b),
                  "holds": bool(c_ab <= ca + tol["bound"] and ca <= min(c_a, c_b) + tol["bound"])},
    }
    if psi.n == 2:
        vec = psi.to_vector()
        report["coa"].update({"A": coa_value(states.qubits_to_tripartite(vec, sapna=0), rank),
                              "B": coa_value(states.qubits_to_tripartite(vec, sapna=1), rank)})
        t = tangle3(vec, "A")
        report["tangle"] = {"tau_ckw": t.tau_ckw, "tau_dual": t.tau_dual}
    if not report["bound"]["holds"]:
        raise InvariantError("concurrence bounds violated", report)
    return report, EXIT_OK


def cmd_feasible(args, tol):
    psi = parse_state(args.state, args.seed)
    phi = parse_target(args.target or "bell")
    verdict = transforms.deterministic_feasible(psi, phi, tol["feasibility"])
    report = verdict.to_json()
    if verdict.protocol is not None:
        outs = run_protocol(psi, verdict.protocol)
        total = sum(o.probability for o in outs)
        reached = all(transforms.reaches_target(o.state, phi, tol["schmidt_match"]) for o in outs)
        report["replay"] = {"total_probability": total, "all_branches_reach_target": reached}
        if not reached or abs(total - 1) > tol["probability"]:
            raise InvariantError("emitted protocol does not reach the target", report)
        if args.emit_protocol:
            with open(args.emit_protocol, "w") as fh:
                json.dump(verdict.protocol.to_json(), fh)
            report["protocol_file"] = args.emit_protocol
    report["verdict"] = "feasible" if verdict.feasible else "infeasible"
    return report, EXIT_OK if verdict.feasible else EXIT_NEGATIVE


def cmd_distill(args, tol):
    seed = _need_seed(args)
    psi = parse_state(args.state, seed)
    if args.target:
        bounds = transforms.distill_probability_general(psi, parse_target(args.target), args.samples, seed)
        report = bounds.to_json()
        if report["lower_bound"] > report["upper_bound"] + tol["bound"]:
            raise InvariantError("lower bound exceeds upper bound", report)
        return report, EXIT_OK
    res = transforms.max_distill_probability(psi, args.samples, seed)
    report = res.to_json()
    if args.emit_protocol and res.protocol is not None:
        with open(args.emit_protocol, "w") as fh:
            json.dump(res.protocol.to_json(), fh)
        report["protocol_file"] = args.emit_protocol
    if res.lower_bound > res.upper_bound + tol["bound"]:
        raise InvariantError("lower bound exceeds upper bound", report)
    return report, EXIT_OK


def cmd_monogamy(args, tol):
    seed = _need_seed(args)
    summary = monogamy.scan(args.n, args.samples, seed, violation_tol=tol["violation"])
    report = summary.to_json()
    failed = summary.ckw_violations > 0 or (args.n == 3 and summary.dual_violations > 0)
    if args.format == "csv":
        report = (report, summary.to_csv())
    if failed:
        raise InvariantError("monogamy inequality violated beyond tolerance", report)
    return report, EXIT_OK


def cmd_monotone_test(args, tol):
    seed = _need_seed(args)
    seqs = np.random.SeedSequence(seed).spawn(args.samples)

    def trial(seq):
        state_seed, proto_seed = seq.spawn(2)
        psi = states.random_tripartite(args.dims, np.random.default_rng(state_seed))
        tree = random_protocol(args.dims, np.random.default_rng(proto_seed))
        return monotonicity_trial(psi, tree=tree, tol=tol["monotone"])

    results = map_jobs(trial, seqs)
    failures = [i for i, r in enumerate(results) if not r.ok]
    report = {
        "trials": args.samples,
        "dims": [2, 2, args.dims],
        "failures": len(failures),
        "max_excess": max(r.avg_c - r.coa for r in results),
        "max_det_sum": max(r.max_det_sum for r in results),
        "max_probability_error": max(abs(r.total_probability - 1) for r in results),
    }
    if failures:
        report["failed_trials"] = failures[:20]
        raise InvariantError("average concurrence exceeded the CoA", report)
    return report, EXIT_OK


def cmd_replay(args, tol):
    psi = parse_state(args.state, args.seed)
    try:
        tree = ProtocolNode.from_json(_load(args.protocol))
    except (KeyError, TypeError, AttributeError) as exc:
        raise InputError(f"malformed protocol: {exc}") from None
    outs = run_protocol(psi, tree)
    target = parse_target(args.target) if args.target else None
    leaves = []
    for o in outs:
        leaf = {"labels": list(o.labels), "probability": o.probability,
                "state": states.state_to_json(o.state)}
        if target is not None:
            leaf["reached_target"] = transforms.reaches_target(o.state, target, tol["schmidt_match"])
        leaves.append(leaf)
    total = float(sum(o.probability for o in outs))
    report = {"outcomes": leaves, "total_probability": total}
    if target is not None:
        report["all_branches_reach_target"] = all(leaf["reached_target"] for leaf in leaves)
    if abs(total - 1) > tol["probability"]:
        raise InvariantError("outcome probabilities do not sum to one", report)
    return report, EXIT_OK


COMMANDS = {
    "analyze": cmd_analyze,
    "feasible": cmd_feasible,
    "distill": cmd_distill,
    "monogamy": cmd_monogamy,
    "monotone-test": cmd_monotone_test,
    "replay": cmd_replay,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, help="seed for every random draw (required by stochastic commands)")
    common.add_argument("--samples", type=int, default=2000)
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--tolerance", action="append", metavar="KEY=VAL",
                        help=f"override a threshold ({', '.join(DEFAULT_TOLERANCES)})")

    parser = argparse.ArgumentParser(prog="coalab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", parents=[common], help="CoA, concurrence, Schmidt cuts, tangle")
    p.add_argument("--state", required=True)
    p = sub.add_parser("feasible", parents=[common], help="deterministic distillation to a target")
    p.add_argument("--state", required=True)
    p.add_argument("--target", default="bell")
    p.add_argument("--emit-protocol", metavar="PATH")
    p = sub.add_parser("distill", parents=[common], help="maximum distillation probability")
    p.add_argument("--state", required=True)
    p.add_argument("--target")
    p.add_argument("--emit-protocol", metavar="PATH")
    p = sub.add_parser("monogamy", parents=[common], help="random-state monogamy scan")
    p.add_argument("--n", type=int, default=3)
    p = sub.add_parser("monotone-test", parents=[common], help="random LOCC protocols against the CoA")
    p.add_argument("--dims", type=int, default=2, help="Sapna's dimension n")
    p = sub.add_parser("replay", parents=[common], help="run a protocol JSON on a state")
    p.add_argument("--state", required=True)
    p.add_argument("--protocol", required=True)
    p.add_argument("--target")
    return parser


def _write(report, args, tol) -> None:
    if isinstance(report, tuple):  # (summary, csv text)
        summary, text = report
        summary["tolerances"] = tol
        if args.out:
            with open(args.out, "w") as fh:
                fh.write(text)
            print(json.dumps(summary, indent=2))
        else:
            sys.stdout.write(text)
            print(json.dumps(summary), file=sys.stderr)
        return
    report["tolerances"] = tol
    text = json.dumps(report, indent=2)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        tol = parse_tolerances(args.tolerance)
        if args.format == "csv" and args.command != "monogamy":
            raise InputError("--format csv is only available for monogamy")
        report, code = COMMANDS[args.command](args, tol)
    except InvariantError as exc:
        msg, report = exc.args
        print(f"coalab: invariant violated: {msg}", file=sys.stderr)
        _write(report, args, parse_tolerances(args.tolerance))
        return EXIT_INVARIANT
    except ConvergenceError as exc:
        print(f"coalab: numerical failure: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except (CoalabError, ValueError, OSError) as exc:
        print(f"coalab: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    _write(report, args, tol)
    return code


if __name__ == "__main__":
    sys.exit(main())
