"""Command-line front end.

Exit codes: 0 property holds, 1 fails, 2 input error, 3 guard or budget
exceeded (inconclusive), 4 internal verification failure.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import time
from dataclasses import dataclass, field
from typing import Any

from . import birkhoff, expost, pareto, robust, sdeff
from .core import (
    DEFAULT_MAX_AGENTS,
    Decomposition,
    GuardExceeded,
    InstanceError,
    PreferenceProfile,
    RandomAssignment,
    format_rational,
    parse_instance,
    serialize_instance,
    uniform_matrix,
)
from .generate import random_bistochastic, random_profile
from .sat_reduction import build_reduction, parse_cnf

EXIT_HOLDS, EXIT_FAILS, EXIT_INPUT, EXIT_INCONCLUSIVE, EXIT_INTERNAL = 0, 1, 2, 3, 4

_EXIT_FOR = {"holds": EXIT_HOLDS, "fails": EXIT_FAILS, "inconclusive": EXIT_INCONCLUSIVE}


class InternalError(RuntimeError):
    pass


@dataclass
class Verdict:
    property: str
    result: str  # holds | fails | inconclusive
    witness: str | None = None
    detail: list[str] = field(default_factory=list)
    stats: dict[str, Any] = field(default_factory=dict)
    payload: dict[str, Any] = field(default_factory=dict)

    def to_json(self) -> dict[str, Any]:
        out = {"property": self.property, "result": self.result, "witness": self.witness,
               "detail": self.detail, "stats": self.stats}
        out.update(self.payload)
        return out

    def human(self) -> str:
        lines = [f"{self.property}: {self.result}"]
        if self.witness:
            lines.append(f"witness: {self.witness}")
        lines += self.detail
        return "\n".join(lines)


def _decomposition_json(dec: Decomposition, profile: PreferenceProfile) -> list[dict[str, Any]]:
    return [{"coefficient": format_rational(c),
             "assignment": {profile.agent_label(i): profile.object_names[o] for i, o in enumerate(d.objects)}}
            for c, d in dec]


def _verified(dec: Decomposition, p: RandomAssignment, profile: PreferenceProfile, pareto_terms: bool) -> Decomposition:
    if not dec.is_valid_for(p):
        raise InternalError("decomposition failed exact reconstruction")
    if pareto_terms and any(not pareto.is_pareto_optimal(profile, d) for _, d in dec):
        raise InternalError("decomposition contains a Pareto dominated term")
    return dec


def _load(path: str, args) -> tuple[PreferenceProfile, RandomAssignment | None]:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    return parse_instance(text, max_agents=args.max_agents)


def _require_assignment(p, path):
    if p is None:
        raise InstanceError(f"{path}: no 'assignment:' block")
    return p


def _ex_post(profile, p, args) -> expost.HullMembershipResult:
    try:
        return expost.is_ex_post_efficient(profile, p, guard=args.guard)
    except GuardExceeded:
        return expost.pruned_ex_post_search(profile, p, budget_s=args.budget_ms / 1000)


def check_pareto(profile, p, args) -> Verdict:
    if not p.is_deterministic():
        raise InstanceError("pareto check needs a 0/1 assignment matrix")
    d = p.to_deterministic()
    cycle = pareto.find_trading_cycle(profile, d)
    if cycle is None:
        return Verdict("pareto", "holds")
    return Verdict("pareto", "fails", cycle.render(profile),
                   payload={"cycle": [[profile.agent_label(a), profile.object_names[o]] for a, o in cycle.entries]})


def check_sd(profile, p, args) -> Verdict:
    cycle = sdeff.find_consistent_cycle(profile, p)
    if cycle is None:
        return Verdict("sd", "holds")
    return Verdict("sd", "fails", cycle.render(profile), stats={"cycle_length": len(cycle.entries)})


def check_robust(profile, p, args) -> Verdict:
    algorithm = args.algorithm
    k = robust.compute_agent_types(profile).k
    if algorithm == "auto":
        algorithm = "types" if k <= robust.DEFAULT_TYPE_THRESHOLD else "exhaustive"
    stats: dict[str, Any] = {"algorithm": algorithm, "agent_types": k}
    if algorithm == "types":
        stats["candidate_bound"] = robust.types_cost_estimate(profile)
        ok, cycle = robust.is_robust_by_types(profile, p)
        if ok:
            return Verdict("robust", "holds", stats=stats)
        return Verdict("robust", "fails", cycle.render(profile), stats=stats)
    try:
        ok, d = robust.is_robust_ex_post_efficient(profile, p, guard=args.guard)
    except GuardExceeded as exc:
        return Verdict("robust", "inconclusive", detail=[str(exc)], stats=stats)
    if ok:
        return Verdict("robust", "holds", stats=stats)
    if not robust.verify_non_robust_witness(profile, p, d):
        raise InternalError("robustness witness failed verification")
    cycle = pareto.find_trading_cycle(profile, d)
    return Verdict("robust", "fails", d.render(profile), detail=[f"trading cycle: {cycle.render(profile)}"],
                   stats=stats)


def _hull_verdict(name: str, profile, p, res: expost.HullMembershipResult) -> Verdict:
    stats = {"consistent_enumerated": res.generators_enumerated, "po_generators": res.po_generators}
    if res.is_member:
        dec = _verified(res.decomposition, p, profile, pareto_terms=True)
        return Verdict(name, "holds", detail=dec.render(profile), stats=stats,
                       payload={"decomposition": _decomposition_json(dec, profile)})
    result = "inconclusive" if res.verdict is expost.Membership.INCONCLUSIVE else "fails"
    stats["diagnostic"] = res.diagnostic.value
    return Verdict(name, result, detail=[res.describe()], stats=stats)


def check_expost(profile, p, args) -> Verdict:
    return _hull_verdict("expost", profile, p, _ex_post(profile, p, args))


CHECKS = {"pareto": check_pareto, "sd": check_sd, "robust": check_robust, "expost": check_expost}


def cmd_check(args) -> Verdict:
    profile, p = _load(args.file, args)
    return CHECKS[args.property](profile, _require_assignment(p, args.file), args)


def cmd_decompose(args) -> Verdict:
    profile, p = _load(args.file, args)
    p = _require_assignment(p, args.file)
    if args.pareto:
        return _hull_verdict("decompose", profile, p, _ex_post(profile, p, args))
    dec = _verified(birkhoff.birkhoff_decompose(p), p, profile, pareto_terms=False)
    return Verdict("decompose", "holds", detail=dec.render(profile), stats={"terms": len(dec)},
                   payload={"decomposition": _decomposition_json(dec, profile)})


def cmd_gen(args) -> str:
    if args.kind == "rsd":
        profile, _ = _load(args.prefs, args)
        return serialize_instance(profile, pareto.rsd_assignment(profile))
    if args.kind == "uniform":
        profile, _ = _load(args.prefs, args)
        if args.n is not None and args.n != profile.n:
            raise InstanceError(f"--n {args.n} does not match the {profile.n}-agent preference file")
        return serialize_instance(profile, uniform_matrix(profile.n))
    if args.kind == "sat":
        with open(args.cnf, encoding="utf-8") as fh:
            reduced = build_reduction(parse_cnf(fh.read()))
        return serialize_instance(reduced.profile, reduced.p)
    if args.n is None or args.seed is None:
        raise InstanceError("gen random needs --n and --seed")
    if args.n < 1:
        raise InstanceError("--n must be positive")
    rng = random.Random(args.seed)
    profile = random_profile(args.n, rng)
    return serialize_instance(profile, random_bistochastic(args.n, rng))


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--budget-ms", type=int, default=60000, help="time budget for pruned searches")
    common.add_argument("--guard", type=int, default=expost.DEFAULT_ENUMERATION_GUARD,
                        help="maximum consistent assignments to enumerate")
    common.add_argument("--max-agents", type=int, default=DEFAULT_MAX_AGENTS)
    common.add_argument("--timings", action="store_true", help="include wall-clock time in stats")

    parser = argparse.ArgumentParser(prog="randassign", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    check = sub.add_parser("check", help="test an efficiency property")
    check_sub = check.add_subparsers(dest="property", required=True)
    for name in CHECKS:
        cp = check_sub.add_parser(name, parents=[common])
        cp.add_argument("file")
        if name == "robust":
            cp.add_argument("--algorithm", choices=["exhaustive", "types", "auto"], default="auto")

    dp = sub.add_parser("decompose", parents=[common], help="decompose into permutation matrices")
    dp.add_argument("file")
    dp.add_argument("--pareto", action="store_true", help="only Pareto optimal terms")

    gen = sub.add_parser("gen", help="write an instance file to stdout")
    gen_sub = gen.add_subparsers(dest="kind", required=True)
    for kind in ("rsd", "uniform"):
        g = gen_sub.add_parser(kind, parents=[common])
        g.add_argument("--prefs", required=True)
        if kind == "uniform":
            g.add_argument("--n", type=int)
    g = gen_sub.add_parser("sat", parents=[common])
    g.add_argument("--cnf", required=True)
    g = gen_sub.add_parser("random", parents=[common])
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--seed", type=int, required=True)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_HOLDS
    out = sys.stdout
    try:
        if args.command == "gen":
            out.write(cmd_gen(args))
            return EXIT_HOLDS
        start = time.perf_counter()
        verdict = cmd_check(args) if args.command == "check" else cmd_decompose(args)
        if args.timings:
            verdict.stats["elapsed_ms"] = round((time.perf_counter() - start) * 1000, 1)
    except (InstanceError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except GuardExceeded as exc:
        print(f"inconclusive: {exc}", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    except (InternalError, AssertionError) as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    if args.json:
        out.write(json.dumps(verdict.to_json(), indent=2, ensure_ascii=False) + "\n")
    else:
        out.write(verdict.human() + "\n")
    return _EXIT_FOR[verdict.result]


if __name__ == "__main__":
    sys.exit(main())
