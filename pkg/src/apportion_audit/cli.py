"""Command-line front end.

Subcommands::

    apportion INSTANCE   one sampled apportionment
    dist INSTANCE        full rounding and seat distributions
    audit OLD [NEW]      check one axiom on an instance pair
    verify [PATTERN]     run the named-scenario registry
    search               randomized counterexample search

Tables go to standard output tab-separated; ``--out`` writes a JSON report
and ``--plot`` renders figures next to it.  Exit codes: 0 success or
satisfied, 1 violation, 2 usage or input error, 3 numeric failure,
4 inconclusive.
"""

from __future__ import annotations

import argparse
import logging
import sys
import time
from pathlib import Path
from typing import List, Optional

import numpy as np

from .apportion import induce_apportionment, seat_vector
from .audit import AXIOMS, AuditVerdict, Outcome
from .core import (Arithmetic, InvalidInputError, compute_quotas, parse_mode, parse_subset)
from .instances import InstanceFile, load_instance
from .report import build_report, distribution_payload, seat_payload, write_report
from .rules import RULE_NAMES, RestartLimitError, Rule, SolverError, sampford_sample
from .scenarios import (SearchConfig, apportia_seed, match_scenarios, run_scenario,
                        search_counterexamples)
from .scenarios.search import SCHEMES, SEARCH_AXIOMS
from .serialize import format_scalar, to_jsonable

EXIT_OK, EXIT_VIOLATED, EXIT_USAGE, EXIT_NUMERIC, EXIT_INCONCLUSIVE = 0, 1, 2, 3, 4
OUTCOME_EXIT = {Outcome.SATISFIED: EXIT_OK, Outcome.VIOLATED: EXIT_VIOLATED,
                Outcome.INCONCLUSIVE: EXIT_INCONCLUSIVE}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


# ---------------------------------------------------------------------------
# argument helpers


def _order(text: Optional[str], instance: Optional[InstanceFile] = None):
    if text is None:
        return instance.order if instance is not None and instance.order else "numeric"
    if text in ("numeric", "random"):
        return text
    if text.startswith("explicit:"):
        return parse_subset_order(text.split(":", 1)[1])
    raise InvalidInputError(f"--order must be numeric, random or explicit:<perm>, got {text!r}")


def parse_subset_order(text: str):
    try:
        return tuple(int(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise InvalidInputError(f"bad permutation {text!r}") from None


def _make_rule(args, instance: Optional[InstanceFile] = None) -> Rule:
    opts = instance.options if instance is not None else {}
    kwargs = {"order": _order(args.order, instance)}
    if "precision_bits" in opts:
        kwargs["precision_bits"] = int(opts["precision_bits"])
    if "residual_target" in opts:
        kwargs["residual_target"] = float(opts["residual_target"])
    return Rule(args.rule, **kwargs)


def _mode(args) -> Arithmetic:
    return parse_mode(args.mode)


def _seed(args, instance: Optional[InstanceFile] = None) -> int:
    if args.seed is not None:
        return args.seed
    if instance is not None and "rng_seed" in instance.options:
        return int(instance.options["rng_seed"])
    return 0


def _emit(args, command: str, inputs: dict, results: dict, timings: dict) -> Optional[Path]:
    if not args.out:
        return None
    report = build_report(command, inputs, args.mode, results, timings)
    return write_report(report, args.out)


def _figure_path(args, suffix: str) -> Path:
    base = Path(args.out) if args.out else Path(f"apportion-audit-{args.command}.json")
    return base.with_name(f"{base.stem}-{suffix}.png")


def _cell(x) -> str:
    if isinstance(x, (list, tuple)):
        return ",".join(_cell(v) for v in x)
    return str(x)


def _print_rows(rows):
    for row in rows:
        print("\t".join(_cell(x) for x in row))


# ---------------------------------------------------------------------------
# subcommands


def cmd_apportion(args) -> int:
    instance = load_instance(args.instance, args.house_size)
    if instance.mode != "votes":
        raise InvalidInputError("apportion needs a votes-mode instance")
    start = time.perf_counter()
    votes = instance.vote_profile(_mode(args))
    rule = _make_rule(args, instance)
    seed = _seed(args, instance)
    breakdown = compute_quotas(votes)
    rng = np.random.default_rng(seed)
    if rule.name == "sampford" and "max_restarts" in instance.options:
        rounded = sampford_sample(breakdown.residues, rng, int(instance.options["max_restarts"]))
    else:
        rounded = rule.sample(breakdown.residues, rng)
    seats = seat_vector(breakdown, rounded)
    elapsed = time.perf_counter() - start
    print(",".join(map(str, seats)))
    _emit(args, "apportion", {"instance": instance.echo(), "rule": rule.label, "seed": seed},
          {"seats": list(seats), "rounded_up": list(rounded),
           "quotas": list(breakdown.quotas)}, {"apportion": elapsed})
    return EXIT_OK


def cmd_dist(args) -> int:
    instance = load_instance(args.instance, args.house_size)
    mode = _mode(args)
    rule = _make_rule(args, instance)
    start = time.perf_counter()
    results = {}
    seats = None
    if instance.mode == "votes":
        seats = induce_apportionment(rule, instance.vote_profile(mode))
        dist = seats.rounding
        results["seat_distribution"] = seat_payload(seats)
    else:
        dist = rule.distribution(instance.residue_profile(mode))
    results["distribution"] = distribution_payload(dist)
    rows = [("subset", "probability")]
    rows += [("{" + ",".join(map(str, s)) + "}", format_scalar(m)) for s, m in dist]
    if args.coalition:
        if seats is None:
            raise InvalidInputError("--coalition needs a votes-mode instance")
        T = parse_subset(args.coalition, instance.n)
        tail = seats.tail(T)
        results["coalition"] = {"T": T, "pmf": seats.coalition_pmf(T), "tail": tail}
        if args.threshold is not None:
            if not 0 <= args.threshold <= seats.h + 1:
                raise InvalidInputError(f"threshold must lie in 0..{seats.h + 1}")
            results["coalition"]["threshold"] = args.threshold
            results["coalition"]["probability"] = tail[args.threshold]
            rows.append((f"P[seats{{{args.coalition}}}>={args.threshold}]",
                         format_scalar(tail[args.threshold])))
    elapsed = time.perf_counter() - start
    _print_rows(rows)
    _emit(args, "dist", {"instance": instance.echo(), "rule": rule.label}, results,
          {"dist": elapsed})
    if args.plot:
        from .plotting import plot_coalition_seats, plot_subset_distribution
        plot_subset_distribution(dist, _figure_path(args, "subsets"), title=rule.label)
        if args.coalition and seats is not None:
            plot_coalition_seats(seats, parse_subset(args.coalition), _figure_path(args, "coalition"))
    return EXIT_OK


def _run_axiom(args, rule: Rule, old: InstanceFile, new: Optional[InstanceFile]) -> AuditVerdict:
    axiom = args.axiom
    mode = _mode(args)
    if axiom == "full-support":
        return AXIOMS[axiom](rule, old.vote_profile(mode))
    if new is None:
        raise InvalidInputError(f"axiom {axiom!r} needs two instances")
    T = parse_subset(args.coalition, old.n) if args.coalition else None
    T2 = parse_subset(args.coalition2, old.n) if args.coalition2 else None
    if axiom in ("selection", "strengthened-selection", "threshold") and T is None:
        raise InvalidInputError(f"axiom {axiom!r} needs --coalition")
    if axiom in ("pairwise-selection", "pairwise-threshold") and (T is None or T2 is None):
        raise InvalidInputError(f"axiom {axiom!r} needs --coalition and --coalition2")
    if axiom in ("threshold", "pairwise-threshold", "vote-count"):
        v, v2 = old.vote_profile(mode), new.vote_profile(mode)
        if axiom == "threshold":
            return AXIOMS[axiom](rule, v, v2, T)
        return AXIOMS[axiom](rule, v, v2, T, T2)
    p, p2 = old.residue_profile(mode), new.residue_profile(mode)
    if axiom == "pairwise-selection":
        return AXIOMS[axiom](rule, p, p2, T, T2)
    return AXIOMS[axiom](rule, p, p2, T)


def cmd_audit(args) -> int:
    old = load_instance(args.old, args.house_size)
    new = load_instance(args.new, args.house_size) if args.new else None
    rule = _make_rule(args, old)
    start = time.perf_counter()
    result = _run_axiom(args, rule, old, new)
    elapsed = time.perf_counter() - start
    rows = [("axiom", result.axiom), ("rule", rule.label), ("outcome", result.outcome.value)]
    if result.reason:
        rows.append(("reason", result.reason))
    for key, value in to_jsonable(result.witness).items():
        rows.append((key, value))
    threshold_info = None
    if args.threshold is not None and "tails_old" in result.witness:
        theta = args.threshold
        tails_old, tails_new = result.witness["tails_old"], result.witness["tails_new"]
        if not 0 <= theta < len(tails_old):
            raise InvalidInputError(f"threshold must lie in 0..{len(tails_old) - 1}")
        threshold_info = {"threshold": theta, "old": tails_old[theta], "new": tails_new[theta]}
        rows.append((f"P[seats>={theta}]", f"{format_scalar(tails_old[theta])} -> "
                     f"{format_scalar(tails_new[theta])}"))
    _print_rows(rows)
    inputs = {"old": old.echo(), "new": new.echo() if new else None, "rule": rule.label,
              "axiom": args.axiom, "coalition": args.coalition, "coalition2": args.coalition2}
    results = {"verdict": result}
    if threshold_info:
        results["threshold"] = threshold_info
    _emit(args, "audit", inputs, results, {"audit": elapsed})
    if args.plot and "tails_old" in result.witness and new is not None:
        from .plotting import plot_tail_comparison
        mode = _mode(args)
        d_old = induce_apportionment(rule, old.vote_profile(mode))
        d_new = induce_apportionment(rule, new.vote_profile(mode))
        plot_tail_comparison(d_old, d_new, parse_subset(args.coalition), _figure_path(args, "tails"),
                             result.witness.get("violations"), title=f"{rule.label} {args.axiom}")
    return OUTCOME_EXIT[result.outcome]


def cmd_verify(args) -> int:
    scenarios = match_scenarios(args.pattern)
    if not scenarios:
        print(f"warning: no scenario matches {args.pattern!r}", file=sys.stderr)
    rows = [("scenario", "status", "seconds", "failed checks")]
    results = {}
    all_pass = True
    for sc in scenarios:
        res = run_scenario(sc.id)
        all_pass &= res.passed
        failed = ",".join(c.name for c in res.failures) or "-"
        rows.append((sc.id, "PASS" if res.passed else "FAIL", f"{res.seconds:.2f}", failed))
        results[sc.id] = {
            "passed": res.passed,
            "checks": [{"name": c.name, "passed": c.passed, "detail": c.detail} for c in res.checks],
            "verdicts": res.verdicts,
        }
    _print_rows(rows)
    _emit(args, "verify", {"pattern": args.pattern}, results, {})
    return EXIT_OK if all_pass else EXIT_VIOLATED


def cmd_search(args) -> int:
    if args.trials < 1:
        raise UsageError("--trials must be at least 1")
    seeds = ()
    sizes = parse_subset_order(args.coalition_size) if args.coalition_size else None
    if (args.seed_instances and args.axiom == "threshold" and args.n >= 6
            and (sizes is None or 3 in sizes)):
        seeds = (apportia_seed(),)
    min_n = min(args.min_n, args.n)
    cfg = SearchConfig(rule=Rule(args.rule, order=_order(args.order)), axiom=args.axiom,
                       n=args.n, min_n=min_n, k=args.k, trial_count=args.trials,
                       rng_seed=args.seed or 0, scheme=args.scheme, coalition_size=sizes,
                       seeds=seeds)
    result = search_counterexamples(cfg)
    if result.found:
        rows = [("witness", f"trial {result.trial_index}"), ("axiom", result.witness.axiom)]
        rows += [(k, v) for k, v in to_jsonable(result.witness.instance).items()]
        rows += [(k, v) for k, v in to_jsonable(result.witness.witness).items()]
        _print_rows(rows)
    else:
        print(f"none found\t{result.trials} trials\t{result.inconclusive} inconclusive")
    inputs = {"rule": cfg.rule.label, "axiom": cfg.axiom, "n": cfg.n, "min_n": cfg.min_n,
              "k": cfg.k, "trials": cfg.trial_count, "seed": cfg.rng_seed,
              "scheme": cfg.scheme, "seeded_instances": len(seeds)}
    _emit(args, "search", inputs,
          {"found": result.found, "trials_run": result.trials, "trial_index": result.trial_index,
           "inconclusive": result.inconclusive, "witness": result.witness},
          {"search": result.seconds})
    return EXIT_VIOLATED if result.found else EXIT_OK


# ---------------------------------------------------------------------------
# parser


def _common(p: argparse.ArgumentParser, rule_default: str = "grimmett"):
    p.add_argument("--rule", default=rule_default, choices=sorted(RULE_NAMES))
    p.add_argument("--order", default=None,
                   help="numeric, random or explicit:<perm> (systematic and pipage only)")
    p.add_argument("--mode", default="exact", help="exact or float:<bits>")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default=None, help="write a JSON report here")
    p.add_argument("--plot", action="store_true", help="render figures next to the report")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="apportion-audit", description=__doc__.split("\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("apportion", help="sample one apportionment")
    p.add_argument("instance")
    p.add_argument("--house-size", type=int, default=None, help="house size for CSV input")
    _common(p)

    p = sub.add_parser("dist", help="print the full rounding distribution")
    p.add_argument("instance")
    p.add_argument("--house-size", type=int, default=None)
    p.add_argument("--coalition", default=None)
    p.add_argument("--threshold", type=int, default=None)
    _common(p)

    p = sub.add_parser("audit", help="check an axiom on an instance pair")
    p.add_argument("old")
    p.add_argument("new", nargs="?")
    p.add_argument("--house-size", type=int, default=None)
    p.add_argument("--axiom", default="threshold", choices=sorted(AXIOMS))
    p.add_argument("--coalition", default=None)
    p.add_argument("--coalition2", default=None)
    p.add_argument("--threshold", type=int, default=None)
    _common(p)

    p = sub.add_parser("verify", help="run named scenarios")
    p.add_argument("pattern", nargs="?", default="*")
    p.add_argument("--mode", default="exact")
    p.add_argument("--out", default=None)

    p = sub.add_parser("search", help="randomized counterexample search")
    p.add_argument("--axiom", default="threshold", choices=SEARCH_AXIOMS)
    p.add_argument("--n", type=int, default=6, help="largest party count")
    p.add_argument("--min-n", type=int, default=3)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--scheme", default="crossing", choices=SCHEMES)
    p.add_argument("--coalition-size", default=None, help="allowed sizes, e.g. 1,2")
    p.add_argument("--no-seed-instances", dest="seed_instances", action="store_false",
                   help="skip the built-in seed instances")
    _common(p, rule_default="sampford")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    handlers = {"apportion": cmd_apportion, "dist": cmd_dist, "audit": cmd_audit,
                "verify": cmd_verify, "search": cmd_search}
    try:
        return handlers[args.command](args)
    except (UsageError, InvalidInputError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SolverError, RestartLimitError, ArithmeticError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
