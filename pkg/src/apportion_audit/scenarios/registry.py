"""Named instances with their expected verdicts and the margins they must reproduce."""

from __future__ import annotations

import fnmatch
import itertools
import json
import time
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from ..apportion import (CoalitionQuery, coalition_threshold_prob, dominance_compare,
                         induce_apportionment)
from ..audit import (AuditVerdict, Outcome, check_house_monotonicity_witness,
                     check_pairwise_selection, check_pairwise_threshold,
                     check_selection_monotonicity, check_strengthened_selection,
                     check_threshold_monotonicity, check_vote_count_variants)
from ..core import (FLOAT_TOLERANCE, InvalidInputError, VoteProfile, parse_mode, to_fraction,
                    validate_residues)
from ..rules import (Rule, conditional_poisson_distribution, conditional_poisson_marginals,
                     elementary_symmetric)


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str = ""


@dataclass(frozen=True)
class PaperScenario:
    id: str
    aliases: Tuple[str, ...]
    description: str
    rules: Tuple[str, ...]
    axiom: str
    expected: Outcome
    arithmetic: str
    inputs: Dict[str, Any]
    margins: Dict[str, Any]
    data: Dict[str, Any] = field(repr=False, default_factory=dict)

    def matches(self, pattern: str) -> bool:
        return any(fnmatch.fnmatchcase(name, pattern) for name in (self.id,) + self.aliases)


@dataclass
class ScenarioResult:
    scenario: PaperScenario
    verdicts: List[AuditVerdict]
    checks: List[Check]
    seconds: float = 0.0
    options: Dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return bool(self.checks) and all(c.passed for c in self.checks)

    @property
    def failures(self) -> List[Check]:
        return [c for c in self.checks if not c.passed]

    def check(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)


def _load_all() -> Dict[str, PaperScenario]:
    out = {}
    folder = resources.files(__package__).joinpath("data")
    for entry in sorted(folder.iterdir(), key=lambda e: e.name):
        if not entry.name.endswith(".json"):
            continue
        data = json.loads(entry.read_text(encoding="utf-8"))
        rules = tuple(data["rules"]) if "rules" in data else (data["rule"],)
        out[data["id"]] = PaperScenario(
            id=data["id"], aliases=tuple(data.get("aliases", ())),
            description=data.get("description", ""), rules=rules, axiom=data["axiom"],
            expected=Outcome(data["expected"]), arithmetic=data.get("arithmetic", "exact"),
            inputs=data["inputs"], margins=data.get("margins", {}), data=data)
    return out


_REGISTRY: Optional[Dict[str, PaperScenario]] = None


def registry() -> Dict[str, PaperScenario]:
    global _REGISTRY
    if _REGISTRY is None:
        _REGISTRY = _load_all()
    return _REGISTRY


def list_scenarios() -> List[PaperScenario]:
    return list(registry().values())


def get_scenario(name: str) -> PaperScenario:
    reg = registry()
    if name in reg:
        return reg[name]
    for sc in reg.values():
        if name in sc.aliases:
            return sc
    raise InvalidInputError(f"unknown scenario {name!r}")


def match_scenarios(pattern: str) -> List[PaperScenario]:
    return [sc for sc in registry().values() if sc.matches(pattern)]


# ---------------------------------------------------------------------------
# helpers


def _outcome_check(v: AuditVerdict, expected: Outcome, label: str = "") -> Check:
    name = f"outcome[{label}]" if label else "outcome"
    detail = f"{v.outcome.value}" + (f" ({v.reason})" if v.reason else "")
    return Check(name, v.outcome is expected, detail)


def _coerce(value, bound):
    """Bring a rational bound into the value's mpmath context when needed."""
    ctx = getattr(value, "context", None)
    if ctx is not None and isinstance(bound, Fraction):
        return ctx.mpf(bound.numerator) / bound.denominator
    return bound


def _bound(name: str, value, bound, kind: str) -> Check:
    """Compare a computed value with a stated margin.

    Weak inequalities get the float tolerance when the value came from a
    solver; exact values are compared exactly.
    """
    bound = _coerce(value, bound)
    tol = 0 if isinstance(value, (Fraction, int)) else FLOAT_TOLERANCE
    if kind == ">=":
        ok = value >= bound - tol
    elif kind == "<=":
        ok = value <= bound + tol
    elif kind == ">":
        ok = value > bound
    elif kind == "<":
        ok = value < bound
    else:
        ok = value == bound
    return Check(name, bool(ok), f"{_show(value)} {kind} {_show(bound)}")


def _show(x) -> str:
    if isinstance(x, Fraction):
        return f"{x} (~{float(x):.6g})" if x.denominator != 1 else str(x)
    try:
        return f"{float(x):.6g}"
    except (TypeError, ValueError):
        return str(x)


def _residues(sc: PaperScenario, key: str):
    return validate_residues(sc.inputs[key], parse_mode(sc.arithmetic))


def _rule(sc: PaperScenario, name: Optional[str] = None, **extra) -> Rule:
    name = name or sc.rules[0]
    order = sc.data.get("order", "numeric")
    if Rule(name).name not in ("systematic", "pipage"):
        order = "numeric"
    mode = parse_mode(sc.arithmetic)
    if not mode.exact:
        extra.setdefault("precision_bits", mode.bits)
    if "residual_target" in sc.data:
        extra.setdefault("residual_target", float(sc.data["residual_target"]))
    return Rule(name, order=order, **extra)


def _slack(sc: PaperScenario):
    return to_fraction(sc.data["slack"]) if "slack" in sc.data else None


# ---------------------------------------------------------------------------
# runners


def _run_apportia(sc: PaperScenario, **_):
    inp = sc.inputs
    h = inp["house_size"]
    prev = VoteProfile.of(inp["votes_previous"], h)
    new = VoteProfile.of(inp["votes_new"], h)
    T, theta = inp["coalition"], inp["threshold"]
    rule = _rule(sc)
    # The previous election is the one where the coalition's quotas are larger.
    v = check_threshold_monotonicity(rule, new, prev, T)
    q = CoalitionQuery(tuple(T), theta)
    p_prev = coalition_threshold_prob(induce_apportionment(rule, prev), q)
    p_new = coalition_threshold_prob(induce_apportionment(rule, new), q)
    checks = [_outcome_check(v, sc.expected),
              _bound("violating threshold", v.witness.get("theta"), theta, "=="),
              _bound("previous election", p_prev, to_fraction(sc.margins["previous"]), "=="),
              _bound("new election", p_new, to_fraction(sc.margins["new"]), "==")]
    return [v], checks


def _run_selection(sc: PaperScenario, **_):
    p, p2 = _residues(sc, "p"), _residues(sc, "p_new")
    v = check_selection_monotonicity(_rule(sc), p, p2, sc.inputs["coalition"], _slack(sc))
    checks = [_outcome_check(v, sc.expected)]
    m = sc.margins
    old, new = v.witness.get("old"), v.witness.get("new")
    if m.get("old_positive"):
        checks.append(_bound("old probability", old, 0, ">"))
    if "new" in m:
        checks.append(_bound("new probability", new, to_fraction(m["new"]), "=="))
    if "old_at_least" in m:
        checks.append(_bound("old probability", old, to_fraction(m["old_at_least"]), ">="))
    if "new_at_most" in m:
        checks.append(_bound("new probability", new, to_fraction(m["new_at_most"]), "<="))
    return [v], checks


def _run_cp_huge(sc: PaperScenario, **_):
    """Everything here is integer or Fraction arithmetic."""
    inp = sc.inputs
    k = inp["k"]
    T = tuple(inp["coalition"])
    pi = [int(x) for x in inp["pi"]]
    pi2 = [int(x) for x in inp["pi_new"]]
    e_k = elementary_symmetric(pi, k, 0)[k]
    e_k2 = elementary_symmetric(pi2, k, 0)[k]
    marg = conditional_poisson_marginals([Fraction(x) for x in pi], k)
    marg2 = conditional_poisson_marginals([Fraction(x) for x in pi2], k)
    old = conditional_poisson_distribution(pi, k).prob(T)
    new = conditional_poisson_distribution(pi2, k).prob(T)
    grow_ok = all(marg2[i - 1] >= marg[i - 1] for i in T)
    shrink_ok = all(marg2[i - 1] <= marg[i - 1] for i in range(1, len(pi) + 1) if i not in T)
    instance = {"rule": "cp", "pi": tuple(pi), "pi_new": tuple(pi2), "T": T,
                "p": tuple(marg), "p_new": tuple(marg2)}
    witness = {"old": old, "new": new, "margin": new - old}
    if not (grow_ok and shrink_ok):
        v = AuditVerdict("selection", instance, Outcome.INCONCLUSIVE, witness,
                         "marginals do not move monotonically toward T")
    else:
        v = AuditVerdict("selection", instance,
                         Outcome.SATISFIED if new >= old else Outcome.VIOLATED, witness)
    prod = Fraction(pi[0] * pi[1] * pi[2], int(inp["normalizer"]))
    prod2 = Fraction(pi2[0] * pi2[1] * pi2[2], int(inp["normalizer_new"]))
    checks = [
        _outcome_check(v, sc.expected),
        Check("normalizer is e_k(pi)", e_k == int(inp["normalizer"]), ""),
        Check("normalizer is e_k(pi_new)", e_k2 == int(inp["normalizer_new"]), ""),
        Check("marginals rise on T", grow_ok, ""),
        Check("marginals fall off T", shrink_ok, ""),
        Check("marginals sum to k", sum(marg) == k and sum(marg2) == k, ""),
        _bound("scaled product comparison", prod, prod2, ">"),
    ]
    return [v], checks


def _run_pairwise(sc: PaperScenario, **_):
    p, p2 = _residues(sc, "p"), _residues(sc, "p_new")
    inp = sc.inputs
    v = check_pairwise_selection(_rule(sc), p, p2, inp["coalition1"], inp["coalition2"],
                                 _slack(sc))
    checks = [_outcome_check(v, sc.expected)]
    w, m = v.witness, sc.margins
    if not w:
        return [v], checks
    for key, wkey, kind in (("T1_old_at_least", "T1_old", ">="), ("T2_old_at_most", "T2_old", "<="),
                            ("T1_new_at_most", "T1_new", "<="), ("T2_new_at_least", "T2_new", ">="),
                            ("T1_new", "T1_new", "==")):
        if key in m:
            checks.append(_bound(key, w[wkey], to_fraction(m[key]), kind))
    if "T1_delta_order" in m:
        factor = m.get("band_factor", 10)
        for key, wkey in (("T1_delta_order", "T1_delta"), ("T2_delta_order", "T2_delta")):
            target = float(m[key])
            lo, hi = sorted((target * factor, target / factor))
            value = w[wkey]
            checks.append(Check(f"{key} band", bool(lo <= value <= hi),
                                f"{_show(value)} in [{lo:g}, {hi:g}]"))
    return [v], checks


def _fdco_profiles(sc: PaperScenario):
    inp = sc.inputs
    pair, triple, rest, big = (to_fraction(inp[k]) for k in
                               ("pair_share", "triple_share", "rest_share", "big_share"))
    out = []
    for R in itertools.combinations(range(1, 11), 2):
        others = [i for i in range(1, 11) if i not in R]
        T1 = tuple(others[:3])
        shares = [rest] * 10 + [big, big]
        for i in R:
            shares[i - 1] = pair
        for i in T1:
            shares[i - 1] = triple
        out.append((R, T1, shares))
    return out


def _run_fdco(sc: PaperScenario, m_values: Optional[Sequence[int]] = None, **_):
    inp = sc.inputs
    h = inp["house_size"]
    if m_values is None:
        m_values = range(inp["m_min"], inp["m_max"] + 1)
    m_values = [int(m) for m in m_values]
    share = to_fraction(inp["new_share"])
    verdicts, checks = [], []
    olds = _fdco_profiles(sc)
    for name in sc.rules:
        rule = _rule(sc, name)
        old_dists = [(R, T1, shares, induce_apportionment(rule, VoteProfile.of(shares, h)))
                     for R, T1, shares in olds]
        found = None
        for m in m_values:
            new_shares = [share] * 10 + [Fraction(1, m), 1 - Fraction(1, m)]
            new_dist = induce_apportionment(rule, VoteProfile.of(new_shares, h))
            for R, T1, shares, old_dist in old_dists:
                if dominance_compare(old_dist, new_dist, T1).dominates:
                    continue
                if dominance_compare(new_dist, old_dist, R).dominates:
                    continue
                found = (m, R, T1, shares, new_shares)
                break
            if found:
                break
        label = Rule(name).label
        if found:
            m, R, T1, shares, new_shares = found
            v = check_pairwise_threshold(rule, VoteProfile.of(shares, h),
                                         VoteProfile.of(new_shares, h), T1, R)
            v.witness["m"] = m
        else:
            R, T1, shares, old_dist = old_dists[0]
            eps = old_dist.tail(T1)[len(T1)]
            v = AuditVerdict("pairwise-threshold",
                             {"rule": label, "m_values": (m_values[0], m_values[-1])},
                             Outcome.INCONCLUSIVE,
                             {"epsilon": eps, "T1": T1, "T2": R},
                             f"no violation for m in {m_values[0]}..{m_values[-1]}; "
                             f"P'[S >= T1] = {float(eps):.3g} needs 1/m below it")
        verdicts.append(v)
        checks.append(_outcome_check(v, sc.expected, label))
    return verdicts, checks


def _run_vdc(sc: PaperScenario, **_):
    inp = sc.inputs
    h, theta = inp["house_size"], inp["threshold"]
    v_old = VoteProfile.of(inp["votes"], h)
    base_new = [to_fraction(x) for x in inp["votes_new"]]
    verdicts, checks = [], []
    for name in sc.rules:
        rule = _rule(sc, name)
        dist = induce_apportionment(rule, v_old)
        cands = [tuple(c) for c in inp["candidates"]]
        T1 = max(cands, key=lambda c: (dist.rounding.prob(c), [-i for i in c]))
        best = dist.rounding.prob(T1)
        # relabel the new votes so the two gaining parties are exactly T1
        pool = sorted({i for c in cands for i in c})
        loser = [i for i in pool if i not in T1][0]
        new = list(base_new)
        gain, drop = base_new[1], base_new[3]
        for i in T1:
            new[i - 1] = gain
        new[loser - 1] = drop
        v_new = VoteProfile.of(new, h)
        v = check_vote_count_variants(rule, v_old, v_new, T1, inp["coalition2"])
        verdicts.append(v)
        label = rule.label
        checks.append(_outcome_check(v, sc.expected, label))
        checks.append(_bound(f"P[S=T1] averaging bound[{label}]", best,
                             to_fraction(sc.margins["T1_old_at_least"]), ">="))
        if v.witness:
            checks.append(Check(f"theta {theta} violates T1[{label}]",
                                theta in v.witness["T1_violations"], str(T1)))
            checks.append(Check(f"theta {theta} violates T2[{label}]",
                                theta in v.witness["T2_violations"], ""))
    return verdicts, checks


def _run_house(sc: PaperScenario, **_):
    verdicts, checks = [], []
    for name in sc.rules:
        rule = _rule(sc, name)
        v = check_house_monotonicity_witness(rule)
        verdicts.append(v)
        checks.append(_outcome_check(v, sc.expected, rule.label))
    return verdicts, checks


def _run_strengthened(sc: PaperScenario, **_):
    p, p2 = _residues(sc, "p"), _residues(sc, "p_new")
    m = sc.margins
    verdicts, checks = [], []
    for name in sc.rules:
        rule = _rule(sc, name)
        v = check_strengthened_selection(rule, p, p2, sc.inputs["coalition"])
        verdicts.append(v)
        label = rule.label
        checks.append(_outcome_check(v, sc.expected, label))
        if v.witness:
            checks.append(_bound(f"start[{label}]", v.witness["old"],
                                 to_fraction(m["old_at_least"]), ">="))
            checks.append(_bound(f"end[{label}]", v.witness["new"],
                                 to_fraction(m["new_at_most"]), "<="))
    return verdicts, checks


RUNNERS: Dict[str, Callable] = {
    "apportia": _run_apportia,
    "pipage-fixed": _run_selection,
    "pipage-random": _run_selection,
    "cp-huge": _run_cp_huge,
    "pairwise-pipage": _run_pairwise,
    "pairwise-systematic": _run_pairwise,
    "pairwise-cp": _run_pairwise,
    "fdco-family": _run_fdco,
    "vdc": _run_vdc,
    "gpp-house": _run_house,
    "strengthened-impossible": _run_strengthened,
}


def run_scenario(name: str, **options) -> ScenarioResult:
    """Run one registered scenario and compare it with its expectations.

    ``options`` are passed to the runner; "fdco-family" accepts ``m_values``
    to replace its default sweep.
    """
    sc = get_scenario(name)
    runner = RUNNERS.get(sc.id)
    if runner is None:
        raise InvalidInputError(f"scenario {sc.id!r} has no runner")
    start = time.perf_counter()
    verdicts, checks = runner(sc, **options)
    return ScenarioResult(sc, verdicts, checks, time.perf_counter() - start, dict(options))


__all__ = ["Check", "PaperScenario", "RUNNERS", "ScenarioResult", "get_scenario",
           "list_scenarios", "match_scenarios", "registry", "run_scenario"]
