"""Checkers for the monotonicity axioms on rounding rules and apportionment methods.

Every checker validates the axiom's preconditions first and returns an
INCONCLUSIVE verdict when they fail, so a vacuous instance never counts as a
pass.  Comparisons are exact for rational inputs and use a 1e-12 slack
otherwise, unless the caller passes ``slack`` explicitly.
"""

from __future__ import annotations

from typing import Iterable, Optional, Sequence

from ..apportion import (comparison_slack, dominance_compare, induce_apportionment)
from ..core import (InvalidInputError, ResidueProfile, VoteProfile, compute_quotas,
                    enumerate_k_subsets, parse_subset)
from ..rules import as_rule
from .verdict import AuditVerdict, inconclusive, verdict


def _slack(slack, *values):
    return comparison_slack(*values) if slack is None else slack


def _same_shape(p: ResidueProfile, p2: ResidueProfile) -> Optional[str]:
    if p.n != p2.n:
        return f"profiles have {p.n} and {p2.n} parties"
    if p.k != p2.k:
        return f"profiles sum to {p.k} and {p2.k}"
    return None


def _moves(old: Sequence, new: Sequence, grow: Iterable[int], shrink: Iterable[int],
           tol) -> Optional[str]:
    """None if old->new rises weakly on ``grow`` and falls weakly on ``shrink``."""
    for i in grow:
        if new[i - 1] < old[i - 1] - tol:
            return f"party {i} should weakly increase but goes {old[i - 1]} -> {new[i - 1]}"
    for i in shrink:
        if new[i - 1] > old[i - 1] + tol:
            return f"party {i} should weakly decrease but goes {old[i - 1]} -> {new[i - 1]}"
    return None


def _complement(n: int, members) -> list:
    inside = set(members)
    return [i for i in range(1, n + 1) if i not in inside]


def _precondition_tol(*values):
    return comparison_slack(*values)


# ---------------------------------------------------------------------------
# Rounding-rule axioms


def check_selection_monotonicity(rule, p: ResidueProfile, p2: ResidueProfile, coalition,
                                 slack=None) -> AuditVerdict:
    """P[S = T] must not fall when T's targets weakly rise and all others weakly fall."""
    rule = as_rule(rule)
    T = parse_subset(coalition)
    instance = {"rule": rule.label, "p": p.residues, "p_new": p2.residues, "T": T}
    name = "selection"
    problem = _same_shape(p, p2)
    if problem is None and len(T) != p.k:
        problem = f"|T| = {len(T)} but k = {p.k}"
    if problem is None and any(not 1 <= i <= p.n for i in T):
        problem = f"T = {T} names a party outside 1..{p.n}"
    tol = _precondition_tol(*p.residues, *p2.residues)
    if problem is None:
        problem = _moves(p.residues, p2.residues, T, _complement(p.n, T), tol)
    if problem:
        return inconclusive(name, instance, problem)
    old = rule.distribution(p).prob(T)
    new = rule.distribution(p2).prob(T)
    s = _slack(slack, old, new)
    return verdict(name, instance, new >= old - s, {"old": old, "new": new, "margin": new - old})


def check_strengthened_selection(rule, p: ResidueProfile, p2: ResidueProfile, coalition,
                                 slack=None) -> AuditVerdict:
    """Selection monotonicity with no condition on targets outside T.

    No rule can satisfy this for every instance; the checker exists to exhibit
    instances where a given rule fails it.
    """
    rule = as_rule(rule)
    T = parse_subset(coalition)
    instance = {"rule": rule.label, "p": p.residues, "p_new": p2.residues, "T": T}
    name = "strengthened-selection"
    problem = _same_shape(p, p2)
    if problem is None and len(T) != p.k:
        problem = f"|T| = {len(T)} but k = {p.k}"
    tol = _precondition_tol(*p.residues, *p2.residues)
    if problem is None:
        problem = _moves(p.residues, p2.residues, T, (), tol)
    if problem:
        return inconclusive(name, instance, problem)
    old = rule.distribution(p).prob(T)
    new = rule.distribution(p2).prob(T)
    s = _slack(slack, old, new)
    return verdict(name, instance, new >= old - s, {"old": old, "new": new, "margin": new - old})


def check_pairwise_selection(rule, p: ResidueProfile, p2: ResidueProfile, coalition1, coalition2,
                             slack=None) -> AuditVerdict:
    """Either P[S = T1] weakly rises or P[S = T2] weakly falls.

    Preconditions: T1's targets weakly rise and T2's weakly fall; parties in
    neither set are unconstrained.
    """
    rule = as_rule(rule)
    T1, T2 = parse_subset(coalition1), parse_subset(coalition2)
    instance = {"rule": rule.label, "p": p.residues, "p_new": p2.residues, "T1": T1, "T2": T2}
    name = "pairwise-selection"
    problem = _same_shape(p, p2)
    if problem is None and (len(T1) != p.k or len(T2) != p.k):
        problem = f"coalitions must have size k = {p.k}"
    tol = _precondition_tol(*p.residues, *p2.residues)
    if problem is None:
        problem = _moves(p.residues, p2.residues, T1, T2, tol)
    if problem:
        return inconclusive(name, instance, problem)
    d_old, d_new = rule.distribution(p), rule.distribution(p2)
    o1, n1 = d_old.prob(T1), d_new.prob(T1)
    o2, n2 = d_old.prob(T2), d_new.prob(T2)
    s = _slack(slack, o1, n1, o2, n2)
    ok = n1 >= o1 - s or n2 <= o2 + s
    witness = {"T1_old": o1, "T1_new": n1, "T1_delta": n1 - o1,
               "T2_old": o2, "T2_new": n2, "T2_delta": n2 - o2}
    return verdict(name, instance, ok, witness)


def check_lipschitz(rule, p: ResidueProfile, p2: ResidueProfile, coalition=None,
                    slack=None) -> AuditVerdict:
    """|P'[S = T] - P[S = T]| <= ||p - p'||_1; with no T, every k-set is checked."""
    rule = as_rule(rule)
    instance = {"rule": rule.label, "p": p.residues, "p_new": p2.residues}
    problem = _same_shape(p, p2)
    if coalition is not None:
        instance["T"] = parse_subset(coalition)
    if problem:
        return inconclusive("lipschitz", instance, problem)
    bound = sum((abs(a - b) for a, b in zip(p.residues, p2.residues)), p[0] * 0)
    return _lipschitz_compare("lipschitz", rule, p, p2, coalition, bound, instance, slack)


def check_two_coordinate_lipschitz(rule, p: ResidueProfile, grow: int, shrink: int, delta,
                                   coalition=None, slack=None) -> AuditVerdict:
    """Moving delta from party ``shrink`` to party ``grow`` changes each P[S = T] by <= 2 delta."""
    rule = as_rule(rule)
    instance = {"rule": rule.label, "p": p.residues, "grow": grow, "shrink": shrink,
                "delta": delta}
    if grow == shrink or not (1 <= grow <= p.n and 1 <= shrink <= p.n):
        return inconclusive("lipschitz-2delta", instance, "need two distinct parties")
    if not (0 < delta < min(p[shrink - 1], 1 - p[grow - 1])):
        return inconclusive("lipschitz-2delta", instance,
                            "delta must lie in (0, min(p_shrink, 1 - p_grow))")
    values = list(p.residues)
    values[grow - 1] = values[grow - 1] + delta
    values[shrink - 1] = values[shrink - 1] - delta
    p2 = ResidueProfile(tuple(values), p.k)
    instance["p_new"] = p2.residues
    if coalition is not None:
        instance["T"] = parse_subset(coalition)
    return _lipschitz_compare("lipschitz-2delta", rule, p, p2, coalition, 2 * delta, instance,
                              slack)


def _lipschitz_compare(name, rule, p, p2, coalition, bound, instance, slack):
    d_old, d_new = rule.distribution(p), rule.distribution(p2)
    sets = [parse_subset(coalition)] if coalition is not None else list(
        enumerate_k_subsets(p.n, p.k))
    worst, worst_set = None, None
    for T in sets:
        gap = abs(d_new.prob(T) - d_old.prob(T))
        if worst is None or gap > worst:
            worst, worst_set = gap, T
    s = _slack(slack, worst, bound)
    return verdict(name, instance, worst <= bound + s,
                   {"largest_change": worst, "at": worst_set, "bound": bound})


# ---------------------------------------------------------------------------
# Apportionment axioms


def _vote_shape(v: VoteProfile, v2: VoteProfile) -> Optional[str]:
    if v.n != v2.n:
        return f"vote profiles have {v.n} and {v2.n} parties"
    if v.house_size != v2.house_size:
        return f"house sizes differ ({v.house_size} vs {v2.house_size})"
    return None


def _vote_instance(rule, v, v2, **extra):
    out = {"rule": rule.label, "votes": v.votes, "votes_new": v2.votes, "h": v.house_size}
    out.update(extra)
    return out


def check_threshold_monotonicity(rule, v: VoteProfile, v2: VoteProfile, coalition,
                                 slack=None) -> AuditVerdict:
    """The coalition's seat count under v2 must first-order dominate its count under v.

    Preconditions: quotas in T weakly rise, all other quotas weakly fall.
    """
    rule = as_rule(rule)
    T = parse_subset(coalition)
    instance = _vote_instance(rule, v, v2, T=T)
    name = "threshold"
    problem = _vote_shape(v, v2)
    if problem is None and any(not 1 <= i <= v.n for i in T):
        problem = f"T = {T} names a party outside 1..{v.n}"
    if problem is None:
        q, q2 = compute_quotas(v).quotas, compute_quotas(v2).quotas
        problem = _moves(q, q2, T, _complement(v.n, T), _precondition_tol(*q, *q2))
    if problem:
        return inconclusive(name, instance, problem)
    return _dominance_verdict(name, instance, rule, v, v2, T, slack)


def _dominance_verdict(name, instance, rule, v, v2, T, slack):
    old, new = induce_apportionment(rule, v), induce_apportionment(rule, v2)
    result = dominance_compare(old, new, T, slack)
    witness = {"tails_old": result.tails_old, "tails_new": result.tails_new,
               "violations": result.violations(_slack(slack, *result.tails_old,
                                                      *result.tails_new))}
    if not result.dominates:
        witness.update(theta=result.theta, old=result.old_prob, new=result.new_prob)
    return verdict(name, instance, result.dominates, witness)


def _pairwise_dominance(name, instance, rule, v, v2, T1, T2, slack):
    old, new = induce_apportionment(rule, v), induce_apportionment(rule, v2)
    r1 = dominance_compare(old, new, T1, slack)
    # T2 must be dominated: compare with roles swapped
    r2 = dominance_compare(new, old, T2, slack)
    ok = r1.dominates or r2.dominates
    s1 = _slack(slack, *r1.tails_old, *r1.tails_new)
    s2 = _slack(slack, *r2.tails_old, *r2.tails_new)
    witness = {"T1_tails_old": r1.tails_old, "T1_tails_new": r1.tails_new,
               "T2_tails_old": r2.tails_new, "T2_tails_new": r2.tails_old,
               "T1_violations": r1.violations(s1), "T2_violations": r2.violations(s2)}
    if not ok:
        witness.update(theta1=r1.theta, T1_old=r1.old_prob, T1_new=r1.new_prob,
                       theta2=r2.theta, T2_old=r2.new_prob, T2_new=r2.old_prob)
    return verdict(name, instance, ok, witness)


def check_pairwise_threshold(rule, v: VoteProfile, v2: VoteProfile, coalition1, coalition2,
                             slack=None) -> AuditVerdict:
    """T1's seat count dominates its old count, or T2's old count dominates its new one."""
    rule = as_rule(rule)
    T1, T2 = parse_subset(coalition1), parse_subset(coalition2)
    instance = _vote_instance(rule, v, v2, T1=T1, T2=T2)
    name = "pairwise-threshold"
    problem = _vote_shape(v, v2)
    if problem is None:
        q, q2 = compute_quotas(v).quotas, compute_quotas(v2).quotas
        problem = _moves(q, q2, T1, T2, _precondition_tol(*q, *q2))
    if problem:
        return inconclusive(name, instance, problem)
    return _pairwise_dominance(name, instance, rule, v, v2, T1, T2, slack)


def check_vote_count_variants(rule, v: VoteProfile, v2: VoteProfile, coalition=None,
                              coalition2=None, slack=None) -> AuditVerdict:
    """Threshold axioms with preconditions on raw vote counts instead of quotas.

    With one coalition this is vote-count threshold monotonicity (counts in T
    weakly rise, all others weakly fall); with two it is the pairwise variant
    (counts in T1 weakly rise, counts in T2 weakly fall).
    """
    rule = as_rule(rule)
    if coalition is None:
        raise InvalidInputError("a coalition is required")
    T1 = parse_subset(coalition)
    problem = _vote_shape(v, v2)
    tol = _precondition_tol(*v.votes, *v2.votes)
    if coalition2 is None:
        name = "vote-count-threshold"
        instance = _vote_instance(rule, v, v2, T=T1)
        if problem is None:
            problem = _moves(v.votes, v2.votes, T1, _complement(v.n, T1), tol)
        if problem:
            return inconclusive(name, instance, problem)
        return _dominance_verdict(name, instance, rule, v, v2, T1, slack)
    T2 = parse_subset(coalition2)
    name = "pairwise-vote-count-threshold"
    instance = _vote_instance(rule, v, v2, T1=T1, T2=T2)
    if problem is None:
        problem = _moves(v.votes, v2.votes, T1, T2, tol)
    if problem:
        return inconclusive(name, instance, problem)
    return _pairwise_dominance(name, instance, rule, v, v2, T1, T2, slack)


def check_full_support(rule, votes: VoteProfile) -> AuditVerdict:
    """Every quota-respecting seat vector must have positive probability.

    Equivalently, every k-set of parties with a positive residue must be drawn
    with positive probability.
    """
    rule = as_rule(rule)
    breakdown = compute_quotas(votes)
    p = breakdown.residues
    instance = {"rule": rule.label, "votes": votes.votes, "h": votes.house_size}
    live = [i for i in range(1, p.n + 1) if p[i - 1] > 0]
    dist = rule.distribution(p)
    missing = []
    total = 0
    for combo in enumerate_k_subsets(len(live), p.k):
        subset = tuple(live[j - 1] for j in combo)
        total += 1
        if not dist.prob(subset) > 0:
            missing.append(subset)
    witness = {"candidate_sets": total, "zero_mass": len(missing), "missing": missing}
    return verdict("full-support", instance, not missing, witness)
