"""Rewrite rules, the one-step relation, bounded reachability and multisteps."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from functools import cached_property
from itertools import product

from .errors import ResourceLimitError
from .terms import (
    Fun,
    Position,
    Subst,
    Term,
    Var,
    apply_subst,
    iter_positions,
    match,
    rename_vars,
    subterm_at,
    replace_at,
    variable_occurrences,
    variables,
)

DEFAULT_NODE_BUDGET = 100_000


@dataclass(frozen=True)
class Rule:
    index: int
    lhs: Term
    rhs: Term

    def __post_init__(self) -> None:
        if isinstance(self.lhs, Var):
            raise ValueError(f"rule {self.index}: left-hand side is a variable")
        extra = variables(self.rhs) - variables(self.lhs)
        if extra:
            raise ValueError(
                f"rule {self.index}: extra variables {sorted(extra)} in right-hand side"
            )

    def __str__(self) -> str:
        return f"{self.lhs} -> {self.rhs}"


@dataclass(frozen=True)
class RuleClass:
    left_linear: bool
    right_linear: bool
    duplicating: bool

    @property
    def linear(self) -> bool:
        return self.left_linear and self.right_linear


@dataclass(frozen=True)
class TRS:
    rules: tuple[Rule, ...]

    def __post_init__(self) -> None:
        indices = [r.index for r in self.rules]
        if len(set(indices)) != len(indices):
            raise ValueError("duplicate rule indices")
        self.signature  # force the arity-consistency check

    @cached_property
    def signature(self) -> dict[str, int]:
        sig: dict[str, int] = {}
        for r in self.rules:
            for t in (r.lhs, r.rhs):
                for _, s in iter_positions(t):
                    if isinstance(s, Fun):
                        arity = sig.setdefault(s.symbol, len(s.args))
                        if arity != len(s.args):
                            raise ValueError(
                                f"arity clash for {s.symbol} in rule {r.index}"
                            )
        return sig

    def __len__(self) -> int:
        return len(self.rules)

    def __iter__(self):
        return iter(self.rules)

    def rule(self, index: int) -> Rule:
        for r in self.rules:
            if r.index == index:
                return r
        raise KeyError(index)

    def is_left_linear(self) -> bool:
        return all(classify(r).left_linear for r in self.rules)

    def is_linear(self) -> bool:
        return all(classify(r).linear for r in self.rules)


def trs(pairs: list[tuple[Term, Term]]) -> TRS:
    """Build a TRS with dense indices from (lhs, rhs) pairs."""
    return TRS(tuple(Rule(i, l, r) for i, (l, r) in enumerate(pairs)))


def classify(r: Rule) -> RuleClass:
    lhs_counts = Counter(variable_occurrences(r.lhs))
    rhs_counts = Counter(variable_occurrences(r.rhs))
    return RuleClass(
        left_linear=all(n <= 1 for n in lhs_counts.values()),
        right_linear=all(n <= 1 for n in rhs_counts.values()),
        duplicating=any(rhs_counts[x] > lhs_counts[x] for x in rhs_counts),
    )


def split_duplicating(R: TRS) -> tuple[TRS, TRS]:
    """Partition into (duplicating, non-duplicating) rules, indices preserved."""
    dup = tuple(r for r in R.rules if classify(r).duplicating)
    nondup = tuple(r for r in R.rules if not classify(r).duplicating)
    return TRS(dup), TRS(nondup)


def rename_apart(r: Rule, taken: set[str]) -> Rule:
    """A variant of r whose variables avoid `taken` (bijective renaming)."""
    mapping: dict[str, str] = {}
    used = set(taken)
    for x in sorted(variables(r.lhs) | variables(r.rhs)):
        fresh = x
        while fresh in used:
            fresh += "'"
        mapping[x] = fresh
        used.add(fresh)
    if all(k == v for k, v in mapping.items()):
        return r
    return Rule(r.index, rename_vars(r.lhs, mapping), rename_vars(r.rhs, mapping))


def one_step_reducts(R: TRS, t: Term) -> set[tuple[int, Position, Term]]:
    """All (rule index, position, reduct) triples of one-step rewriting."""
    out: set[tuple[int, Position, Term]] = set()
    for p, s in iter_positions(t):
        if isinstance(s, Var):
            continue
        for r in R.rules:
            sigma = match(r.lhs, s)
            if sigma is not None:
                out.add((r.index, p, replace_at(t, p, apply_subst(sigma, r.rhs))))
    return out


def reducts_within(
    R: TRS, t: Term, k: int, budget: int = DEFAULT_NODE_BUDGET
) -> set[Term]:
    """All terms reachable from t in at most k steps (breadth-first)."""
    seen: set[Term] = {t}
    frontier = [t]
    for _ in range(k):
        nxt: list[Term] = []
        for s in frontier:
            for _, _, u in one_step_reducts(R, s):
                if u not in seen:
                    seen.add(u)
                    if len(seen) > budget:
                        raise ResourceLimitError(
                            f"reducts_within exceeded {budget} terms"
                        )
                    nxt.append(u)
        if not nxt:
            break
        frontier = nxt
    return seen


def closed_reducts(
    R: TRS, t: Term, budget: int = DEFAULT_NODE_BUDGET
) -> set[Term]:
    """The full set of terms reachable from t; raises if it does not close
    within the budget."""
    seen: set[Term] = {t}
    frontier = [t]
    while frontier:
        nxt: list[Term] = []
        for s in frontier:
            for _, _, u in one_step_reducts(R, s):
                if u not in seen:
                    seen.add(u)
                    if len(seen) > budget:
                        raise ResourceLimitError(
                            f"reduct closure exceeded {budget} terms"
                        )
                    nxt.append(u)
        frontier = nxt
    return seen


def is_normal_form(R: TRS, t: Term) -> bool:
    for _, s in iter_positions(t):
        if isinstance(s, Fun) and any(match(r.lhs, s) is not None for r in R.rules):
            return False
    return True


def normalize(
    R: TRS, t: Term, budget: int = DEFAULT_NODE_BUDGET
) -> tuple[Term, list[tuple[int, Position, Term]]]:
    """Reduce t to a normal form, outermost-leftmost, recording each step."""
    steps: list[tuple[int, Position, Term]] = []
    for _ in range(budget):
        reducts = one_step_reducts(R, t)
        if not reducts:
            return t, steps
        step = min(reducts, key=lambda x: (x[1], x[0]))
        steps.append(step)
        t = step[2]
    raise ResourceLimitError(f"normalization exceeded {budget} steps")


def multistep_reducts(
    R: TRS, t: Term, budget: int = DEFAULT_NODE_BUDGET
) -> set[Term]:
    """The set of complete-development reducts of t.

    Clauses: a variable develops to itself; developments are closed under
    congruence on arguments; and an lhs instance develops to the rhs under a
    pointwise development of the matching substitution.
    """
    memo: dict[Term, frozenset[Term]] = {}
    count = 0

    def go(s: Term) -> frozenset[Term]:
        nonlocal count
        cached = memo.get(s)
        if cached is not None:
            return cached
        if isinstance(s, Var):
            result = frozenset({s})
            memo[s] = result
            return result
        arg_sets = [go(a) for a in s.args]
        results: set[Term] = {
            Fun(s.symbol, combo) for combo in product(*arg_sets)
        } if s.args else {s}
        for r in R.rules:
            rule = rename_apart(r, variables(s))
            sigma = match(rule.lhs, s)
            if sigma is None:
                continue
            xs = sorted(variables(rule.lhs))
            choice_sets = [go(sigma.get(x, Var(x))) for x in xs]
            for choice in product(*choice_sets):
                tau: Subst = dict(zip(xs, choice))
                results.add(apply_subst(tau, rule.rhs))
        count += len(results)
        if count > budget:
            raise ResourceLimitError(f"multistep_reducts exceeded {budget} nodes")
        result = frozenset(results)
        memo[s] = result
        return result

    return set(go(t))
