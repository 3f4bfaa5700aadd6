"""Precedence formulas over rule indices and the bounded rule-labeling check.

The satisfiability target is a well-founded order on rules. Formulas are
trees of conjunctions, disjunctions and the atoms ``a > b`` and ``a >= b``,
where ``>=`` is interpreted as the reflexive closure of ``>``: it holds iff
the two rule indices coincide or ``a > b`` holds.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterable, Optional

from .critical_pairs import critical_pair_of, overlaps
from .errors import ResourceLimitError
from .joinability import JoinInstance, join_instances
from .rewriting import DEFAULT_NODE_BUDGET, TRS
from .verdict import Verdict, maybe, yes


class Formula:
    __slots__ = ()


@dataclass(frozen=True, slots=True)
class Top(Formula):
    def __str__(self) -> str:
        return "T"


@dataclass(frozen=True, slots=True)
class Bottom(Formula):
    def __str__(self) -> str:
        return "F"


@dataclass(frozen=True, slots=True)
class And(Formula):
    parts: tuple[Formula, ...]

    def __str__(self) -> str:
        return "(" + " & ".join(map(str, self.parts)) + ")"


@dataclass(frozen=True, slots=True)
class Or(Formula):
    parts: tuple[Formula, ...]

    def __str__(self) -> str:
        return "(" + " | ".join(map(str, self.parts)) + ")"


@dataclass(frozen=True, slots=True)
class Gt(Formula):
    a: int
    b: int

    def __str__(self) -> str:
        return f"{self.a}>{self.b}"


@dataclass(frozen=True, slots=True)
class Geq(Formula):
    a: int
    b: int

    def __str__(self) -> str:
        return f"{self.a}>={self.b}"


TOP = Top()
BOTTOM = Bottom()


def conj(parts: Iterable[Formula]) -> Formula:
    kept = [p for p in parts if p != TOP]
    if any(p == BOTTOM for p in kept):
        return BOTTOM
    if not kept:
        return TOP
    if len(kept) == 1:
        return kept[0]
    return And(tuple(kept))


def disj(parts: Iterable[Formula]) -> Formula:
    kept = [p for p in parts if p != BOTTOM]
    if any(p == TOP for p in kept):
        return TOP
    if not kept:
        return BOTTOM
    if len(kept) == 1:
        return kept[0]
    return Or(tuple(kept))


LevelMap = dict[int, int]


def evaluate(f: Formula, levels: LevelMap) -> bool:
    if isinstance(f, Top):
        return True
    if isinstance(f, Bottom):
        return False
    if isinstance(f, And):
        return all(evaluate(p, levels) for p in f.parts)
    if isinstance(f, Or):
        return any(evaluate(p, levels) for p in f.parts)
    if isinstance(f, Gt):
        return levels.get(f.a, 0) > levels.get(f.b, 0)
    if isinstance(f, Geq):
        return f.a == f.b or levels.get(f.a, 0) > levels.get(f.b, 0)
    raise TypeError(f)


def atom_indices(f: Formula) -> set[int]:
    if isinstance(f, (Gt, Geq)):
        return {f.a, f.b}
    if isinstance(f, (And, Or)):
        out: set[int] = set()
        for p in f.parts:
            out |= atom_indices(p)
        return out
    return set()


def build_phi(alpha: int, beta: int, gammas: tuple[int, ...]) -> Formula:
    """Constraint making one side of a join sequence decreasing for (alpha, beta).

    Disjunct i puts the first i labels strictly below alpha, lets label i play
    the "at most beta" step, and requires the remaining labels to sit below
    alpha or beta; the final disjunct puts every label strictly below alpha.
    """
    n = len(gammas)
    disjuncts: list[Formula] = []
    for i in range(n + 1):
        prefix: list[Formula] = [Gt(alpha, g) for g in gammas[:i]]
        if i == n:
            psi: Formula = TOP
        else:
            psi = conj(
                [Geq(beta, gammas[i])]
                + [disj([Gt(alpha, g), Gt(beta, g)]) for g in gammas[i + 1 :]]
            )
        disjuncts.append(conj(prefix + [psi]))
    return disj(disjuncts)


def build_rl(
    R: TRS,
    k: int,
    budget: int = DEFAULT_NODE_BUDGET,
    instance_cap: int = 64,
) -> tuple[Formula, list[tuple[object, list[JoinInstance]]]]:
    """The rule-labeling constraint of R at join bound k.

    Returns the formula together with, per overlap, the minimal join instances
    that produced its disjunction (witness data for proof traces). An overlap
    whose critical pair has no k-join contributes an unsatisfiable conjunct.
    """
    conjuncts: list[Formula] = []
    witnesses: list[tuple[object, list[JoinInstance]]] = []
    for o in overlaps(R):
        cp = critical_pair_of(o)
        instances = join_instances(R, cp.left, cp.right, k, budget)[:instance_cap]
        witnesses.append((o, instances))
        conjuncts.append(
            disj(
                conj(
                    [
                        build_phi(o.inner.index, o.outer.index, inst.left_seq),
                        build_phi(o.outer.index, o.inner.index, inst.right_seq),
                    ]
                )
                for inst in instances
            )
        )
    return conj(conjuncts), witnesses


def _solve_by_enumeration(f: Formula, involved: list[int]) -> Optional[LevelMap]:
    m = len(involved)
    for levels in product(range(m), repeat=m):
        assignment = dict(zip(involved, levels))
        if evaluate(f, assignment):
            return assignment
    return None


def _solve_by_backtracking(f: Formula, involved: list[int]) -> Optional[LevelMap]:
    # complete search over atom choices: pick one disjunct per Or, keep the
    # chosen strict edges acyclic, then read levels off the resulting DAG
    succ: dict[int, set[int]] = {i: set() for i in involved}

    def reaches(a: int, b: int, seen: set[int]) -> bool:
        if a == b:
            return True
        seen.add(a)
        return any(c not in seen and reaches(c, b, seen) for c in succ[a])

    def solve(goals: list[Formula]) -> bool:
        if not goals:
            return True
        g, rest = goals[0], goals[1:]
        if isinstance(g, Top):
            return solve(rest)
        if isinstance(g, Bottom):
            return False
        if isinstance(g, And):
            return solve(list(g.parts) + rest)
        if isinstance(g, Or):
            return any(solve([p] + rest) for p in g.parts)
        if isinstance(g, Geq) and g.a == g.b:
            return solve(rest)
        a, b = g.a, g.b
        if a == b:
            return False
        if reaches(b, a, set()):
            return False
        added = b not in succ[a]
        if added:
            succ[a].add(b)
        if solve(rest):
            return True
        if added:
            succ[a].remove(b)
        return False

    if not solve([f]):
        return None

    levels: LevelMap = {}

    def height(a: int) -> int:
        if a not in levels:
            levels[a] = 1 + max((height(b) for b in succ[a]), default=-1)
        return levels[a]

    for i in involved:
        height(i)
    return levels


def solve_precedence(f: Formula, n_rules: int) -> Optional[LevelMap]:
    """A level map over all rule indices satisfying f, or None if unsatisfiable."""
    involved = sorted(atom_indices(f))
    if len(involved) <= 7:
        partial = _solve_by_enumeration(f, involved)
    else:
        partial = _solve_by_backtracking(f, involved)
    if partial is None:
        return None
    full = {i: 0 for i in range(n_rules)}
    full.update(partial)
    return full


def check_rule_labeling(
    R: TRS,
    k: int = 4,
    budget: int = DEFAULT_NODE_BUDGET,
    instance_cap: int = 64,
) -> "Verdict":
    """Confluence of a linear TRS via a satisfiable rule-labeling constraint."""
    if not R.is_linear():
        return maybe("rule-labeling", reason="not linear")
    try:
        formula, witnesses = build_rl(R, k, budget, instance_cap)
    except ResourceLimitError as e:
        return maybe("rule-labeling", reason="resource limit", detail=str(e))
    levels = solve_precedence(formula, len(R))
    if levels is None:
        return maybe("rule-labeling", reason=f"unsatisfiable at k={k}")
    return yes(
        "rule-labeling",
        level_map=levels,
        formula=formula,
        joins=[
            {
                "inner": o.inner.index,
                "outer": o.outer.index,
                "pos": o.pos,
                "instances": instances,
            }
            for o, instances in witnesses
        ],
    )
