"""First-order terms, positions, substitutions, matching and unification.

Terms are immutable and hashable. Positions are tuples of 1-based argument
indices; the empty tuple addresses the root. Substitutions are plain dicts
from variable name to term and never contain identity bindings.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Optional

Position = tuple[int, ...]
EPSILON: Position = ()


class Term:
    __slots__ = ()


@dataclass(frozen=True, slots=True)
class Var(Term):
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True, slots=True)
class Fun(Term):
    symbol: str
    args: tuple[Term, ...] = ()

    def __str__(self) -> str:
        if not self.args:
            return self.symbol
        return f"{self.symbol}({','.join(map(str, self.args))})"


Subst = dict[str, Term]


def variables(t: Term) -> set[str]:
    if isinstance(t, Var):
        return {t.name}
    out: set[str] = set()
    for a in t.args:
        out |= variables(a)
    return out


def variable_occurrences(t: Term) -> list[str]:
    """Variable names in left-to-right order, with repetitions."""
    if isinstance(t, Var):
        return [t.name]
    out: list[str] = []
    for a in t.args:
        out.extend(variable_occurrences(a))
    return out


def term_size(t: Term) -> int:
    if isinstance(t, Var):
        return 1
    return 1 + sum(term_size(a) for a in t.args)


def iter_positions(t: Term) -> Iterator[tuple[Position, Term]]:
    """All (position, subterm) pairs in outermost-leftmost (preorder) order."""
    stack: list[tuple[Position, Term]] = [(EPSILON, t)]
    while stack:
        p, s = stack.pop()
        yield p, s
        if isinstance(s, Fun):
            for i in range(len(s.args), 0, -1):
                stack.append((p + (i,), s.args[i - 1]))


def positions(t: Term) -> tuple[set[Position], set[Position]]:
    """Partition the positions of t into function positions and variable positions."""
    fun_pos: set[Position] = set()
    var_pos: set[Position] = set()
    for p, s in iter_positions(t):
        (fun_pos if isinstance(s, Fun) else var_pos).add(p)
    return fun_pos, var_pos


def subterm_at(t: Term, p: Position) -> Term:
    for i in p:
        if not isinstance(t, Fun) or not 1 <= i <= len(t.args):
            raise ValueError(f"invalid position {p} in {t}")
        t = t.args[i - 1]
    return t


def replace_at(t: Term, p: Position, u: Term) -> Term:
    if not p:
        return u
    i = p[0]
    if not isinstance(t, Fun) or not 1 <= i <= len(t.args):
        raise ValueError(f"invalid position {p} in {t}")
    args = list(t.args)
    args[i - 1] = replace_at(args[i - 1], p[1:], u)
    return Fun(t.symbol, tuple(args))


def apply_subst(sigma: Subst, t: Term) -> Term:
    if isinstance(t, Var):
        return sigma.get(t.name, t)
    if not sigma:
        return t
    return Fun(t.symbol, tuple(apply_subst(sigma, a) for a in t.args))


def _strip_identities(sigma: Subst) -> Subst:
    return {x: s for x, s in sigma.items() if not (isinstance(s, Var) and s.name == x)}


def match(pattern: Term, subject: Term) -> Optional[Subst]:
    """Substitution sigma with pattern*sigma == subject, or None."""
    sigma: Subst = {}
    stack = [(pattern, subject)]
    while stack:
        p, s = stack.pop()
        if isinstance(p, Var):
            bound = sigma.get(p.name)
            if bound is None:
                sigma[p.name] = s
            elif bound != s:
                return None
        elif isinstance(s, Fun) and p.symbol == s.symbol and len(p.args) == len(s.args):
            stack.extend(zip(p.args, s.args))
        else:
            return None
    return _strip_identities(sigma)


def _occurs(name: str, t: Term) -> bool:
    if isinstance(t, Var):
        return t.name == name
    return any(_occurs(name, a) for a in t.args)


def unify(s: Term, t: Term) -> Optional[Subst]:
    """Idempotent most general unifier of s and t (occurs check on), or None."""
    sigma: Subst = {}
    queue = [(s, t)]
    while queue:
        a, b = queue.pop()
        a = apply_subst(sigma, a)
        b = apply_subst(sigma, b)
        if a == b:
            continue
        if isinstance(a, Fun) and isinstance(b, Var):
            a, b = b, a
        if isinstance(a, Var):
            if _occurs(a.name, b):
                return None
            binding = {a.name: b}
            sigma = {x: apply_subst(binding, u) for x, u in sigma.items()}
            sigma[a.name] = b
        elif a.symbol == b.symbol and len(a.args) == len(b.args):
            queue.extend(zip(a.args, b.args))
        else:
            return None
    return _strip_identities(sigma)


def rename_vars(t: Term, mapping: dict[str, str]) -> Term:
    if isinstance(t, Var):
        return Var(mapping.get(t.name, t.name))
    return Fun(t.symbol, tuple(rename_vars(a, mapping) for a in t.args))
