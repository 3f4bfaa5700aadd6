"""Independent checkers and oracles shared by the test modules.

Everything here re-derives results from first principles (direct recursion,
exhaustive enumeration) instead of reusing the library's own search code, so
that a passing replay actually certifies a verdict.
"""

from __future__ import annotations

import random
from itertools import product

from ddrt import TRS
from ddrt.interpretations import compare_forms, interpret_term
from ddrt.rewriting import is_normal_form, one_step_reducts
from ddrt.rule_labeling import And, Bottom, Formula, Geq, Gt, Or, Top
from ddrt.terms import Fun, Term, Var


def eval_formula(f: Formula, levels: dict[int, int]) -> bool:
    """Evaluate a precedence formula directly; Geq is the reflexive closure."""
    if isinstance(f, Top):
        return True
    if isinstance(f, Bottom):
        return False
    if isinstance(f, And):
        return all(eval_formula(p, levels) for p in f.parts)
    if isinstance(f, Or):
        return any(eval_formula(p, levels) for p in f.parts)
    if isinstance(f, Gt):
        return levels[f.a] > levels[f.b]
    if isinstance(f, Geq):
        return f.a == f.b or levels[f.a] > levels[f.b]
    raise TypeError(f"unknown formula node {f!r}")


def strict_orders(indices: tuple[int, ...]):
    """All strict partial orders on `indices` as sets of (greater, smaller)."""
    pairs = [(a, b) for a in indices for b in indices if a != b]
    for bits in product((False, True), repeat=len(pairs)):
        order = {p for p, keep in zip(pairs, bits) if keep}
        transitive = all(
            (a, c) in order
            for a, b in order
            for b2, c in order
            if b == b2 and a != c
        )
        acyclic = not any((b, a) in order for a, b in order)
        if transitive and acyclic:
            yield order


def eval_formula_order(f: Formula, order: set[tuple[int, int]]) -> bool:
    """Evaluate a precedence formula against an explicit strict order."""
    if isinstance(f, Top):
        return True
    if isinstance(f, Bottom):
        return False
    if isinstance(f, And):
        return all(eval_formula_order(p, order) for p in f.parts)
    if isinstance(f, Or):
        return any(eval_formula_order(p, order) for p in f.parts)
    if isinstance(f, Gt):
        return (f.a, f.b) in order
    if isinstance(f, Geq):
        return f.a == f.b or (f.a, f.b) in order
    raise TypeError(f"unknown formula node {f!r}")


def replay_steps(
    R: TRS, start: Term, labels: tuple[int, ...], trace
) -> Term:
    """Re-validate a label/trace pair step by step via one_step_reducts."""
    current = start
    assert len(labels) == len(trace)
    for label, (pos, nxt) in zip(labels, trace):
        assert (label, pos, nxt) in one_step_reducts(R, current), (
            f"claimed step {label}@{pos} from {current} to {nxt} is not a rewrite step"
        )
        current = nxt
    return current


def replay_join(R: TRS, left: Term, right: Term, inst) -> None:
    """Both traces of a join instance must end at the claimed meet."""
    assert replay_steps(R, left, inst.left_seq, inst.left_trace) == inst.meet
    assert replay_steps(R, right, inst.right_seq, inst.right_trace) == inst.meet


def replay_rounds(chain: list[dict]) -> tuple[list, list]:
    """Certify the rounds of a rule-removal chain; returns what remains.

    Every round must weakly orient all remaining rules and strictly orient
    all removed rules; bookkeeping between rounds must be consistent.
    """
    strict = list(chain[0]["strict_before"]) if chain else []
    weak = list(chain[0]["weak_before"]) if chain else []
    for entry in chain:
        assert list(entry["strict_before"]) == strict
        assert list(entry["weak_before"]) == weak
        M = entry["interpretation"]
        removed = list(entry["removed"])
        assert removed, "a round must remove at least one rule"
        for rule in strict + weak:
            cmp = compare_forms(interpret_term(M, rule.lhs), interpret_term(M, rule.rhs))
            assert cmp in ("strict", "weak"), f"{rule} not weakly oriented"
        for rule in removed:
            assert rule in strict + weak
            cmp = compare_forms(interpret_term(M, rule.lhs), interpret_term(M, rule.rhs))
            assert cmp == "strict", f"removed rule {rule} not strictly oriented"
        strict = [r for r in strict if r not in removed]
        weak = [r for r in weak if r not in removed]
    return strict, weak


def replay_relative(details: dict) -> None:
    """Certify the relative-termination part of a YES verdict."""
    strict, weak = replay_rounds(details["chain"])
    union = details.get("union_termination")
    if union is None:
        assert not strict, "chain ended with strict rules left over"
        return
    # removal stalled but the remaining union was proved terminating outright
    assert union != "external", "external proofs cannot be replayed"
    assert {(r.lhs, r.rhs) for r in union[0]["strict_before"]} == {
        (r.lhs, r.rhs) for r in strict + weak
    }, "union proof covers different rules than what remained"
    left_strict, left_weak = replay_rounds(union)
    assert not left_strict and not left_weak, "union chain left rules unoriented"


def make_random_term(
    rng: random.Random,
    signature: list[tuple[str, int]],
    variables: list[str],
    depth: int,
) -> Term:
    """A random term of bounded depth over the given signature."""
    leaves = [(v, -1) for v in variables] + [(s, 0) for s, n in signature if n == 0]
    assert leaves, "signature needs a constant or a variable"
    if depth <= 0:
        name, arity = rng.choice(leaves)
        return Var(name) if arity == -1 else Fun(name, ())
    name, arity = rng.choice(signature + [(v, -1) for v in variables])
    if arity == -1:
        return Var(name)
    args = tuple(
        make_random_term(rng, signature, variables, depth - 1) for _ in range(arity)
    )
    return Fun(name, args)


def check_normal_form(R: TRS, t: Term) -> bool:
    return is_normal_form(R, t)
