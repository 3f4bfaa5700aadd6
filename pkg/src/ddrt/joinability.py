"""Bounded joinability and minimal k-join instances.

A k-join instance of (s, t) is a pair of rule-label sequences, each of length
at most k, rewriting s and t to a common term. Label sequences are recorded in
application order from their own side, so the first right label is the rule
applied to t. Instances are identified by their label sequences; positions are
kept in the traces only.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ResourceLimitError
from .rewriting import DEFAULT_NODE_BUDGET, TRS, one_step_reducts
from .terms import Position, Term

Trace = tuple[tuple[Position, Term], ...]


@dataclass(frozen=True, eq=False)
class JoinInstance:
    left_seq: tuple[int, ...]
    right_seq: tuple[int, ...]
    meet: Term
    left_trace: Trace
    right_trace: Trace

    @property
    def seqs(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        return self.left_seq, self.right_seq


def embedding_leq(a: tuple[int, ...], b: tuple[int, ...]) -> bool:
    """True iff a is a (not necessarily contiguous) subsequence of b."""
    it = iter(b)
    return all(x in it for x in a)


def _label_reachable(
    R: TRS, t: Term, k: int, budget: int
) -> dict[Term, dict[tuple[int, ...], Trace]]:
    """Map each term reachable within k steps to its label sequences and traces."""
    reached: dict[Term, dict[tuple[int, ...], Trace]] = {t: {(): ()}}
    frontier: list[tuple[Term, tuple[int, ...], Trace]] = [(t, (), ())]
    states = 1
    for _ in range(k):
        nxt: list[tuple[Term, tuple[int, ...], Trace]] = []
        for s, seq, trace in frontier:
            for idx, pos, u in sorted(one_step_reducts(R, s)):
                useq = seq + (idx,)
                per_term = reached.setdefault(u, {})
                if useq in per_term:
                    continue
                per_term[useq] = utrace = trace + ((pos, u),)
                states += 1
                if states > budget:
                    raise ResourceLimitError(
                        f"joinability search exceeded {budget} states"
                    )
                nxt.append((u, useq, utrace))
        frontier = nxt
    return reached


def join_instances(
    R: TRS, s: Term, t: Term, k: int, budget: int = DEFAULT_NODE_BUDGET
) -> list[JoinInstance]:
    """All minimal k-join instances of (s, t), deduplicated by label sequences."""
    left = _label_reachable(R, s, k, budget)
    right = _label_reachable(R, t, k, budget)
    candidates: dict[tuple[tuple[int, ...], tuple[int, ...]], JoinInstance] = {}
    for meet in left.keys() & right.keys():
        for lseq, ltrace in left[meet].items():
            for rseq, rtrace in right[meet].items():
                key = (lseq, rseq)
                if key not in candidates:
                    candidates[key] = JoinInstance(lseq, rseq, meet, ltrace, rtrace)
    minimal = [
        inst
        for key, inst in candidates.items()
        if not any(
            other != key
            and embedding_leq(other[0], key[0])
            and embedding_leq(other[1], key[1])
            for other in candidates
        )
    ]
    minimal.sort(key=lambda i: (len(i.left_seq) + len(i.right_seq), i.seqs))
    return minimal


def joinable_within(
    R: TRS, s: Term, t: Term, k: int, budget: int = DEFAULT_NODE_BUDGET
) -> JoinInstance | None:
    """Some k-join instance of (s, t), or None if none exists within the bound."""
    instances = join_instances(R, s, t, k, budget)
    return instances[0] if instances else None
