"""Relative termination via rule removal with matrix interpretations.

Interpretations are linear functions over natural-number vectors: each symbol
gets one square matrix per argument and a constant vector. The upper-left
entry of every argument matrix is at least 1, which keeps the induced strict
order closed under contexts. A term denotes a linear form (matrix coefficient
per variable plus a constant vector); rules are oriented by comparing forms
entrywise, strictly when the first constant component decreases.
"""

from __future__ import annotations

import subprocess
import tempfile
from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import Optional

import numpy as np

from .errors import ResourceLimitError
from .rewriting import TRS, Rule
from .terms import Fun, Term, Var, iter_positions, match
from .verdict import Verdict, maybe, yes

Matrix = tuple[tuple[int, ...], ...]
Vector = tuple[int, ...]

STRICT = "strict"
WEAK = "weak"
INCOMPARABLE = "incomparable"

DEFAULT_SEARCH_BUDGET = 400_000


def identity(dim: int) -> Matrix:
    return tuple(tuple(1 if i == j else 0 for j in range(dim)) for i in range(dim))


def zero_vector(dim: int) -> Vector:
    return (0,) * dim


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    return tuple(
        tuple(sum(a[i][k] * b[k][j] for k in range(len(b))) for j in range(len(b[0])))
        for i in range(len(a))
    )


def mat_add(a: Matrix, b: Matrix) -> Matrix:
    return tuple(tuple(x + y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def mat_vec(a: Matrix, v: Vector) -> Vector:
    return tuple(sum(row[k] * v[k] for k in range(len(v))) for row in a)


def vec_add(u: Vector, v: Vector) -> Vector:
    return tuple(x + y for x, y in zip(u, v))


def mat_geq(a: Matrix, b: Matrix) -> bool:
    return all(x >= y for ra, rb in zip(a, b) for x, y in zip(ra, rb))


@dataclass(frozen=True)
class MatrixInterpretation:
    dim: int
    funcs: dict[str, tuple[tuple[Matrix, ...], Vector]]  # symbol -> (arg matrices, constant)

    def __post_init__(self) -> None:
        for symbol, (mats, _) in self.funcs.items():
            for m in mats:
                if m[0][0] < 1:
                    raise ValueError(f"{symbol}: argument matrix with zero upper-left entry")


@dataclass(frozen=True)
class LinearForm:
    coeffs: dict[str, Matrix]
    const: Vector


@dataclass(frozen=True)
class RelTermProblem:
    strict: TRS
    weak: TRS


def interpret_term(M: MatrixInterpretation, t: Term) -> LinearForm:
    if isinstance(t, Var):
        return LinearForm({t.name: identity(M.dim)}, zero_vector(M.dim))
    if t.symbol not in M.funcs:
        raise KeyError(f"symbol {t.symbol} not interpreted")
    mats, const = M.funcs[t.symbol]
    coeffs: dict[str, Matrix] = {}
    for mat, arg in zip(mats, t.args):
        sub = interpret_term(M, arg)
        const = vec_add(const, mat_vec(mat, sub.const))
        for x, c in sub.coeffs.items():
            prod = mat_mul(mat, c)
            coeffs[x] = mat_add(coeffs[x], prod) if x in coeffs else prod
    return LinearForm(coeffs, const)


def compare_forms(l: LinearForm, r: LinearForm) -> str:
    dim = len(l.const)
    zero = tuple(zero_vector(dim) for _ in range(dim))
    for x in l.coeffs.keys() | r.coeffs.keys():
        if not mat_geq(l.coeffs.get(x, zero), r.coeffs.get(x, zero)):
            return INCOMPARABLE
    if not all(a >= b for a, b in zip(l.const, r.const)):
        return INCOMPARABLE
    return STRICT if l.const[0] > r.const[0] else WEAK


def _signature(rules: list[Rule]) -> dict[str, int]:
    sig: dict[str, int] = {}
    for r in rules:
        for t in (r.lhs, r.rhs):
            for _, s in iter_positions(t):
                if isinstance(s, Fun):
                    sig[s.symbol] = len(s.args)
    return sig


@lru_cache(maxsize=None)
def _candidates(arity: int, dim: int, coef_max: int, const_max: int,
                weight_cap: Optional[int] = None):
    """Interpretation candidates for one symbol, sparsest first.

    With a weight cap only candidates whose entries sum to at most the cap
    are kept; this bounds the otherwise huge high-dimensional spaces.
    """
    entries = range(coef_max + 1)
    mats = [
        tuple(
            tuple(row[i * dim : (i + 1) * dim]) for i in range(dim)
        )
        for row in product(entries, repeat=dim * dim)
    ]
    mats = [m for m in mats if m[0][0] >= 1]
    consts = [tuple(v) for v in product(range(const_max + 1), repeat=dim)]

    def weight(combo, const):
        return sum(x for m in combo for row in m for x in row) + sum(const)

    out = [
        (weight(combo, const), (combo, const))
        for combo in product(mats, repeat=arity)
        for const in consts
        if weight_cap is None or weight(combo, const) <= weight_cap
    ]
    # sparse candidates first: solutions tend to use few nonzero entries, and
    # the node budget cuts off the dense tail anyway
    out.sort(key=lambda c: c[0])
    return out


def _rule_symbols(all_rules: list[Rule]) -> list[set[str]]:
    return [
        {s.symbol for _, s in iter_positions(r.lhs) if isinstance(s, Fun)}
        | {s.symbol for _, s in iter_positions(r.rhs) if isinstance(s, Fun)}
        for r in all_rules
    ]


def _assignment_plan(
    sig: dict[str, int],
    rule_symbols: list[set[str]],
    n_cands: dict[str, int],
) -> tuple[list[str], list[int], list[list[int]]]:
    """Symbol assignment order (complete the cheapest rule first, so that
    orientation constraints prune the search as early as possible), the depth
    at which each rule completes, and the rules completing at each depth."""
    order: list[str] = []
    assigned: set[str] = set()
    remaining = [i for i in range(len(rule_symbols)) if rule_symbols[i]]
    while remaining:
        def cost(i: int) -> tuple[int, int]:
            prod = 1
            for s in rule_symbols[i] - assigned:
                prod *= n_cands[s]
            return prod, i

        best = min(remaining, key=cost)
        order.extend(sorted(rule_symbols[best] - assigned, key=lambda s: n_cands[s]))
        assigned |= rule_symbols[best]
        remaining = [i for i in remaining if rule_symbols[i] - assigned]
    order.extend(sorted(sig.keys() - assigned, key=lambda s: n_cands[s]))
    depth_of = {s: d for d, s in enumerate(order)}
    completes_at = [max(depth_of[s] for s in syms) for syms in rule_symbols]
    rules_at_depth: list[list[int]] = [[] for _ in order]
    for i, d in enumerate(completes_at):
        rules_at_depth[d].append(i)
    return order, completes_at, rules_at_depth


def _search_positions(
    strict_rules: list[Rule],
    weak_rules: list[Rule],
    dim: int,
    coef_max: int,
    const_max: Optional[int] = None,
    budget: int = DEFAULT_SEARCH_BUDGET,
    weight_extra: Optional[int] = None,
) -> Optional[tuple[MatrixInterpretation, set[int]]]:
    """Core search; the returned set holds positions into strict + weak.

    Rule indices are not used for identification here because the two sides
    of a relative problem (e.g. CPS(R) versus R) number their rules
    independently. A weight_extra of w restricts each symbol to candidates
    with entry sum at most arity + w (sparse search with vectorized rule
    checks).
    """
    if const_max is None:
        const_max = 2 * coef_max
    if not strict_rules:
        return None
    return _search_batched(
        strict_rules, weak_rules, dim, coef_max, const_max, budget, weight_extra
    )


def _search_batched(
    strict_rules: list[Rule],
    weak_rules: list[Rule],
    dim: int,
    coef_max: int,
    const_max: int,
    budget: int,
    weight_extra: Optional[int],
) -> Optional[tuple[MatrixInterpretation, set[int]]]:
    """Vectorized interpretation search.

    Rule orientations are checked for all candidates of a symbol at once with
    numpy (batch axis = candidate index), and the total entry weight is
    iteratively deepened so sparse solutions surface long before the
    candidate product is exhausted. With a weight_extra, each symbol is
    limited to candidates whose entries sum to at most arity + weight_extra,
    which keeps higher dimensions tractable.
    """
    all_rules = strict_rules + weak_rules
    sig = _signature(all_rules)
    rule_symbols = _rule_symbols(all_rules)
    n_strict = len(strict_rules)

    raw = {
        s: _candidates(
            sig[s], dim, coef_max, const_max,
            None if weight_extra is None else sig[s] + weight_extra,
        )
        for s in sig
    }
    weights = {s: [w for w, _ in raw[s]] for s in sig}
    mats: dict[str, np.ndarray] = {}
    consts: dict[str, np.ndarray] = {}
    for s, cands in raw.items():
        n, arity = len(cands), sig[s]
        if arity:
            mats[s] = np.array(
                [[[list(row) for row in m] for m in combo] for _, (combo, _) in cands],
                dtype=np.int64,
            )
        else:
            mats[s] = np.zeros((n, 0, dim, dim), dtype=np.int64)
        consts[s] = np.array([list(const) for _, (_, const) in cands], dtype=np.int64)

    order, completes_at, rules_at_depth = _assignment_plan(
        sig, rule_symbols, {s: len(raw[s]) for s in sig}
    )
    suffix_min = [0] * (len(order) + 1)
    for d in range(len(order) - 1, -1, -1):
        suffix_min[d] = suffix_min[d + 1] + weights[order[d]][0]

    chosen: dict[str, int] = {}  # symbol -> candidate index
    orientation: dict[int, str] = {}
    nodes = 0
    mask_cache: dict[tuple, tuple[np.ndarray, np.ndarray]] = {}

    def batch_forms(t: Term, batched: str) -> tuple[dict[str, np.ndarray], np.ndarray]:
        """Linear form of t where the batched symbol ranges over all its
        candidates; arrays carry a leading batch axis wherever it occurs."""
        if isinstance(t, Var):
            return {t.name: np.eye(dim, dtype=np.int64)}, np.zeros(dim, dtype=np.int64)
        if t.symbol == batched:
            m, const = mats[t.symbol], consts[t.symbol]
        else:
            i = chosen[t.symbol]
            m, const = mats[t.symbol][i], consts[t.symbol][i]
        coeffs: dict[str, np.ndarray] = {}
        for k, arg in enumerate(t.args):
            sub_coeffs, sub_const = batch_forms(arg, batched)
            mk = m[..., k, :, :]
            const = const + (mk @ sub_const[..., :, None])[..., 0]
            for x, c in sub_coeffs.items():
                p = mk @ c
                coeffs[x] = coeffs[x] + p if x in coeffs else p
        return coeffs, const

    other_syms = {
        (i, s): sorted(rule_symbols[i] - {s})
        for i in range(len(all_rules))
        for s in rule_symbols[i]
    }

    def rule_masks(i: int, batched: str) -> tuple[np.ndarray, np.ndarray]:
        """Per-candidate weak/strict orientation masks for rule i, memoized on
        the assignments of the rule's other symbols."""
        nonlocal nodes
        key = (i, batched, tuple(chosen[s] for s in other_syms[i, batched]))
        hit = mask_cache.get(key)
        if hit is not None:
            return hit
        n = len(raw[batched])
        nodes += 1
        if nodes > budget:
            raise ResourceLimitError(f"interpretation search exceeded {budget} nodes")
        rule = all_rules[i]
        lhs_coeffs, lhs_const = batch_forms(rule.lhs, batched)
        rhs_coeffs, rhs_const = batch_forms(rule.rhs, batched)
        ok = np.ones(n, dtype=bool)
        for x, r_coef in rhs_coeffs.items():
            diff = lhs_coeffs[x] - r_coef
            ok = ok & (diff >= 0).all(axis=(-1, -2))
        const_diff = lhs_const - rhs_const
        ok = ok & (const_diff >= 0).all(axis=-1)
        strict = ok & (const_diff[..., 0] >= 1)
        result = (np.broadcast_to(ok, (n,)), np.broadcast_to(strict, (n,)))
        mask_cache[key] = result
        return result

    last_sym = order[-1]
    last_depth = len(order) - 1

    def _root_only(i: int) -> Optional[tuple[Fun, Fun]]:
        """The rule's sides when the last-assigned symbol heads both and
        occurs nowhere else; such rules admit existential elimination."""
        lhs, rhs = all_rules[i].lhs, all_rules[i].rhs
        if not (isinstance(lhs, Fun) and lhs.symbol == last_sym):
            return None
        if not (isinstance(rhs, Fun) and rhs.symbol == last_sym):
            return None
        for t in (*lhs.args, *rhs.args):
            for _, s in iter_positions(t):
                if isinstance(s, Fun) and s.symbol == last_sym:
                    return None
        return lhs, rhs

    root_only = {i: _root_only(i) for i in rules_at_depth[last_depth]}
    arity_last = sig[last_sym]
    row_cap = (
        arity_last * dim * coef_max if weight_extra is None
        else arity_last + weight_extra
    )
    # row-0 choices for the last symbol's argument matrices (first entry >= 1,
    # constant row cancels on both sides)
    row0_choices = [
        rows
        for rows in product(
            [
                np.array((first,) + rest, dtype=np.int64)
                for first in range(1, coef_max + 1)
                for rest in product(range(coef_max + 1), repeat=dim - 1)
            ],
            repeat=arity_last,
        )
        if sum(int(r.sum()) for r in rows) <= row_cap
    ]

    def lookahead_mask(i: int, batched: str, want_strict: bool) -> np.ndarray:
        """Over the batched symbol's candidates: can ANY candidate for the
        last symbol orient rule i (strictly if requested)? Sound
        overapproximation: rows below the first can always be zero, so only
        row 0 of the last symbol's matrices matters."""
        nonlocal nodes
        fixed = sorted(rule_symbols[i] - {last_sym, batched})
        key = (i, "exists", want_strict, batched, tuple(chosen[s] for s in fixed))
        hit = mask_cache.get(key)
        if hit is not None:
            return hit
        nodes += 1
        if nodes > budget:
            raise ResourceLimitError(f"interpretation search exceeded {budget} nodes")
        lhs, rhs = root_only[i]
        left = [batch_forms(t, batched) for t in lhs.args]
        right = [batch_forms(t, batched) for t in rhs.args]
        exists = np.zeros(1, dtype=bool)
        need = 1 if want_strict else 0
        for rows in row0_choices:
            # row 0 of the oriented difference; deeper rows can be all-zero
            const0 = sum((lc * r).sum(axis=-1) for r, (_, lc) in zip(rows, left))
            const0 = const0 - sum(
                (rc * r).sum(axis=-1) for r, (_, rc) in zip(rows, right)
            )
            ok = const0 >= need
            for x in {v for c, _ in right for v in c}:
                lx = sum(r @ c[x] for r, (c, _) in zip(rows, left) if x in c)
                rx = sum(r @ c[x] for r, (c, _) in zip(rows, right) if x in c)
                ok = ok & ((lx - rx) >= 0).all(axis=-1)
            exists = exists | ok
        n = len(raw[batched])
        result = np.broadcast_to(exists, (n,))
        mask_cache[key] = result
        return result

    def attempt(
        target: int, cap: int
    ) -> Optional[tuple[MatrixInterpretation, set[int]]]:
        if cap < suffix_min[0]:
            return None

        def dfs(depth: int, rem: int) -> Optional[tuple[MatrixInterpretation, set[int]]]:
            nonlocal nodes, cap_cut
            if depth == len(order):
                funcs = {s: raw[s][chosen[s]][1] for s in sig}
                strict_set = {i for i, o in orientation.items() if o == STRICT}
                return MatrixInterpretation(dim, funcs), strict_set
            symbol = order[depth]
            rules_here = rules_at_depth[depth]
            ok = None
            stricts = {}
            for i in rules_here:
                weak_mask, strict_mask = rule_masks(i, symbol)
                mask = strict_mask if i == target else weak_mask
                ok = mask if ok is None else ok & mask
                stricts[i] = strict_mask
            if depth == last_depth - 1:
                for i in rules_at_depth[last_depth]:
                    if root_only[i] is None:
                        continue
                    mask = lookahead_mask(i, symbol, i == target)
                    ok = mask if ok is None else ok & mask
            if ok is not None:
                survivors = np.nonzero(ok)[0].tolist()
            else:
                survivors = range(len(raw[symbol]))
            w_sym = weights[symbol]
            w_rem = rem - suffix_min[depth + 1]
            for ci in survivors:
                w = w_sym[ci]
                if w > w_rem:
                    cap_cut = True
                    break
                nodes += 1
                if nodes > budget:
                    raise ResourceLimitError(
                        f"interpretation search exceeded {budget} nodes"
                    )
                chosen[symbol] = ci
                for i in rules_here:
                    orientation[i] = STRICT if stricts[i][ci] else WEAK
                found = dfs(depth + 1, rem - w)
                if found is not None:
                    return found
                for i in rules_here:
                    orientation.pop(i, None)
                del chosen[symbol]
            return None

        orientation.clear()
        chosen.clear()
        return dfs(0, cap)

    targets = sorted(range(n_strict), key=lambda i: (completes_at[i], i))
    max_weight = sum(weights[s][-1] for s in sig)
    min_weight = sum(weights[s][0] for s in sig)
    if weight_extra is None:
        # full space: one sweep in sparsest-first candidate order
        cap_cut = False
        for target in targets:
            found = attempt(target, max_weight)
            if found is not None:
                return found
        return None
    # capped space: iterative deepening on the total entry weight, so sparse
    # solutions surface long before the candidate product is exhausted
    for cap in range(min_weight, max_weight + 1):
        cap_cut = False
        for target in targets:
            found = attempt(target, cap)
            if found is not None:
                return found
        if not cap_cut:
            # no branch was cut off by the cap, so the space is exhausted
            return None
    return None


def search_interpretation(
    P: RelTermProblem,
    dim: int,
    coef_max: int,
    const_max: Optional[int] = None,
    budget: int = DEFAULT_SEARCH_BUDGET,
) -> Optional[tuple[MatrixInterpretation, set[int]]]:
    """Find an interpretation weakly orienting every rule of the problem and
    strictly orienting at least one strict-side rule.

    Returns the interpretation and the indices of ALL strictly oriented rules
    (from both sides), or None when the bounded space holds no such
    interpretation. Raises ResourceLimitError when the node budget runs out.
    """
    strict_rules = list(P.strict.rules)
    weak_rules = list(P.weak.rules)
    found = _search_positions(strict_rules, weak_rules, dim, coef_max, const_max, budget)
    if found is None:
        return None
    interpretation, positions = found
    all_rules = strict_rules + weak_rules
    return interpretation, {all_rules[i].index for i in positions}


def _fresh_trs(rules: list[Rule]) -> TRS:
    """Re-index and deduplicate rules drawn from systems with clashing indices."""
    seen: set[tuple[Term, Term]] = set()
    fresh: list[Rule] = []
    for r in rules:
        key = (r.lhs, r.rhs)
        if key not in seen:
            seen.add(key)
            fresh.append(Rule(len(fresh), r.lhs, r.rhs))
    return TRS(tuple(fresh))


def has_looping_rule(rules: list[Rule]) -> bool:
    """True if some rule rewrites its own lhs into a term containing an lhs
    instance, an immediate witness of nontermination."""
    for r in rules:
        for _, s in iter_positions(r.rhs):
            if isinstance(s, Fun) and match(r.lhs, s) is not None:
                return True
    return False


def external_termination_check(
    R: TRS, command: Optional[str], timeout: float = 60.0
) -> str:
    """Ask an external prover about termination of R; 'yes', 'no' or 'unknown'."""
    if not R.rules:
        return "yes"
    if not command:
        return "unknown"
    from .tpdb import format_trs

    try:
        with tempfile.NamedTemporaryFile("w", suffix=".trs", delete=False) as fh:
            fh.write(format_trs(R))
            path = fh.name
        proc = subprocess.run(
            command.split() + [path],
            capture_output=True,
            text=True,
            timeout=timeout,
        )
        first = proc.stdout.splitlines()[0].strip() if proc.stdout else ""
    except (OSError, subprocess.SubprocessError, IndexError):
        return "unknown"
    if first == "YES":
        return "yes"
    if first == "NO":
        return "no"
    return "unknown"


def prove_relative_termination(
    P: RelTermProblem,
    dim_max: int = 3,
    coef_max: int = 1,
    budget: int = DEFAULT_SEARCH_BUDGET,
    external_command: Optional[str] = None,
    external_timeout: float = 60.0,
) -> Verdict:
    """Termination of strict/weak by repeated rule removal.

    Each round searches for an interpretation weakly orienting everything and
    strictly orienting part of the strict side; strictly oriented rules are
    removed from BOTH sides. An empty strict side concludes the proof. When
    removal stalls, plain termination of the union is attempted instead.
    The method is sound for YES only; failure yields MAYBE, never NO.
    """
    strict = list(P.strict.rules)
    weak = list(P.weak.rules)
    chain: list[dict] = []
    diagnostics: list[str] = []

    if has_looping_rule(strict):
        return maybe(
            "relative-termination",
            reason="strict component contains a looping rule",
            chain=chain,
        )

    def schedules(n_rules: int):
        # full low-dimensional searches first, then a sparse high-dimensional
        # pass, then larger constants; the sparse pass keeps dimension 3
        # tractable (binary symbols have huge full candidate spaces there)
        yield 1, coef_max, max(2 * coef_max, min(n_rules, 8)), None
        if dim_max >= 2:
            yield 2, coef_max, coef_max, None
        for d in range(3, dim_max + 1):
            yield d, coef_max, coef_max, 3
        if dim_max >= 2:
            yield 2, coef_max, 2 * coef_max, None

    while strict:
        found = None
        for dim, cmax, constmax, extra in schedules(len(strict) + len(weak)):
            try:
                found = _search_positions(
                    strict, weak, dim, cmax, constmax, budget, extra
                )
            except ResourceLimitError as e:
                diagnostics.append(str(e))
            if found is not None:
                break
        if found is None:
            break
        interpretation, removed = found
        combined = strict + weak
        chain.append(
            {
                "interpretation": interpretation,
                "removed": [combined[i] for i in sorted(removed)],
                "strict_before": list(strict),
                "weak_before": list(weak),
            }
        )
        n_strict = len(strict)
        strict = [r for i, r in enumerate(strict) if i not in removed]
        weak = [r for i, r in enumerate(weak) if i + n_strict not in removed]

    if not strict:
        return yes("relative-termination", chain=chain)

    # stalled: try termination of the remaining union outright
    union = _fresh_trs(strict + weak)
    if weak and not has_looping_rule(list(union.rules)):
        sub = prove_relative_termination(
            RelTermProblem(union, TRS(())),
            dim_max,
            coef_max,
            budget,
        )
        if sub.is_yes:
            return yes(
                "relative-termination",
                chain=chain,
                union_termination=sub.details["chain"],
            )
        diagnostics.append("union termination not shown internally")
    if external_command is not None:
        if external_termination_check(
            union, external_command, external_timeout
        ) == "yes":
            return yes("relative-termination", chain=chain, union_termination="external")
        diagnostics.append("external prover inconclusive")
    return maybe(
        "relative-termination",
        reason="no orienting interpretation found",
        diagnostics=diagnostics,
        chain=chain,
    )


def prove_termination(
    R: TRS,
    dim_max: int = 3,
    coef_max: int = 1,
    budget: int = DEFAULT_SEARCH_BUDGET,
    external_command: Optional[str] = None,
    external_timeout: float = 60.0,
) -> Verdict:
    """Plain termination of R (relative termination against the empty system)."""
    if has_looping_rule(list(R.rules)):
        return maybe("termination", reason="looping rule")
    v = prove_relative_termination(
        RelTermProblem(R, TRS(())), dim_max, coef_max, budget
    )
    if v.is_yes:
        return yes("termination", chain=v.details["chain"])
    if external_command is not None:
        if external_termination_check(R, external_command, external_timeout) == "yes":
            return yes("termination", chain=[], external=True)
    return maybe("termination", reason=v.details.get("reason", "not shown"))
