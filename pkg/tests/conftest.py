"""Shared fixtures: the small rewrite systems used throughout the suite."""

from __future__ import annotations

import re
from pathlib import Path

import pytest

from ddrt import TRS, trs
from ddrt.interpretations import MatrixInterpretation
from ddrt.terms import Fun, Term, Var

DATA_DIR = Path(__file__).parent / "data"

_TOKEN = re.compile(r"[^\s(),]+|[(),]")

DEFAULT_VARS = frozenset({"x", "y", "z"})


def term(text: str, variables: frozenset[str] = DEFAULT_VARS) -> Term:
    """Parse a term from f(g(x),a) notation; names in `variables` are variables."""
    tokens = _TOKEN.findall(text)
    pos = 0

    def parse() -> Term:
        nonlocal pos
        name = tokens[pos]
        pos += 1
        if pos < len(tokens) and tokens[pos] == "(":
            pos += 1
            args: list[Term] = []
            while tokens[pos] != ")":
                args.append(parse())
                if tokens[pos] == ",":
                    pos += 1
            pos += 1
            return Fun(name, tuple(args))
        if name in variables:
            return Var(name)
        return Fun(name, ())

    result = parse()
    assert pos == len(tokens), f"trailing tokens in {text!r}"
    return result


def system(*rules: str) -> TRS:
    """Build a TRS from "lhs -> rhs" strings."""
    pairs = []
    for rule_text in rules:
        lhs_text, rhs_text = rule_text.split("->")
        pairs.append((term(lhs_text.strip()), term(rhs_text.strip())))
    return trs(pairs)


def data_path(name: str) -> str:
    return str(DATA_DIR / name)


@pytest.fixture(scope="session")
def stream() -> TRS:
    """The linear stream system over nat/inc/hd/tl with one critical pair."""
    return system(
        "nat -> :(0,inc(nat))",
        "hd(:(x,y)) -> x",
        "tl(:(x,y)) -> y",
        "inc(:(x,y)) -> :(s(x),inc(y))",
        "inc(tl(nat)) -> tl(inc(nat))",
    )


@pytest.fixture(scope="session")
def stream_d() -> TRS:
    """The stream system extended with a duplicating rule for d."""
    return system(
        "nat -> :(0,inc(nat))",
        "hd(:(x,y)) -> x",
        "tl(:(x,y)) -> y",
        "inc(:(x,y)) -> :(s(x),inc(y))",
        "inc(tl(nat)) -> tl(inc(nat))",
        "d(:(x,y)) -> :(x,:(x,d(y)))",
    )


@pytest.fixture(scope="session")
def nested_g() -> TRS:
    """Left-linear, nonterminating, confluent: g(a) grows forever."""
    return system(
        "f(g(x)) -> f(h(x,x))",
        "g(a) -> g(g(a))",
        "h(a,a) -> g(g(a))",
    )


@pytest.fixture(scope="session")
def nonlinear_f() -> TRS:
    """Left-linear but not right-linear; non-confluent via a conversion."""
    return system(
        "f(a,a) -> c",
        "f(b,x) -> f(x,x)",
        "f(x,b) -> f(x,x)",
        "a -> b",
    )


@pytest.fixture(scope="session")
def toggle() -> TRS:
    """Non-confluent: a and b swap forever while f collapses differently."""
    return system("f(a) -> c", "f(b) -> d", "a -> b", "b -> a")


@pytest.fixture(scope="session")
def nonleftlinear() -> TRS:
    """Non-left-linear and non-confluent: f(c,c) diverges on a and b."""
    return system("f(x,x) -> a", "f(x,g(x)) -> b", "c -> g(c)")


@pytest.fixture(scope="session")
def fork() -> TRS:
    """The minimal non-confluent system with two distinct normal forms."""
    return system("a -> b", "a -> c")


@pytest.fixture(scope="session")
def diamond() -> TRS:
    """Terminating and confluent: both branches meet at d."""
    return system("a -> b", "a -> c", "b -> d", "c -> d")


@pytest.fixture(scope="session")
def ortho() -> TRS:
    """An orthogonal system with a duplicating rule."""
    return system("f(x) -> g(x,x)", "a -> b")


@pytest.fixture(scope="session")
def stream_d_model() -> MatrixInterpretation:
    """A hand-checked dimension-2 interpretation weakly orienting stream_d
    and strictly orienting both of its critical pair steps."""
    i2 = ((1, 0), (0, 1))
    return MatrixInterpretation(
        dim=2,
        funcs={
            "nat": ((), (0, 1)),
            "0": ((), (0, 0)),
            "inc": ((((1, 0), (1, 0)),), (0, 0)),
            "hd": ((i2,), (0, 0)),
            "tl": ((((1, 1), (0, 1)),), (0, 0)),
            "s": ((((1, 1), (0, 0)),), (0, 0)),
            "d": ((((1, 1), (1, 1)),), (0, 0)),
            ":": ((((1, 1), (1, 1)), i2), (0, 0)),
        },
    )
