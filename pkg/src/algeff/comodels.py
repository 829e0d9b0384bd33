"""Comodels: the external environments programs run against.

A cointerpretation equips a finite world with one cooperation
P x |W| -> A x |W| per covered operation.  Running an effect tree against a
world threads the world through the cooperations until a leaf is reached
(Done) or an uncovered operation surfaces (Stuck).  Validating a comodel
checks every equation pointwise over the world.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any, Callable, Mapping

from .errors import (
    ImpossibleCooperation,
    NonEnumerableWorld,
    UncoveredOperation,
    UnknownOperation,
)
from .free import FreeElement
from .terms import OpNode, Theory, Tree, tree_ops
from .theories import choice_theory
from .universe import Enum, Fin, FiniteUniverse


@dataclass(frozen=True, eq=False)
class Cointerpretation:
    """A finite world with cooperations for a subset of a theory's operations.

    Coverage may be partial: some operations (abort, say) admit no
    cooperation at all.  An operation with empty arity can only be covered
    when the world itself is empty, since its cooperation would have to
    produce an element of the empty set.
    """

    theory: Theory
    world: FiniteUniverse
    coops: Mapping[str, Callable[[Any, Any], tuple]]

    def __post_init__(self):
        for name in self.coops:
            decl = self.theory.op(name)
            if decl.arity.is_empty() and not self.world.is_empty():
                raise ImpossibleCooperation(
                    f"operation {name!r} has empty arity; no cooperation into it "
                    "exists over a nonempty world"
                )

    def covers(self, op: str) -> bool:
        return op in self.coops


@dataclass(frozen=True)
class Done:
    value: Any
    world: Any


@dataclass(frozen=True)
class Stuck:
    op: str
    param: Any
    world: Any


RunOutcome = Done | Stuck


@dataclass(frozen=True)
class ComodelViolation:
    equation: str
    param: Any
    world: Any
    lhs_outcome: RunOutcome = None
    rhs_outcome: RunOutcome = None


def cointerpret_tree(w0, t: Tree, c: Cointerpretation) -> RunOutcome:
    """Run a tree from world w0: leaves finish, covered operations step the
    world, the first uncovered operation gets reported as Stuck."""
    world = w0
    while isinstance(t, OpNode):
        coop = c.coops.get(t.op)
        if coop is None:
            if not c.theory.has_op(t.op):
                raise UnknownOperation(f"tree performs undeclared operation {t.op!r}")
            return Stuck(t.op, t.param, world)
        a, world = coop(t.param, world)
        t = t.kont[c.theory.op(t.op).arity.index_of(a)]
    return Done(t.value, world)


def validate_comodel(c: Cointerpretation) -> ComodelViolation | None:
    """Check every equation of the theory against the comodel, pointwise
    over parameters and worlds; None means every law holds."""
    if not isinstance(c.world, FiniteUniverse):
        raise NonEnumerableWorld("comodel validation needs an enumerable world")
    for eq in c.theory.eqs:
        trees = [(p, eq.lhs(p), eq.rhs(p)) for p in eq.param_universe.iter_elements()]
        used = set()
        for _, lhs, rhs in trees:
            used |= tree_ops(lhs) | tree_ops(rhs)
        missing = sorted(used - set(c.coops))
        if missing:
            raise UncoveredOperation(
                f"equation {eq.name!r} mentions uncovered operations {missing}"
            )
        for p, lhs, rhs in trees:
            for w in c.world.iter_elements():
                lo = cointerpret_tree(w, lhs, c)
                ro = cointerpret_tree(w, rhs, c)
                if lo != ro:
                    return ComodelViolation(eq.name, p, w, lo, ro)
    return None


def tensor_run(m_tree: FreeElement, w0, c: Cointerpretation) -> RunOutcome:
    """Run a free-model element against a world.

    This is cointerpretation of the representative; when the comodel is
    valid, congruent representatives give identical outcomes.
    """
    return cointerpret_tree(w0, m_tree.tree, c)


# ---------------------------------------------------------------------------
# Stock comodels


def state_comodel(theory: Theory) -> Cointerpretation:
    """The canonical single-state comodel: the world is the state itself,
    get reads it and put replaces it."""
    s = theory.op("get").arity
    return Cointerpretation(
        theory,
        s,
        {
            "get": lambda p, w: (w, w),
            "put": lambda p, w: ((), p),
        },
    )


def alternating_choice_comodel() -> Cointerpretation:
    """A deterministic bit stream alternating false, true, false, ...;
    validation rejects it (no stream satisfies commutativity)."""
    return Cointerpretation(
        choice_theory(),
        Fin(2),
        {"choose": lambda p, w: (bool(w), 1 - w)},
    )


def transcript_label(items: tuple) -> str:
    return "[" + ", ".join(json.dumps(x) for x in items) + "]"


def transcript_universe(s: FiniteUniverse, max_len: int) -> Enum:
    """All output transcripts over ``s`` of length at most ``max_len``,
    encoded as their rendered labels."""
    labels = []
    level = [()]
    labels.append(transcript_label(()))
    for _ in range(max_len):
        level = [items + (x,) for items in level for x in s.iter_elements()]
        labels.extend(transcript_label(items) for items in level)
    return Enum(tuple(labels))


def printer_comodel(theory: Theory, s: FiniteUniverse, max_len: int) -> Cointerpretation:
    """A bounded output transcript for print; a full transcript absorbs
    further prints so the cooperation stays total."""
    world = transcript_universe(s, max_len)
    decode = {}
    level = [()]
    decode[transcript_label(())] = ()
    for _ in range(max_len):
        level = [items + (x,) for items in level for x in s.iter_elements()]
        for items in level:
            decode[transcript_label(items)] = items

    def do_print(p, w):
        items = decode[w]
        if len(items) < max_len:
            items = items + (p,)
        return (), transcript_label(items)

    return Cointerpretation(theory, world, {"print": do_print})


def reader_comodel(theory: Theory, feed: tuple) -> Cointerpretation:
    """A fixed input sequence with a cursor world; an exhausted feed keeps
    serving its last entry."""
    if not feed:
        raise ValueError("reader comodel needs a nonempty feed")

    def do_read(p, w):
        return feed[min(w, len(feed) - 1)], min(w + 1, len(feed))

    return Cointerpretation(theory, Fin(len(feed) + 1), {"read": do_read})
