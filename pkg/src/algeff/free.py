"""Free models as effect trees.

Computations returning values from X while performing a theory's operations
are represented by trees over X, understood up to the congruence the
equations generate.  This module provides the monad structure (eta, lift,
sequencing, generic operations), canonical normal forms where a normalizer
is known, and a budgeted congruence search for tree equality elsewhere.
"""

from __future__ import annotations

import itertools
import os
from collections import deque
from dataclasses import dataclass
from enum import Enum as PyEnum
from typing import Callable, Iterator, Mapping

from .errors import EmptyStateUniverse, NoNormalizer, UnboundGenerator, UnknownOperation
from .models import FiniteModel, interpret_term
from .terms import OpNode, Return, Theory, Tree, make_tree_op, sort_key, tree_leaves
from .theories import choice_theory
from .universe import BOOL

DEFAULT_BUDGET = 10000


def default_budget() -> int:
    """Congruence-search step bound; ALGEFF_BUDGET overrides the default."""
    raw = os.environ.get("ALGEFF_BUDGET", "")
    try:
        return int(raw) if raw else DEFAULT_BUDGET
    except ValueError:
        return DEFAULT_BUDGET


@dataclass(frozen=True)
class FreeElement:
    """An element of the free model: a representative tree over a theory.

    Structural equality compares representatives; equality modulo the
    theory is tree_equal_modulo's job.
    """

    theory: Theory
    tree: Tree


def eta(theory: Theory, x) -> FreeElement:
    """The unit: embed a generator as a pure computation."""
    return FreeElement(theory, Return(x))


def generic_op(theory: Theory, op: str, p) -> FreeElement:
    """Perform the operation and return its result: op(p; a. return a)."""
    decl = theory.op(op)
    kont = {a: Return(a) for a in decl.arity.iter_elements()}
    return FreeElement(theory, make_tree_op(theory, op, p, kont))


def _as_function(phi) -> Callable:
    if isinstance(phi, Mapping):
        def lookup(x):
            try:
                return phi[x]
            except KeyError:
                raise UnboundGenerator(f"lifting is undefined on generator {x!r}") from None

        return lookup
    return phi


def lift(phi) -> Callable[[FreeElement], FreeElement]:
    """Kleisli lifting: extend a map X -> Free(Y) to Free(X) -> Free(Y) by
    structural recursion (leaves go through phi, nodes are preserved)."""
    phi_fn = _as_function(phi)

    def lift_tree(t: Tree) -> Tree:
        if isinstance(t, Return):
            return phi_fn(t.value).tree
        return OpNode(t.op, t.param, tuple(lift_tree(sub) for sub in t.kont))

    def lifted(elem: FreeElement) -> FreeElement:
        return FreeElement(elem.theory, lift_tree(elem.tree))

    return lifted


def sequence(t: FreeElement, h) -> FreeElement:
    """do x <- t in h(x): sequencing is lifting applied to the tree."""
    return lift(h)(t)


# ---------------------------------------------------------------------------
# State normal form


@dataclass(frozen=True)
class StateNormalForm:
    """The canonical single-state computation get((); s. put(f(s); _. return g(s)))
    as its two tables f : S -> S and g : S -> V."""

    f: dict
    g: dict


def _single_state_universe(theory: Theory):
    s = theory.op("get").arity
    if s.is_empty():
        raise EmptyStateUniverse("single-state normal forms need a nonempty state universe")
    return s


def run_single_state(theory: Theory, t: Tree, s) -> tuple:
    """Execute a get/put tree from state s, yielding (final state, value)."""
    s_univ = _single_state_universe(theory)
    while isinstance(t, OpNode):
        if t.op == "get":
            t = t.kont[s_univ.index_of(s)]
        elif t.op == "put":
            s = t.param
            t = t.kont[0]
        else:
            raise UnknownOperation(f"not a single-state operation: {t.op!r}")
    return s, t.value


def state_normal_form(theory: Theory, t: Tree) -> StateNormalForm:
    """The unique (f, g) with t congruent to get((); s. put(f(s); _. return g(s))),
    computed denotationally: (f(s), g(s)) is the run of t from s."""
    s_univ = _single_state_universe(theory)
    f, g = {}, {}
    for s in s_univ.iter_elements():
        f[s], g[s] = run_single_state(theory, t, s)
    return StateNormalForm(f, g)


def state_normal_form_tree(theory: Theory, nf: StateNormalForm) -> Tree:
    s_univ = _single_state_universe(theory)
    return OpNode(
        "get",
        (),
        tuple(
            OpNode("put", nf.f[s], (Return(nf.g[s]),))
            for s in s_univ.iter_elements()
        ),
    )


def _normalize_single_state(theory: Theory, t: Tree) -> Tree:
    return state_normal_form_tree(theory, state_normal_form(theory, t))


def _normalize_semilattice(theory: Theory, t: Tree) -> Tree:
    # the congruence class of a join tree is the finite set of its leaves
    leaves = sorted(set(tree_leaves(t)), key=sort_key)
    if not leaves:
        return OpNode("bot", (), ())
    out = Return(leaves[-1])
    for v in reversed(leaves[:-1]):
        out = OpNode("join", (), (Return(v), out))
    return out


_NORMALIZERS = {
    "single_state": _normalize_single_state,
    "semilattice": _normalize_semilattice,
}


def has_normalizer(theory: Theory) -> bool:
    return not theory.eqs or theory.name in _NORMALIZERS


def normalize(theory: Theory, t: Tree) -> Tree:
    """A canonical representative of t's congruence class.

    Equation-free theories normalize to the tree itself (the congruence is
    equality there); single-state and semilattice theories have dedicated
    strategies.  Raises NoNormalizer for anything else.
    """
    if not theory.eqs:
        return t
    try:
        strategy = _NORMALIZERS[theory.name]
    except KeyError:
        raise NoNormalizer(f"no normalization strategy for theory {theory.name!r}") from None
    return strategy(theory, t)


# ---------------------------------------------------------------------------
# Tree equality modulo a theory


class TreeEq(PyEnum):
    EQUAL = "equal"
    DISTINCT = "distinct"
    UNKNOWN = "unknown"


def _refutation_models(theory: Theory) -> list:
    """Small validating models used to soundly refute equality."""
    if theory is choice_theory():
        return [
            FiniteModel(theory, {"choose": lambda p, ab: ab[0] or ab[1]}, BOOL),
            FiniteModel(theory, {"choose": lambda p, ab: ab[0] and ab[1]}, BOOL),
        ]
    return []


def _refutes(theory: Theory, t1: Tree, t2: Tree) -> bool:
    gens = sorted(set(tree_leaves(t1)) | set(tree_leaves(t2)), key=sort_key)
    for model in _refutation_models(theory):
        carrier = model.carrier.elements()
        for picks in itertools.product(carrier, repeat=len(gens)):
            valuation = dict(zip(gens, picks))
            if interpret_term(model, t1, valuation) != interpret_term(model, t2, valuation):
                return True
    return False


def _subtrees(t: Tree) -> Iterator[Tree]:
    yield t
    if isinstance(t, OpNode):
        for sub in t.kont:
            yield from _subtrees(sub)


def _match(pattern: Tree, gens: frozenset, t: Tree, sigma: dict) -> bool:
    """Match a concrete tree against an equation-side pattern whose leaves
    are context generators, extending sigma in place; nonlinear patterns
    require consistent bindings."""
    if isinstance(pattern, Return):
        if pattern.value in gens:
            bound = sigma.get(pattern.value)
            if bound is None:
                sigma[pattern.value] = t
                return True
            return bound == t
        return pattern == t
    if not isinstance(t, OpNode) or t.op != pattern.op or t.param != pattern.param:
        return False
    return all(
        _match(psub, gens, tsub, sigma) for psub, tsub in zip(pattern.kont, t.kont)
    )


def _pattern_gens(pattern: Tree, gens: frozenset) -> set:
    return {v for v in tree_leaves(pattern) if v in gens}


def _instantiate(pattern: Tree, gens: frozenset, sigma: Mapping) -> Tree:
    if isinstance(pattern, Return):
        return sigma[pattern.value] if pattern.value in gens else pattern
    return OpNode(
        pattern.op,
        pattern.param,
        tuple(_instantiate(sub, gens, sigma) for sub in pattern.kont),
    )


def _rewrite_everywhere(src, dst, gens, t, pool) -> Iterator[Tree]:
    sigma: dict = {}
    if _match(src, gens, t, sigma):
        missing = sorted(_pattern_gens(dst, gens) - sigma.keys(), key=sort_key)
        for fillers in itertools.product(pool, repeat=len(missing)):
            full = dict(sigma)
            full.update(zip(missing, fillers))
            yield _instantiate(dst, gens, full)
    if isinstance(t, OpNode):
        for i, child in enumerate(t.kont):
            for new_child in _rewrite_everywhere(src, dst, gens, child, pool):
                yield OpNode(t.op, t.param, t.kont[:i] + (new_child,) + t.kont[i + 1 :])


def _rewrites(theory: Theory, t: Tree, pool) -> Iterator[Tree]:
    for eq in theory.eqs:
        gens = frozenset(eq.context.iter_elements())
        for p in eq.param_universe.iter_elements():
            lhs, rhs = eq.lhs(p), eq.rhs(p)
            if lhs == rhs:
                continue
            yield from _rewrite_everywhere(lhs, rhs, gens, t, pool)
            yield from _rewrite_everywhere(rhs, lhs, gens, t, pool)


def tree_equal_modulo(theory: Theory, t1: Tree, t2: Tree, budget: int | None = None) -> TreeEq:
    """Decide t1 ~ t2 modulo the theory's equations.

    With a registered normalizer the answer is exact.  Otherwise equality is
    searched for by applying equation instances breadth-first from both
    trees until the frontiers meet or the step budget runs out; DISTINCT is
    only ever reported when a small validating model separates the trees.
    """
    if budget is None:
        budget = default_budget()
    if has_normalizer(theory):
        return TreeEq.EQUAL if normalize(theory, t1) == normalize(theory, t2) else TreeEq.DISTINCT
    if t1 == t2:
        return TreeEq.EQUAL
    if _refutes(theory, t1, t2):
        return TreeEq.DISTINCT

    pool = []
    for t in (t1, t2):
        for sub in _subtrees(t):
            if sub not in pool:
                pool.append(sub)

    seen = ({t1}, {t2})
    frontiers = (deque([t1]), deque([t2]))
    steps = 0
    while steps < budget and (frontiers[0] or frontiers[1]):
        for side in (0, 1):
            frontier = frontiers[side]
            if not frontier or steps >= budget:
                continue
            steps += 1
            t = frontier.popleft()
            for nt in _rewrites(theory, t, pool):
                if nt in seen[1 - side]:
                    return TreeEq.EQUAL
                if nt not in seen[side]:
                    seen[side].add(nt)
                    frontier.append(nt)
    return TreeEq.UNKNOWN
