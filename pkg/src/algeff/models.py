"""Set-theoretic interpretations and finite models.

An interpretation assigns each operation a function (param, args) -> carrier
element, where args is a tuple indexed by the arity enumeration.  A raw
``Interpretation`` may live on any carrier (e.g. the reals) and supports
term interpretation only; a ``FiniteModel`` adds an enumerable carrier and
with it exhaustive equation validation.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Any, Callable, Iterator, Mapping

from .errors import NonEnumerableCarrier, TheoryMismatch, UnboundGenerator, UnknownOperation
from .terms import Equation, Return, Theory, Tree
from .universe import UNIT, FiniteUniverse, Product


@dataclass(frozen=True, eq=False)
class Interpretation:
    theory: Theory
    ops: Mapping[str, Callable[[Any, tuple], Any]]

    def __post_init__(self):
        for o in self.theory.ops:
            if o.name not in self.ops:
                raise UnknownOperation(
                    f"interpretation lacks operation {o.name!r} of theory {self.theory.name!r}"
                )


@dataclass(frozen=True, eq=False)
class FiniteModel(Interpretation):
    carrier: FiniteUniverse


@dataclass(frozen=True)
class EquationViolation:
    equation: str
    param: Any
    valuation: dict
    lhs_value: Any = None
    rhs_value: Any = None


@dataclass(frozen=True)
class HomViolation:
    op: str
    param: Any
    args: tuple


def interpret_term(interp: Interpretation, t: Tree, valuation: Mapping) -> Any:
    """Interpret a tree as a carrier element under a valuation of its
    generators: leaves project, nodes apply the operation's function."""
    if isinstance(t, Return):
        try:
            return valuation[t.value]
        except KeyError:
            raise UnboundGenerator(
                f"valuation does not cover generator {t.value!r}"
            ) from None
    if t.op not in interp.ops:
        raise UnknownOperation(f"no interpretation for operation {t.op!r}")
    args = tuple(interpret_term(interp, sub, valuation) for sub in t.kont)
    return interp.ops[t.op](t.param, args)


def iter_equation_cases(m: FiniteModel, e: Equation) -> Iterator[tuple]:
    """All (parameter, valuation) pairs of an equation family, in canonical
    order: parameters first, then valuations lexicographic in the carrier
    enumeration.  Exactly |P| * |carrier|^|context| cases."""
    gens = e.context.elements()
    carrier = m.carrier.elements()
    for p in e.param_universe.iter_elements():
        for picks in itertools.product(carrier, repeat=len(gens)):
            yield p, dict(zip(gens, picks))


def validate_equation(m: FiniteModel, e: Equation) -> EquationViolation | None:
    """Exhaustively check one equation family; None means valid, otherwise
    the first witness in enumeration order is returned."""
    if not isinstance(m, FiniteModel):
        raise NonEnumerableCarrier("equation validation needs an enumerable carrier")
    for p, valuation in iter_equation_cases(m, e):
        lv = interpret_term(m, e.lhs(p), valuation)
        rv = interpret_term(m, e.rhs(p), valuation)
        if lv != rv:
            return EquationViolation(e.name, p, valuation, lv, rv)
    return None


def validate_model(m: FiniteModel) -> EquationViolation | None:
    """Check every equation of the model's theory; first failure wins."""
    if not isinstance(m, FiniteModel):
        raise NonEnumerableCarrier("model validation needs an enumerable carrier")
    for e in m.theory.eqs:
        violation = validate_equation(m, e)
        if violation is not None:
            return violation
    return None


def product_model(l: FiniteModel, m: FiniteModel) -> FiniteModel:
    """The pointwise product: carrier |L| x |M|, operations coordinatewise."""
    if l.theory is not m.theory:
        raise TheoryMismatch(
            f"cannot form a product of models of {l.theory.name!r} and {m.theory.name!r}"
        )

    def coordinatewise(name):
        fl, fm = l.ops[name], m.ops[name]

        def op(p, args):
            return (
                fl(p, tuple(a[0] for a in args)),
                fm(p, tuple(a[1] for a in args)),
            )

        return op

    ops = {o.name: coordinatewise(o.name) for o in l.theory.ops}
    return FiniteModel(l.theory, ops, Product(l.carrier, m.carrier))


def check_homomorphism(phi: Mapping, l: FiniteModel, m: FiniteModel) -> HomViolation | None:
    """Does ``phi`` commute with every operation?  None when it does,
    otherwise the first failing (op, param, args) in enumeration order."""
    if l.theory is not m.theory:
        raise TheoryMismatch("homomorphisms relate models of the same theory")
    carrier = l.carrier.elements()
    for o in l.theory.ops:
        for p in o.param.iter_elements():
            for args in itertools.product(carrier, repeat=o.arity.size()):
                through = phi[l.ops[o.name](p, args)]
                mapped = m.ops[o.name](p, tuple(phi[a] for a in args))
                if through != mapped:
                    return HomViolation(o.name, p, args)
    return None


def is_homomorphism(phi: Mapping, l: FiniteModel, m: FiniteModel) -> bool:
    return check_homomorphism(phi, l, m) is None


def trivial_model(theory: Theory) -> FiniteModel:
    """The one-element model every theory has."""
    ops = {o.name: (lambda p, args: ()) for o in theory.ops}
    return FiniteModel(theory, ops, UNIT)


def table_model(theory: Theory, carrier: FiniteUniverse, table: Mapping) -> FiniteModel:
    """Build a model from an explicit table {(op, param, args): result},
    checking totality over every operation's domain."""
    for o in theory.ops:
        for p in o.param.iter_elements():
            for args in itertools.product(carrier.elements(), repeat=o.arity.size()):
                key = (o.name, p, args)
                if key not in table:
                    raise UnknownOperation(
                        f"model table is missing an entry for {o.name!r} at "
                        f"param {p!r}, args {args!r}"
                    )
                if not carrier.contains(table[key]):
                    raise ValueError(
                        f"model table maps {key!r} outside the carrier: {table[key]!r}"
                    )

    def from_table(name):
        return lambda p, args: table[(name, p, args)]

    return FiniteModel(theory, {o.name: from_table(o.name) for o in theory.ops}, carrier)
