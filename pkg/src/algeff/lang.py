"""The core language: values, computations, types, and the type checker.

Computations carry a value type and a dirt set (the operations they may
perform); handlers transform one computation type into another.  Dirt is
synthesized bottom-up and only ever grows under subsumption.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Mapping, Optional

from .errors import TypeMismatch, UnboundVariable, UnknownOperation
from .terms import Theory
from .universe import Bool, Empty, Enum, Fin, FiniteUniverse, Product, Unit

Pos = Optional[tuple]


def _pos_field():
    return field(default=None, compare=False, repr=False, kw_only=True)


# ---------------------------------------------------------------------------
# Value expressions


@dataclass(frozen=True)
class Var:
    name: str
    pos: Pos = _pos_field()


@dataclass(frozen=True)
class BoolLit:
    value: bool
    pos: Pos = _pos_field()


@dataclass(frozen=True)
class UnitLit:
    pos: Pos = _pos_field()


@dataclass(frozen=True)
class IntLit:
    value: int
    pos: Pos = _pos_field()


@dataclass(frozen=True)
class StrLit:
    value: str
    pos: Pos = _pos_field()


@dataclass(frozen=True)
class Pair:
    first: Any
    second: Any
    pos: Pos = _pos_field()


@dataclass(frozen=True)
class Plus:
    left: Any
    right: Any
    pos: Pos = _pos_field()


@dataclass(frozen=True)
class Fun:
    param: str
    body: Any
    pos: Pos = _pos_field()


@dataclass(frozen=True)
class OpClause:
    op: str
    param_name: str
    kont_name: str
    body: Any
    pos: Pos = _pos_field()


@dataclass(frozen=True)
class HandlerLit:
    ret_name: str
    ret_body: Any
    clauses: tuple
    pos: Pos = _pos_field()

    def clause_for(self, op: str) -> OpClause | None:
        for clause in self.clauses:
            if clause.op == op:
                return clause
        return None


ValueExpr = Var | BoolLit | UnitLit | IntLit | StrLit | Pair | Plus | Fun | HandlerLit


# ---------------------------------------------------------------------------
# Computation expressions


@dataclass(frozen=True)
class Return:
    value: Any
    pos: Pos = _pos_field()


@dataclass(frozen=True)
class OpCall:
    op: str
    arg: Any
    pos: Pos = _pos_field()


@dataclass(frozen=True)
class Do:
    name: str
    first: Any
    rest: Any
    pos: Pos = _pos_field()


@dataclass(frozen=True)
class If:
    cond: Any
    then: Any
    orelse: Any
    pos: Pos = _pos_field()


@dataclass(frozen=True)
class App:
    fn: Any
    arg: Any
    pos: Pos = _pos_field()


@dataclass(frozen=True)
class WithHandle:
    handler: Any
    comp: Any
    pos: Pos = _pos_field()


CompExpr = Return | OpCall | Do | If | App | WithHandle


# ---------------------------------------------------------------------------
# Types


@dataclass(frozen=True)
class TEmpty:
    def __str__(self):
        return "empty"


@dataclass(frozen=True)
class TUnit:
    def __str__(self):
        return "unit"


@dataclass(frozen=True)
class TBool:
    def __str__(self):
        return "bool"


@dataclass(frozen=True)
class TInt:
    def __str__(self):
        return "int"


@dataclass(frozen=True)
class TStr:
    def __str__(self):
        return "str"


@dataclass(frozen=True)
class TProd:
    left: Any
    right: Any

    def __str__(self):
        return f"({self.left} * {self.right})"


@dataclass(frozen=True)
class TVar:
    name: int

    def __str__(self):
        return f"?{self.name}"


@dataclass(frozen=True)
class CompType:
    value: Any
    dirt: frozenset

    def __str__(self):
        return f"{self.value} ! {{{', '.join(sorted(self.dirt))}}}"


@dataclass(frozen=True)
class TArrow:
    arg: Any
    result: CompType

    def __str__(self):
        return f"({self.arg} -> {self.result})"


@dataclass(frozen=True)
class THandler:
    inp: CompType
    out: CompType

    def __str__(self):
        return f"({self.inp}) => ({self.out})"


ValueType = TEmpty | TUnit | TBool | TInt | TStr | TProd | TArrow | THandler | TVar

T_EMPTY = TEmpty()
T_UNIT = TUnit()
T_BOOL = TBool()
T_INT = TInt()
T_STR = TStr()


def universe_type(u: FiniteUniverse) -> ValueType:
    """The value type whose inhabitants include the universe's elements."""
    if isinstance(u, Empty):
        return T_EMPTY
    if isinstance(u, Unit):
        return T_UNIT
    if isinstance(u, Bool):
        return T_BOOL
    if isinstance(u, Fin):
        return T_INT
    if isinstance(u, Enum):
        return T_STR
    if isinstance(u, Product):
        return TProd(universe_type(u.left), universe_type(u.right))
    raise TypeError(f"not a universe: {u!r}")


PRIMITIVES = ("fst", "snd")


class _Mismatch(Exception):
    pass


class Checker:
    """Bidirectional-lite type checker with single-level unification.

    Type variables only arise for unannotated binders (function parameters
    and the return-clause binder of a handler synthesized outside a
    with-handle position); they are resolved by use.
    """

    def __init__(self, theory: Theory):
        self.theory = theory
        self.subst: dict = {}
        self._counter = 0

    def fresh(self) -> TVar:
        self._counter += 1
        return TVar(self._counter)

    def resolve(self, t):
        while isinstance(t, TVar) and t in self.subst:
            t = self.subst[t]
        return t

    def zonk(self, t):
        t = self.resolve(t)
        if isinstance(t, TProd):
            return TProd(self.zonk(t.left), self.zonk(t.right))
        if isinstance(t, TArrow):
            return TArrow(self.zonk(t.arg), self.zonk(t.result))
        if isinstance(t, THandler):
            return THandler(self.zonk(t.inp), self.zonk(t.out))
        if isinstance(t, CompType):
            return CompType(self.zonk(t.value), t.dirt)
        return t

    def _unify(self, found, expected):
        found, expected = self.resolve(found), self.resolve(expected)
        if isinstance(found, TVar):
            if found != expected:
                self.subst[found] = expected
            return
        if isinstance(expected, TVar):
            self.subst[expected] = found
            return
        if type(found) is not type(expected):
            raise _Mismatch
        if isinstance(found, TProd):
            self._unify(found.left, expected.left)
            self._unify(found.right, expected.right)
        elif isinstance(found, TArrow):
            self._unify(found.arg, expected.arg)
            self._unify(found.result, expected.result)
        elif isinstance(found, THandler):
            self._unify(found.inp, expected.inp)
            self._unify(found.out, expected.out)
        elif isinstance(found, CompType):
            self._unify(found.value, expected.value)
            if found.dirt != expected.dirt:
                raise _Mismatch

    def unify(self, found, expected, pos):
        try:
            self._unify(found, expected)
        except _Mismatch:
            raise TypeMismatch(
                pos, str(self.zonk(expected)), str(self.zonk(found))
            ) from None

    def _join(self, a, b, pos):
        """Branch join: the empty type (an aborted branch) yields to the
        other side; otherwise the value types must agree."""
        a, b = self.resolve(a), self.resolve(b)
        if isinstance(a, TEmpty):
            return b
        if isinstance(b, TEmpty):
            return a
        self.unify(b, a, pos)
        return self.resolve(a)

    # -- values ------------------------------------------------------------

    def synth_value(self, ctx: Mapping, v) -> ValueType:
        if isinstance(v, Var):
            try:
                return ctx[v.name]
            except KeyError:
                raise UnboundVariable(v.name, v.pos) from None
        if isinstance(v, BoolLit):
            return T_BOOL
        if isinstance(v, UnitLit):
            return T_UNIT
        if isinstance(v, IntLit):
            return T_INT
        if isinstance(v, StrLit):
            return T_STR
        if isinstance(v, Pair):
            return TProd(self.synth_value(ctx, v.first), self.synth_value(ctx, v.second))
        if isinstance(v, Plus):
            self.unify(self.synth_value(ctx, v.left), T_INT, _pos(v.left, v))
            self.unify(self.synth_value(ctx, v.right), T_INT, _pos(v.right, v))
            return T_INT
        if isinstance(v, Fun):
            a = self.fresh()
            body = self.synth_comp({**ctx, v.param: a}, v.body)
            return TArrow(a, body)
        if isinstance(v, HandlerLit):
            return self.handler_type(ctx, v, None)
        raise TypeError(f"not a value expression: {v!r}")

    # -- computations --------------------------------------------------------

    def synth_comp(self, ctx: Mapping, c) -> CompType:
        if isinstance(c, Return):
            return CompType(self.synth_value(ctx, c.value), frozenset())
        if isinstance(c, OpCall):
            if not self.theory.has_op(c.op):
                raise UnknownOperation(f"unknown operation{_loc(c.pos)}: {c.op}")
            decl = self.theory.op(c.op)
            arg = self.synth_value(ctx, c.arg)
            self.unify(arg, universe_type(decl.param), _pos(c.arg, c))
            return CompType(universe_type(decl.arity), frozenset({c.op}))
        if isinstance(c, Do):
            first = self.synth_comp(ctx, c.first)
            rest = self.synth_comp({**ctx, c.name: first.value}, c.rest)
            return CompType(rest.value, first.dirt | rest.dirt)
        if isinstance(c, If):
            self.unify(self.synth_value(ctx, c.cond), T_BOOL, _pos(c.cond, c))
            then = self.synth_comp(ctx, c.then)
            orelse = self.synth_comp(ctx, c.orelse)
            joined = self._join(then.value, orelse.value, _pos(c.orelse, c))
            return CompType(joined, then.dirt | orelse.dirt)
        if isinstance(c, App):
            if (
                isinstance(c.fn, Var)
                and c.fn.name in PRIMITIVES
                and c.fn.name not in ctx
            ):
                return self._primitive_app(ctx, c)
            fn = self.resolve(self.synth_value(ctx, c.fn))
            if isinstance(fn, TVar):
                raise TypeMismatch(_pos(c.fn, c), "a function", str(fn))
            if not isinstance(fn, TArrow):
                raise TypeMismatch(_pos(c.fn, c), "a function", str(self.zonk(fn)))
            arg = self.synth_value(ctx, c.arg)
            self.unify(arg, fn.arg, _pos(c.arg, c))
            return self.resolve(fn.result)
        if isinstance(c, WithHandle):
            comp = self.synth_comp(ctx, c.comp)
            if isinstance(c.handler, HandlerLit):
                ht = self.handler_type(ctx, c.handler, comp)
                return ht.out
            hv = self.resolve(self.synth_value(ctx, c.handler))
            if not isinstance(hv, THandler):
                raise TypeMismatch(_pos(c.handler, c), "a handler", str(self.zonk(hv)))
            self.unify(comp.value, hv.inp.value, _pos(c.comp, c))
            if not comp.dirt <= hv.inp.dirt:
                extra = ", ".join(sorted(comp.dirt - hv.inp.dirt))
                raise TypeMismatch(
                    _pos(c.comp, c),
                    str(self.zonk(hv.inp)),
                    f"{self.zonk(comp)} (unhandled: {extra})",
                )
            return hv.out
        raise TypeError(f"not a computation expression: {c!r}")

    def _primitive_app(self, ctx: Mapping, c: App) -> CompType:
        arg = self.resolve(self.synth_value(ctx, c.arg))
        if not isinstance(arg, TProd):
            raise TypeMismatch(_pos(c.arg, c), "a pair", str(self.zonk(arg)))
        out = arg.left if c.fn.name == "fst" else arg.right
        return CompType(self.resolve(out), frozenset())

    def handler_type(self, ctx: Mapping, h: HandlerLit, comp: CompType | None) -> THandler:
        seen = set()
        for clause in h.clauses:
            if not self.theory.has_op(clause.op):
                raise UnknownOperation(f"unknown operation{_loc(clause.pos)}: {clause.op}")
            if clause.op in seen:
                raise TypeMismatch(clause.pos, "distinct operation clauses", clause.op)
            seen.add(clause.op)
        handled = frozenset(seen)
        if comp is None:
            inp_value: ValueType = self.fresh()
            inp_dirt = handled
        else:
            inp_value = comp.value
            inp_dirt = comp.dirt | handled
        ret = self.synth_comp({**ctx, h.ret_name: inp_value}, h.ret_body)
        out_value = ret.value
        out_dirt = ret.dirt | (inp_dirt - handled)
        # the kont type mentions the output dirt, which clause bodies may
        # enlarge; iterate until the dirt stabilizes
        while True:
            grown = out_dirt
            for clause in h.clauses:
                decl = self.theory.op(clause.op)
                kont_type = TArrow(
                    universe_type(decl.arity), CompType(self.resolve(out_value), grown)
                )
                clause_ctx = {
                    **ctx,
                    clause.param_name: universe_type(decl.param),
                    clause.kont_name: kont_type,
                }
                body = self.synth_comp(clause_ctx, clause.body)
                self.unify(body.value, out_value, _pos(clause.body, clause))
                grown = grown | body.dirt
            if grown == out_dirt:
                break
            out_dirt = grown
        return THandler(
            CompType(self.resolve(inp_value), inp_dirt),
            CompType(self.resolve(out_value), out_dirt),
        )


def _pos(node, fallback):
    pos = getattr(node, "pos", None)
    return pos if pos is not None else getattr(fallback, "pos", None)


def _loc(pos):
    return f" at {pos[0]}:{pos[1]}" if pos else ""


def typecheck_comp(theory: Theory, c, ctx: Mapping | None = None,
                   expected: CompType | None = None) -> CompType:
    """Synthesize a computation's type; with ``expected`` given, also check
    it fits (equal value type, dirt within the expected bound)."""
    checker = Checker(theory)
    got = checker.synth_comp(dict(ctx or {}), c)
    if expected is not None:
        checker.unify(got.value, expected.value, getattr(c, "pos", None))
        if not got.dirt <= expected.dirt:
            raise TypeMismatch(
                getattr(c, "pos", None), str(expected), str(checker.zonk(got))
            )
    return checker.zonk(got)


def typecheck_value(theory: Theory, v, ctx: Mapping | None = None) -> ValueType:
    checker = Checker(theory)
    return checker.zonk(checker.synth_value(dict(ctx or {}), v))
