"""The built-in equational theories and theory combination.

Each constructor is memoized, so requesting the same theory twice returns
the same object; theories compare by identity throughout the package.
"""

from __future__ import annotations

from functools import lru_cache

from .errors import EmptyStateUniverse
from .terms import Equation, OpDecl, OpNode, Return, Theory, rename_tree_ops
from .universe import BOOL, EMPTY, UNIT, Enum, FiniteUniverse, Product

_X = Enum(("x",))
_XY = Enum(("x", "y"))
_XYZ = Enum(("x", "y", "z"))


def _const(tree):
    return lambda _p: tree


@lru_cache(maxsize=None)
def single_state_theory(s: FiniteUniverse) -> Theory:
    """One memory cell holding an element of ``s``: get/put with the four
    laws (get-get, get-put, put-get, put-put)."""
    if s.is_empty():
        raise EmptyStateUniverse("a state universe must be nonempty")
    get = lambda kont: OpNode("get", (), tuple(kont(v) for v in s.iter_elements()))
    put = lambda v, sub: OpNode("put", v, (sub,))

    get_get = Equation(
        "get_get",
        UNIT,
        Product(s, s),
        _const(get(lambda a: get(lambda b: Return((a, b))))),
        _const(get(lambda a: Return((a, a)))),
    )
    get_put = Equation(
        "get_put",
        UNIT,
        UNIT,
        _const(get(lambda a: put(a, Return(())))),
        _const(Return(())),
    )
    put_get = Equation(
        "put_get",
        s,
        s,
        lambda p: put(p, get(lambda b: Return(b))),
        lambda p: put(p, Return(p)),
    )
    put_put = Equation(
        "put_put",
        Product(s, s),
        UNIT,
        lambda p: put(p[0], put(p[1], Return(()))),
        lambda p: put(p[1], Return(())),
    )
    return Theory(
        "single_state",
        (OpDecl("get", UNIT, s), OpDecl("put", s, UNIT)),
        (get_get, get_put, put_get, put_put),
    )


@lru_cache(maxsize=None)
def state_theory(l: FiniteUniverse, s: FiniteUniverse) -> Theory:
    """Memory locations ``l`` sharing the state universe ``s``: lookup/update
    with the four per-location laws and the three cross-location
    distributivity laws.

    The distributivity families are quantified over all location pairs; on
    pairs the law does not cover (equal locations, or the mirror order of a
    symmetric law) both sides are the same tree, so the instance is trivial.
    """
    if s.is_empty():
        raise EmptyStateUniverse("a state universe must be nonempty")
    lookup = lambda loc, kont: OpNode(
        "lookup", loc, tuple(kont(v) for v in s.iter_elements())
    )
    update = lambda loc, v, sub: OpNode("update", (loc, v), (sub,))

    lookup_lookup = Equation(
        "lookup_lookup",
        l,
        Product(s, s),
        lambda loc: lookup(loc, lambda a: lookup(loc, lambda b: Return((a, b)))),
        lambda loc: lookup(loc, lambda a: Return((a, a))),
    )
    lookup_update = Equation(
        "lookup_update",
        l,
        UNIT,
        lambda loc: lookup(loc, lambda a: update(loc, a, Return(()))),
        lambda loc: Return(()),
    )
    update_lookup = Equation(
        "update_lookup",
        Product(l, s),
        s,
        lambda p: update(p[0], p[1], lookup(p[0], lambda b: Return(b))),
        lambda p: update(p[0], p[1], Return(p[1])),
    )
    update_update = Equation(
        "update_update",
        Product(Product(l, s), s),
        UNIT,
        lambda p: update(p[0][0], p[0][1], update(p[0][0], p[1], Return(()))),
        lambda p: update(p[0][0], p[1], Return(())),
    )

    def _ll_lhs(p):
        a, b = p
        return lookup(a, lambda v: lookup(b, lambda w: Return((v, w))))

    def _ll_rhs(p):
        a, b = p
        if l.index_of(a) >= l.index_of(b):
            return _ll_lhs(p)
        return lookup(b, lambda w: lookup(a, lambda v: Return((v, w))))

    lookup_lookup_comm = Equation(
        "lookup_lookup_comm",
        Product(l, l),
        Product(s, s),
        _ll_lhs,
        _ll_rhs,
    )

    def _ul_lhs(p):
        (a, v), b = p
        return update(a, v, lookup(b, lambda w: Return(w)))

    def _ul_rhs(p):
        (a, v), b = p
        if a == b:
            return _ul_lhs(p)
        return lookup(b, lambda w: update(a, v, Return(w)))

    update_lookup_comm = Equation(
        "update_lookup_comm",
        Product(Product(l, s), l),
        s,
        _ul_lhs,
        _ul_rhs,
    )

    def _uu_lhs(p):
        (a, v), (b, w) = p
        return update(a, v, update(b, w, Return(())))

    def _uu_rhs(p):
        (a, v), (b, w) = p
        if l.index_of(a) >= l.index_of(b):
            return _uu_lhs(p)
        return update(b, w, update(a, v, Return(())))

    update_update_comm = Equation(
        "update_update_comm",
        Product(Product(l, s), Product(l, s)),
        UNIT,
        _uu_lhs,
        _uu_rhs,
    )

    return Theory(
        "state",
        (OpDecl("lookup", l, s), OpDecl("update", Product(l, s), UNIT)),
        (
            lookup_lookup,
            lookup_update,
            update_lookup,
            update_update,
            lookup_lookup_comm,
            update_lookup_comm,
            update_update_comm,
        ),
    )


@lru_cache(maxsize=None)
def io_theory(s: FiniteUniverse) -> Theory:
    """print/read over the entity universe ``s``; no equations."""
    return Theory("io", (OpDecl("print", s, UNIT), OpDecl("read", UNIT, s)))


@lru_cache(maxsize=None)
def exception_theory() -> Theory:
    """A single abort operation with empty arity; no equations."""
    return Theory("exception", (OpDecl("abort", UNIT, EMPTY),))


@lru_cache(maxsize=None)
def choice_theory() -> Theory:
    """Binary nondeterministic choice: one operation returning a bit,
    with commutativity, idempotency, and associativity.

    Commutativity is listed first so that validators report it first; it is
    the law that already fails for any deterministic stream of bits.
    """
    vee = lambda a, b: OpNode("choose", (), (a, b))
    x, y, z = Return("x"), Return("y"), Return("z")
    comm = Equation("comm", UNIT, _XY, _const(vee(x, y)), _const(vee(y, x)))
    idem = Equation("idem", UNIT, _X, _const(vee(x, x)), _const(x))
    assoc = Equation(
        "assoc", UNIT, _XYZ, _const(vee(vee(x, y), z)), _const(vee(x, vee(y, z)))
    )
    return Theory("choice", (OpDecl("choose", UNIT, BOOL),), (comm, idem, assoc))


@lru_cache(maxsize=None)
def semilattice_theory() -> Theory:
    """A join operation with a bottom: associative, commutative, idempotent,
    with bot as the unit."""
    vee = lambda a, b: OpNode("join", (), (a, b))
    bot = OpNode("bot", (), ())
    x, y, z = Return("x"), Return("y"), Return("z")
    assoc = Equation(
        "assoc", UNIT, _XYZ, _const(vee(x, vee(y, z))), _const(vee(vee(x, y), z))
    )
    comm = Equation("comm", UNIT, _XY, _const(vee(x, y)), _const(vee(y, x)))
    idem = Equation("idem", UNIT, _X, _const(vee(x, x)), _const(x))
    unit = Equation("unit", UNIT, _X, _const(vee(x, bot)), _const(x))
    return Theory(
        "semilattice",
        (OpDecl("bot", UNIT, EMPTY), OpDecl("join", UNIT, BOOL)),
        (assoc, comm, idem, unit),
    )


@lru_cache(maxsize=None)
def pointed_set_theory() -> Theory:
    """A single constant; no equations."""
    return Theory("pointed_set", (OpDecl("point", UNIT, EMPTY),))


@lru_cache(maxsize=None)
def empty_theory() -> Theory:
    return Theory("empty", ())


@lru_cache(maxsize=None)
def singleton_theory() -> Theory:
    """A constant plus the equation x = y, collapsing everything."""
    collapse = Equation("collapse", UNIT, _XY, _const(Return("x")), _const(Return("y")))
    return Theory("singleton", (OpDecl("star", UNIT, EMPTY),), (collapse,))


@lru_cache(maxsize=None)
def group_theory() -> Theory:
    """Unit, multiplication, and inverse with the five group laws."""
    m = lambda a, b: OpNode("m", (), (a, b))
    inv = lambda a: OpNode("i", (), (a,))
    u = OpNode("u", (), ())
    x, y, z = Return("x"), Return("y"), Return("z")
    eqs = (
        Equation("assoc", UNIT, _XYZ, _const(m(m(x, y), z)), _const(m(x, m(y, z)))),
        Equation("unit_left", UNIT, _X, _const(m(u, x)), _const(x)),
        Equation("unit_right", UNIT, _X, _const(m(x, u)), _const(x)),
        Equation("inv_right", UNIT, _X, _const(m(x, inv(x))), _const(u)),
        Equation("inv_left", UNIT, _X, _const(m(inv(x), x)), _const(u)),
    )
    return Theory(
        "group",
        (OpDecl("u", UNIT, EMPTY), OpDecl("m", UNIT, BOOL), OpDecl("i", UNIT, UNIT)),
        eqs,
    )


_BUILTINS = {
    "state": state_theory,
    "single_state": single_state_theory,
    "io": io_theory,
    "exception": exception_theory,
    "choice": choice_theory,
    "semilattice": semilattice_theory,
    "pointed_set": pointed_set_theory,
    "empty": empty_theory,
    "singleton": singleton_theory,
    "group": group_theory,
}


def builtin_theory(key: str, *universes: FiniteUniverse) -> Theory:
    """Look up a built-in theory by name, passing its universe arguments."""
    try:
        make = _BUILTINS[key]
    except KeyError:
        raise KeyError(
            f"unknown builtin theory {key!r}; one of {sorted(_BUILTINS)}"
        ) from None
    return make(*universes)


def builtin_names() -> tuple:
    return tuple(sorted(_BUILTINS))


def _fresh(name: str, taken: set) -> str:
    candidate = name
    n = 2
    while candidate in taken:
        candidate = f"{name}{n}"
        n += 1
    return candidate


def _renamed(theory: Theory, colliding: set, taken: set) -> tuple:
    """Rename ``theory``'s colliding ops, returning (ops, eqs, renames)."""
    mapping = {}
    for o in theory.ops:
        if o.name in colliding:
            new = _fresh(f"{o.name}_{theory.name}", taken)
            mapping[o.name] = new
            taken.add(new)
        else:
            taken.add(o.name)
    ops = tuple(
        OpDecl(mapping.get(o.name, o.name), o.param, o.arity) for o in theory.ops
    )
    if mapping:
        eqs = tuple(
            Equation(
                eq.name,
                eq.param_universe,
                eq.context,
                lambda p, eq=eq: rename_tree_ops(eq.lhs(p), mapping),
                lambda p, eq=eq: rename_tree_ops(eq.rhs(p), mapping),
            )
            for eq in theory.eqs
        )
    else:
        eqs = theory.eqs
    return ops, eqs, tuple(sorted(mapping.items()))


def _distribution_equation(o1: OpDecl, o2: OpDecl) -> Equation:
    """o1(p1; a1. o2(p2; a2. k a1 a2)) = o2(p2; a2. o1(p1; a1. k a1 a2))."""

    def lhs(p):
        p1, p2 = p
        return OpNode(
            o1.name,
            p1,
            tuple(
                OpNode(o2.name, p2, tuple(Return((a1, a2)) for a2 in o2.arity.iter_elements()))
                for a1 in o1.arity.iter_elements()
            ),
        )

    def rhs(p):
        p1, p2 = p
        return OpNode(
            o2.name,
            p2,
            tuple(
                OpNode(o1.name, p1, tuple(Return((a1, a2)) for a1 in o1.arity.iter_elements()))
                for a2 in o2.arity.iter_elements()
            ),
        )

    return Equation(
        f"dist_{o1.name}_{o2.name}",
        Product(o1.param, o2.param),
        Product(o1.arity, o2.arity),
        lhs,
        rhs,
    )


def combine(t1: Theory, t2: Theory, distribute: bool = False) -> Theory:
    """Adjoin two theories' signatures and equations.

    Colliding operation names are suffixed with their theory's name; the
    renaming is recorded on the result.  With ``distribute`` set, a
    commutation law is added for every operation pair across the two
    theories.
    """
    colliding = set(t1.op_names()) & set(t2.op_names())
    taken = (set(t1.op_names()) | set(t2.op_names())) - colliding
    ops1, eqs1, ren1 = _renamed(t1, colliding, taken)
    ops2, eqs2, ren2 = _renamed(t2, colliding, taken)
    eqs = list(eqs1)
    seen_eq_names = {e.name for e in eqs1}
    for eq in eqs2:
        name = _fresh(eq.name, seen_eq_names) if eq.name in seen_eq_names else eq.name
        seen_eq_names.add(name)
        eqs.append(Equation(name, eq.param_universe, eq.context, eq.lhs, eq.rhs))
    if distribute:
        for o1 in ops1:
            for o2 in ops2:
                eqs.append(_distribution_equation(o1, o2))
    return Theory(
        f"{t1.name}+{t2.name}",
        ops1 + ops2,
        tuple(eqs),
        renames=ren1 + ren2,
    )
