import pytest

from algeff.comodels import (
    Cointerpretation,
    Done,
    Stuck,
    alternating_choice_comodel,
    cointerpret_tree,
    printer_comodel,
    reader_comodel,
    state_comodel,
    tensor_run,
    transcript_universe,
    validate_comodel,
)
from algeff.errors import ImpossibleCooperation, UncoveredOperation
from algeff.free import FreeElement, eta, sequence, generic_op, state_normal_form
from algeff.terms import OpNode, Return, tree_depth
from algeff.theories import (
    combine,
    exception_theory,
    io_theory,
    single_state_theory,
)
from algeff.universe import Enum, Fin

from tests.gen import tree_corpus

STATE10 = single_state_theory(Fin(10))
STATE3 = single_state_theory(Fin(3))


def get(theory, kont):
    s = theory.op("get").arity
    return OpNode("get", (), tuple(kont(v) for v in s.elements()))


def put(v, sub):
    return OpNode("put", v, (sub,))


def test_leaf_rule():
    c = state_comodel(STATE3)
    assert cointerpret_tree(1, Return(True), c) == Done(True, 1)


def test_state_increment_run():
    c = state_comodel(STATE10)
    prog = get(STATE10, lambda s: put((s + 1) % 10, Return(s)))
    assert cointerpret_tree(5, prog, c) == Done(5, 6)


def test_abort_gets_stuck_under_the_state_comodel():
    th = combine(single_state_theory(Fin(3)), exception_theory())
    c = Cointerpretation(
        th,
        Fin(3),
        {"get": lambda p, w: (w, w), "put": lambda p, w: ((), p)},
    )
    t = OpNode("abort", (), ())
    for w in range(3):
        assert cointerpret_tree(w, t, c) == Stuck("abort", (), w)


def test_no_cooperation_for_abort_on_a_nonempty_world():
    th = exception_theory()
    with pytest.raises(ImpossibleCooperation):
        Cointerpretation(th, Fin(2), {"abort": lambda p, w: ((), w)})


def test_state_comodel_validates_all_four_laws():
    assert validate_comodel(state_comodel(STATE3)) is None


def test_broken_get_is_violated_with_witness():
    broken = Cointerpretation(
        single_state_theory(Fin(2)),
        Fin(2),
        {"get": lambda p, w: (0, w), "put": lambda p, w: ((), p)},
    )
    violation = validate_comodel(broken)
    assert violation is not None
    assert violation.equation == "get_put"
    assert violation.param == ()
    assert violation.world == 1
    assert violation.lhs_outcome == Done((), 0)
    assert violation.rhs_outcome == Done((), 1)


def test_alternating_choice_stream_violates_commutativity():
    violation = validate_comodel(alternating_choice_comodel())
    assert violation is not None
    assert violation.equation == "comm"


def test_validation_requires_equation_operations_covered():
    partial = Cointerpretation(STATE3, Fin(3), {"get": lambda p, w: (w, w)})
    with pytest.raises(UncoveredOperation):
        validate_comodel(partial)


def test_tensor_run_matches_state_normal_form():
    c = state_comodel(STATE3)
    for t in tree_corpus(STATE3, ["a", "b"], 50, 4, seed=21):
        nf = state_normal_form(STATE3, t)
        for s0 in range(3):
            assert tensor_run(FreeElement(STATE3, t), s0, c) == Done(nf.g[s0], nf.f[s0])


def test_congruent_trees_run_identically():
    c = state_comodel(STATE3)
    eq = STATE3.eqs[0]  # get_get
    lhs, rhs = eq.lhs(()), eq.rhs(())
    for w in range(3):
        assert cointerpret_tree(w, lhs, c) == cointerpret_tree(w, rhs, c)


def test_comodel_soundness_every_equation_every_world():
    # validate_comodel restated explicitly
    c = state_comodel(STATE3)
    for eq in STATE3.eqs:
        for p in eq.param_universe.elements():
            for w in range(3):
                assert cointerpret_tree(w, eq.lhs(p), c) == cointerpret_tree(w, eq.rhs(p), c)


def test_cointerpret_terminates_on_deep_trees():
    c = state_comodel(STATE3)
    t = Return(0)
    for i in range(300):
        t = put(i % 3, t)
    assert tree_depth(t) == 300
    assert cointerpret_tree(0, t, c) == Done(0, 0)


def test_transcript_universe_enumeration():
    u = transcript_universe(Enum(("a",)), 2)
    assert u.labels == ('[]', '["a"]', '["a", "a"]')


def test_printer_comodel_hello_world():
    io = io_theory(Enum(("Hello world!",)))
    c = printer_comodel(io, Enum(("Hello world!",)), 2)
    hello = sequence(generic_op(io, "print", "Hello world!"), lambda _: eta(io, ()))
    out = tensor_run(hello, "[]", c)
    assert out == Done((), '["Hello world!"]')
    assert validate_comodel(c) is None  # no equations: vacuously valid


def test_printer_comodel_saturates_when_full():
    io = io_theory(Enum(("a",)))
    c = printer_comodel(io, Enum(("a",)), 1)
    t = OpNode("print", "a", (OpNode("print", "a", (Return(()),)),))
    assert cointerpret_tree("[]", t, c) == Done((), '["a"]')


def test_reader_comodel_cursor():
    io = io_theory(Enum(("a", "b")))
    c = reader_comodel(io, ("a", "b"))
    t = OpNode(
        "read",
        (),
        tuple(
            OpNode("read", (), (Return((x, y)) for y in ("a", "b")))
            for x in ("a", "b")
        ),
    )
    assert cointerpret_tree(0, t, c) == Done(("a", "b"), 2)


def test_cointerpretation_rejects_undeclared_operations():
    from algeff.errors import UnknownOperation

    with pytest.raises(UnknownOperation):
        Cointerpretation(STATE3, Fin(3), {"flip": lambda p, w: (w, w)})


def test_validate_comodel_requires_an_enumerable_world():
    from algeff.errors import NonEnumerableWorld

    c = Cointerpretation.__new__(Cointerpretation)
    object.__setattr__(c, "theory", STATE3)
    object.__setattr__(c, "world", None)
    object.__setattr__(c, "coops", {})
    with pytest.raises(NonEnumerableWorld):
        validate_comodel(c)
