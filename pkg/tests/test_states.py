from fractions import Fraction

import pytest

from rmx.lietype import lie_type_data
from rmx.ratfunc import RatFunc
from rmx.rmatrix import Arg, solve_normalizer
from rmx.states import FreeState, arg_diff, arg_h, arg_sum


def make_ctx(L=2, c=1, extra_caps=None):
    ltd = lie_type_data("C", 1)
    norm = solve_normalizer(ltd, L=L)
    caps = {"h": L, **(extra_caps or {})}
    return ltd, norm, caps, Fraction(c)


def ring(name):
    return Arg.make(RatFunc.var(name))


def test_arg_helpers():
    a, b = ring("X"), ring("Y")
    s = arg_sum(a, b)
    assert repr(s.mono) == "X*Y"
    d = arg_diff(a, b)
    assert d.mono == RatFunc.var("X") / RatFunc.var("Y")
    sh = arg_h(a, Fraction(1, 2))
    assert sh.shift_dict() == {"h": Fraction(-1, 2)}


def test_pure_state_layout():
    ltd, norm, caps, c = make_ctx()
    st = FreeState.pure(ltd, norm, caps, c, [[ring("X")], [ring("Y")]])
    assert st.open == 2
    assert st.factors == 2
    assert st.word_length(1) == st.word_length(2) == 1
    assert len(st.terms) == 1


def test_tminus_vacuum_normalization():
    ltd, norm, caps, c = make_ctx()
    vac = FreeState.vacuum(ltd, norm, caps, c)
    out = vac.apply_tminus(1, ring("U"))
    assert out == vac.with_identity_open()


@pytest.mark.parametrize("k", [1, 2])
@pytest.mark.parametrize("method", ["chain", "matrix"])
def test_tminus_roundtrip(k, method):
    ltd, norm, caps, c = make_ctx()
    u = ring("U")
    w = FreeState.pure(ltd, norm, caps, c,
                       [[ring(f"V{i}") for i in range(1, k + 1)]])
    st = w.apply_tminus(1, u)
    st = st.apply_tminus_inv(1, u, shared_slot=st.open, method=method)
    assert st == w.with_identity_open()


def test_tminus_roundtrip_reversed():
    ltd, norm, caps, c = make_ctx()
    u = ring("U")
    w = FreeState.pure(ltd, norm, caps, c, [[ring("V1")]])
    st = w.apply_tminus_inv(1, u)
    st = st.apply_tminus(1, u, shared_slot=st.open)
    assert st == w.with_identity_open()


def test_rtt_swap_involution():
    ltd, norm, caps, c = make_ctx()
    w = FreeState.pure(ltd, norm, caps, c, [[ring("V1"), ring("V2")]])
    swapped = w.rtt_swap(1, 1)
    assert swapped.terms[0].words[0][0][0].mono == RatFunc.var("V2")
    assert swapped.rtt_swap(1, 1) == w


def test_canonicalize_sorts_words():
    ltd, norm, caps, c = make_ctx()
    w = FreeState.pure(ltd, norm, caps, c, [[ring("V2"), ring("V1")]])
    canon = w.canonicalize()
    monos = [repr(a.mono) for a, _ in canon.terms[0].words[0]]
    assert monos == sorted(monos)
    # canonical forms of RTT-equivalent states agree
    assert canon == w.rtt_swap(1, 1).canonicalize()


def test_operator_commutes_with_rtt_rewriting():
    # applying the lowering operator before or after an RTT swap gives the
    # same state, since the swap is an exact rewriting
    ltd, norm, caps, c = make_ctx()
    u = ring("U")
    w = FreeState.pure(ltd, norm, caps, c, [[ring("V1"), ring("V2")]])
    assert w.rtt_swap(1, 1).apply_tminus(1, u) == \
        w.apply_tminus(1, u).rtt_swap(1, 1)


def test_translate_d_vacuum_is_zero():
    ltd, norm, caps, c = make_ctx()
    vac = FreeState.vacuum(ltd, norm, caps, c)
    assert len(vac.translate_d().terms) == 0


def test_translate_d_marks_word_slot():
    ltd, norm, caps, c = make_ctx()
    w = FreeState.pure(ltd, norm, caps, c, [[ring("X")]])
    d = w.translate_d()
    # the coefficient of a pure state does not depend on the argument, so
    # only the derivative-marked term survives
    assert len(d.terms) == 1
    assert d.terms[0].words[0][0][1] == 1


def test_translate_d_coefficient_term():
    # after a lowering operator the coefficient depends on the capped word
    # argument, so the derivative produces a coefficient term as well
    ltd, norm, caps, c = make_ctx(extra_caps={"u": 2})
    w = FreeState.pure(ltd, norm, caps, c, [[Arg.make(1, {"u": -1})]])
    st = w.apply_tminus(1, ring("U"))
    d = st.translate_d()
    assert len(d.terms) == 2
    assert d.caps["u"] == 1
    marks = sorted(t.words[0][0][1] for t in d.terms)
    assert marks == [0, 1]


def test_translate_d_is_linear():
    ltd, norm, caps, c = make_ctx(extra_caps={"u": 2})
    w = FreeState.pure(ltd, norm, caps, c, [[Arg.make(1, {"u": -1})]])
    st = w.apply_tminus(1, ring("U"))
    three = RatFunc.const(3)
    assert st.scale(three).translate_d() == st.translate_d().scale(three)


def test_marked_words_refuse_operators():
    ltd, norm, caps, c = make_ctx()
    d = FreeState.pure(ltd, norm, caps, c, [[ring("X")]]).translate_d()
    with pytest.raises(ValueError):
        d.apply_tminus(1, ring("U"))
    d2 = FreeState.pure(ltd, norm, caps, c,
                        [[ring("X"), ring("Y")]]).translate_d()
    with pytest.raises(ValueError):
        d2.rtt_swap(1, 1)


def test_merge_vacuum_factor_is_identity():
    ltd, norm, caps, c = make_ctx()
    st = FreeState.pure(ltd, norm, caps, c, [[], [ring("X")]])
    assert st.merge_y(1, 2, ring("Zz")) == \
        FreeState.pure(ltd, norm, caps, c, [[ring("X")]])


def test_merge_into_vacuum_shifts_word():
    ltd, norm, caps, c = make_ctx()
    st = FreeState.pure(ltd, norm, caps, c, [[ring("X")], []])
    out = st.merge_y(1, 2, ring("Zz"))
    assert out.factors == 1 and out.open == 1
    arg = out.terms[0].words[0][0][0]
    assert repr(arg.mono) == "X*Zz"


def test_merge_requires_uniform_word():
    ltd, norm, caps, c = make_ctx()
    d = FreeState.pure(ltd, norm, caps, c,
                       [[ring("X")], [ring("Y")]]).translate_d()
    with pytest.raises(ValueError):
        d.merge_y(1, 2, ring("Zz"))


def test_serialization_roundtrip():
    ltd, norm, caps, c = make_ctx()
    st = FreeState.pure(ltd, norm, caps, c, [[ring("V1")]]) \
        .apply_tminus(1, ring("U"))
    back = FreeState.from_data(st.to_data())
    assert back == st
    assert back.c == st.c and back.open == st.open


def test_serialization_is_json_compatible():
    import json
    ltd, norm, caps, c = make_ctx(extra_caps={"u": 2})
    st = FreeState.pure(ltd, norm, caps, c, [[Arg.make(1, {"u": -1})]])
    data = json.loads(json.dumps(st.to_data()))
    assert FreeState.from_data(data) == st


def test_residual_reports_witness():
    ltd, norm, caps, c = make_ctx()
    a = FreeState.pure(ltd, norm, caps, c, [[ring("X")]])
    b = a.scale(RatFunc.const(2))
    count, witness = a.residual(b)
    assert count > 0 and witness is not None
    assert a != b


def test_states_unhashable():
    ltd, norm, caps, c = make_ctx()
    st = FreeState.vacuum(ltd, norm, caps, c)
    with pytest.raises(TypeError):
        hash(st)
