import pytest

from rmx.hseries import HSeries
from rmx.lietype import lie_type_data
from rmx.ratfunc import RatFunc
from rmx.rmatrix import (Arg, build_constant_ops, m_diag, rhat, rhat_inv,
                         rplus, solve_normalizer)
from rmx.tensorop import TensorOp

CAPS = {"h": 3}
Z = RatFunc.var("Z")


@pytest.mark.parametrize("family,n", [("B", 1), ("C", 1), ("D", 2), ("C", 2)])
def test_p_squares_to_identity(family, n):
    ops = build_constant_ops(lie_type_data(family, n), CAPS)
    assert (ops["P"] * ops["P"]).is_identity()


@pytest.mark.parametrize("family,n", [("B", 1), ("C", 1), ("D", 2), ("C", 2)])
def test_q_squares_to_n_times_q(family, n):
    ltd = lie_type_data(family, n)
    q = build_constant_ops(ltd, CAPS)["Q"]
    assert q * q == q.scale(ltd.N)


@pytest.mark.parametrize("family,n", [("B", 1), ("C", 1), ("D", 2), ("C", 2)])
def test_pq_proportional_to_q_classically(family, n):
    # in the classical limit P*Q = Q*P = tau*Q with tau = -1 symplectic,
    # +1 orthogonal; found by brute division of matching entries
    ltd = lie_type_data(family, n)
    ops = build_constant_ops(ltd, CAPS)
    cls = lambda t: t.map_entries(lambda s: HSeries.const(s.coeff({}), CAPS))
    p, q = cls(ops["P"]), cls(ops["Q"])
    pq = p * q
    key = sorted(q.entries)[0]
    tau = pq.entries[key] / q.entries[key]
    assert tau == HSeries.const(-1 if family == "C" else 1, CAPS)
    assert pq == q.scale(tau)
    assert q * p == q.scale(tau)


@pytest.mark.xfail(strict=True,
                   reason="deformed Q: P*Q is proportional to Q only at h=0; "
                          "the per-entry ratios involve distinct weight powers")
def test_pq_proportional_to_q_deformed():
    ops = build_constant_ops(lie_type_data("C", 1), CAPS)
    p, q = ops["P"], ops["Q"]
    pq = p * q
    key = sorted(q.entries)[0]
    tau = pq.entries[key] / q.entries[key]
    assert pq == q.scale(tau)


def test_rconst_classical_limit():
    ltd = lie_type_data("B", 1)
    r = build_constant_ops(ltd, CAPS)["Rconst"]
    classical = r.map_entries(lambda s: HSeries.const(s.coeff({}), CAPS))
    assert classical.is_identity()


def test_rplus_classical_limit():
    ltd = lie_type_data("C", 1)
    x = HSeries.const(Z, CAPS)
    rp = rplus(ltd, x, CAPS)
    ident = TensorOp.identity(ltd.N, 2, CAPS)
    expect = ident.scale(HSeries.const((Z - 1) ** 2, CAPS))
    classical = rp.map_entries(lambda s: HSeries.const(s.coeff({}), CAPS))
    assert classical == expect


def test_rplus_entries_quadratic_in_x():
    ltd = lie_type_data("B", 1)
    rp = rplus(ltd, HSeries.const(Z, CAPS), CAPS)
    for val in rp.entries.values():
        for coeff in val.terms.values():
            assert coeff.denom_is_monomial()
            assert coeff.denom_monomial_exponent("Z") == 0
            for md, _ in coeff.numer_terms():
                assert md.get("Z", 0) <= 2


def test_rplus_h1_entry_hand_expansion():
    # C1 entry e12(x)e21 of R+(Z): q^{-1}(Z-1)(Z-xi)(q-q^{-1})(1+q^{-2})
    #   - (q^{-2}-1)(Z-xi) - xi(q^{-2}-1)(Z-1)q^{-2}, whose h^1 part is
    # 2(Z-1)^2 + 2(Z-1) = 2Z(Z-1)
    ltd = lie_type_data("C", 1)
    rp = rplus(ltd, HSeries.const(Z, CAPS), CAPS)
    entry = rp.entries[((0, 1), (1, 0))]
    assert entry.coeff({"h": 1}) == 2 * Z * (Z - 1)


@pytest.mark.parametrize("family,n", [("B", 1), ("C", 1), ("D", 2)])
def test_rhat_classical_limit(family, n):
    ltd = lie_type_data(family, n)
    norm = solve_normalizer(ltd, L=3)
    r = rhat(ltd, norm, Arg.make(Z), CAPS)
    classical = r.map_entries(lambda s: HSeries.const(s.coeff({}), CAPS))
    assert classical.is_identity()


def test_rhat_unitarity_c1():
    ltd = lie_type_data("C", 1)
    norm = solve_normalizer(ltd, L=3)
    arg = Arg.make(Z)
    r12 = rhat(ltd, norm, arg, CAPS)
    p = build_constant_ops(ltd, CAPS)["P"]
    r21_neg = p * rhat(ltd, norm, arg.neg(), CAPS) * p
    assert (r12 * r21_neg).is_identity()


def test_rhat_inv_is_inverse():
    ltd = lie_type_data("C", 1)
    norm = solve_normalizer(ltd, L=3)
    arg = Arg.make(Z)
    assert (rhat(ltd, norm, arg, CAPS)
            * rhat_inv(ltd, norm, arg, CAPS)).is_identity()


def test_rhat_crossing_c1():
    ltd = lie_type_data("C", 1)
    norm = solve_normalizer(ltd, L=3)
    r_u = rhat(ltd, norm, Arg.make(Z), CAPS)
    r_shift = rhat(ltd, norm, Arg.make(Z, {"h": -ltd.kappa}), CAPS)
    m = m_diag(ltd, CAPS)
    lhs = r_u * r_shift.transpose_slot(1, ltd).conj_diag(m, 1, 1)
    assert lhs.is_identity()


def test_rtilde_neumann_inverse_agrees_with_unitarity_route():
    ltd = lie_type_data("C", 1)
    norm = solve_normalizer(ltd, L=3)
    arg = Arg.make(Z)
    r = rhat(ltd, norm, arg, CAPS)
    assert r.inv() == rhat_inv(ltd, norm, arg, CAPS)


def test_rhat_pole_at_coinciding_points():
    ltd = lie_type_data("C", 1)
    norm = solve_normalizer(ltd, L=3)
    with pytest.raises(ZeroDivisionError):
        rhat(ltd, norm, Arg.make(1), CAPS)
