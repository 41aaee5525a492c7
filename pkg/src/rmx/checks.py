"""Built-in named checks for the R-matrix identities.

Every check evaluates both sides exactly at finite truncation order and
reports the number of nonzero residual entries with one witness.  The
catalog covers the Yang-Baxter equation, crossing symmetry, unitarity,
the normalizer functional equation and its product chain, the inverse
transposed chain identity, and the correspondence between the additive
and multiplicative R-matrix pictures.
"""

from __future__ import annotations

from fractions import Fraction

from .hseries import HSeries
from .lietype import lie_type_data
from .ratfunc import RatFunc
from .report import CheckReport, timed_report
from .rmatrix import Arg, m_diag, rhat_inv, rmatrix, solve_normalizer
from .script import EvalError, evaluate_sides, parse_script
from .tensorop import TensorOp

__all__ = ["builtin_check", "evaluate", "correspondence_check",
           "CHECK_NAMES", "prefactor_substitute", "PolynomialityError"]


class PolynomialityError(RuntimeError):
    """Prefactor too small: a coefficient is not polynomial/Laurent as required."""


def _residual_of(lhs: TensorOp, rhs: TensorOp):
    diff = lhs - rhs
    count = diff.nonzero_count()
    return ("pass" if count == 0 else "fail"), count, diff.witness()


def _scalar_residual(lhs: HSeries, rhs: HSeries):
    diff = lhs - rhs
    if diff.is_zero():
        return "pass", 0, None
    return "fail", 1, repr(diff)


def evaluate(script, name="script") -> CheckReport:
    """Evaluate a parsed identity script to a report."""
    params = {"family": script.family, "n": script.n, "L": script.order,
              "slots": script.slots}

    def run():
        lhs, rhs = evaluate_sides(script)
        return _residual_of(lhs, rhs)

    return timed_report(name, params, run)


# ---------------------------------------------------------------- catalog

def _script_header(family, n, L, slots, spectral, formal=()):
    lines = [f"type {family} {n}", f"order {L}", f"slots {slots}"]
    if spectral:
        lines.append("spectral " + " ".join(spectral))
    for fname, cap in formal:
        lines.append(f"formal {fname} : {cap}")
    return "\n".join(lines) + "\n"


def _frac_term(coeff: Fraction, name: str) -> str:
    coeff = Fraction(coeff)
    if coeff == 1:
        return f"+{name}"
    if coeff == -1:
        return f"-{name}"
    sign = "+" if coeff > 0 else "-"
    c = abs(coeff)
    body = str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"
    return f"{sign}{body}{name}"


def _ybe(rname):
    return (f"check {rname}[1,2](u) * {rname}[1,3](u+v) * {rname}[2,3](v) == "
            f"{rname}[2,3](v) * {rname}[1,3](u+v) * {rname}[1,2](u)\n")


def _crossing(rname, kappa):
    shifted = "u" + _frac_term(kappa, "h")
    return (f"check {rname}[1,2](u) * conjM[1]({rname}[1,2]({shifted})^t[1]) "
            f"== 1\n")


def _check_ybe_hat(family, n, L, **_):
    script = parse_script(
        _script_header(family, n, L, 3, ("u", "v")) + _ybe("Rhat"))
    lhs, rhs = evaluate_sides(script)
    return _residual_of(lhs, rhs)


def _check_ybe_tilde(family, n, L, **_):
    script = parse_script(
        _script_header(family, n, L, 3, ("u", "v")) + _ybe("Rtilde"))
    lhs, rhs = evaluate_sides(script)
    return _residual_of(lhs, rhs)


def _check_crossing_hat(family, n, L, **_):
    kappa = lie_type_data(family, n).kappa
    script = parse_script(
        _script_header(family, n, L, 2, ("u",)) + _crossing("Rhat", kappa))
    lhs, rhs = evaluate_sides(script)
    return _residual_of(lhs, rhs)


def _check_crossing_tilde(family, n, L, **_):
    kappa = lie_type_data(family, n).kappa
    script = parse_script(
        _script_header(family, n, L, 2, ("u",)) + _crossing("Rtilde", kappa))
    lhs, rhs = evaluate_sides(script)
    return _residual_of(lhs, rhs)


def _check_unitarity_hat(family, n, L, **_):
    script = parse_script(
        _script_header(family, n, L, 2, ("u",))
        + "check Rhat[1,2](u) * Rhat[2,1](-u) == 1\n")
    lhs, rhs = evaluate_sides(script)
    return _residual_of(lhs, rhs)


def _check_gfunc(family, n, L, **_):
    # the defining functional equation of the normalizing series
    ltd = lie_type_data(family, n)
    norm = solve_normalizer(ltd, L=L)
    caps = {"h": L}
    g = norm.g1
    lhs = g * g.subst_mult("z", HSeries.exp_shift({"h": -ltd.kappa}, caps))
    rhs = HSeries.one(caps)
    for a in (-1, 1, -ltd.kappa, ltd.kappa):
        rhs = rhs * (1 - HSeries.const(RatFunc.var("z"), caps)
                     * HSeries.exp_shift({"h": Fraction(a)}, caps))
    return _scalar_residual(lhs, rhs.inv())


def _check_g_one(family, n, L, **_):
    # e^{(1+2k)h} g1(Z) g1(1/Z) (Z-e^{-h})(Z-e^{-kh})(1/Z-e^{-h})(1/Z-e^{-kh}) = 1
    ltd = lie_type_data(family, n)
    norm = solve_normalizer(ltd, L=L)
    caps = {"h": L}
    Z = RatFunc.var("Z")
    g_pos = norm.g1_at(Arg.make(Z), caps)
    g_neg = norm.g1_at(Arg.make(1 / Z), caps)
    lhs = HSeries.exp_shift({"h": 1 + 2 * ltd.kappa}, caps) * g_pos * g_neg
    for mono in (Z, 1 / Z):
        for a in (-1, -ltd.kappa):
            lhs = lhs * (HSeries.const(mono, caps)
                         - HSeries.exp_shift({"h": Fraction(a)}, caps))
    return _scalar_residual(lhs, HSeries.one(caps))


def _check_csuni(family, n, L, k=1, c=Fraction(1), **_):
    # inverse chain * M * transposed shifted inverse chain = M
    ltd = lie_type_data(family, n)
    norm = solve_normalizer(ltd, L=L)
    caps = {"h": L}
    m = k + 1
    mslot = m
    u = RatFunc.var("u")
    hc2 = Fraction(c) / 2

    def chain(extra_shift):
        # R(-u+v_k+...)^-1 ... R(-u+v_1+...)^-1 embedded at (i, k+1)
        out = TensorOp.identity(ltd.N, m, caps)
        for i in range(k, 0, -1):
            arg = Arg.make(RatFunc.var(f"v{i}") / u,
                           {"h": -(hc2 + extra_shift)})
            out = out * rhat_inv(ltd, norm, arg, caps).embed((i, mslot), m)
        return out

    mdiag = m_diag(ltd, caps)
    mop = TensorOp(ltd.N, 1, caps,
                   {((i,), (i,)): mdiag[i] for i in range(ltd.N)}).embed(
        (mslot,), m)
    lhs = chain(Fraction(0)) * mop \
        * chain(-ltd.kappa).transpose_slot(mslot, ltd)
    return _residual_of(lhs, mop)


_CATALOG = {
    "ybe_hat": _check_ybe_hat,
    "crossing_hat": _check_crossing_hat,
    "unitarity_hat": _check_unitarity_hat,
    "ybe_tilde": _check_ybe_tilde,
    "crossing_tilde": _check_crossing_tilde,
    "gfunc": _check_gfunc,
    "g_one": _check_g_one,
    "csuni": _check_csuni,
}

CHECK_NAMES = tuple(sorted(_CATALOG))


def builtin_check(name, family, n, L=3, **kwargs) -> CheckReport:
    if name not in _CATALOG:
        raise KeyError(f"unknown check {name!r}; available: {CHECK_NAMES}")
    params = {"family": family, "n": n, "L": L, **kwargs}
    return timed_report(name, params,
                        lambda: _CATALOG[name](family, n, L, **kwargs))


# ------------------------------------------------- prefactor calculus

def _coeff_is_poly_x_laurent_y(coeff: RatFunc, xname: str, yname: str) -> bool:
    if not coeff.denom_is_monomial():
        return False
    terms = coeff.denom_terms()
    (md, _), = terms
    return all(v == yname for v in md)


def prefactor_substitute(op: TensorOp, r: int, xname: str, yname: str,
                         zname: str) -> TensorOp:
    """Multiply by (x-y)^r, verify each coefficient is polynomial in x and
    Laurent in y, then substitute y = x*z exactly.

    Raises PolynomialityError if any coefficient fails the shape test; the
    substitution is only defined on the verified decomposition.
    """
    x = RatFunc.var(xname)
    y = RatFunc.var(yname)
    scaled = op.scale((x - y) ** r)
    for key in sorted(scaled.entries):
        series = scaled.entries[key]
        for mono, coeff in series.terms.items():
            if not _coeff_is_poly_x_laurent_y(coeff, xname, yname):
                raise PolynomialityError(
                    f"entry {key}, monomial {mono}: coefficient {coeff} is "
                    f"not polynomial in {xname} / Laurent in {yname}")
    return scaled.subs_ring_var(yname, x * RatFunc.var(zname))


def correspondence_check(family, n, alpha, a=2, b=2, l=3, r_start=0,
                         r_max=16) -> CheckReport:
    """Match the multiplicative R-matrix at x*e^{u-v+alpha*h}/y against the
    additive one at -z0-u+v-alpha*h after clearing the (x-y) pole and
    substituting y = x*e^{-z0}, coefficientwise mod the caps."""
    if a < 1 or b < 1 or l < 1:
        raise ValueError("caps and order must be at least 1")
    alpha = Fraction(alpha)
    params = {"family": family, "n": n, "alpha": alpha, "a": a, "b": b,
              "l": l, "r_start": r_start, "r_max": r_max}

    def run():
        ltd = lie_type_data(family, n)
        norm = solve_normalizer(ltd, L=max(l, 1))
        caps = {"h": l, "u": a, "v": b}
        x = RatFunc.var("x")
        y = RatFunc.var("y")
        lhs_raw = rmatrix(ltd, norm, Arg.make(
            x / y, {"u": 1, "v": -1, "h": alpha}), caps)
        lhs = None
        for r in range(r_start, r_max + 1):
            try:
                lhs = prefactor_substitute(lhs_raw, r, "x", "y", "Z0")
            except PolynomialityError:
                continue
            break
        else:
            return ("inconclusive", 0,
                    f"no admissible prefactor exponent r <= {r_max}")
        z0 = RatFunc.var("Z0")
        rhs = rmatrix(ltd, norm, Arg.make(
            1 / z0, {"u": 1, "v": -1, "h": alpha}), caps)
        rhs = rhs.scale(x ** r * (1 - z0) ** r)
        verdict, count, witness = _residual_of(lhs, rhs)
        if verdict == "pass":
            witness = f"r={r}"
            return "pass", 0, witness
        return verdict, count, witness

    return timed_report("correspondence", params, run)
