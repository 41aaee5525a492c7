"""Exact multivariate rational functions over Q.

RatFunc is the coefficient field for every truncated object in the
package: a fully reduced fraction of multivariate polynomials with
arbitrary-precision rational coefficients.  Reduction and canonical sign
normalization are delegated to sympy's sparse polynomial rings; the
wrapper adds variable-set unification, substitution of a variable by
another rational function, and a deterministic serialization.

Canonical form: gcd(num, den) = 1 and the leading coefficient of the
denominator under graded-lex order is positive, so equality is plain
structural equality.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from sympy import QQ
from sympy.polys.fields import field as _mkfield

__all__ = ["RatFunc"]


@lru_cache(maxsize=None)
def _field_for(names: tuple):
    assert names, "empty variable tuple handled by the Fraction fast path"
    return _mkfield(",".join(names), QQ, order="grlex")[0]


def _lift_poly(poly, old_names, new_ring, idx_map):
    nvars = len(new_ring.gens)
    data = {}
    for monom, coeff in poly.terms():
        m2 = [0] * nvars
        for i, e in enumerate(monom):
            m2[idx_map[i]] = e
        data[tuple(m2)] = coeff
    return new_ring.from_dict(data)


def _qq_to_fraction(c) -> Fraction:
    return Fraction(int(c.numerator), int(c.denominator))


class RatFunc:
    """A reduced fraction of multivariate polynomials over Q.

    Immutable.  ``vars`` is the sorted tuple of variable names; a value
    with ``vars == ()`` is a plain rational constant (stored as
    ``fractions.Fraction``), which keeps scalar-heavy computations off
    the polynomial path.
    """

    __slots__ = ("vars", "_val")

    def __init__(self, names, val):
        self.vars = tuple(names)
        self._val = val

    # -- constructors -------------------------------------------------

    @staticmethod
    def const(c) -> "RatFunc":
        return RatFunc((), Fraction(c))

    @staticmethod
    def var(name: str) -> "RatFunc":
        fld = _field_for((name,))
        return RatFunc((name,), fld.gens[0])

    @staticmethod
    def zero() -> "RatFunc":
        return RatFunc((), Fraction(0))

    @staticmethod
    def one() -> "RatFunc":
        return RatFunc((), Fraction(1))

    # -- unification --------------------------------------------------

    def lift(self, names) -> "RatFunc":
        """Return self viewed in the field with variables ``names``."""
        names = tuple(names)
        if names == self.vars:
            return self
        if not names:
            assert self.is_constant()
            return RatFunc((), self.as_fraction())
        fld = _field_for(names)
        if not self.vars:
            c = QQ(self._val.numerator, self._val.denominator)
            return RatFunc(names, fld.ground_new(c))
        idx_map = [names.index(v) for v in self.vars]
        num = _lift_poly(self._val.numer, self.vars, fld.ring, idx_map)
        den = _lift_poly(self._val.denom, self.vars, fld.ring, idx_map)
        return RatFunc(names, fld.new(num, den))

    def _unify(self, other):
        if not isinstance(other, RatFunc):
            other = RatFunc.const(other)
        if self.vars == other.vars:
            return self, other
        names = tuple(sorted(set(self.vars) | set(other.vars)))
        return self.lift(names), other.lift(names)

    def trim(self) -> "RatFunc":
        """Drop variables that no longer occur (after cancellation)."""
        if not self.vars:
            return self
        used = set()
        for poly in (self._val.numer, self._val.denom):
            for monom in poly.monoms():
                for name, e in zip(self.vars, monom):
                    if e:
                        used.add(name)
        if len(used) == len(self.vars):
            return self
        if not used:
            num = self._val.numer.LC if self._val.numer else QQ(0)
            den = self._val.denom.LC
            return RatFunc((), _qq_to_fraction(num) / _qq_to_fraction(den))
        names = tuple(sorted(used))
        fld = _field_for(names)
        keep = [i for i, v in enumerate(self.vars) if v in used]

        def shrink(poly):
            data = {}
            for monom, coeff in poly.terms():
                data[tuple(monom[i] for i in keep)] = coeff
            return fld.ring.from_dict(data)

        return RatFunc(names, fld.new(shrink(self._val.numer), shrink(self._val.denom)))

    # -- predicates ---------------------------------------------------

    def is_zero(self) -> bool:
        if not self.vars:
            return self._val == 0
        return not self._val

    def is_one(self) -> bool:
        if not self.vars:
            return self._val == 1
        return self._val == self._val.field.one

    def is_constant(self) -> bool:
        if not self.vars:
            return True
        v = self._val
        return v.denom.is_ground and v.numer.is_ground

    def as_fraction(self) -> Fraction:
        if not self.vars:
            return self._val
        if not self.is_constant():
            raise ValueError(f"not a constant: {self}")
        num = self._val.numer.LC if self._val.numer else QQ(0)
        return _qq_to_fraction(num) / _qq_to_fraction(self._val.denom.LC)

    # -- arithmetic ---------------------------------------------------

    def __add__(self, other):
        a, b = self._unify(other)
        return RatFunc(a.vars, a._val + b._val)

    __radd__ = __add__

    def __sub__(self, other):
        a, b = self._unify(other)
        return RatFunc(a.vars, a._val - b._val)

    def __rsub__(self, other):
        a, b = self._unify(other)
        return RatFunc(a.vars, b._val - a._val)

    def __mul__(self, other):
        a, b = self._unify(other)
        return RatFunc(a.vars, a._val * b._val)

    __rmul__ = __mul__

    def __truediv__(self, other):
        a, b = self._unify(other)
        if b.is_zero():
            raise ZeroDivisionError("division of rational functions by zero")
        return RatFunc(a.vars, a._val / b._val)

    def __rtruediv__(self, other):
        if self.is_zero():
            raise ZeroDivisionError("division of rational functions by zero")
        a, b = self._unify(other)
        return RatFunc(a.vars, b._val / a._val)

    def __neg__(self):
        return RatFunc(self.vars, -self._val)

    def __pow__(self, n: int):
        if not isinstance(n, int):
            raise TypeError("only integer powers")
        if n < 0:
            if self.is_zero():
                raise ZeroDivisionError("negative power of zero")
            if not self.vars:
                return RatFunc((), self._val ** n)
            return RatFunc(self.vars, self._val ** n)
        if not self.vars:
            return RatFunc((), self._val ** n)
        return RatFunc(self.vars, self._val ** n)

    def __eq__(self, other):
        if not isinstance(other, RatFunc):
            if isinstance(other, (int, Fraction)):
                other = RatFunc.const(other)
            else:
                return NotImplemented
        a, b = self._unify(other)
        return a._val == b._val

    def __hash__(self):
        t = self.trim()
        if not t.vars:
            return hash(t._val)
        return hash((t.vars, tuple(t._val.numer.terms()), tuple(t._val.denom.terms())))

    # -- calculus / substitution --------------------------------------

    def diff(self, name: str) -> "RatFunc":
        """Partial derivative with respect to the ring variable ``name``."""
        if name not in self.vars:
            return RatFunc.zero()
        fld = _field_for(self.vars)
        return RatFunc(self.vars, self._val.diff(fld.gens[self.vars.index(name)]))

    def subs_var(self, name: str, value: "RatFunc") -> "RatFunc":
        """Substitute ``name`` by ``value`` (an arbitrary RatFunc).

        Raises ZeroDivisionError if the substituted denominator vanishes.
        """
        if name not in self.vars:
            return self
        names = tuple(sorted((set(self.vars) - {name}) | set(value.vars)))
        idx = self.vars.index(name)

        def eval_poly(poly):
            acc = RatFunc.zero()
            powers = {0: RatFunc.one()}

            def vpow(e):
                if e not in powers:
                    powers[e] = value ** e
                return powers[e]

            for monom, coeff in poly.terms():
                rest = {}
                restnames = []
                term = RatFunc.const(_qq_to_fraction(coeff))
                for v, e in zip(self.vars, monom):
                    if v == name or e == 0:
                        continue
                    term = term * RatFunc.var(v) ** e
                term = term * vpow(monom[idx])
                acc = acc + term
            return acc

        num = eval_poly(self._val.numer)
        den = eval_poly(self._val.denom)
        if den.is_zero():
            raise ZeroDivisionError(
                f"substitution {name} -> {value} annihilates a denominator")
        out = num / den
        return out.trim()

    # -- structure inspection -----------------------------------------

    def numer_terms(self):
        """Deterministic (monomial-dict, Fraction) view of the numerator."""
        return self._poly_terms(0)

    def denom_terms(self):
        return self._poly_terms(1)

    def _poly_terms(self, which):
        if not self.vars:
            val = self._val if which == 0 else Fraction(1)
            return [] if val == 0 else [({}, val)]
        poly = self._val.numer if which == 0 else self._val.denom
        out = []
        for monom, coeff in sorted(poly.terms()):
            md = {v: e for v, e in zip(self.vars, monom) if e}
            out.append((md, _qq_to_fraction(coeff)))
        return out

    def denom_is_monomial(self) -> bool:
        """True iff the reduced denominator is a single term c*prod(v^e)."""
        if not self.vars:
            return True
        return len(self.denom_terms()) == 1

    def denom_monomial_exponent(self, name: str) -> int:
        """Exponent of ``name`` in a monomial denominator."""
        terms = self.denom_terms()
        if len(terms) != 1:
            raise ValueError("denominator is not a monomial")
        return terms[0][0].get(name, 0)

    def remove_denominator_factor(self, factor: "RatFunc"):
        """Return (k, rest) with den = factor^k * rest, factor not dividing rest."""
        if not self.vars:
            return 0, self
        f = factor.lift(self.vars)
        assert f._val.denom == f._val.denom.ring.one
        fp = f._val.numer
        den = self._val.denom
        k = 0
        while True:
            q, r = divmod(den, fp)
            if r or not q:
                break
            den = q
            k += 1
        fld = _field_for(self.vars)
        return k, RatFunc(self.vars, fld.new(self._val.numer, den))

    # -- printing / serialization -------------------------------------

    def _poly_str(self, terms):
        if not terms:
            return "0"
        parts = []
        for md, coeff in terms:
            factors = []
            if not md or abs(coeff) != 1:
                factors.append(str(coeff))
            for v in sorted(md):
                e = md[v]
                factors.append(v if e == 1 else f"{v}^{e}")
            body = "*".join(factors) if factors else "1"
            if coeff == 1 and md:
                parts.append(body)
            elif coeff == -1 and md:
                parts.append("-" + "*".join(
                    v if md[v] == 1 else f"{v}^{md[v]}" for v in sorted(md)))
            else:
                parts.append(body)
        s = parts[0]
        for p in parts[1:]:
            s += " - " + p[1:] if p.startswith("-") else " + " + p
        return s

    def __repr__(self):
        num = self._poly_str(self.numer_terms())
        den_terms = self.denom_terms()
        if len(den_terms) == 1 and den_terms[0] == ({}, Fraction(1)):
            return num
        return f"({num})/({self._poly_str(den_terms)})"

    def to_data(self):
        """Deterministic plain-data form: [vars, num-terms, den-terms]."""
        t = self.trim()

        def enc(terms):
            return [[sorted(md.items()), [v.numerator, v.denominator]]
                    for md, v in terms]

        return [list(t.vars), enc(t.numer_terms()), enc(t.denom_terms())]

    @staticmethod
    def from_data(data) -> "RatFunc":
        names, num, den = data
        names = tuple(names)

        def dec(terms):
            acc = RatFunc.zero()
            for md, (p, q) in terms:
                term = RatFunc.const(Fraction(p, q))
                for v, e in md:
                    term = term * RatFunc.var(v) ** e
                acc = acc + term
            return acc

        numer = dec(num)
        if not den or den == [[[], [1, 1]]]:
            return numer
        return numer / dec(den)
