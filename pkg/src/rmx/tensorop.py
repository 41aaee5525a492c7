"""Sparse operators on tensor powers of C^N with truncated-series entries.

Rows and columns are tuples of 0-based per-slot indices, so an operator on m
slots maps index tuples of length m to index tuples of length m.  Entries are
HSeries; absent entries are zero.  Slot arguments in the public API are
1-based, matching the usual subscript notation A_{rs} for embeddings.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

from .hseries import HSeries
from .ratfunc import RatFunc

__all__ = ["TensorOp"]


def _as_hseries(value, caps):
    if isinstance(value, HSeries):
        return value
    return HSeries.const(value, caps)


class TensorOp:

    __slots__ = ("N", "m", "caps", "entries")

    def __init__(self, N: int, m: int, caps: dict, entries: dict):
        self.N = N
        self.m = m
        self.caps = dict(caps)
        self.entries = {}
        for key, val in entries.items():
            row, col = key
            assert len(row) == m and len(col) == m
            if not val.is_zero():
                self.entries[(tuple(row), tuple(col))] = val

    # -- constructors -------------------------------------------------

    @staticmethod
    def identity(N, m, caps) -> "TensorOp":
        one = HSeries.one(caps)
        idx = itertools.product(range(N), repeat=m)
        return TensorOp(N, m, caps, {(i, i): one for i in map(tuple, idx)})

    @staticmethod
    def zero(N, m, caps) -> "TensorOp":
        return TensorOp(N, m, caps, {})

    @staticmethod
    def unit(N, i, j, caps, coeff=1) -> "TensorOp":
        """Single-slot matrix unit e_ij (0-based), optionally scaled."""
        return TensorOp(N, 1, caps, {((i,), (j,)): _as_hseries(coeff, caps)})

    # -- ring operations ----------------------------------------------

    def __add__(self, other):
        assert (self.N, self.m) == (other.N, other.m)
        entries = dict(self.entries)
        for key, val in other.entries.items():
            entries[key] = entries[key] + val if key in entries else val
        return TensorOp(self.N, self.m, self._join_caps(other), entries)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return TensorOp(self.N, self.m, self.caps,
                        {k: -v for k, v in self.entries.items()})

    def _join_caps(self, other):
        caps = dict(self.caps)
        for n, c in other.caps.items():
            caps[n] = min(c, caps[n]) if n in caps else c
        return caps

    def scale(self, scalar) -> "TensorOp":
        """Multiply every entry by a scalar (HSeries, RatFunc or rational)."""
        return TensorOp(self.N, self.m, self.caps,
                        {k: v * scalar for k, v in self.entries.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, RatFunc, HSeries)):
            return self.scale(other)
        assert (self.N, self.m) == (other.N, other.m)
        by_row = {}
        for (row, col), val in other.entries.items():
            by_row.setdefault(row, []).append((col, val))
        entries = {}
        for (row, mid), a in self.entries.items():
            for col, b in by_row.get(mid, ()):
                key = (row, col)
                prod = a * b
                entries[key] = entries[key] + prod if key in entries else prod
        return TensorOp(self.N, self.m, self._join_caps(other), entries)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction, RatFunc, HSeries)):
            return self.scale(other)
        return NotImplemented

    def __eq__(self, other):
        if not isinstance(other, TensorOp):
            return NotImplemented
        return (self - other).is_zero()

    def __hash__(self):
        raise TypeError("TensorOp is unhashable")

    def is_zero(self) -> bool:
        return all(v.is_zero() for v in self.entries.values())

    def is_identity(self) -> bool:
        return (self - TensorOp.identity(self.N, self.m, self.caps)).is_zero()

    def inv(self) -> "TensorOp":
        """Inverse by Neumann iteration; requires invertible entrywise-constant
        part only in the special case handled here: classical part equal to a
        scalar multiple of the identity."""
        ident = TensorOp.identity(self.N, self.m, self.caps)
        # split T = c*(1 - X) with X nilpotent mod caps
        diag0 = None
        for (row, col), val in self.entries.items():
            c0 = val.coeff({})
            if row == col:
                if diag0 is None:
                    diag0 = c0
                elif not (c0 - diag0).is_zero():
                    raise ValueError("constant part is not scalar; cannot invert")
            elif not c0.is_zero():
                raise ValueError("constant part is not scalar; cannot invert")
        if diag0 is None or diag0.is_zero():
            raise ZeroDivisionError("operator is not invertible at order zero")
        scaled = self.scale(RatFunc.one() / diag0)
        x = ident - scaled
        acc = ident
        power = ident
        while True:
            power = power * x
            if power.is_zero():
                break
            acc = acc + power
        return acc.scale(RatFunc.one() / diag0)

    # -- structural operations ----------------------------------------

    def embed(self, slots, m: int) -> "TensorOp":
        """View this operator in m slots, its i-th slot placed at slots[i]
        (1-based target positions), identity elsewhere."""
        slots = tuple(slots)
        assert len(slots) == self.m
        assert len(set(slots)) == self.m
        assert all(1 <= s <= m for s in slots)
        pos = [s - 1 for s in slots]
        free = [i for i in range(m) if i + 1 not in slots]
        entries = {}
        one_entries = list(self.entries.items())
        for rest in itertools.product(range(self.N), repeat=len(free)):
            for (row, col), val in one_entries:
                r = [0] * m
                c = [0] * m
                for p, (ri, ci) in zip(pos, zip(row, col)):
                    r[p], c[p] = ri, ci
                for p, x in zip(free, rest):
                    r[p] = c[p] = x
                entries[(tuple(r), tuple(c))] = val
        return TensorOp(self.N, m, self.caps, entries)

    def swap_slots(self, s1: int, s2: int) -> "TensorOp":
        """Conjugate by the flip of two slots (1-based)."""
        a, b = s1 - 1, s2 - 1

        def fl(t):
            t = list(t)
            t[a], t[b] = t[b], t[a]
            return tuple(t)

        return TensorOp(self.N, self.m, self.caps,
                        {(fl(r), fl(c)): v for (r, c), v in self.entries.items()})

    def transpose_slot(self, slot: int, ltd) -> "TensorOp":
        """Twisted transposition e_ij -> eps_i eps_j e_{j'i'} in one slot."""
        s = slot - 1
        entries = {}
        for (row, col), val in self.entries.items():
            i, j = row[s], col[s]
            r = row[:s] + (ltd.iprime(j),) + row[s + 1:]
            c = col[:s] + (ltd.iprime(i),) + col[s + 1:]
            sign = ltd.eps[i] * ltd.eps[j]
            entries[(r, c)] = entries[(r, c)] + val * sign if (r, c) in entries \
                else val * sign
        return TensorOp(self.N, self.m, self.caps, entries)

    def conj_diag(self, diag, slot: int, sign: int = 1) -> "TensorOp":
        """Conjugate by a diagonal single-slot operator: D_s T D_s^{-1}
        (sign=-1 gives D^{-1} T D).  ``diag`` is a list of unit HSeries."""
        s = slot - 1
        inv = [d.inv() for d in diag]
        left, right = (diag, inv) if sign == 1 else (inv, diag)
        return TensorOp(self.N, self.m, self.caps,
                        {(r, c): left[r[s]] * v * right[c[s]]
                         for (r, c), v in self.entries.items()})

    def odot(self, other: "TensorOp", first_slots, mode: str) -> "TensorOp":
        """Ordered product of split operators sharing the full slot space.

        Writing self = sum_a x_a (x) y_a with x_a acting on ``first_slots``
        (1-based) and y_a on the remaining slots,

            mode "LR": sum_a x_a * other * y_a
            mode "RL": sum_a y_a * other * x_a
        """
        assert (self.N, self.m) == (other.N, other.m)
        if mode not in ("LR", "RL"):
            raise ValueError(f"unknown odot mode {mode!r}")
        F = sorted(s - 1 for s in first_slots)
        G = [i for i in range(self.m) if i not in F]

        def split(t):
            return tuple(t[i] for i in F), tuple(t[i] for i in G)

        def join(f, g):
            out = [0] * self.m
            for i, x in zip(F, f):
                out[i] = x
            for i, x in zip(G, g):
                out[i] = x
            return tuple(out)

        # index other by the contraction pattern of each mode
        entries = {}
        if mode == "LR":
            # (A odot_LR B)[R,C] = sum A[(R_F,K'_G),(K_F,C_G)] B[(K_F,R_G),(C_F,K'_G)]
            bmap = {}
            for (br, bc), bv in other.entries.items():
                kf, rg = split(br)
                cf, kg = split(bc)
                bmap.setdefault((kf, kg), []).append((rg, cf, bv))
            for (ar, ac), av in self.entries.items():
                rf, kg = split(ar)
                kf, cg = split(ac)
                for rg, cf, bv in bmap.get((kf, kg), ()):
                    key = (join(rf, rg), join(cf, cg))
                    prod = av * bv
                    entries[key] = entries[key] + prod if key in entries else prod
        else:
            # (A odot_RL B)[R,C] = sum A[(K_F,R_G),(C_F,K_G)] B[(R_F,K_G),(K_F,C_G)]
            bmap = {}
            for (br, bc), bv in other.entries.items():
                rf, kg = split(br)
                kf, cg = split(bc)
                bmap.setdefault((kf, kg), []).append((rf, cg, bv))
            for (ar, ac), av in self.entries.items():
                kf, rg = split(ar)
                cf, kg = split(ac)
                for rf, cg, bv in bmap.get((kf, kg), ()):
                    key = (join(rf, rg), join(cf, cg))
                    prod = av * bv
                    entries[key] = entries[key] + prod if key in entries else prod
        return TensorOp(self.N, self.m, self._join_caps(other), entries)

    # -- entrywise maps ------------------------------------------------

    def map_entries(self, fn) -> "TensorOp":
        return TensorOp(self.N, self.m, self.caps,
                        {k: fn(v) for k, v in self.entries.items()})

    def subs_ring_var(self, name, value) -> "TensorOp":
        return self.map_entries(lambda s: s.subs_ring_var(name, value))

    def subst_mult(self, name, factor) -> "TensorOp":
        return self.map_entries(lambda s: s.subst_mult(name, factor))

    # -- reporting ------------------------------------------------------

    def nonzero_count(self) -> int:
        return sum(1 for v in self.entries.values() if not v.is_zero())

    def witness(self):
        """A deterministic sample nonzero entry: (row, col, repr) or None."""
        for key in sorted(self.entries):
            v = self.entries[key]
            if not v.is_zero():
                return (list(key[0]), list(key[1]), repr(v))
        return None

    def __repr__(self):
        return (f"TensorOp(N={self.N}, m={self.m}, "
                f"{len(self.entries)} nonzero entries)")

    # -- serialization --------------------------------------------------

    def entries_data(self):
        caps = [[n, self.caps[n]] for n in sorted(self.caps)]
        entries = [[list(r), list(c), self.entries[(r, c)].to_data()]
                   for r, c in sorted(self.entries)]
        return [self.N, self.m, caps, entries]

    @staticmethod
    def from_entries_data(data) -> "TensorOp":
        N, m, caps_list, entries = data
        caps = {n: c for n, c in caps_list}
        return TensorOp(N, m, caps,
                        {(tuple(r), tuple(c)): HSeries.from_data(v)
                         for r, c, v in entries})
