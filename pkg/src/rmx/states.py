"""Free-state realization of the vacuum module and its operator calculus.

A state is a linear combination of ordered generator words acting on the
vacuum vector.  Each term keeps

  * ``words`` — per tensor factor, an ordered tuple of slot arguments
    a_1, ..., a_k denoting the product T(a_1)...T(a_k) applied to the
    vacuum (a slot may carry a formal derivative order), and
  * ``coeff`` — a sparse tensor over ``open + sym`` auxiliary slots: the
    first ``open`` slots are genuine matrix slots of the ambient tensor
    space, the remaining ``sym`` slots carry the row/column indices of the
    generator word entries, one slot per word position, factors in order.

The raising operator adds word slots; the lowering operator, its inverse,
the braiding and the RTT swap act through "sandwich tensors": an operator
expression X_0 . T(b_1) . X_1 . T(b_2) ... X_n with matrix factors X_i is
encoded as a tensor on ``wordop + extra + sym`` slots, built as the slot
product X_0 * C_1 * X_1 * C_2 * ... * X_n where C_j is a cup-cap tensor
transferring the j-th generator's indices from its wordop slot to its sym
slot.  Composing such a tensor into a state contracts its wordop block
with the state's sym block and rewrites the word.

All operations return new states; nothing is mutated.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .hseries import HSeries
from .lietype import lie_type_data
from .ratfunc import RatFunc
from .rmatrix import Arg, m_diag, rhat, rhat_inv, solve_normalizer
from .tensorop import TensorOp

__all__ = ["FreeState", "Term", "arg_sum", "arg_diff", "arg_h",
           "CROSSING_CONJ"]

# Sign of the diagonal conjugation wrapped around slot-transposed chains in
# crossing-type combinations.  With the twisted transposition used here
# (e_ij -> eps_i eps_j e_{j'i'}) the diagonal matrix M transposes to its own
# inverse, which exchanges the roles of M and M^{-1} relative to the
# untwisted convention; -1 is the choice under which the transposed-chain
# pairing identities hold exactly (verified by the round-trip, unitarity and
# weak-associativity tests).
CROSSING_CONJ = -1


# ---------------------------------------------------------------- arguments

def arg_sum(a: Arg, b: Arg) -> Arg:
    """Additive sum of two spectral arguments (product of images)."""
    d = a.shift_dict()
    for n, c in b.shift_dict().items():
        d[n] = d.get(n, Fraction(0)) + c
    return Arg.make(a.mono * b.mono, d)


def arg_diff(a: Arg, b: Arg) -> Arg:
    """Additive difference a - b."""
    return arg_sum(a, b.neg())


def arg_h(a: Arg, delta) -> Arg:
    """Additive shift a + delta*h (exponential image gains e^{-delta*h})."""
    return a.plus({"h": -Fraction(delta)})


def _slot_key(slot):
    arg, dorder = slot
    return (repr(arg.mono), arg.shift, dorder)


# ---------------------------------------------------------------- terms

@dataclass(frozen=True)
class Term:
    """One generator word (per factor) with its coefficient tensor."""
    coeff: TensorOp
    words: tuple     # tuple of factor words; each word is a tuple of
                     # (Arg, derivative-order) pairs

    def word_lengths(self):
        return tuple(len(w) for w in self.words)

    def key(self):
        return tuple(tuple(_slot_key(s) for s in w) for w in self.words)


def _cupcap(N, caps, total, pairs) -> TensorOp:
    """Index-transfer tensor on ``total`` slots.

    For each pair (i, j) the row indices at slots i and j agree, and the
    column indices at slots i and j agree (independently of the rows); every
    unpaired slot carries a plain Kronecker delta between its row and column.
    """
    one = HSeries.one(caps)
    paired = {s for p in pairs for s in p}
    unpaired = [s for s in range(1, total + 1) if s not in paired]
    entries = {}
    for rvals in itertools.product(range(N), repeat=len(pairs)):
        for cvals in itertools.product(range(N), repeat=len(pairs)):
            for uvals in itertools.product(range(N), repeat=len(unpaired)):
                row = [0] * total
                col = [0] * total
                for (i, j), r, c in zip(pairs, rvals, cvals):
                    row[i - 1] = row[j - 1] = r
                    col[i - 1] = col[j - 1] = c
                for s, u in zip(unpaired, uvals):
                    row[s - 1] = col[s - 1] = u
                entries[(tuple(row), tuple(col))] = one
    return TensorOp(N, total, caps, entries)


def _chain_omega(N, caps, wslots, sym_wordops, mats) -> TensorOp:
    """Sandwich tensor for X_0 T(b_1) X_1 T(b_2) ... X_n.

    ``wslots`` is the number of operator slots (word slots plus extras);
    ``sym_wordops[j]`` is the 1-based operator slot carrying the j-th
    generator; ``mats`` has length len(sym_wordops)+1, each entry a TensorOp
    on the operator slots (or None for identity).  The result lives on
    wslots + len(sym_wordops) slots, sym slots appended in generator order.
    """
    total = wslots + len(sym_wordops)

    def emb(mat):
        if mat is None:
            return None
        return mat.embed(tuple(range(1, wslots + 1)), total)

    out = emb(mats[0])
    for j, wop in enumerate(sym_wordops):
        cup = _cupcap(N, caps, total, [(wop, wslots + 1 + j)])
        out = cup if out is None else out * cup
        nxt = emb(mats[j + 1])
        if nxt is not None:
            out = out * nxt
    if out is None:
        out = TensorOp.identity(N, total, caps)
    return out


# ---------------------------------------------------------------- states

class FreeState:
    """An element of the free vacuum module with open matrix slots.

    ``open`` counts the leading auxiliary slots of every coefficient that
    are genuine matrix slots of the ambient space; the remaining slots
    correspond one-to-one to word positions (factor by factor, left to
    right).  All terms share the same open count, factor count and word
    lengths, so the slot layout is uniform across the state.
    """

    __slots__ = ("ltd", "norm", "caps", "c", "open", "terms")

    def __init__(self, ltd, norm, caps, c, open_slots, terms):
        self.ltd = ltd
        self.norm = norm
        self.caps = dict(caps)
        self.c = Fraction(c)
        self.open = open_slots
        terms = tuple(t for t in terms if not t.coeff.is_zero())
        if terms:
            lens = terms[0].word_lengths()
            for t in terms:
                assert t.word_lengths() == lens, "inconsistent word layout"
                assert t.coeff.m == open_slots + sum(lens)
        self.terms = terms

    # -- constructors --------------------------------------------------

    @staticmethod
    def vacuum(ltd, norm, caps, c, factors=1) -> "FreeState":
        k = TensorOp.identity(ltd.N, 0, caps)
        return FreeState(ltd, norm, caps, c, 0,
                         [Term(k, tuple(() for _ in range(factors)))])

    @staticmethod
    def pure(ltd, norm, caps, c, words) -> "FreeState":
        """The monomial state with the given per-factor argument words.

        Each word position gets one open matrix slot (in global word order)
        whose indices coincide with those of the generator, realized by a
        cup-cap coefficient.
        """
        words = tuple(tuple((a, 0) for a in w) for w in words)
        total = sum(len(w) for w in words)
        pairs = [(j, total + j) for j in range(1, total + 1)]
        k = _cupcap(ltd.N, caps, 2 * total, pairs)
        return FreeState(ltd, norm, caps, c, total, [Term(k, words)])

    # -- layout helpers ------------------------------------------------

    @property
    def factors(self) -> int:
        return len(self.terms[0].words) if self.terms else 0

    def word_length(self, factor: int) -> int:
        return len(self.terms[0].words[factor - 1])

    def _sym_base(self, factor: int) -> int:
        """Global slot index before the first sym slot of a factor (1-based)."""
        return self.open + sum(self.word_length(f) for f in range(1, factor))

    def _sym_slots(self, factor: int):
        base = self._sym_base(factor)
        return tuple(base + j for j in range(1, self.word_length(factor) + 1))

    def _replace(self, terms, open_slots=None) -> "FreeState":
        return FreeState(self.ltd, self.norm, self.caps, self.c,
                         self.open if open_slots is None else open_slots,
                         terms)

    def _plain_word(self, term, factor):
        word = term.words[factor - 1]
        if any(d for _, d in word):
            raise ValueError("operator application on a derivative-marked word")
        return tuple(a for a, _ in word)

    # -- sandwich composition ------------------------------------------

    def _compose(self, targets, omega_of_term, extra_modes, new_words_of_term):
        """Contract a sandwich tensor into every term.

        ``targets`` are the global sym slots being rewritten; the tensor
        returned by ``omega_of_term`` lives on w + e + w slots (w wordop,
        e extras, w sym).  Each extra is either "new" (a fresh open matrix
        slot is appended after the existing open block) or ("shared", s)
        (its matrix factor is multiplied from the left onto open slot s).
        ``new_words_of_term`` gives the replacement words per term.
        """
        w = len(targets)
        e = len(extra_modes)
        tpos = [t - 1 for t in targets]
        news = [x for x, mode in enumerate(extra_modes) if mode == "new"]
        shared = [(x, mode[1] - 1) for x, mode in enumerate(extra_modes)
                  if mode != "new"]
        q = len(news)
        out_terms = []
        for term in self.terms:
            K = term.coeff
            omega = omega_of_term(term)
            assert omega.m == 2 * w + e
            kmap = {}
            for (krow, kcol), kval in K.entries.items():
                mkey = (tuple(krow[p] for p in tpos),
                        tuple(kcol[p] for p in tpos),
                        tuple(krow[s] for _, s in shared))
                kmap.setdefault(mkey, []).append((krow, kcol, kval))
            entries = {}
            for (orow, ocol), oval in omega.entries.items():
                P, I, Pp = orow[:w], orow[w:w + e], orow[w + e:]
                Q, J, Qp = ocol[:w], ocol[w:w + e], ocol[w + e:]
                mkey = (P, Q, tuple(J[x] for x, _ in shared))
                for krow, kcol, kval in kmap.get(mkey, ()):
                    row = list(krow)
                    col = list(kcol)
                    for x, s in shared:
                        row[s] = I[x]
                    for p, rp, cp in zip(tpos, Pp, Qp):
                        row[p] = rp
                        col[p] = cp
                    nrow = (tuple(row[:self.open])
                            + tuple(I[x] for x in news) + tuple(row[self.open:]))
                    ncol = (tuple(col[:self.open])
                            + tuple(J[x] for x in news) + tuple(col[self.open:]))
                    val = kval * oval
                    key = (nrow, ncol)
                    entries[key] = entries[key] + val if key in entries else val
            caps = K._join_caps(omega)
            out_terms.append(Term(TensorOp(K.N, K.m + q, caps, entries),
                                  new_words_of_term(term)))
        return self._replace(out_terms, self.open + q)

    # -- raising operator ----------------------------------------------

    def apply_tplus(self, factor: int, arg: Arg, shared_slot=None) -> "FreeState":
        """Left-multiply by the raising generator matrix at the given
        argument, prepending a word slot to the factor.

        With ``shared_slot=None`` a fresh open matrix slot is appended;
        otherwise the generator's matrix factor is multiplied from the left
        onto the existing open slot."""
        N = self.ltd.N
        pos = self._sym_base(factor)        # insert sym slot after this index
        newopen = self.open + (1 if shared_slot is None else 0)
        out_terms = []
        for term in self.terms:
            K = term.coeff
            entries = {}
            for (krow, kcol), val in K.entries.items():
                if shared_slot is None:
                    for p in range(N):
                        for qq in range(N):
                            nrow = (krow[:self.open] + (p,)
                                    + krow[self.open:pos] + (p,) + krow[pos:])
                            ncol = (kcol[:self.open] + (qq,)
                                    + kcol[self.open:pos] + (qq,) + kcol[pos:])
                            key = (nrow, ncol)
                            entries[key] = entries[key] + val \
                                if key in entries else val
                else:
                    s = shared_slot - 1
                    mm = krow[s]
                    for p in range(N):
                        row = list(krow)
                        row[s] = p
                        nrow = tuple(row[:pos]) + (p,) + tuple(row[pos:])
                        ncol = kcol[:pos] + (mm,) + kcol[pos:]
                        key = (nrow, ncol)
                        entries[key] = entries[key] + val \
                            if key in entries else val
            words = list(term.words)
            words[factor - 1] = ((arg, 0),) + words[factor - 1]
            out_terms.append(Term(TensorOp(N, K.m + (2 if shared_slot is None
                                                     else 1), K.caps, entries),
                                  tuple(words)))
        return self._replace(out_terms, newopen)

    # -- lowering operator ---------------------------------------------

    def _tminus_omega(self, word_args, u: Arg):
        """Sandwich tensor of the lowering operator on a given word.

        The action is the conjugation by the two displayed chains: the
        left chain of R-matrices at arguments -u + a_i - hc/2 and the right
        chain of inverses at -u + a_i + hc/2, both linking word slot i to
        the operator's own matrix slot."""
        k = len(word_args)
        wslots = k + 1
        nu = k + 1
        N, caps = self.ltd.N, self.caps
        hc2 = self.c / 2
        left = TensorOp.identity(N, wslots, caps)
        for i, a in enumerate(word_args, start=1):
            r = rhat(self.ltd, self.norm,
                     arg_h(arg_diff(a, u), -hc2), self.caps)
            left = left * r.embed((i, nu), wslots)
        right = TensorOp.identity(N, wslots, caps)
        for i in range(k, 0, -1):
            r = rhat_inv(self.ltd, self.norm,
                         arg_h(arg_diff(word_args[i - 1], u), hc2), self.caps)
            right = right * r.embed((i, nu), wslots)
        return _chain_omega(N, caps, wslots, list(range(1, k + 1)),
                            [left, *([None] * (k - 1)), right])

    def apply_tminus(self, factor: int, u: Arg, shared_slot=None,
                     nu_transform=None) -> "FreeState":
        """Apply the lowering operator at argument u to one factor.

        ``nu_transform(omega, nu_slot)`` may post-process the sandwich
        tensor on the operator's matrix slot (transposition, diagonal
        conjugation) before composition."""
        targets = self._sym_slots(factor)
        k = len(targets)
        mode = "new" if shared_slot is None else ("shared", shared_slot)

        def omega_of(term):
            om = self._tminus_omega(self._plain_word(term, factor), u)
            if nu_transform is not None:
                om = nu_transform(om, k + 1)
            return om

        return self._compose(targets, omega_of, [mode], lambda t: t.words)

    def apply_tminus_inv(self, factor: int, u: Arg, shared_slot=None,
                         method="chain") -> "FreeState":
        """Apply the inverse of the lowering operator at argument u.

        ``method="chain"`` uses the displayed split formula: the diagonal
        and transposed-chain part acts on the word-slot group from both
        sides of the plain-chain part, realized with the ordered slot
        product over the word-slot group.  ``method="matrix"`` inverts the
        lowering sandwich tensor directly (flattening it to a matrix over
        matrix-slot/word-index triples) and serves as an independent
        cross-check."""
        targets = self._sym_slots(factor)
        k = len(targets)
        mode = "new" if shared_slot is None else ("shared", shared_slot)

        def omega_of(term):
            word_args = self._plain_word(term, factor)
            if method == "matrix":
                return _invert_omega(self._tminus_omega(word_args, u), k)
            return self._tminus_inv_omega(word_args, u)

        return self._compose(targets, omega_of, [mode], lambda t: t.words)

    def _tminus_inv_omega(self, word_args, u: Arg):
        k = len(word_args)
        wslots = k + 1
        nu = k + 1
        total = wslots + k
        N, caps, ltd = self.ltd.N, self.caps, self.ltd
        hc2 = self.c / 2
        kappa = ltd.kappa
        md = m_diag(ltd, caps)
        diag = _diag_op(N, caps, md)
        diag_inv = _diag_op(N, caps, [d.inv() for d in md])
        # transposed chain at -u + a_i - hc/2 - kappa*h, slots i descending,
        # wrapped by the word-slot diagonals
        afull = TensorOp.identity(N, wslots, caps)
        for i in range(1, k + 1):
            afull = afull * (diag if CROSSING_CONJ == 1 else diag_inv) \
                .embed((i,), wslots)
        for i in range(k, 0, -1):
            r = rhat(ltd, self.norm,
                     arg_h(arg_diff(word_args[i - 1], u), -hc2 - kappa),
                     caps)
            afull = afull * r.embed((i, nu), wslots).transpose_slot(i, ltd)
        # plain side: inverse diagonals on word slots, then the word with the
        # plus-shifted chain to its right
        minv = TensorOp.identity(N, wslots, caps)
        for i in range(1, k + 1):
            minv = minv * (diag_inv if CROSSING_CONJ == 1 else diag) \
                .embed((i,), wslots)
        plus = TensorOp.identity(N, wslots, caps)
        for i, a in enumerate(word_args, start=1):
            plus = plus * rhat(ltd, self.norm,
                               arg_h(arg_diff(a, u), hc2), caps) \
                .embed((i, nu), wslots)
        bomega = _chain_omega(N, caps, wslots, list(range(1, k + 1)),
                              [minv, *([None] * (k - 1)), plus])
        aemb = afull.embed(tuple(range(1, wslots + 1)), total)
        return aemb.odot(bomega, tuple(range(1, k + 1)), "LR")

    # -- open-slot algebra ---------------------------------------------

    def mul_open(self, op: TensorOp, slots) -> "FreeState":
        """Left-multiply the open-slot block by an operator embedded at the
        given open slots."""
        return self._map_coeff(lambda K: _embed_total(op, slots, K.m) * K)

    def mul_open_right(self, op: TensorOp, slots) -> "FreeState":
        """Right-multiply the open-slot block by an embedded operator."""
        return self._map_coeff(lambda K: K * _embed_total(op, slots, K.m))

    def odot_open(self, op: TensorOp, slots, first_slots, mode="LR") -> "FreeState":
        """Combine an operator on the open slots with the state coefficient
        by the ordered slot product, splitting at ``first_slots``."""
        def act(K):
            return _embed_total(op, slots, K.m).odot(K, first_slots, mode)
        return self._map_coeff(act)

    def swap_open(self, s1: int, s2: int) -> "FreeState":
        assert s1 <= self.open and s2 <= self.open
        return self._map_coeff(lambda K: K.swap_slots(s1, s2))

    def with_identity_open(self) -> "FreeState":
        """Append one open matrix slot carrying the identity."""
        def act(K):
            kept = tuple(range(1, self.open + 1)) \
                + tuple(range(self.open + 2, K.m + 2))
            return K.embed(kept, K.m + 1)
        return self._replace([Term(act(t.coeff), t.words)
                              for t in self.terms], self.open + 1)

    def _map_coeff(self, fn) -> "FreeState":
        return self._replace([Term(fn(t.coeff), t.words) for t in self.terms])

    def map_entries(self, fn) -> "FreeState":
        return self._map_coeff(lambda K: K.map_entries(fn))

    def scale(self, scalar) -> "FreeState":
        return self._map_coeff(lambda K: K.scale(scalar))

    # -- braiding -------------------------------------------------------

    def braiding_s(self, f1: int, f2: int, z: Arg) -> "FreeState":
        """Apply the braiding map at argument z to an ordered factor pair.

        The words are unchanged; the coefficient is hit by the displayed
        combination: the diagonal-conjugated transposed backward chain at
        z + u_i - v_j - h(c+kappa) on the first factor's block, slot-ordered
        against the sandwich of plain chains at z + u_i - v_j (outer) and the
        inverse chain at z + u_i - v_j + hc (between the two words)."""
        m = self.word_length(f1)
        k = self.word_length(f2)
        targets = self._sym_slots(f1) + self._sym_slots(f2)
        wslots = m + k
        N, caps, ltd = self.ltd.N, self.caps, self.ltd
        md = m_diag(ltd, caps)
        diag = _diag_op(N, caps, md)
        diag_inv = _diag_op(N, caps, [d.inv() for d in md])

        def omega_of(term):
            us = [a for a, _ in term.words[f1 - 1]]
            vs = [a for a, _ in term.words[f2 - 1]]
            if any(d for _, d in term.words[f1 - 1] + term.words[f2 - 1]):
                raise ValueError("braiding on a derivative-marked word")

            def chain(hshift, inverse=False):
                # block chain: first-block index ascending outer,
                # second-block index descending inner; the inverse chain
                # multiplies the inverted factors in reversed order
                out = TensorOp.identity(N, wslots, caps)
                order = [(i, j) for i in range(1, m + 1)
                         for j in range(wslots, m, -1)]
                if inverse:
                    order.reverse()
                for i, j in order:
                    arg = arg_h(arg_sum(z, arg_diff(us[i - 1], vs[j - m - 1])),
                                hshift)
                    r = (rhat_inv if inverse else rhat)(
                        ltd, self.norm, arg, caps)
                    out = out * r.embed((i, j), wslots)
                return out

            r1 = chain(0)
            r2inv = chain(self.c, inverse=True)
            r3 = chain(0)
            bomega = _chain_omega(
                N, caps, wslots,
                list(range(1, m + 1)) + list(range(m + 1, wslots + 1)),
                [r1, *([None] * (m - 1)), r2inv, *([None] * (k - 1)), r3])
            afull = TensorOp.identity(N, wslots, caps)
            for i in range(1, m + 1):
                afull = afull * (diag if CROSSING_CONJ == 1 else diag_inv) \
                    .embed((i,), wslots)
            for i in range(m, 0, -1):
                for j in range(m + 1, wslots + 1):
                    arg = arg_h(arg_sum(z, arg_diff(us[i - 1], vs[j - m - 1])),
                                -(self.c + ltd.kappa))
                    afull = afull * rhat(ltd, self.norm, arg, caps) \
                        .embed((i, j), wslots).transpose_slot(i, ltd)
            for i in range(1, m + 1):
                afull = afull * (diag_inv if CROSSING_CONJ == 1 else diag) \
                    .embed((i,), wslots)
            aemb = afull.embed(tuple(range(1, wslots + 1)),
                               wslots + wslots)
            return aemb.odot(bomega, tuple(range(1, m + 1)), "LR")

        return self._compose(targets, omega_of, [], lambda t: t.words)

    # -- vertex maps ----------------------------------------------------

    def merge_y(self, from_factor: int, into_factor: int, z: Arg) -> "FreeState":
        """Apply the vertex map of the ``from`` factor's word at argument z
        to the ``into`` factor.

        Realizes the composite raising-times-inverse-lowering action: for a
        word (a_1, ..., a_m), inverse lowering operators at z + a_j + hc/2
        are applied right to left (each opening a matrix slot), then raising
        operators at z + a_j share those slots; finally each new slot is
        contracted with the corresponding word slot of the consumed factor.
        The additive and multiplicative coordinate pictures coincide at the
        level of argument images, so the same routine serves the vacuum
        module map with a ring-variable z."""
        if from_factor == into_factor:
            raise ValueError("cannot merge a factor into itself")
        keys = {t.key()[from_factor - 1] for t in self.terms}
        if len(keys) > 1:
            raise ValueError("merge requires a uniform word on the consumed factor")
        word = [a for a, d in self.terms[0].words[from_factor - 1]]
        if any(d for _, d in self.terms[0].words[from_factor - 1]):
            raise ValueError("merge on a derivative-marked word")
        m = len(word)
        st = self
        nus = []
        for a in word:                     # rightmost operator first
            st = st.apply_tminus_inv(into_factor,
                                     arg_h(arg_sum(z, a), st.c / 2))
            nus.append(st.open)
        for a, nu in zip(reversed(word), reversed(nus)):
            st = st.apply_tplus(into_factor, arg_sum(z, a), shared_slot=nu)
        pairs = [(nu, st._sym_slots(from_factor)[j])
                 for j, nu in enumerate(nus)]
        return st._contract_pairs(pairs, drop_factors=(from_factor,))

    def _contract_pairs(self, pairs, drop_factors=()) -> "FreeState":
        """Contract open slots against sym slots (row with row, column with
        column, summed) and delete both; optionally drop the factors whose
        word slots were consumed."""
        drop = sorted({s for p in pairs for s in p})
        open_drop = sum(1 for s in drop if s <= self.open)
        out_terms = []
        for term in self.terms:
            K = term.coeff
            entries = {}
            for (krow, kcol), val in K.entries.items():
                if any(krow[a - 1] != krow[b - 1] or kcol[a - 1] != kcol[b - 1]
                       for a, b in pairs):
                    continue
                nrow = tuple(x for i, x in enumerate(krow, start=1)
                             if i not in drop)
                ncol = tuple(x for i, x in enumerate(kcol, start=1)
                             if i not in drop)
                key = (nrow, ncol)
                entries[key] = entries[key] + val if key in entries else val
            words = term.words
            for df in sorted(drop_factors, reverse=True):
                words = words[:df - 1] + words[df:]
            out_terms.append(Term(
                TensorOp(K.N, K.m - len(drop), K.caps, entries), words))
        return self._replace(out_terms, self.open - open_drop)

    # -- translation ----------------------------------------------------

    def translate_d(self, factor=None) -> "FreeState":
        """The translation operator: the sum over word slots of the formal
        derivative with respect to the slot argument.

        Each slot contributes two terms: the derivative of the coefficient
        (for a ring-variable argument Z = e^{-a} this is -Z d/dZ; for a
        capped-variable argument, formal differentiation with the recorded
        cap loss) and the original coefficient with the slot's derivative
        order raised.  The vacuum has no slots, so it maps to zero."""
        factors = range(1, self.factors + 1) if factor is None else [factor]
        out = []
        for term in self.terms:
            for f in factors:
                for j, (arg, dorder) in enumerate(term.words[f - 1]):
                    dk = _arg_derivative(term.coeff, arg)
                    if dk is not None and not dk.is_zero():
                        out.append(Term(dk, term.words))
                    words = list(term.words)
                    w = list(words[f - 1])
                    w[j] = (arg, dorder + 1)
                    words[f - 1] = tuple(w)
                    out.append(Term(term.coeff, tuple(words)))
        caps = _min_caps([t.coeff.caps for t in out]) if out else self.caps
        return FreeState(self.ltd, self.norm, caps, self.c, self.open,
                         [Term(_with_caps(t.coeff, caps), t.words)
                          for t in out])

    # -- RTT swap and canonical order -----------------------------------

    def rtt_swap(self, factor: int, i: int) -> "FreeState":
        """Exchange word positions i and i+1 of a factor through the RTT
        relation: the coefficient is rewritten by the inverse R-matrix at
        the argument difference on one side and the R-matrix on the other."""
        targets = self._sym_slots(factor)[i - 1:i + 1]
        N, caps = self.ltd.N, self.caps

        def omega_of(term):
            a = term.words[factor - 1][i - 1]
            b = term.words[factor - 1][i]
            if a[1] or b[1]:
                raise ValueError("swap on a derivative-marked word")
            d = arg_diff(a[0], b[0])
            r = rhat(self.ltd, self.norm, d, caps)
            rinv = rhat_inv(self.ltd, self.norm, d, caps)
            return _chain_omega(N, caps, 2, [2, 1],
                                [rinv.embed((1, 2), 2), None,
                                 r.embed((1, 2), 2)])

        def new_words(term):
            words = list(term.words)
            w = list(words[factor - 1])
            w[i - 1], w[i] = w[i], w[i - 1]
            words[factor - 1] = tuple(w)
            return tuple(words)

        return self._compose(targets, omega_of, [], new_words)

    def canonicalize(self) -> "FreeState":
        """Sort every word into the fixed total order on argument images by
        adjacent RTT swaps.  Arguments with equal zeroth-order image are
        never exchanged (the rewrite would be singular there); their
        relative order is preserved."""
        out_terms = []
        for term in self.terms:
            st = self._replace([term])
            changed = True
            while changed and st.terms:
                changed = False
                t = st.terms[0]
                for f in range(1, st.factors + 1):
                    word = t.words[f - 1]
                    for i in range(1, len(word)):
                        ka = _slot_key(word[i - 1])[0]
                        kb = _slot_key(word[i])[0]
                        if kb < ka:
                            st = st.rtt_swap(f, i)
                            changed = True
                            break
                    if changed:
                        break
            out_terms.extend(st.terms)
        return self._replace(out_terms)

    # -- comparison -----------------------------------------------------

    def residual(self, other: "FreeState"):
        """Exact difference: (number of nonzero residual entries, witness)."""
        assert self.open == other.open, "open-slot layouts differ"
        buckets = {}
        for sign, state in ((1, self), (-1, other)):
            for term in state.terms:
                key = term.key()
                k = term.coeff if sign == 1 else -term.coeff
                buckets[key] = buckets[key] + k if key in buckets else k
        count = 0
        witness = None
        for key in sorted(buckets):
            diff = buckets[key]
            n = diff.nonzero_count()
            count += n
            if n and witness is None:
                witness = diff.witness()
        return count, witness

    def __eq__(self, other):
        if not isinstance(other, FreeState):
            return NotImplemented
        return self.residual(other)[0] == 0

    def __hash__(self):
        raise TypeError("FreeState is unhashable")

    def __repr__(self):
        lens = self.terms[0].word_lengths() if self.terms else ()
        return (f"FreeState(c={self.c}, open={self.open}, "
                f"factors={self.factors}, word_lengths={lens}, "
                f"terms={len(self.terms)})")

    # -- serialization --------------------------------------------------

    def to_data(self):
        def slot_data(a, d):
            return [[a.mono.to_data(), [[n, str(cf)] for n, cf in a.shift]], d]

        terms = [[[[slot_data(a, d) for a, d in w] for w in t.words],
                  t.coeff.entries_data()]
                 for t in self.terms]
        return [self.ltd.family, self.ltd.n, str(self.c),
                sorted(self.caps.items()), self.open, terms]

    @staticmethod
    def from_data(data) -> "FreeState":
        family, n, c, caps_list, open_slots, terms = data
        caps = {k: v for k, v in caps_list}
        ltd = lie_type_data(family, n)
        norm = solve_normalizer(ltd, L=caps["h"])
        out_terms = []
        for words_data, coeff_data in terms:
            words = tuple(
                tuple((Arg.make(RatFunc.from_data(mono),
                                {nm: Fraction(cf) for nm, cf in shift}), d)
                      for (mono, shift), d in w)
                for w in words_data)
            out_terms.append(Term(TensorOp.from_entries_data(coeff_data),
                                  words))
        return FreeState(ltd, norm, caps, Fraction(c), open_slots, out_terms)


# ---------------------------------------------------------------- helpers

def _diag_op(N, caps, diag) -> TensorOp:
    return TensorOp(N, 1, caps, {((i,), (i,)): diag[i] for i in range(N)})


def _embed_total(op: TensorOp, slots, m: int) -> TensorOp:
    return op.embed(tuple(slots), m)


def _invert_omega(omega: TensorOp, k: int) -> TensorOp:
    """Invert a lowering sandwich tensor.

    Flattened over composite indices (matrix slot, new word rows, new word
    columns) x (matrix slot, old word rows, old word columns), composition
    of sandwich tensors on a shared matrix slot is matrix multiplication,
    and the index-transfer tensor flattens to the identity; the inverse
    sandwich is therefore the reshaped matrix inverse."""
    m = 2 * k + 1
    assert omega.m == m
    flat = {}
    for (row, col), val in omega.entries.items():
        P, i, Pp = row[:k], row[k], row[k + 1:]
        Q, j, Qp = col[:k], col[k], col[k + 1:]
        flat[((i,) + Pp + Qp, (j,) + P + Q)] = val
    inv = TensorOp(omega.N, m, omega.caps, flat).inv()
    out = {}
    for (row, col), val in inv.entries.items():
        i, Pp, Qp = row[0], row[1:k + 1], row[k + 1:]
        j, P, Q = col[0], col[1:k + 1], col[k + 1:]
        out[(P + (i,) + Pp, Q + (j,) + Qp)] = val
    return TensorOp(omega.N, m, omega.caps, out)


def _arg_derivative(K: TensorOp, arg: Arg):
    """Derivative of a coefficient with respect to a slot argument.

    Supported argument shapes: a single ring variable Z (additive a with
    Z = e^{-a}, so d/da = -Z d/dZ) or a single capped variable with a
    rational coefficient.  Returns None when the coefficient does not
    depend on the argument's variable."""
    mono = arg.mono
    shift = arg.shift
    if not shift and not mono.is_constant():
        names = mono.trim().vars
        if len(names) != 1:
            raise ValueError(f"cannot attribute a derivative to {arg}")
        name = names[0]
        z = RatFunc.var(name)
        return K.map_entries(
            lambda s: s.diff_ring_var(name).map_coeffs(lambda c: -(c * z)))
    if mono.is_constant() and len(shift) == 1:
        (name, coeff), = shift
        if name not in K.caps or K.caps[name] < 2:
            raise ValueError(f"cap of {name!r} too small to differentiate")
        # image is e^{coeff*name}, so the additive argument is -coeff*name
        scale = -1 / Fraction(coeff)
        reduced = {**K.caps, name: K.caps[name] - 1}
        return TensorOp(K.N, K.m, reduced,
                        {key: val.diff_capped(name) * scale
                         for key, val in K.entries.items()})
    raise ValueError(f"cannot attribute a derivative to {arg}")


def _min_caps(caps_list):
    out = dict(caps_list[0])
    for caps in caps_list[1:]:
        for n, v in caps.items():
            out[n] = min(out.get(n, v), v)
    return out


def _with_caps(K: TensorOp, caps) -> TensorOp:
    if K.caps == caps:
        return K
    return TensorOp(K.N, K.m, caps,
                    {key: val.with_caps(dict(caps))
                     for key, val in K.entries.items()})
