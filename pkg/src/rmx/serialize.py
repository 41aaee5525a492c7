"""Canonical text serialization for exact values.

Format (documented here, round-trip stable):

Every value is rendered as compact JSON with a type tag:

    ["ratfunc", vars, num_terms, den_terms]
    ["hseries", caps, terms]
    ["tensorop", N, m, caps, entries]

where

* ``vars`` is the sorted list of ring-variable names;
* a polynomial term is ``[[["Z", 2], ...], [p, q]]``: sorted variable/exponent
  pairs followed by the exact coefficient p/q as an integer pair;
* term lists are sorted by graded-lex monomial order (as produced by the
  underlying canonical forms), so equal values serialize identically;
* ``caps`` is a sorted list of ``[name, cap]`` pairs;
* an HSeries term is ``[[e1, ...], ratfunc-payload]`` with exponents aligned
  to the sorted cap names, sorted by total degree then lexicographically;
* a TensorOp entry is ``[[row...], [col...], hseries-payload]`` with rows and
  columns as 0-based per-slot index tuples, sorted.

JSON is emitted with sorted keys, no whitespace, ASCII only.
"""

from __future__ import annotations

import hashlib
import json

from .hseries import HSeries
from .ratfunc import RatFunc

__all__ = ["dumps", "loads", "digest"]


def _encode(value):
    if isinstance(value, RatFunc):
        return ["ratfunc", *value.to_data()]
    if isinstance(value, HSeries):
        return ["hseries", *value.to_data()]
    # TensorOp imports this module, so duck-type instead of importing back
    if hasattr(value, "entries_data"):
        return ["tensorop", *value.entries_data()]
    raise TypeError(f"cannot serialize {type(value).__name__}")


def dumps(value) -> str:
    return json.dumps(_encode(value), separators=(",", ":"), sort_keys=True,
                      ensure_ascii=True)


def loads(text: str):
    data = json.loads(text)
    tag = data[0]
    if tag == "ratfunc":
        return RatFunc.from_data(data[1:])
    if tag == "hseries":
        return HSeries.from_data(data[1:])
    if tag == "tensorop":
        from .tensorop import TensorOp
        return TensorOp.from_entries_data(data[1:])
    raise ValueError(f"unknown serialized tag {tag!r}")


def digest(value) -> str:
    return hashlib.sha256(dumps(value).encode()).hexdigest()
