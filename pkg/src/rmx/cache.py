"""Disk cache for solved normalizing series.

Entries are keyed by family, rank, and truncation order and hold the
solved series together with its per-order rational parts, as plain JSON.
A corrupt entry is never trusted: it is recomputed from scratch with a
warning and rewritten.  The cache directory defaults to ``~/.cache/rmx``
and can be overridden with the ``RMX_CACHE_DIR`` environment variable.
"""

from __future__ import annotations

import hashlib
import json
import os
import pathlib
import warnings

from .hseries import HSeries
from .lietype import lie_type_data
from .ratfunc import RatFunc
from .rmatrix import Normalizer, build_constant_ops, solve_normalizer

__all__ = ["cache_dir", "load_normalizer", "warm", "clear", "inspect"]


def cache_dir() -> pathlib.Path:
    override = os.environ.get("RMX_CACHE_DIR")
    if override:
        return pathlib.Path(override)
    return pathlib.Path.home() / ".cache" / "rmx"


def _entry_path(family, n, L) -> pathlib.Path:
    return cache_dir() / f"normalizer_{family}{n}_L{L}.json"


def _to_payload(norm: Normalizer) -> dict:
    ops = build_constant_ops(norm.ltd, {"h": norm.L})
    return {
        "family": norm.ltd.family,
        "n": norm.ltd.n,
        "L": norm.L,
        "oracle_degree": norm.oracle_degree,
        "g1": norm.g1.to_data(),
        "parts": [[l, p.to_data(), r] for l, p, r in norm.parts],
        "constant_ops": {name: (op.entries_data()
                                if hasattr(op, "entries_data")
                                else [s.to_data() for s in op])
                         for name, op in sorted(ops.items())},
    }


def _from_payload(payload: dict) -> Normalizer:
    ltd = lie_type_data(payload["family"], payload["n"])
    g1 = HSeries.from_data(payload["g1"])
    parts = tuple((l, RatFunc.from_data(p), r)
                  for l, p, r in payload["parts"])
    return Normalizer(ltd=ltd, L=payload["L"], g1=g1, parts=parts,
                      oracle_degree=payload["oracle_degree"])


def _store(norm: Normalizer) -> pathlib.Path:
    path = _entry_path(norm.ltd.family, norm.ltd.n, norm.L)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(".tmp")
    tmp.write_text(json.dumps(_to_payload(norm), sort_keys=True))
    tmp.replace(path)
    return path


def load_normalizer(family, n, L) -> Normalizer:
    """Load the solved series from disk, recomputing (and rewriting the
    entry) on a miss or a corrupt entry."""
    path = _entry_path(family, n, L)
    if path.exists():
        try:
            payload = json.loads(path.read_text())
            norm = _from_payload(payload)
            if (payload["family"], payload["n"], payload["L"]) != (family, n, L):
                raise ValueError("entry key mismatch")
            if "constant_ops" not in payload:
                raise ValueError("entry missing constant operators")
            return norm
        except Exception as exc:  # corrupt entry: recompute, never trust it
            warnings.warn(f"corrupt cache entry {path.name} ({exc}); "
                          f"recomputing", RuntimeWarning)
    norm = solve_normalizer(lie_type_data(family, n), L=L)
    _store(norm)
    return norm


def warm(configs):
    """Solve and store each (family, n, L); returns the written paths."""
    paths = []
    for family, n, L in configs:
        norm = solve_normalizer(lie_type_data(family, n), L=L)
        paths.append(str(_store(norm)))
    return paths


def clear() -> int:
    """Remove all cache entries; returns the number removed."""
    d = cache_dir()
    if not d.exists():
        return 0
    removed = 0
    for path in sorted(d.glob("normalizer_*.json")):
        path.unlink()
        removed += 1
    return removed


def inspect():
    """List cache entries with content digests, deterministically ordered."""
    d = cache_dir()
    out = []
    if not d.exists():
        return out
    for path in sorted(d.glob("normalizer_*.json")):
        data = path.read_bytes()
        out.append({
            "file": path.name,
            "bytes": len(data),
            "sha256": hashlib.sha256(data).hexdigest(),
        })
    return out
