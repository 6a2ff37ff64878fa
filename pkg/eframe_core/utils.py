from __future__ import annotations
import hashlib
import json
from typing import Any, Iterable

import numpy as np


def to_array(pairs: Iterable) -> np.ndarray:
    """Nested lists of [re, im] pairs (as validated by the models) -> complex ndarray."""
    arr = np.asarray(pairs, dtype=float)
    if arr.shape and arr.shape[-1] == 2:
        return arr[..., 0] + 1j * arr[..., 1]
    raise ValueError("expected [re, im] pairs")


def encode_complex(a: Any) -> Any:
    """Complex scalar/vector/matrix -> nested lists with [re, im] leaves (matrices row-major)."""
    arr = np.asarray(a, dtype=complex)
    if arr.ndim == 0:
        return [float(arr.real), float(arr.imag)]
    return [encode_complex(x) for x in arr]


def canonical_json(value: Any) -> str:
    return json.dumps(value, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def inputs_digest(*arrays: Any, **scalars: Any) -> str:
    """Stable sha256 over the raw bytes of the inputs (little-endian complex128) plus scalars."""
    h = hashlib.sha256()
    for a in arrays:
        arr = np.ascontiguousarray(np.asarray(a, dtype="<c16"))
        h.update(repr(arr.shape).encode("ascii"))
        h.update(arr.tobytes())
    if scalars:
        h.update(canonical_json({k: scalars[k] for k in sorted(scalars)}).encode("utf-8"))
    return h.hexdigest()
