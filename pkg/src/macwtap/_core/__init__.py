"""Kernel core: compiled extension when available, numpy fallback otherwise.

The two hot kernels are

``joint_wfz``
    Accumulates the exact joint table over (W1, W2, F1, F2, Z) from
    per-sequence probabilities, bin assignments, and per-position observation
    tensors.  Output is flat with Z fastest; Z is the support-compact
    mixed-radix code (see :mod:`macwtap.adversary`).

``pair_loglik``
    Per-sequence-pair channel log-likelihood matrix for joint decoding.

Set ``MACWTAP_PURE=1`` to force the numpy fallback.  ``BACKEND`` reports the
selected implementation.
"""

from __future__ import annotations

import os

import numpy as np

from . import _pykernels

_impl = _pykernels
BACKEND = "python"
if os.environ.get("MACWTAP_PURE", "") in ("", "0"):
    try:
        from . import _ckernels as _impl  # type: ignore[no-redef]

        BACKEND = "compiled"
    except ImportError:
        pass

joint_wfz = _impl.joint_wfz
pair_loglik = _impl.pair_loglik


def available_backends() -> dict:
    """All importable kernel implementations, keyed by name."""
    out = {"python": _pykernels}
    try:
        from . import _ckernels

        out["compiled"] = _ckernels
    except ImportError:
        pass
    return out


def pack_letters(tensors: list[np.ndarray]) -> tuple[np.ndarray, np.ndarray]:
    """Pad per-position (A1, A2, z_i) tensors into one (n, A1, A2, zmax) block."""
    n = len(tensors)
    a1, a2 = tensors[0].shape[0], tensors[0].shape[1]
    zsizes = np.array([t.shape[2] for t in tensors], dtype=np.int64)
    packed = np.zeros((n, a1, a2, int(zsizes.max())), dtype=np.float64)
    for i, t in enumerate(tensors):
        packed[i, :, :, : t.shape[2]] = t
    return packed, zsizes
