"""Kernel backend selection.

The compiled extension is preferred; set ``CATROT_PURE_PYTHON=1`` to force the
numpy fallback (the benchmark and the backend-equivalence tests do this).
"""
import os

from . import _fallback

fallback = _fallback
compiled = None

if not os.environ.get("CATROT_PURE_PYTHON"):
    try:
        from . import _kernels as compiled
    except ImportError:  # extension not built
        compiled = None

active = compiled if compiled is not None else _fallback
BACKEND = active.BACKEND

gf_mul = active.gf_mul
gf_mul_batch = active.gf_mul_batch
gf_orbit = active.gf_orbit
xor_permute = active.xor_permute
swap_permute = active.swap_permute
phase_mask = active.phase_mask
