"""Kernel backend selection.

Imports the compiled extension when available, otherwise the numpy fallback.
Set MIXSYNTH_FORCE_PYTHON=1 to force the fallback (used by the benchmark and
the cross-implementation tests).
"""
import os

if os.environ.get("MIXSYNTH_FORCE_PYTHON") == "1":
    from mixsynth import _kernels_py as kernels
else:
    try:
        from mixsynth import _kernels as kernels  # type: ignore[attr-defined]
    except ImportError:
        from mixsynth import _kernels_py as kernels

jacobi_eigh = kernels.jacobi_eigh
max_sq_overlap = kernels.max_sq_overlap
count_within_pure = kernels.count_within_pure
count_within_mixed = kernels.count_within_mixed
JACOBI_TOL = kernels.JACOBI_TOL
IMPL = kernels.IMPL
