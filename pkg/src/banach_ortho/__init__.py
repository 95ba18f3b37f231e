"""Birkhoff-James orthogonality, numerical ranges and numerical indices in finite dimension."""

__version__ = "0.1.0"

import os as _os

_threads = _os.environ.get("BANACH_ORTHO_THREADS")
if _threads:
    for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        _os.environ[_var] = _threads
