"""Hot-loop step kernels with a compiled core and a pure-python fallback.

The compiled extension fuses the per-iteration vector updates of the two
inner-loop engines (momentum descent step, conjugate-gradient step) into
single passes over the arrays.  The numpy fallback implements the same
updates; results agree to floating-point roundoff (the compiled dot uses
sequential accumulation, numpy's may not), and each lane is deterministic
on its own.

Set RAHGD_PURE_PYTHON=1 to force the fallback.
"""

import os

from . import _pykernels

if os.environ.get("RAHGD_PURE_PYTHON"):
    active = _pykernels
else:
    try:
        from . import _stepkernels as active  # type: ignore[no-redef]
    except ImportError:
        active = _pykernels


def backend_name():
    """Name of the kernel lane selected at import: 'compiled' or 'python'."""
    return "python" if active is _pykernels else "compiled"
