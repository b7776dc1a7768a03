"""Select the path kernel at import time.

The compiled kernel is used when it was built; set ``LEVY_ORTHANT_PURE=1`` to
force the pure-Python implementation.
"""

import os

from . import _fallback

fallback_run_paths = _fallback.run_paths
compiled_run_paths = None

if os.environ.get("LEVY_ORTHANT_PURE", "") not in ("1", "true", "yes"):
    try:
        from ._kernel import run_paths as compiled_run_paths
    except ImportError:  # extension not built
        compiled_run_paths = None

run_paths = compiled_run_paths or fallback_run_paths
BACKEND = "compiled" if compiled_run_paths is not None else "python"
