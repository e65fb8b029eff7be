"""GVF shape-prior graph segmentation."""

try:
    from ._gvfseg import *  # noqa: F401,F403  (installed wheel layout)
except ImportError:  # pragma: no cover - in-tree builds put the module on sys.path
    from _gvfseg import *  # noqa: F401,F403
