"""Entanglement-forged variational ground-state solver.

Thin wrapper over the compiled _forgesim module. Works both from an
installed wheel (extension lives inside the package) and from a CMake
build tree (extension found on sys.path).
"""

try:
    from ._forgesim import *  # noqa: F401,F403
    from . import _forgesim as _impl
except ImportError:
    from _forgesim import *  # noqa: F401,F403
    import _forgesim as _impl

__version__ = _impl.__version__
