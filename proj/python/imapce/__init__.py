"""Informative manifold projections for cluster exploration.

Thin wrapper over the compiled extension; see the function docstrings on the
individual operations.
"""

try:
    from ._imapce import *  # noqa: F401,F403  (installed package layout)
    from ._imapce import __version__  # noqa: F401
except ImportError:  # build-tree layout: extension on sys.path directly
    from _imapce import *  # noqa: F401,F403
    from _imapce import __version__  # noqa: F401
