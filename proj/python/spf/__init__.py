"""Sensitivity-bounded statistics with personalized-DP release mechanisms.

Thin re-export of the compiled extension. The extension sits inside the
package in an installed wheel and on the import path in a build tree.
"""

try:
    from ._spf import *  # noqa: F401,F403
    from . import _spf as _impl
except ImportError:
    from _spf import *  # noqa: F401,F403
    import _spf as _impl

__all__ = [name for name in dir(_impl) if not name.startswith("_")]
__version__ = "0.1.0"
