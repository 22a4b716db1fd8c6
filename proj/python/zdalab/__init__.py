"""Switched-consensus stealthy-attack laboratory.

Thin python surface over the C++ core: graph spectral tools, switched-system
certificates, stealthy-mode synthesis, and end-to-end scenario runs.
"""

try:
    from ._zdalab import *  # noqa: F401,F403  (installed wheel layout)
except ImportError:  # in-tree build: extension sits on sys.path
    from _zdalab import *  # noqa: F401,F403

__version__ = "0.1.0"
