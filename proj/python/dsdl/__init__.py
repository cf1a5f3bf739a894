"""Deep semantic dictionary learning.

Thin wrapper over the `_dsdl` extension: ridge-coded multi-label
classification over a semantic dictionary generated from class word
embeddings by a tied-weight autoencoder.
"""

try:
    from ._dsdl import *  # noqa: F401,F403
    from ._dsdl import __doc__ as _ext_doc  # noqa: F401
except ImportError:
    # in-tree test runs put the extension directly on sys.path
    from _dsdl import *  # noqa: F401,F403
