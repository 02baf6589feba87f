"""Contourlet-domain texture image retrieval.

Multiscale/directional image decomposition, generalized Gaussian subband
modeling, symmetric-KLD similarity, kNN/SVM query classification and
two-phase (classify-then-rank) retrieval.
"""

try:
    from ._core import *  # noqa: F401,F403  (installed package layout)
    from ._core import __version__  # noqa: F401
except ImportError:  # development layout: build dir on sys.path
    from _core import *  # noqa: F401,F403
    from _core import __version__  # noqa: F401
