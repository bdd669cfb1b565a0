"""Steady states, spectra, and singular limits of four spatial SIS models.

Thin re-export of the compiled extension; everything numerical lives in C++.
"""

try:
    # installed layout: the extension sits inside the package
    from ._sislab import *  # noqa: F401,F403
    from ._sislab import __version__  # noqa: F401
except ImportError:
    # development layout: the extension is on PYTHONPATH next to the build
    from _sislab import *  # noqa: F401,F403
    from _sislab import __version__  # noqa: F401
