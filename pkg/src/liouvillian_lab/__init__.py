"""Vectorized non-Hermitian Lindblad superoperators: construction,
spectra, exceptional points, steady states and time evolution."""

__version__ = "0.1.0"

from .vectorize import (Channel, OpenSystem, Liouvillian, vec_row, unvec_row,
                        build_liouvillian, rhs_direct)
from .twolevel import TwoLevelParams
