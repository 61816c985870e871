"""Colored Jones polynomials of k4_3 and Volume Conjecture numerics."""

from .jones_exact import colored_jones
from .fusion import bracket_fusion
from .mp_eval import eval_jones_at_root
from .qlaurent import LaurentPoly, eval_on_unit_circle

__version__ = "0.1.0"

__all__ = ["LaurentPoly", "bracket_fusion", "colored_jones", "eval_jones_at_root", "eval_on_unit_circle"]
