"""Spectral sets and spectral measures on the p-adic field, computed exactly."""
from .padic import PAdicScaled, RootOfUnity, Ball, valuation, frac_part, character, ball_relation
from .cyclotomic import CycInt, CycRat, vanishing_decompose, is_pn_cycle

__version__ = "0.1.0"
