"""Genus-2 fibrations over an elliptic curve with K^2 = 4 and p_g = q = 1.

Exact arithmetic on the base curve, the relative conic and cubic that cut out
the branch curve, the open conditions on a family member, and the numerical
invariants of the eight families.
"""

__version__ = "0.1.0"
