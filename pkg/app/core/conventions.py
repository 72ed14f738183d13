"""
Sign and normalization conventions shared by the fixed-point formulas.

Every choice the closed-form identities pin down lives here so that a global
flip is a one-line change.
"""
from fractions import Fraction

# (a_1, a_2) = (-a, a), as multiples of a
COULOMB_SIGNS = (-1, 1)

# Matter weight of the box (i, j) in slot alpha:
#   a_alpha + m + MATTER_HALF_SHIFT*(eps1 + eps2)
#     + MATTER_COLUMN_STEP*(j - 1)*eps1 + MATTER_ROW_STEP*(i - 1)*eps2
MATTER_HALF_SHIFT = Fraction(-1, 2)
MATTER_COLUMN_STEP = -1
MATTER_ROW_STEP = -1

# Leading scalar of the instanton part of q^2 at a = m.
QINST_LEADING = 1

# Grading variable names.
LAMBDA = "Lambda"
EPSILON_RAY = "h"
BLOWUP_T = "t"

# Generators of the generic rational function field.
GENERIC_NAMES = ("e1", "e2", "a", "m")

# Sign of the m (r/2 - k)/gamma term in the t-linear blow-up prefactor. With
# the matter weights above the perturbative Lambda-shift already carries
# +m (1 - k)/3 at eps = 0, so this term must cancel it for c1 = 0.
BLOWUP_MASS_SIGN = -1
