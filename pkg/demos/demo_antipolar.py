"""
Antipolar sets and where the calculus breaks
=============================================

The antipolar of C collects the y with <x, y> >= 1 for all x in C.  The
intersection rule needs every part to be ray-like; a line is not, and the
rule then gives the wrong answer.
"""

import numpy as np

from gaugedual.antipolar import NotRayLikeError, antipolar, biantipolar_check, is_raylike
from gaugedual.sets import Affine, GenericAntipolar, Halfspace, HullOfUnion, Intersection

C1 = Intersection([Halfspace([1.0, 1.0], 1.0), Halfspace([1.0, -1.0], 1.0)])
C2 = Affine([[1.0, 0.0]], [1.0])
print("C1 ray-like:", is_raylike(C1)[0], " C2 ray-like:", is_raylike(C2)[0])

y = np.array([1.0, 1.5])
print("y in (C1 n C2)'            :", GenericAntipolar(Intersection([C1, C2])).contains(y))
print("y in cl conv(C1' u C2')    :", HullOfUnion([antipolar(C1), antipolar(C2)]).contains(y))

try:
    antipolar(Intersection([C1, C2]))
except NotRayLikeError as err:
    print("rule refused:", err)

# applying the antipolar twice returns a ray-like set unchanged
r = biantipolar_check(C1, samples=500, seed=0)
print("bi-antipolar agreement", r.agreement, "equals C", r.equals_set_rate)

# but a line grows into a half-line
r = biantipolar_check(Affine([[1.0]], [1.0]), samples=200, seed=0)
print("line: agreement", r.agreement, "equals C", r.equals_set_rate)
