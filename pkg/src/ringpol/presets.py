"""Parameter sets of the two reference configurations and their refined roots.

Reference values are rounded to a few digits, so they serve as seeds. The refined roots
below were found with :func:`ringpol.search.find_polarization_points` and
:func:`ringpol.search.refine_seed` and are kept as regression values.
"""

import math

from ringpol.polarization import PolarizationCase
from ringpol.ring import RingGeometry, RingParams
from ringpol.search import Family, SweepSpec

GAMMA2 = 4.0 * math.pi / 3.0

# symmetric ring, CaseA
SYMMETRIC_GEOMETRY = RingGeometry(2.0 * math.pi - GAMMA2, GAMMA2)
SYMMETRIC_SEED = RingParams(so_ratio=3.05, ka=1.38)
SYMMETRIC_ROOT = RingParams(so_ratio=3.051737208264685, ka=1.3791547037999996)

# asymmetric family gamma1 = 2pi - gamma2 - 6pi/q swept in ka
FAMILY = Family(index=6, sign=-1, which="fix_gamma2")
FAMILY_SO_RATIO = 2.27
FAMILY_KA_RANGE = (9.2, 13.0)


def family_spec(case=PolarizationCase.A, samples: int = 2000) -> SweepSpec:
    return SweepSpec("ka", *FAMILY_KA_RANGE, samples=samples, family=FAMILY,
                     case=PolarizationCase.parse(case))


FAMILY_BASE_PARAMS = RingParams(so_ratio=FAMILY_SO_RATIO, ka=10.0)

# refined family roots as (so_ratio, ka)
FAMILY_ROOTS = {
    PolarizationCase.A: ((2.244858129758137, 9.653171991479125),
                         (2.255684661433943, 12.67551204470543)),
    PolarizationCase.B: ((2.251181884639699, 11.221170838489458),),
}
