"""Transfer functions of genetic circuits, derived two ways and cross-checked.

The block-diagram route (:mod:`.blockdiag`) and the ODE/Laplace route
(:mod:`.ode`) both produce exact :class:`~.symbolic.RationalFn` values;
:func:`~.ode.check_equivalence` decides their equality, :mod:`.certificate`
records and replays the derivation, and :mod:`.oracle` checks the result
numerically against a simulated trajectory.
"""

__version__ = "0.1.0"

from .symbolic import ParamPoly, RationalFn, SPoly, rat_eq, rat_eval, rat_make, render  # noqa: E402
from .notation import parse_rational  # noqa: E402

__all__ = [
    "ParamPoly",
    "RationalFn",
    "SPoly",
    "parse_rational",
    "rat_eq",
    "rat_eval",
    "rat_make",
    "render",
]
