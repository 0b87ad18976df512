"""ultrana: verification and computation engine for log-type ultra-analytic
derivative bounds of elliptic equations with entire coefficients.

Subpackages by capability:

* :mod:`ultrana.numerics` -- log-space arbitrary-precision scalars, exact
  Stirling/Bell/Touchard combinatorics;
* :mod:`ultrana.majorant` -- the split-weight sequence a_j, the convolution
  sum, and numerical certification of its supporting lemmas;
* :mod:`ultrana.propagator` -- inductive derivative-bound propagation and
  envelope-constant fitting;
* :mod:`ultrana.sharp_example` -- the explicit saturating solution, exact
  derivatives, sup-norm brackets, Cauchy bounds and falsification searches;
* :mod:`ultrana.multiindex` -- exact multi-index identities behind the
  dimension reduction;
* :mod:`ultrana.kernels` -- Bessel potential kernel quadrature and bounds;
* :mod:`ultrana.holder` -- grid Hölder seminorms at delta = 1/2;
* :mod:`ultrana.acceptance` -- the end-to-end acceptance suite;
* :mod:`ultrana.cli` -- the ``ultrana`` command-line front end.
"""

from .errors import (
    DomainError,
    PrecisionError,
    ResourceLimitError,
    SingularityError,
    ToleranceError,
    UltranaError,
)
from .numerics import (
    DEFAULT_PRECISION,
    STIRLING_CAP,
    LogMagnitude,
    StirlingTable,
    bigreal,
    binomial_row,
    log_factorial,
    log_sum,
    stirling2_row,
    stirling2_table,
    touchard,
    touchard_log_sequence,
)

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_PRECISION",
    "STIRLING_CAP",
    "DomainError",
    "LogMagnitude",
    "PrecisionError",
    "ResourceLimitError",
    "SingularityError",
    "StirlingTable",
    "ToleranceError",
    "UltranaError",
    "bigreal",
    "binomial_row",
    "log_factorial",
    "log_sum",
    "stirling2_row",
    "stirling2_table",
    "touchard",
    "touchard_log_sequence",
    "__version__",
]
