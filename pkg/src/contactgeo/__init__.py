"""Numerical geometry of submanifolds of almost contact metric spaces.

Classifies skew-CR structure via the eigenspaces of Q = T^2, detects
warped-product metrics, and verifies the associated identities and the
second-fundamental-form inequality as numeric residuals at sampled
points.
"""

__version__ = "0.1.0"

from .ambient import (  # noqa: E402
    AmbientModel,
    check_structure,
    flat_model,
    sasakian_model,
)
from .exprdsl import Expr, parse  # noqa: E402
from .immersion import (  # noqa: E402
    GeometrySample,
    Immersion,
    second_fundamental_form,
)
from .pipeline import VerificationReport, run_scenario  # noqa: E402
from .scenarios import BUILTIN_SCENARIOS, Scenario, builtin, load_config  # noqa: E402
from .skewcr import classify, classify_normal  # noqa: E402
from .tolerances import Tolerances  # noqa: E402
from .warped import (  # noqa: E402
    ProductDeclaration,
    extract_warping,
    grad_ln_f,
    theorem41_report,
)

__all__ = [
    "__version__",
    "AmbientModel",
    "check_structure",
    "flat_model",
    "sasakian_model",
    "Expr",
    "parse",
    "GeometrySample",
    "Immersion",
    "second_fundamental_form",
    "VerificationReport",
    "run_scenario",
    "BUILTIN_SCENARIOS",
    "Scenario",
    "builtin",
    "load_config",
    "classify",
    "classify_normal",
    "Tolerances",
    "ProductDeclaration",
    "extract_warping",
    "grad_ln_f",
    "theorem41_report",
]
