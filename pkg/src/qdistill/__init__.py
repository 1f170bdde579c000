"""Two-qubit entanglement distillation: PPT test, local filtering, BBPSSW."""

__version__ = "0.1.0"

from .errors import (  # noqa: F401
    FidelityTooLow,
    FilterTooLarge,
    NotDistillable,
    NotHermitian,
    NotInseparable,
    NotPositive,
    NotPsd,
    NotTState,
    NotUnitTrace,
    QDistillError,
    TargetUnreachable,
    ZeroWeight,
)
from .qstate import (  # noqa: F401
    DensityMatrix,
    bell_state,
    eq10_state,
    make_density,
    partial_transpose,
    random_mixed,
    random_separable,
    singlet_fraction,
    werner_state,
)
from .inseparability import Filter, derive_filter, family_filter, ppt_test  # noqa: F401
from .distill import bbpssw_step, distill_pipeline, twirl_werner  # noqa: F401
