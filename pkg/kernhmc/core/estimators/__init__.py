from .objective import score_objective, batch_objective
from .lite import (
    LiteModel,
    fit_lite,
    fit_lite_lowrank,
    lite_grad,
    lite_log_density,
)
from .finite import (
    FiniteModel,
    fit_finite_batch,
    finite_update,
    finite_absorb,
    finite_grad,
)
from .cross_validation import CVResult, cross_validate, log_grid
