"""Branch-relative probabilities and tensed many-valued logic for Everettian quantum mechanics."""

from .config import dump_scenario, load_scenario
from .errors import (
    CapacityError,
    ConfigParseError,
    DimensionError,
    GridError,
    LabelError,
    NotHermitianError,
    NotUnitaryError,
    NullBranchError,
    OpenFutureError,
    PreconditionError,
    PropositionSyntaxError,
    ScenarioError,
    ScenarioValidationError,
)
from .linalg import HermitianOperator, StateVector, apply_unitary, evolve, inner, tensor
from .scenarios import (
    CatParams,
    Scenario,
    Step,
    build_cat_observed,
    build_cat_plain,
    build_cat_record_circuit,
    build_measurement,
)
from .transition import (
    TransitionMatrix,
    TransitionQuery,
    revival_probability,
    transition_matrix,
    transition_probability,
)
from .universe import (
    BranchDecomposition,
    ExperienceBasis,
    Factorization,
    decompose,
    real_experiences,
    reconstruct,
)

__version__ = "0.1.0"
