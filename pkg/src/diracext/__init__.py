"""Self-adjoint realizations of Dirac operators with Coulomb-type matrix potentials,
computed channel by channel."""

__version__ = "0.1.0"

from .channels import (
    Channel,
    ChannelClassification,
    IndexSet,
    PotentialParams,
    Regime,
    classify_all,
    classify_channel,
    deficiency_dimension,
    delta,
    enumerate_index_set,
)
from .boundary import (
    BoundaryData,
    ConnectionMatrix,
    boundary_form,
    connection_matrix,
    extract_boundary_data,
    wronskian_limit,
)
from .extensions import (
    ExtensionRelation,
    UnitaryParametrization,
    check_self_adjoint,
    distinguished_extension,
    relation_to_unitary,
    theta_family_relation,
    unitary_to_relation,
)
from .radial_ode import EigenvalueResult, RadialSolution, eigenvalues_in_gap

__all__ = [
    "BoundaryData",
    "Channel",
    "ChannelClassification",
    "ConnectionMatrix",
    "EigenvalueResult",
    "ExtensionRelation",
    "IndexSet",
    "PotentialParams",
    "RadialSolution",
    "Regime",
    "UnitaryParametrization",
    "boundary_form",
    "check_self_adjoint",
    "classify_all",
    "classify_channel",
    "connection_matrix",
    "deficiency_dimension",
    "delta",
    "distinguished_extension",
    "eigenvalues_in_gap",
    "enumerate_index_set",
    "extract_boundary_data",
    "relation_to_unitary",
    "theta_family_relation",
    "unitary_to_relation",
    "wronskian_limit",
]
