"""Pseudo-metrics, admissibility, certification and covering for partially
equivariant non-expansive operators on finite instances."""

from .core import (
    DEFAULT_DELTA_MEM,
    DEFAULT_DELTA_NUM,
    DomainMap,
    DomainMismatch,
    EmptySpaceError,
    FiniteDomain,
    Measurement,
    MeasurementSpace,
    PerceptionTriple,
    PgeneoError,
    dedup_space,
    nearest_member,
    right_action,
    space_from_arrays,
    space_membership,
    uniform_distance,
    uniform_norm,
)
from .metrics import (
    MetricReport,
    aut_pseudometric,
    domain_distance_matrix,
    domain_pseudometric,
    operator_distance,
    pgeneo_distance,
    pi_distance,
)
from .operations import (
    AdmissibilityReport,
    PiSet,
    TripleReport,
    UpsilonSet,
    all_bijections,
    build_pi,
    build_upsilon,
    check_action_continuity,
    check_operation_nonexpansive,
    compose_admissible,
    is_operation,
    translate_space,
    validate_perception_triple,
)
from .operators import (
    Aggregator,
    AuditError,
    Certificate,
    ConvexityError,
    OperatorPair,
    RestrictionReport,
    TransformationMap,
    certify,
    check_aggregator_nonexpansive,
    check_restriction,
    check_transformation_map,
    combine,
    compose,
    convex_combine,
)
from .covering import (
    EpsilonNet,
    cover_domain,
    cover_operations,
    cover_operator_family,
    greedy_net,
    reduced_space_deviation,
    verify_net,
)
from .builders import GeometryError, digit_instance, squares_instance
from .instances import (
    Instance,
    InstanceError,
    canonical_text,
    load_instance,
    parse_instance,
    resolve,
    save_instance,
)
from .schemas import InstanceDoc
