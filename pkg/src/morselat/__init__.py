"""morselat: exact attractor/repeller lattices for finite dynamical systems,
Birkhoff representation, and constructive lattice lifting."""

from .order import (
    DownSet,
    NotADownSet,
    NotAntisymmetric,
    NotReflexive,
    NotTransitive,
    Poset,
    TooLarge,
    UnknownElement,
    all_down_sets,
    antichain,
    chain,
    complement_map,
    down_set,
    dual_poset,
    is_order_embedding,
    is_order_preserving,
    validate_poset,
)
from .lattice import (
    BooleanAlgebraRep,
    HomReport,
    LatticeHom,
    NotAHom,
    NotALattice,
    NotJoinIrreducible,
    SetLattice,
    birkhoff_down,
    birkhoff_join,
    birkhoff_up,
    boolean_extension,
    booleanize,
    check_anti_hom,
    check_hom,
    join_irreducibles,
    predecessor,
    sublattices,
)
from .dynsys import (
    FiniteDynSys,
    InvalidOrbit,
    InvarianceFlags,
    NotAnAttractor,
    NotARepeller,
    NotForwardInvariant,
    Orbit,
    ds1,
    ds2,
    ds3,
)
from .lifting import (
    AttractorLiftSpec,
    ConditionerMissing,
    LiftCertificate,
    LiftError,
    LiftProblem,
    ObstructionFound,
    PartialLift,
    SectionInconsistent,
    TopNotUnique,
    check_condition_i,
    is_conditional_lift,
    is_partial_lift,
    lift,
    spaciousness_falsifier,
    transport_by_duality,
)
from .dynsys_lift import (
    attractor_lift,
    attractor_sublattice,
    repeller_lift,
    repeller_lift_problem,
    repeller_sublattice,
)
from .grid import (
    CellGrid,
    CellMap,
    ImageOutOfDomain,
    NotARepellingBlock,
    NotASublattice,
    block_lattices,
    comb_att_lattice,
    comb_inv,
    comb_inv_plus,
    comb_rep_lattice,
    grid_attractor_lift,
    grid_lift_problem,
    ingest_interval_map,
    is_attracting_block,
    is_repelling_block,
    shrink_repelling_block,
)
from .expr import ParseError, parse as parse_expr

__version__ = "0.1.0"
