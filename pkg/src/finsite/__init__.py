"""Finite Grothendieck sites with an exact-arithmetic valuation laboratory.

Modules:
  fincat     finite categories, functors, sieves, codirected posets
  coverage   topologies, saturation, finite spaces, open and closed sites
  sheafkit   presheaves, sheafification, morphism tests, direct images
  prolocal   pro-objects, locality, fibre functors, conservativity drivers
  valuation  the value group Z + Z*sqrt(2), blow-up towers, lifting tests
  catalogue  standard spaces and sheaf constructions for checks and demos
  scenarios  reproducible drills behind the command line and the test suite
  cli        file-driven scenario runner with JSON reports
"""

from .fincat import (
    CategoryError,
    CategoryReport,
    FiniteCategory,
    FunctorData,
    Poset,
    Sieve,
    is_codirected_poset,
    maximal_sieve,
    poset_category,
    pullback_sieve,
    sieve_generated,
    validate_category,
    validate_functor,
)
from .coverage import (
    FiniteSpace,
    Pretopology,
    Site,
    Topology,
    closed_cover_site,
    generate_topology,
    is_covering,
    join_topologies,
    refines,
    subspace_functor,
    topology_axiom_report,
    zariski_site,
)
from .sheafkit import (
    AbPresheaf,
    SetPresheaf,
    SheafMorphism,
    check_exactness_along,
    direct_image,
    is_almost_cocontinuous,
    is_continuous,
    is_epi,
    is_iso,
    is_mono,
    is_sheaf,
    matching_families,
    plus_construction,
    sheafify,
    stalk,
)
from .prolocal import (
    FibreFunctorWitness,
    LocalityError,
    ProObject,
    check_fibre_axioms,
    conservativity_check,
    constant_pro_object,
    cover_detection,
    fibre_functor,
    hom_pro,
    is_tau_local,
    neighbourhood_category,
    stalk_point,
    stalk_points,
)
from .valuation import (
    BlowupTower,
    DVRPoint,
    Escaped,
    GroupElement,
    MonomialValuation,
    NoEscape,
    RationalFn,
    canonical_rv_trace,
    center_sequence,
    divisibility_witness,
    lift_dvr_point,
    rv_membership,
    unit_or_zero_lift,
    value,
)

__version__ = "0.1.0"
