"""Finite CAR algebras, exchangeable fermionic states, and de Finetti
measure recovery.

The heavy lifting lives in the compiled extension; this package re-exports
its surface.
"""

from ._core import (  # noqa: F401
    CapacityError,
    CarContext,
    FockUnitary,
    GnsRep,
    InfeasibleMomentsError,
    MeasureAtom,
    MixingMeasure,
    NotSymmetricError,
    Permutation,
    State,
    alpha,
    build_gns,
    cesaro_conjugation_average,
    classify_type,
    decompose_state,
    eigenvalue_ratio_spectrum,
    ep_odd_compression,
    evaluate,
    intersecting_fraction,
    invariant_projection,
    is_even,
    is_symmetric,
    load_measure,
    load_state,
    mixing_permutation,
    mixture_of_product_states,
    nested_ergodic_check,
    occupation_moments,
    product_state,
    reconstruct_state,
    recover_measure,
    restrict_state,
    run_verification,
    save_measure,
    save_state,
    second_quantize,
    strong_clustering_check,
    symmetrize_operator,
    symmetrize_state,
    validate_state,
    weak_clustering_average,
)

__all__ = [name for name in dir() if not name.startswith("_")]
