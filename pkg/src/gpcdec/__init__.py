"""Hard-decision iterative decoding of product and staircase codes.

Library layout:

- galois: GF(2^nu) tables
- bch: component BCH codes (build/encode/syndrome/BDD/idealized BDD/erasures)
- layout: product and staircase code geometry and schedules
- engine: iterative, genie (idealized) and anchor-based decoders
- postprocess: stall-pattern post-processing (bit-flip and algebraic-erasure)
- analysis: density evolution, error-floor estimates, miscorrection
  probability, net coding gain
- sim: BSC Monte Carlo harness with deterministic parallelism
- cli: command-line front end
"""

from .analysis import (
    DeModel,
    FloorModel,
    de_crossing_p,
    de_product_model,
    de_staircase_model,
    density_evolution,
    error_floor,
    error_floor_log10,
    miscorrection_probability,
    ncg,
    poisson_tail,
    pp_floor_model,
    qfunc_inv,
    stall_floor_model,
)
from .bch import (
    FAIL,
    ComponentCodeSpec,
    DecodeOutcome,
    Syndrome,
    bdd_decode,
    build_component_code,
    encode,
    erasure_decode,
    idealized_bdd_decode,
    syndrome,
)
from .engine import (
    DecoderState,
    DecodeStats,
    anchor_decode,
    anchor_decode_state,
    backtrack_anchor,
    error_correction_step,
    genie_decode,
    iterative_bdd,
)
from .galois import FieldTable, build_field, gf_inv, gf_mul
from .layout import (
    CodewordId,
    GpcLayout,
    bit_at,
    bits_of,
    build_product_layout,
    build_staircase_layout,
    incident_codewords,
)
from .postprocess import (
    FailureReport,
    PpResult,
    bitflip_iterate_pp,
    build_failure_report,
    erasure_pp,
)
from .sim import (
    BerRecord,
    TrialConfig,
    frame_rng,
    paired_records,
    run_trials,
    sample_bsc,
)

__all__ = [
    "FieldTable",
    "build_field",
    "gf_mul",
    "gf_inv",
    "ComponentCodeSpec",
    "Syndrome",
    "DecodeOutcome",
    "FAIL",
    "build_component_code",
    "encode",
    "syndrome",
    "bdd_decode",
    "idealized_bdd_decode",
    "erasure_decode",
    "CodewordId",
    "GpcLayout",
    "build_product_layout",
    "build_staircase_layout",
    "incident_codewords",
    "bits_of",
    "bit_at",
    "DecoderState",
    "DecodeStats",
    "iterative_bdd",
    "genie_decode",
    "anchor_decode",
    "anchor_decode_state",
    "backtrack_anchor",
    "error_correction_step",
    "FailureReport",
    "PpResult",
    "build_failure_report",
    "bitflip_iterate_pp",
    "erasure_pp",
    "TrialConfig",
    "BerRecord",
    "frame_rng",
    "sample_bsc",
    "run_trials",
    "paired_records",
    "DeModel",
    "FloorModel",
    "poisson_tail",
    "de_product_model",
    "de_staircase_model",
    "density_evolution",
    "de_crossing_p",
    "stall_floor_model",
    "pp_floor_model",
    "error_floor",
    "error_floor_log10",
    "miscorrection_probability",
    "qfunc_inv",
    "ncg",
]

__version__ = "0.1.0"
