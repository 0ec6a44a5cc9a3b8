"""Beamspace channel estimation for hybrid mmWave massive MIMO links."""

from .beamspace import (
    beamspace_transform,
    grid_angle,
    quantize_angle,
    sampling_matrix,
    steering_vector,
)
from .channel import (
    ChannelPath,
    ChannelRealization,
    channel_from_paths,
    generate_channel,
    los_truth,
)
from .codebook import CoarseEstimate, HierarchicalCodebook, beam_train, build_codebook
from .config import SystemConfig, load_config, validate
from .estimator import (
    AngleEstimate,
    MeasurementMatrix,
    SearchRegion,
    beamspace_entry,
    estimate_czo,
    estimate_ia,
    estimate_szo,
    exhaustive_argmax,
    simulate_pilot_phase,
    stage1_main_lobe,
    stage2_trichotomy,
)
from .harness import (
    ExperimentResult,
    ResultRow,
    emit_results,
    nmse,
    run_experiment,
    sum_rate,
    training_slots,
)
from .ia_design import (
    HybridCombiner,
    HybridPrecoder,
    PhaseShifterGrid,
    design_combiner,
    design_precoder,
    gamma_scale,
    procrustes_digital,
    quantize_analog,
    target_semi_unitary,
)
from .zo_design import (
    CONCENTRATED,
    SCATTERED,
    ZoGram,
    build_zo_gram,
    factor_gram,
    predicted_lobe_magnitude,
)

__version__ = "0.1.0"
