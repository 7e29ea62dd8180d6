//! Coherence, sparsity, phase-space and decay diagnostics.

mod coherence;
mod fit;
mod phase;
mod probe;

pub use coherence::{
    block_l1_outside, cluster_coherence, cluster_coherence_full, cross_gram_probe, l1_on_wavelets,
    relative_sparsity, wavelet_gram_constant, CoherenceWindow, IndexSet,
};
pub use fit::{decay_slope, spearman, strictly_decreasing};
pub use phase::{
    d_ps, distance_to_curve, distance_to_points, orientation_gap, orientations, phase_distance,
    phase_projection_curvelet, phase_projection_wavelet, tube_membership, PhasePoint, PhaseSet,
    TubeBase, TubeSpec, CURVE_SEEDS,
};
pub use probe::{classify, wavefront_probe, ProbeKind, ProbeResult, Regularity, DEAD_ZONE};
