mod frames;
mod grid;
mod lattice;
mod window;

pub use frames::{CoefBlock, CoefficientTable, FrameKind, Frames, Lattice};
pub use grid::{FreqGrid, SpectralImage};
pub use lattice::{
    curvelet_position, curvelet_steps, wedge_angle, wedge_count, CurveletIndex, CurveletLattice,
    WaveletIndex, WaveletLattice,
};
pub use window::{AngularBump, Profile, RadialWindow};
