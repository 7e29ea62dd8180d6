//! Explicit frame matrices on a small grid, for checking the streamed
//! pipeline against its finite-dimensional version.

use super::abstract_frame::AbstractFrame;
use crate::error::{Error, Result};
use crate::frame_kernel::{
    wedge_count, CurveletIndex, Frames, FreqGrid, SpectralImage, WaveletIndex,
};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;

/// Largest grid size accepted for materialisation.
const MAX_DIM: usize = 4096;

/// Isometry from conjugate-symmetric spectra on `grid` to `R^{grid.len()}`.
///
/// Mode `-m` sits at flat index `len - 1 - i` when `m` sits at `i`, so each
/// pair `(i, len-1-i)` with `i` below the centre contributes
/// `sqrt(2w) (Re, Im)` and the centre contributes `sqrt(w) Re`.
pub fn to_real(f: &SpectralImage) -> DVector<f64> {
    let n = f.grid.len();
    let c = n / 2;
    let w = f.grid.weight();
    let a = (2.0 * w).sqrt();
    let mut x = DVector::zeros(n);
    for i in 0..c {
        x[2 * i] = a * f.data[i].re;
        x[2 * i + 1] = a * f.data[i].im;
    }
    x[2 * c] = w.sqrt() * f.data[c].re;
    x
}

/// Inverse of [`to_real`].
pub fn from_real(x: &DVector<f64>, grid: &FreqGrid) -> Result<SpectralImage> {
    let n = grid.len();
    if x.len() != n {
        return Err(Error::Dimension(format!(
            "vector of length {} for a grid of {n} nodes",
            x.len()
        )));
    }
    let c = n / 2;
    let w = grid.weight();
    let a = 1.0 / (2.0 * w).sqrt();
    let mut f = SpectralImage::zeros(*grid);
    for i in 0..c {
        let v = Complex64::new(x[2 * i] * a, x[2 * i + 1] * a);
        f.data[i] = v;
        f.data[n - 1 - i] = v.conj();
    }
    f.data[c] = Complex64::new(x[2 * c] / w.sqrt(), 0.0);
    Ok(f)
}

/// Both frames at scales `j-1..=j+1` as real matrices, one column per atom.
///
/// The columns span only the band the atoms live in, so the matrices are
/// Parseval on that band and not on the whole embedding space.
#[derive(Clone, Debug)]
pub struct MaterializedFrames {
    pub grid: FreqGrid,
    pub wavelets: Vec<WaveletIndex>,
    pub phi1: AbstractFrame,
    pub curvelets: Vec<CurveletIndex>,
    pub phi2: AbstractFrame,
}

fn columns<I: Sync, F>(grid: &FreqGrid, atoms: &[I], spectrum: F) -> Result<DMatrix<f64>>
where
    F: Fn(&I) -> Result<SpectralImage> + Sync,
{
    let cols: Vec<DVector<f64>> = atoms
        .par_iter()
        .map(|a| spectrum(a).map(|s| to_real(&s)))
        .collect::<Result<_>>()?;
    Ok(DMatrix::from_columns(&cols).resize(grid.len(), atoms.len(), 0.0))
}

pub fn frame_matrix(frames: &Frames, j: i32) -> Result<MaterializedFrames> {
    let grid = frames.grid(j)?;
    if grid.len() > MAX_DIM {
        return Err(Error::InvalidInput(format!(
            "grid of {} nodes is too large to materialise",
            grid.len()
        )));
    }
    let mut wavelets = Vec::new();
    let mut curvelets = Vec::new();
    for s in j - 1..=j + 1 {
        let lat = frames.wavelet_lattice(s);
        wavelets.extend((0..lat.len()).map(|i| lat.index(i)));
        for l in 0..wedge_count(s) {
            curvelets.extend(frames.curvelet_lattice(s, l).indices());
        }
    }
    let phi1 = columns(&grid, &wavelets, |i| frames.wavelet_spectrum(i, &grid))?;
    let phi2 = columns(&grid, &curvelets, |i| frames.curvelet_spectrum(i, &grid))?;
    Ok(MaterializedFrames {
        grid,
        wavelets,
        phi1: AbstractFrame::unchecked(phi1),
        curvelets,
        phi2: AbstractFrame::unchecked(phi2),
    })
}
