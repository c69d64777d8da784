//! Block preconditioner built from the `n x n` coupling matrix.
//!
//! `M` keeps only the diagonal of every spatial stencil block, so each
//! spatial point carries the same `n x n` block
//! `gamma = I + (2d / h^2) a`. Applying `M^{-1}` multiplies the `n`
//! coefficients of every spatial point by `gamma^{-1}`.

use super::dense::invert;
use crate::basis::CouplingMatrix;
use crate::error::{Error, Result};

/// Action of an approximate inverse on a vector.
pub trait Preconditioner {
    fn apply(&self, v: &[f64], out: &mut [f64]);
    fn apply_transpose(&self, v: &[f64], out: &mut [f64]);
}

/// No preconditioning.
#[derive(Debug, Clone, Copy, Default)]
pub struct IdentityPreconditioner;

impl Preconditioner for IdentityPreconditioner {
    fn apply(&self, v: &[f64], out: &mut [f64]) {
        out.copy_from_slice(v);
    }

    fn apply_transpose(&self, v: &[f64], out: &mut [f64]) {
        out.copy_from_slice(v);
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockPreconditioner {
    n: usize,
    block: usize,
    gamma: Vec<f64>,
    gamma_inverse: Vec<f64>,
}

impl BlockPreconditioner {
    /// Number of basis functions.
    pub fn size(&self) -> usize {
        self.n
    }

    /// Number of spatial points (`m` in 1D, `m^2` in 2D).
    pub fn block(&self) -> usize {
        self.block
    }

    pub fn gamma(&self) -> &[f64] {
        &self.gamma
    }

    pub fn gamma_inverse(&self) -> &[f64] {
        &self.gamma_inverse
    }

    fn multiply(&self, matrix: &[f64], transpose: bool, v: &[f64], out: &mut [f64]) {
        let (n, block) = (self.n, self.block);
        debug_assert_eq!(v.len(), n * block);
        out.iter_mut().for_each(|x| *x = 0.0);
        for k in 0..n {
            let dst = &mut out[k * block..(k + 1) * block];
            for l in 0..n {
                let g = if transpose { matrix[l * n + k] } else { matrix[k * n + l] };
                if g == 0.0 {
                    continue;
                }
                let src = &v[l * block..(l + 1) * block];
                for (o, s) in dst.iter_mut().zip(src) {
                    *o += g * s;
                }
            }
        }
    }
}

impl Preconditioner for BlockPreconditioner {
    fn apply(&self, v: &[f64], out: &mut [f64]) {
        self.multiply(&self.gamma_inverse, false, v, out);
    }

    fn apply_transpose(&self, v: &[f64], out: &mut [f64]) {
        self.multiply(&self.gamma_inverse, true, v, out);
    }
}

/// Builds `gamma = I + (2d/h^2) a` and its inverse.
pub fn build_preconditioner(
    coupling: &CouplingMatrix,
    h: f64,
    dimension: usize,
    block: usize,
) -> Result<BlockPreconditioner> {
    if !(h > 0.0) {
        return Err(Error::Domain(format!("grid spacing h = {h} must be > 0")));
    }
    if !(1..=2).contains(&dimension) {
        return Err(Error::Domain(format!("spatial dimension {dimension} not in {{1, 2}}")));
    }
    let n = coupling.size();
    let factor = 2.0 * dimension as f64 / (h * h);
    let mut gamma: Vec<f64> = coupling.entries().iter().map(|a| factor * a).collect();
    for i in 0..n {
        gamma[i * n + i] += 1.0;
    }
    let gamma_inverse = invert(&gamma, n)?;
    Ok(BlockPreconditioner {
        n,
        block,
        gamma,
        gamma_inverse,
    })
}
