//! Spectral measures of zero-diagonal Jacobi matrices.
//!
//! The eigensolver is the implicit-shift QL iteration for symmetric
//! tridiagonal matrices. Only the first row of the eigenvector matrix is
//! carried along, which is all the Golub–Welsch weights need.

use serde::{Deserialize, Serialize};

use super::SpectralError;
use crate::radial::JacobiData;

/// Off-diagonal entries below this multiple of the neighbouring diagonal
/// magnitudes are treated as zero.
const DEFLATION: f64 = 1e-14;
const MAX_SWEEPS: usize = 60;

/// Finitely supported measure, atoms sorted by eigenvalue.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralMeasure {
    pub atoms: Vec<(f64, f64)>,
}

impl SpectralMeasure {
    /// Sorts atoms by position; does not merge or normalize.
    pub fn new(mut atoms: Vec<(f64, f64)>) -> Self {
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        SpectralMeasure { atoms }
    }

    pub fn dirac(x: f64) -> Self {
        SpectralMeasure { atoms: vec![(x, 1.0)] }
    }

    pub fn total_weight(&self) -> f64 {
        self.atoms.iter().map(|a| a.1).sum()
    }

    pub fn moment(&self, k: u32) -> f64 {
        self.atoms.iter().map(|&(x, w)| w * x.powi(k as i32)).sum()
    }

    pub fn moments(&self, max_k: u32) -> Vec<f64> {
        (0..=max_k).map(|k| self.moment(k)).collect()
    }

    /// Largest pointwise difference, provided both have the same number of atoms.
    pub fn max_deviation(&self, other: &SpectralMeasure) -> Option<(f64, f64)> {
        (self.atoms.len() == other.atoms.len()).then(|| {
            self.atoms
                .iter()
                .zip(&other.atoms)
                .fold((0.0f64, 0.0f64), |(dx, dw), (a, b)| (dx.max((a.0 - b.0).abs()), dw.max((a.1 - b.1).abs())))
        })
    }
}

/// Eigenvalues and squared first eigenvector components of the Jacobi matrix
/// with zero diagonal and off-diagonals `β_k`.
pub fn eigendecompose(j: &JacobiData) -> Result<SpectralMeasure, SpectralError> {
    let n = j.r() + 1;
    let mut d = vec![0.0; n];
    let mut e: Vec<f64> = j.beta.iter().copied().chain(std::iter::once(0.0)).collect();
    let mut z = vec![0.0; n];
    z[0] = 1.0;
    tql(&mut d, &mut e, &mut z)?;
    Ok(SpectralMeasure::new(d.into_iter().zip(z.into_iter().map(|c| c * c)).collect()))
}

/// In-place QL with implicit Wilkinson shifts. `d` is the diagonal, `e` the
/// sub-diagonal padded with a trailing zero, `z` the first row of the
/// accumulated rotations.
fn tql(d: &mut [f64], e: &mut [f64], z: &mut [f64]) -> Result<(), SpectralError> {
    let n = d.len();
    for l in 0..n {
        let mut sweeps = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m] == 0.0 || e[m].abs() <= DEFLATION * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            sweeps += 1;
            if sweeps > MAX_SWEEPS {
                return Err(SpectralError::NoConvergence { index: l, sweeps: MAX_SWEEPS });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut underflow = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                let zi1 = z[i + 1];
                z[i + 1] = s * z[i] + c * zi1;
                z[i] = c * z[i] - s * zi1;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}
