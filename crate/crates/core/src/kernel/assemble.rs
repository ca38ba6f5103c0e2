//! Matrix kernels assembled from the scalar kernel, and the Pfaffian
//! predictions they produce.

use super::{KernelError, ScalarKernel};
use crate::lattice::Window;
use crate::skew::{self, SkewMatrix};

/// The two algebraically equivalent block forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixForm {
    /// `(1/(1+theta)) [[K, -D2 K], [-D1 K, D1 D2 K]]` of forward
    /// differences.
    Derivative,
    /// `(-1/(1+theta)) [[K(y,z), K(y,z+1)], [K(y+1,z), K(y+1,z+1)]]` of
    /// shifted evaluations; determines the same point process.
    Shifted,
}

/// Antisymmetric 2x2-block kernel over lattice site pairs.
#[derive(Debug, Clone)]
pub struct MatrixKernel {
    scalar: ScalarKernel,
    form: MatrixForm,
    prefactor: f64,
}

impl MatrixKernel {
    pub fn scalar(&self) -> &ScalarKernel {
        &self.scalar
    }

    pub fn form(&self) -> MatrixForm {
        self.form
    }

    pub fn theta(&self) -> f64 {
        self.scalar.theta()
    }

    pub fn prefactor(&self) -> f64 {
        self.prefactor
    }

    /// Replaces the scalar `1/(1+theta)` by an arbitrary thinning factor.
    pub fn with_prefactor(mut self, prefactor: f64) -> Self {
        self.prefactor = prefactor;
        self
    }

    /// Sites at which blocks can be evaluated: forward differences need one
    /// site of margin inside the solved grid.
    pub fn evaluable(&self) -> Window {
        let w = self.scalar.window();
        Window::new(w.lo, w.hi - 1).expect("solved grids have at least two sites")
    }

    fn check_site(&self, x: i64) -> Result<(), KernelError> {
        if self.evaluable().contains(x) {
            Ok(())
        } else {
            Err(KernelError::OutOfWindow { y: x, z: x })
        }
    }

    /// One-point intensity `K_12(y,y) = (1 - K(y,y+1)) / (1+theta)`.
    pub fn intensity(&self, y: i64) -> Result<f64, KernelError> {
        self.check_site(y)?;
        Ok(self.prefactor * (1.0 - self.scalar.value(y, y + 1)?))
    }

    /// The 2x2 block for an arbitrary ordered pair; `y > z` is filled in by
    /// the antisymmetry conditions `K_ij(y,z) = -K_ji(z,y)`.
    pub fn block(&self, y: i64, z: i64) -> Result<[[f64; 2]; 2], KernelError> {
        self.check_site(y)?;
        self.check_site(z)?;
        if y > z {
            let b = self.block(z, y)?;
            return Ok([[-b[0][0], -b[1][0]], [-b[0][1], -b[1][1]]]);
        }
        if y == z {
            let rho = self.intensity(y)?;
            return Ok([[0.0, rho], [-rho, 0.0]]);
        }
        let k = &self.scalar;
        let kyz = k.value(y, z)?;
        let ky1z = k.value(y + 1, z)?;
        let kyz1 = k.value(y, z + 1)?;
        let ky1z1 = k.value(y + 1, z + 1)?;
        let c = self.prefactor;
        Ok(match self.form {
            MatrixForm::Derivative => {
                let d2 = kyz1 - kyz;
                let d1 = ky1z - kyz;
                let d12 = ky1z1 - ky1z - kyz1 + kyz;
                [[c * kyz, -c * d2], [-c * d1, c * d12]]
            }
            MatrixForm::Shifted => {
                [[-c * kyz, -c * kyz1], [-c * ky1z, -c * ky1z1]]
            }
        })
    }
}

/// Derivative-form matrix kernel of forward differences.
pub fn assemble_matrix_kernel(scalar: ScalarKernel) -> MatrixKernel {
    let prefactor = 1.0 / (1.0 + scalar.theta());
    MatrixKernel { scalar, form: MatrixForm::Derivative, prefactor }
}

/// Alternative shifted-evaluation kernel; produces identical Pfaffians.
pub fn alt_matrix_kernel(scalar: ScalarKernel) -> MatrixKernel {
    let prefactor = 1.0 / (1.0 + scalar.theta());
    MatrixKernel { scalar, form: MatrixForm::Shifted, prefactor }
}

/// Builds the antisymmetric `2n x 2n` matrix with entries `K_t(y_i, y_j)`
/// for an ordered site vector (ties allowed).
pub fn spin_matrix(scalar: &ScalarKernel, ys: &[i64]) -> Result<SkewMatrix, KernelError> {
    if ys.is_empty() || ys.len() % 2 != 0 {
        return Err(KernelError::OddSiteCount);
    }
    if ys.windows(2).any(|w| w[0] > w[1]) {
        return Err(KernelError::UnorderedSites);
    }
    let mut entries = vec![0.0; ys.len() * ys.len()];
    for i in 0..ys.len() {
        for j in (i + 1)..ys.len() {
            entries[i * ys.len() + j] = scalar.value(ys[i], ys[j])?;
        }
    }
    let n = ys.len();
    let m = SkewMatrix::from_upper(n, |i, j| entries[i * n + j])?;
    Ok(m)
}

/// Predicted spin-product expectation `E[prod sigma_{y_{2i-1}, y_{2i}}]` as
/// the Pfaffian of the scalar-kernel matrix.
pub fn predict_spin_product(scalar: &ScalarKernel, ys: &[i64]) -> Result<f64, KernelError> {
    Ok(skew::pfaffian(&spin_matrix(scalar, ys)?))
}

/// Predicted correlation `E[eta(x_1) ... eta(x_n)]` as the Pfaffian of the
/// block matrix kernel over distinct ascending points.
pub fn predict_correlation(mk: &MatrixKernel, points: &[i64]) -> Result<f64, KernelError> {
    if points.is_empty() || points.windows(2).any(|w| w[0] >= w[1]) {
        return Err(KernelError::InvalidPoints);
    }
    let n = points.len();
    let mut blocks = vec![[[0.0; 2]; 2]; n * n];
    for i in 0..n {
        for j in i..n {
            blocks[i * n + j] = mk.block(points[i], points[j])?;
        }
    }
    let m = SkewMatrix::from_upper(2 * n, |r, c| {
        let (i, a) = (r / 2, r % 2);
        let (j, b) = (c / 2, c % 2);
        blocks[i * n + j][a][b]
    })?;
    Ok(skew::pfaffian(&m))
}
