//! Symmetric interaction kernels `W`.

use crate::error::{check_len, Error, Result};
use crate::grid::{Density, Grid};

#[derive(Debug, Clone, PartialEq)]
enum Repr {
    Zero,
    /// Row-major symmetric `n x n` matrix.
    Dense(Vec<f64>),
    /// Circulant band: `diag` on the diagonal, `off` at `(i, i +- 1 mod n)`.
    TridiagonalPeriodic {
        diag: f64,
        off: f64,
    },
}

/// A symmetric interaction kernel together with a positive-definiteness claim
/// that selects the metric. The claim is taken on trust.
#[derive(Debug, Clone, PartialEq)]
pub struct InteractionKernel {
    n: usize,
    repr: Repr,
    claimed_positive_definite: bool,
}

impl InteractionKernel {
    pub fn zero(n: usize) -> Self {
        Self { n, repr: Repr::Zero, claimed_positive_definite: false }
    }

    /// `W_ij = scale * ln(|x_i - x_j| + epsilon)`, not positive definite.
    pub fn log(grid: &Grid, scale: f64, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::InvalidArgument(format!("log kernel epsilon must be > 0, got {epsilon}")));
        }
        if !scale.is_finite() {
            return Err(Error::InvalidArgument(format!("log kernel scale must be finite, got {scale}")));
        }
        let x = grid.points();
        let n = x.len();
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = scale * epsilon.ln();
            for j in (i + 1)..n {
                let w = scale * ((x[i] - x[j]).abs() + epsilon).ln();
                data[i * n + j] = w;
                data[j * n + i] = w;
            }
        }
        Ok(Self { n, repr: Repr::Dense(data), claimed_positive_definite: false })
    }

    /// Periodic tridiagonal kernel with `alpha` on the diagonal and `alpha / 2`
    /// coupling each point to its two neighbours, wrapping between the first
    /// and last points. Claimed positive definite.
    pub fn tridiagonal(grid: &Grid, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidArgument(format!("tridiagonal kernel alpha must be > 0, got {alpha}")));
        }
        if !grid.is_periodic() {
            return Err(Error::InvalidArgument("tridiagonal kernel wraps around and needs a periodic grid".into()));
        }
        if grid.len() < 3 {
            return Err(Error::InvalidArgument(
                "tridiagonal kernel needs at least 3 points for distinct neighbours".into(),
            ));
        }
        Ok(Self {
            n: grid.len(),
            repr: Repr::TridiagonalPeriodic { diag: alpha, off: alpha / 2.0 },
            claimed_positive_definite: true,
        })
    }

    /// A dense kernel from a row-major matrix, which must be exactly symmetric.
    pub fn dense(n: usize, data: Vec<f64>, claimed_positive_definite: bool) -> Result<Self> {
        check_len(n * n, data.len())?;
        for i in 0..n {
            for j in (i + 1)..n {
                if data[i * n + j] != data[j * n + i] {
                    return Err(Error::InvalidArgument(format!("kernel is not symmetric at ({i}, {j})")));
                }
            }
        }
        if data.iter().any(|w| !w.is_finite()) {
            return Err(Error::NonFinite("kernel entries".into()));
        }
        Ok(Self { n, repr: Repr::Dense(data), claimed_positive_definite })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn claimed_positive_definite(&self) -> bool {
        self.claimed_positive_definite
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.repr, Repr::Zero)
    }

    /// Entry `W_ij`.
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        match &self.repr {
            Repr::Zero => 0.0,
            Repr::Dense(d) => d[i * self.n + j],
            Repr::TridiagonalPeriodic { diag, off } => {
                if i == j {
                    *diag
                } else if (i + 1) % self.n == j || (j + 1) % self.n == i {
                    *off
                } else {
                    0.0
                }
            }
        }
    }

    /// `Wv`.
    pub fn apply(&self, v: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.n];
        self.apply_into(v, &mut out)?;
        Ok(out)
    }

    /// `out = Wv` without allocating.
    pub fn apply_into(&self, v: &[f64], out: &mut [f64]) -> Result<()> {
        check_len(self.n, v.len())?;
        check_len(self.n, out.len())?;
        let n = self.n;
        match &self.repr {
            Repr::Zero => out.fill(0.0),
            Repr::Dense(d) => {
                for (row, o) in d.chunks_exact(n).zip(out.iter_mut()) {
                    *o = dot(row, v);
                }
            }
            Repr::TridiagonalPeriodic { diag, off } => {
                for i in 0..n {
                    let left = v[(i + n - 1) % n];
                    let right = v[(i + 1) % n];
                    out[i] = diag * v[i] + off * (left + right);
                }
            }
        }
        Ok(())
    }

    /// `alpha_i = W_ii`.
    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.entry(i, i)).collect()
    }

    /// `1/2 <p, Wp>`.
    pub fn energy_quadratic(&self, p: &Density) -> Result<f64> {
        let wp = self.apply(p.as_slice())?;
        Ok(0.5 * crate::sum::neumaier(p.as_slice().iter().zip(&wp).map(|(a, b)| a * b)))
    }
}

// Four independent accumulators; the summation order is fixed so results are
// reproducible bit for bit.
fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0f64; 4];
    let chunks = a.len() / 4;
    for k in 0..chunks {
        for l in 0..4 {
            acc[l] += a[4 * k + l] * b[4 * k + l];
        }
    }
    let mut tail = 0.0;
    for k in (4 * chunks)..a.len() {
        tail += a[k] * b[k];
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}
