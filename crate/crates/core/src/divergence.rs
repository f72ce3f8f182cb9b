//! Divergences, free energies, their variational derivatives and the diagonal
//! metrics used by the descent.

use std::fmt;
use std::str::FromStr;

use crate::error::{check_len, Error, Result};
use crate::grid::{Density, Grid, Potential, ReferenceMeasure};
use crate::kernel::InteractionKernel;
use crate::reparam::Reparameterization;
use crate::sum::neumaier;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DivergenceKind {
    /// `sum p ln(p / mu)`
    Kl,
    /// `sum mu ln(mu / p)`
    ReverseKl,
    /// `sum (sqrt p - sqrt mu)^2`
    Hellinger,
}

impl DivergenceKind {
    pub const ALL: [DivergenceKind; 3] = [Self::Kl, Self::ReverseKl, Self::Hellinger];

    /// `D(p || mu)`.
    pub fn value(self, p: &[f64], mu: &[f64]) -> Result<f64> {
        check_len(mu.len(), p.len())?;
        let terms = p.iter().zip(mu);
        let d = match self {
            Self::Kl => neumaier(terms.map(|(&p, &m)| p * (p / m).ln())),
            Self::ReverseKl => neumaier(terms.map(|(&p, &m)| m * (m / p).ln())),
            Self::Hellinger => neumaier(terms.map(|(&p, &m)| (p.sqrt() - m.sqrt()).powi(2))),
        };
        if d.is_finite() {
            Ok(d)
        } else {
            Err(Error::NonFinite(format!("{self} divergence")))
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Kl => "kl",
            Self::ReverseKl => "rkl",
            Self::Hellinger => "hellinger",
        }
    }
}

impl fmt::Display for DivergenceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DivergenceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "kl" => Ok(Self::Kl),
            "rkl" => Ok(Self::ReverseKl),
            "hellinger" => Ok(Self::Hellinger),
            other => {
                Err(Error::InvalidArgument(format!("unknown divergence {other:?} (expected kl, rkl or hellinger)")))
            }
        }
    }
}

/// Metric choice: the divergence Hessian alone, or shifted by the kernel
/// diagonal `alpha` when the kernel is positive definite.
#[derive(Debug, Clone, PartialEq)]
pub enum MetricMode {
    Plain,
    Shifted(Vec<f64>),
}

impl MetricMode {
    pub fn shifted(alpha: Vec<f64>) -> Result<Self> {
        if let Some((i, &a)) = alpha.iter().enumerate().find(|(_, &a)| !(a > 0.0 && a.is_finite())) {
            return Err(Error::OutOfDomain { index: i, value: a });
        }
        Ok(Self::Shifted(alpha))
    }

    pub fn alpha(&self) -> Option<&[f64]> {
        match self {
            Self::Plain => None,
            Self::Shifted(a) => Some(a),
        }
    }

    pub fn is_shifted(&self) -> bool {
        matches!(self, Self::Shifted(_))
    }
}

/// Everything needed to evaluate and descend `F`.
#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    grid: Grid,
    kind: DivergenceKind,
    mu: ReferenceMeasure,
    potential: Potential,
    kernel: InteractionKernel,
    mode: MetricMode,
    dt: f64,
    /// `V - ln mu` for KL, `V` otherwise.
    drift_potential: Vec<f64>,
}

impl Problem {
    /// Builds a problem. `shifted` selects the `alpha = diag(W)` metric and is
    /// only accepted for kernels claimed positive definite.
    pub fn new(
        grid: Grid,
        kind: DivergenceKind,
        mu: ReferenceMeasure,
        potential: Potential,
        kernel: InteractionKernel,
        shifted: bool,
        dt: f64,
    ) -> Result<Self> {
        let n = grid.len();
        check_len(n, mu.len())?;
        check_len(n, potential.len())?;
        check_len(n, kernel.dim())?;
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidArgument(format!("dt must be > 0, got {dt}")));
        }
        let mode = if shifted {
            if !kernel.claimed_positive_definite() {
                return Err(Error::InvalidArgument(
                    "shifted metric requires a kernel claimed positive definite".into(),
                ));
            }
            MetricMode::shifted(kernel.diagonal())?
        } else {
            MetricMode::Plain
        };
        let drift_potential = match kind {
            DivergenceKind::Kl => potential.as_slice().iter().zip(mu.as_slice()).map(|(v, m)| v - m.ln()).collect(),
            _ => potential.as_slice().to_vec(),
        };
        Ok(Self { grid, kind, mu, potential, kernel, mode, dt, drift_potential })
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn kind(&self) -> DivergenceKind {
        self.kind
    }

    pub fn mu(&self) -> &ReferenceMeasure {
        &self.mu
    }

    pub fn potential(&self) -> &Potential {
        &self.potential
    }

    pub fn kernel(&self) -> &InteractionKernel {
        &self.kernel
    }

    pub fn mode(&self) -> &MetricMode {
        &self.mode
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// The same problem with a different step size.
    pub fn with_dt(&self, dt: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidArgument(format!("dt must be > 0, got {dt}")));
        }
        Ok(Self { dt, ..self.clone() })
    }

    /// The potential seen by the descent. For KL the `-sum p ln mu` part of
    /// the divergence is folded in, giving `V - ln mu`.
    pub fn drift_potential(&self) -> &[f64] {
        &self.drift_potential
    }

    pub fn reparam(&self) -> Reparameterization<'_> {
        Reparameterization::new(self.kind, self.mu.as_slice(), self.mode.alpha())
            .expect("problem invariants guarantee a valid reparameterization")
    }

    fn check(&self, p: &Density) -> Result<()> {
        check_len(self.len(), p.len())
    }

    /// `F(p) = D(p || mu) + <V, p> + 1/2 <p, Wp>` with the full divergence.
    pub fn free_energy(&self, p: &Density) -> Result<f64> {
        self.check(p)?;
        let d = self.kind.value(p.as_slice(), self.mu.as_slice())?;
        let linear = neumaier(p.as_slice().iter().zip(self.potential.as_slice()).map(|(a, b)| a * b));
        let f = d + linear + self.kernel.energy_quadratic(p)?;
        if f.is_finite() {
            Ok(f)
        } else {
            Err(Error::NonFinite("free energy".into()))
        }
    }

    /// `sum p ln p + <V, p> + 1/2 <p, Wp>`: the entropy form of the KL energy
    /// that ignores `mu`. Equals `free_energy` when `mu` is uniform, up to `ln n`.
    pub fn entropy_energy(&self, p: &Density) -> Result<f64> {
        self.check(p)?;
        let ps = p.as_slice();
        let entropy = neumaier(ps.iter().map(|&x| x * x.ln()));
        let linear = neumaier(ps.iter().zip(self.potential.as_slice()).map(|(a, b)| a * b));
        let f = entropy + linear + self.kernel.energy_quadratic(p)?;
        if f.is_finite() {
            Ok(f)
        } else {
            Err(Error::NonFinite("entropy energy".into()))
        }
    }

    /// Exact variational derivative of [`Problem::free_energy`].
    pub fn gradient(&self, p: &Density) -> Result<Vec<f64>> {
        self.check(p)?;
        let mut out = self.kernel.apply(p.as_slice())?;
        let (ps, mu, v) = (p.as_slice(), self.mu.as_slice(), self.potential.as_slice());
        for i in 0..out.len() {
            let d = match self.kind {
                DivergenceKind::Kl => (ps[i] / mu[i]).ln() + 1.0,
                DivergenceKind::ReverseKl => -mu[i] / ps[i],
                DivergenceKind::Hellinger => -(mu[i] / ps[i]).sqrt(),
            };
            out[i] += d + v[i];
        }
        if let Some((i, &g)) = out.iter().enumerate().find(|(_, g)| !g.is_finite()) {
            return Err(Error::OutOfDomain { index: i, value: g });
        }
        Ok(out)
    }

    /// Diagonal of the metric: the divergence Hessian, plus `alpha` when shifted.
    pub fn metric_diagonal(&self, p: &Density) -> Result<Vec<f64>> {
        self.check(p)?;
        let r = self.reparam();
        Ok((0..p.len()).map(|i| r.derivative(i, p.as_slice()[i])).collect())
    }
}
