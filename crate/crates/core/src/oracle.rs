//! Brute-force reference computations for cross-checking the solvers.
//!
//! Nothing here shares a code path with the quantity it checks: energies are
//! plain double loops, the normalization constant comes from pure bisection
//! with locally inverted maps, and minimizers come from projected gradient
//! descent on the simplex.

use std::fmt;

use crate::divergence::{DivergenceKind, Problem};
use crate::error::{check_len, Error, Result};
use crate::grid::{Density, Grid, Potential, ReferenceMeasure};
use crate::kernel::InteractionKernel;
use crate::reparam::Reparameterization;

/// Accumulated worst-case errors of one checked quantity.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub quantity: String,
    pub max_abs_error: f64,
    pub max_rel_error: f64,
    pub instances: usize,
}

impl OracleReport {
    pub fn new(quantity: impl Into<String>) -> Self {
        Self { quantity: quantity.into(), max_abs_error: 0.0, max_rel_error: 0.0, instances: 0 }
    }

    /// Records one comparison; relative errors are taken against `max(|expected|, floor)`.
    pub fn compare(&mut self, expected: f64, actual: f64, floor: f64) {
        let abs = (expected - actual).abs();
        let rel = abs / expected.abs().max(floor);
        self.max_abs_error = self.max_abs_error.max(if abs.is_nan() { f64::INFINITY } else { abs });
        self.max_rel_error = self.max_rel_error.max(if rel.is_nan() { f64::INFINITY } else { rel });
    }

    pub fn compare_slices(&mut self, expected: &[f64], actual: &[f64], floor: f64) {
        if expected.len() != actual.len() {
            self.max_abs_error = f64::INFINITY;
            self.max_rel_error = f64::INFINITY;
        }
        for (e, a) in expected.iter().zip(actual) {
            self.compare(*e, *a, floor);
        }
    }

    pub fn finish_instance(&mut self) {
        self.instances += 1;
    }
}

impl fmt::Display for OracleReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {} instances, max abs error {:.3e}, max rel error {:.3e}",
            self.quantity, self.instances, self.max_abs_error, self.max_rel_error
        )
    }
}

/// `F` evaluated term by term on any nonnegative vector, without requiring unit
/// mass. The Hellinger term is extended as `mu_i - 2 sqrt(mu_i p_i)` plus a
/// constant 1 standing in for `sum p`, which agrees with `(sqrt p - sqrt mu)^2`
/// on the simplex.
pub fn naive_free_energy(problem: &Problem, p: &[f64]) -> Result<f64> {
    check_len(problem.len(), p.len())?;
    let mu = problem.mu().as_slice();
    let v = problem.potential().as_slice();
    let w = problem.kernel();
    let n = p.len();
    let mut total = 0.0;
    for i in 0..n {
        total += match problem.kind() {
            DivergenceKind::Kl => p[i] * (p[i].ln() - mu[i].ln()),
            DivergenceKind::ReverseKl => mu[i] * (mu[i].ln() - p[i].ln()),
            DivergenceKind::Hellinger => mu[i] - 2.0 * (mu[i] * p[i]).sqrt() + 1.0 / n as f64,
        };
        total += v[i] * p[i];
        for j in 0..n {
            total += 0.5 * p[i] * w.entry(i, j) * p[j];
        }
    }
    if total.is_finite() {
        Ok(total)
    } else {
        Err(Error::NonFinite("naive free energy".into()))
    }
}

/// Central differences `(F(p + h e_i) - F(p - h e_i)) / 2h` of [`naive_free_energy`].
pub fn fd_gradient(problem: &Problem, p: &[f64], h: f64) -> Result<Vec<f64>> {
    check_len(problem.len(), p.len())?;
    if h.is_nan() || h <= 0.0 {
        return Err(Error::InvalidArgument(format!("step must be > 0, got {h}")));
    }
    if let Some((i, &x)) = p.iter().enumerate().find(|(_, &x)| x <= 2.0 * h) {
        return Err(Error::OutOfDomain { index: i, value: x });
    }
    let mut x = p.to_vec();
    (0..p.len())
        .map(|i| {
            x[i] = p[i] + h;
            let plus = naive_free_energy(problem, &x)?;
            x[i] = p[i] - h;
            let minus = naive_free_energy(problem, &x)?;
            x[i] = p[i];
            Ok((plus - minus) / (2.0 * h))
        })
        .collect()
}

/// `phi_i^{-1}(g)` by closed form for the plain maps and by bisection in
/// `ln p` on the forward map for the shifted ones.
fn inverse_by_bisection(r: &Reparameterization<'_>, i: usize, g: f64) -> f64 {
    let mu = r.mu()[i];
    match r.alpha() {
        None => match r.kind() {
            DivergenceKind::Kl => g.exp(),
            DivergenceKind::ReverseKl => mu / -g,
            DivergenceKind::Hellinger => mu / (g * g),
        },
        Some(alpha) => {
            let a = alpha[i];
            let forward = |p: f64| {
                let base = match r.kind() {
                    DivergenceKind::Kl => p.ln(),
                    DivergenceKind::ReverseKl => -mu / p,
                    DivergenceKind::Hellinger => -(mu / p).sqrt(),
                };
                base + a * p
            };
            let mut lo = -745.0_f64;
            let mut hi = 1.0_f64.max(2.0 * (g.abs() + 1.0) / a).ln();
            while forward(hi.exp()) < g {
                hi += 1.0;
            }
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if forward(mid.exp()) < g {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            (0.5 * (lo + hi)).exp()
        }
    }
}

fn oracle_mass(r: &Reparameterization<'_>, g_tilde: &[f64], c: f64) -> f64 {
    g_tilde.iter().enumerate().map(|(i, g)| inverse_by_bisection(r, i, g + c)).sum()
}

/// The bracketed root of `sum phi^{-1}(g~ + c) = 1` by pure bisection, to
/// `hi - lo <= tol` or floating-point resolution.
pub fn bisect_c(r: &Reparameterization<'_>, g_tilde: &[f64], tol: f64) -> Result<f64> {
    check_len(r.len(), g_tilde.len())?;
    if r.kind() == DivergenceKind::Kl && r.alpha().is_none() {
        return Err(Error::InvalidArgument("plain KL has a closed-form constant".into()));
    }
    let n = g_tilde.len() as f64;
    let mu = r.mu();
    let a = |i: usize| r.alpha().map_or(0.0, |a| a[i]);
    let mut lo = f64::INFINITY;
    let mut hi = f64::INFINITY;
    let mut pole = f64::INFINITY;
    for (i, &g) in g_tilde.iter().enumerate() {
        let (left, right) = match r.kind() {
            DivergenceKind::Kl => (-n.ln() + a(i) / n - g, a(i) - g),
            DivergenceKind::ReverseKl => (-g - n * mu[i] + a(i) / n, -g - mu[i] + a(i)),
            DivergenceKind::Hellinger => (-g - (n * mu[i]).sqrt() + a(i) / n, -g - mu[i].sqrt() + a(i)),
        };
        lo = lo.min(left);
        hi = hi.min(right);
        pole = pole.min(-g);
    }
    let delta = 1e-9 * lo.abs().max(hi.abs()).max(1.0);
    lo -= delta;
    hi += if r.alpha().is_some() { delta } else { delta.min(0.5 * (pole - hi)) };
    let (m_lo, m_hi) = (oracle_mass(r, g_tilde, lo), oracle_mass(r, g_tilde, hi));
    if !(m_lo < 1.0 && m_hi > 1.0) {
        return Err(Error::BadBracket { lo, hi, mass_lo: m_lo, mass_hi: m_hi });
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if oracle_mass(r, g_tilde, mid) < 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Euclidean projection onto the probability simplex.
pub fn project_simplex(v: &[f64]) -> Vec<f64> {
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut cumulative = 0.0;
    let mut theta = 0.0;
    for (k, &u) in sorted.iter().enumerate() {
        cumulative += u;
        let t = (cumulative - 1.0) / (k + 1) as f64;
        if u - t > 0.0 {
            theta = t;
        }
    }
    v.iter().map(|x| (x - theta).max(0.0)).collect()
}

fn hessian_bound(problem: &Problem, p: &[f64]) -> f64 {
    let mu = problem.mu().as_slice();
    let w = problem.kernel();
    let n = p.len();
    let diag: Vec<f64> = (0..n)
        .map(|i| match problem.kind() {
            DivergenceKind::Kl => 1.0 / p[i],
            DivergenceKind::ReverseKl => mu[i] / (p[i] * p[i]),
            DivergenceKind::Hellinger => mu[i].sqrt() / (2.0 * p[i].powf(1.5)),
        })
        .collect();
    let mut x = vec![1.0 / (n as f64).sqrt(); n];
    let mut lambda = 0.0;
    for _ in 0..30 {
        let y: Vec<f64> = (0..n).map(|i| diag[i] * x[i] + (0..n).map(|j| w.entry(i, j) * x[j]).sum::<f64>()).collect();
        let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            break;
        }
        lambda = norm;
        x = y.into_iter().map(|v| v / norm).collect();
    }
    lambda
}

/// Projected gradient descent on the simplex from the uniform density, with
/// step `1 / (L + 1)` for a power-iteration Hessian estimate `L`, halved until
/// the projected point is interior and decreases `F` by the quadratic
/// model up to roundoff. Runs until
/// the gradient spread is at most `tol`. Intended for small convex problems.
pub fn reference_minimizer(problem: &Problem, tol: f64) -> Result<Density> {
    const MAX_ITER: usize = 2_000_000;
    let n = problem.len();
    if n > 16 {
        return Err(Error::InvalidArgument(format!("reference minimizer is for n <= 16, got {n}")));
    }
    let mut p = vec![1.0 / n as f64; n];
    let mut f = naive_free_energy(problem, &p)?;
    for _ in 0..MAX_ITER {
        let grad = problem.gradient(&Density::from_weights(p.clone())?)?;
        let spread =
            grad.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - grad.iter().cloned().fold(f64::INFINITY, f64::min);
        if spread <= tol {
            return Density::from_weights(p);
        }
        let mut step = 1.0 / (hessian_bound(problem, &p) + 1.0);
        loop {
            let trial = project_simplex(&p.iter().zip(&grad).map(|(x, g)| x - step * g).collect::<Vec<_>>());
            if trial.iter().all(|&x| x > 0.0) {
                let ft = naive_free_energy(problem, &trial)?;
                let model: f64 = trial
                    .iter()
                    .zip(&p)
                    .zip(&grad)
                    .map(|((t, x), g)| g * (t - x) + (t - x) * (t - x) / (2.0 * step))
                    .sum();
                if ft <= f + model + 1e-13 * f.abs().max(1.0) {
                    p = trial;
                    f = ft;
                    break;
                }
            }
            step *= 0.5;
            if step < 1e-300 {
                return Err(Error::NoConvergence { iterations: 0, residual: spread });
            }
        }
    }
    Err(Error::NoConvergence { iterations: MAX_ITER, residual: f64::NAN })
}

/// Kernel family used by [`random_instance`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RandomKernel {
    /// Dense log kernel with a random signed scale (plain mode only).
    Log,
    /// Periodic tridiagonal with a random `alpha` in `[1, 20)`.
    Tridiagonal,
    /// Periodic tridiagonal with the given `alpha`.
    TridiagonalFixed(f64),
}

/// A small random problem and an interior starting density, reproducible
/// from `seed`. `mu` and `V` are random; `dt` is 1. The density is bounded
/// below by `1 / (4n)`.
pub fn random_instance(
    kind: DivergenceKind,
    shifted: bool,
    n: usize,
    kernel: RandomKernel,
    seed: u64,
) -> Result<(Problem, Density)> {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let grid = Grid::uniform(n, true)?;
    let mu = ReferenceMeasure::from_weights((0..n).map(|_| rng.gen_range(0.2..1.0)).collect())?;
    let v = Potential::new((0..n).map(|_| rng.gen_range(-1.0..1.0)).collect())?;
    let w = match kernel {
        RandomKernel::Log => {
            let scale = rng.gen_range(-1.0..1.0);
            InteractionKernel::log(&Grid::uniform(n, false)?, scale, 1e-6)?
        }
        RandomKernel::Tridiagonal => InteractionKernel::tridiagonal(&grid, rng.gen_range(1.0..20.0))?,
        RandomKernel::TridiagonalFixed(alpha) => InteractionKernel::tridiagonal(&grid, alpha)?,
    };
    let p = Density::from_weights((0..n).map(|_| rng.gen_range(0.25..1.0)).collect())?;
    Ok((Problem::new(grid, kind, mu, v, w, shifted, 1.0)?, p))
}
