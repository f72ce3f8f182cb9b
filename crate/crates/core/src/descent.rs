//! Explicit Euler descent in the reparameterized variable `g = phi(p)`:
//!
//! ```text
//! g~      = g^k - dt * (g^k + V + (W - alpha) p^k)
//! g^{k+1} = g~ + c,   with c such that sum phi^{-1}(g^{k+1}) = 1
//! ```
//!
//! where `alpha = 0` for the plain metric and `V` is [`Problem::drift_potential`].

use crate::divergence::{DivergenceKind, Problem};
use crate::error::{check_len, Error, Result};
use crate::grid::{Density, Potential, ReferenceMeasure};
use crate::kernel::InteractionKernel;
use crate::normalize::normalize_state;

/// Extra iterations run past the budget to fix the reference energy.
pub const REFERENCE_EXTENSION: usize = 50;

#[derive(Debug, Clone, PartialEq)]
pub struct IterateState {
    pub k: usize,
    pub g: Vec<f64>,
    pub p: Density,
    /// Lagrange constant of the last normalization, 0 before the first step.
    pub c: f64,
}

impl IterateState {
    /// `g^0 = phi(p^0)`.
    pub fn new(problem: &Problem, p0: Density) -> Result<Self> {
        check_len(problem.len(), p0.len())?;
        let g = problem.reparam().phi(p0.as_slice())?;
        Ok(Self { k: 0, g, p: p0, c: 0.0 })
    }
}

/// Free energy per recorded iteration and its distance to the best value seen.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyTrace {
    pub energies: Vec<f64>,
    pub reference_energy: f64,
    pub errors: Vec<f64>,
}

impl EnergyTrace {
    pub fn new(energies: Vec<f64>, reference_energy: f64) -> Self {
        let errors = energies.iter().map(|e| e - reference_energy).collect();
        Self { energies, reference_energy, errors }
    }

    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    pub fn final_error(&self) -> Option<f64> {
        self.errors.last().copied()
    }

    /// First iteration whose error is at most `threshold`.
    pub fn first_below(&self, threshold: f64) -> Option<usize> {
        self.errors.iter().position(|&e| e <= threshold)
    }
}

/// `g + V + Wp`, minus `alpha * p` in the shifted metric. The Lagrange
/// constant is left out; normalization supplies it.
pub fn drift(problem: &Problem, state: &IterateState) -> Result<Vec<f64>> {
    check_len(problem.len(), state.g.len())?;
    let p = state.p.as_slice();
    let mut out = problem.kernel().apply(p)?;
    let v = problem.drift_potential();
    for i in 0..out.len() {
        out[i] += state.g[i] + v[i];
    }
    if let Some(alpha) = problem.mode().alpha() {
        for i in 0..out.len() {
            out[i] -= alpha[i] * p[i];
        }
    }
    Ok(out)
}

pub fn step(problem: &Problem, state: &IterateState) -> Result<IterateState> {
    let dt = problem.dt();
    let d = drift(problem, state)?;
    let g_tilde: Vec<f64> = state.g.iter().zip(&d).map(|(g, d)| g - dt * d).collect();
    let (g, p, c) = normalize_state(&problem.reparam(), &g_tilde)?;
    Ok(IterateState { k: state.k + 1, g, p, c })
}

fn energy_at(problem: &Problem, state: &IterateState) -> Result<f64> {
    problem.free_energy(&state.p).map_err(|e| match e {
        Error::NonFinite(_) => Error::NonFinite(format!(
            "free energy at iteration {} (c = {}, min p = {:e})",
            state.k,
            state.c,
            state.p.as_slice().iter().cloned().fold(f64::INFINITY, f64::min)
        )),
        other => other,
    })
}

/// Iterates [`step`] from `p0` until `max_iters` steps are taken or, when
/// `tol > 0`, the energy changes by at most `tol * max(1, |F|)`. The trace's
/// reference energy is the minimum over this run continued for
/// [`REFERENCE_EXTENSION`] further steps.
pub fn run(problem: &Problem, p0: Density, max_iters: usize, tol: f64) -> Result<(IterateState, EnergyTrace)> {
    if max_iters == 0 {
        return Err(Error::InvalidArgument("max_iters must be >= 1".into()));
    }
    let mut state = IterateState::new(problem, p0)?;
    let mut energies = vec![energy_at(problem, &state)?];
    while state.k < max_iters {
        state = step(problem, &state)?;
        let e = energy_at(problem, &state)?;
        let prev = *energies.last().unwrap();
        energies.push(e);
        if tol > 0.0 && (e - prev).abs() <= tol * e.abs().max(1.0) {
            break;
        }
    }
    let mut reference = energies.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut ext = state.clone();
    for _ in 0..REFERENCE_EXTENSION {
        ext = step(problem, &ext)?;
        reference = reference.min(energy_at(problem, &ext)?);
    }
    Ok((state, EnergyTrace::new(energies, reference)))
}

/// Classical mirror descent `p <- p exp(-eta dE/dp(p)) / Z`, returning every
/// iterate including `p0`.
pub fn baseline_md_trajectory<F>(energy_gradient: F, p0: Density, eta: f64, iters: usize) -> Result<Vec<Density>>
where
    F: Fn(&Density) -> Result<Vec<f64>>,
{
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(Error::InvalidArgument(format!("eta must be > 0, got {eta}")));
    }
    let mut out = Vec::with_capacity(iters + 1);
    out.push(p0);
    for _ in 0..iters {
        let p = out.last().unwrap();
        let grad = energy_gradient(p)?;
        check_len(p.len(), grad.len())?;
        if grad.iter().any(|g| !g.is_finite()) {
            return Err(Error::NonFinite("energy gradient".into()));
        }
        let logw: Vec<f64> = p.as_slice().iter().zip(&grad).map(|(p, g)| p.ln() - eta * g).collect();
        let max = logw.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let next = Density::from_weights(logw.iter().map(|w| (w - max).exp()).collect())?;
        out.push(next);
    }
    Ok(out)
}

pub fn baseline_md<F>(energy_gradient: F, p0: Density, eta: f64, iters: usize) -> Result<Density>
where
    F: Fn(&Density) -> Result<Vec<f64>>,
{
    Ok(baseline_md_trajectory(energy_gradient, p0, eta, iters)?.pop().unwrap())
}

/// `max_i dF/dp_i - min_i dF/dp_i`, zero at an interior stationary point.
pub fn stationarity_residual(problem: &Problem, p: &Density) -> Result<f64> {
    let g = problem.gradient(p)?;
    let max = g.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = g.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(max - min)
}

/// Minimizer of the problem with the interaction dropped: one plain step with
/// `dt = 1` and `W = 0` lands on it exactly (`mu e^{-V}` normalized for KL).
pub fn minimizer_without_interaction(problem: &Problem) -> Result<Density> {
    let n = problem.len();
    let free = Problem::new(
        problem.grid().clone(),
        problem.kind(),
        ReferenceMeasure::new(problem.mu().as_slice().to_vec())?,
        Potential::new(problem.potential().as_slice().to_vec())?,
        InteractionKernel::zero(n),
        false,
        1.0,
    )?;
    let start = match problem.kind() {
        DivergenceKind::Kl => Density::uniform(n)?,
        _ => Density::new(problem.mu().as_slice().to_vec())?,
    };
    Ok(step(&free, &IterateState::new(&free, start)?)?.p)
}
