//! Monotone componentwise reparameterizations `g = phi(p)`.
//!
//! | divergence | plain `phi_i(p)`  | shifted `phi_i(p)`        | `sup_g(i)`             |
//! |------------|-------------------|---------------------------|------------------------|
//! | KL         | `ln p`            | `ln p + a p`              | `0` / `a`              |
//! | reverse KL | `-mu / p`         | `-mu / p + a p`           | `-mu` / `-mu + a`      |
//! | Hellinger  | `-sqrt(mu / p)`   | `-sqrt(mu / p) + a p`     | `-sqrt mu` / `... + a` |
//!
//! In every case `phi_i'` is the metric diagonal. The shifted KL and
//! Hellinger maps have no convenient closed-form inverse and are inverted
//! with [`newton_bisect`] in `ln p`.

use crate::divergence::DivergenceKind;
use crate::error::{check_len, Error, Result};
use crate::roots::newton_bisect;

/// Lower end of the `p` bracket for numerically inverted maps.
const TINY: f64 = 1e-300;
/// Relative accuracy in `g` of the numerically inverted maps.
const INVERSE_TOL: f64 = 1e-14;
const INVERSE_MAX_ITER: usize = 200;

/// `phi` for one (divergence, metric) pair, borrowing `mu` and `alpha`.
#[derive(Debug, Clone, Copy)]
pub struct Reparameterization<'a> {
    kind: DivergenceKind,
    mu: &'a [f64],
    alpha: Option<&'a [f64]>,
}

impl<'a> Reparameterization<'a> {
    pub fn new(kind: DivergenceKind, mu: &'a [f64], alpha: Option<&'a [f64]>) -> Result<Self> {
        if let Some(a) = alpha {
            check_len(mu.len(), a.len())?;
            if let Some((i, &v)) = a.iter().enumerate().find(|(_, &v)| !(v > 0.0 && v.is_finite())) {
                return Err(Error::OutOfDomain { index: i, value: v });
            }
        }
        if let Some((i, &v)) = mu.iter().enumerate().find(|(_, &v)| !(v > 0.0 && v.is_finite())) {
            return Err(Error::OutOfDomain { index: i, value: v });
        }
        Ok(Self { kind, mu, alpha })
    }

    pub fn kind(&self) -> DivergenceKind {
        self.kind
    }

    pub fn is_shifted(&self) -> bool {
        self.alpha.is_some()
    }

    pub fn len(&self) -> usize {
        self.mu.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mu.is_empty()
    }

    pub fn mu(&self) -> &'a [f64] {
        self.mu
    }

    pub fn alpha(&self) -> Option<&'a [f64]> {
        self.alpha
    }

    fn shift(&self, i: usize) -> f64 {
        self.alpha.map_or(0.0, |a| a[i])
    }

    /// `phi_i(p)` for any `p > 0`.
    pub fn component(&self, i: usize, p: f64) -> f64 {
        let base = match self.kind {
            DivergenceKind::Kl => p.ln(),
            DivergenceKind::ReverseKl => -self.mu[i] / p,
            DivergenceKind::Hellinger => -(self.mu[i] / p).sqrt(),
        };
        base + self.shift(i) * p
    }

    /// `phi_i'(p)`, the metric diagonal entry.
    pub fn derivative(&self, i: usize, p: f64) -> f64 {
        let base = match self.kind {
            DivergenceKind::Kl => 1.0 / p,
            DivergenceKind::ReverseKl => self.mu[i] / (p * p),
            DivergenceKind::Hellinger => self.mu[i].sqrt() / (2.0 * p * p.sqrt()),
        };
        base + self.shift(i)
    }

    /// `phi_i(1)`, the supremum of `phi_i` over `(0, 1)`.
    pub fn sup_component(&self, i: usize) -> f64 {
        let base = match self.kind {
            DivergenceKind::Kl => 0.0,
            DivergenceKind::ReverseKl => -self.mu[i],
            DivergenceKind::Hellinger => -self.mu[i].sqrt(),
        };
        base + self.shift(i)
    }

    pub fn sup_g(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.sup_component(i)).collect()
    }

    /// Componentwise `phi(p)`; every entry of `p` must lie in `(0, 1)`.
    pub fn phi(&self, p: &[f64]) -> Result<Vec<f64>> {
        check_len(self.len(), p.len())?;
        p.iter()
            .enumerate()
            .map(|(i, &pi)| {
                if pi > 0.0 && pi < 1.0 {
                    Ok(self.component(i, pi))
                } else {
                    Err(Error::OutOfDomain { index: i, value: pi })
                }
            })
            .collect()
    }

    /// Componentwise `phi^{-1}(g)`, not normalized; every `g_i` must lie
    /// strictly below `sup_g(i)`.
    pub fn phi_inv(&self, g: &[f64]) -> Result<Vec<f64>> {
        check_len(self.len(), g.len())?;
        g.iter()
            .enumerate()
            .map(|(i, &gi)| {
                if gi.is_finite() && gi < self.sup_component(i) {
                    self.inverse_component(i, gi)
                } else {
                    Err(Error::OutOfDomain { index: i, value: gi })
                }
            })
            .collect()
    }

    /// `phi_i^{-1}(g)` on the whole range of `phi_i` over `p > 0`, which for
    /// the shifted maps is all of R and for the plain reverse KL and
    /// Hellinger maps is `g < 0`.
    pub fn inverse_component(&self, i: usize, g: f64) -> Result<f64> {
        let mu = self.mu[i];
        let p = match (self.kind, self.alpha) {
            (DivergenceKind::Kl, None) => g.exp(),
            (DivergenceKind::ReverseKl, None) => -mu / g,
            (DivergenceKind::Hellinger, None) => {
                if g < 0.0 {
                    mu / (g * g)
                } else {
                    f64::NAN
                }
            }
            (DivergenceKind::ReverseKl, Some(a)) => {
                let a = a[i];
                let disc = (g * g + 4.0 * a * mu).sqrt();
                // Rationalized branch avoids cancellation for g << 0.
                if g >= 0.0 {
                    (g + disc) / (2.0 * a)
                } else {
                    2.0 * mu / (disc - g)
                }
            }
            (DivergenceKind::Kl, Some(_)) | (DivergenceKind::Hellinger, Some(_)) => self.solve_inverse(i, g)?,
        };
        if p > 0.0 && p.is_finite() {
            Ok(p)
        } else {
            Err(Error::OutOfDomain { index: i, value: g })
        }
    }

    fn solve_inverse(&self, i: usize, g: f64) -> Result<f64> {
        let a = self.shift(i);
        let mu = self.mu[i];
        let (upper, guess) = match self.kind {
            // ln p <= g - a p and a p <= g - ln p.
            DivergenceKind::Kl => {
                let upper = 2.0 * (g / a).max(1.0);
                (upper, g.min((g / a).max(TINY).ln()).exp())
            }
            // a p <= g + sqrt(mu / p), and for p >= 1 that is at most g + sqrt(mu).
            _ => {
                let upper = 2.0 * ((g + mu.sqrt()) / a).max(1.0);
                let plain = if g < 0.0 { mu / (g * g) } else { 0.0 };
                (upper, plain.max(g / a))
            }
        };
        let f = |u: f64| {
            let p = u.exp();
            (self.component(i, p) - g, p * self.derivative(i, p))
        };
        let lo = TINY.ln();
        let hi = upper.ln();
        if f(lo).0 >= 0.0 {
            // Below TINY the shift term is negligible: use the plain inverse.
            return Ok(match self.kind {
                DivergenceKind::Kl => g.exp(),
                _ => mu / (g * g),
            });
        }
        let f_tol = INVERSE_TOL * g.abs().max(1.0);
        let root = newton_bisect(
            f,
            lo,
            hi,
            guess.max(TINY).ln(),
            f_tol,
            |u| 4.0 * f64::EPSILON * u.abs().max(1.0),
            INVERSE_MAX_ITER,
        )?;
        Ok(root.x.exp())
    }
}
