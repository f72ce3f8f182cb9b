//! The Lagrange constant `c` that puts `phi^{-1}(g~ + c)` on the simplex.
//!
//! The mass `m(c) = sum_i phi_i^{-1}(g~_i + c)` is strictly increasing and
//! convex in `c` for all six maps. For plain KL the root has the closed form
//! `c = -ln sum exp(g~)`; the other schemes bracket the root with per-scheme
//! endpoints at which every component is at most `1/n` (left) or one
//! component equals 1 (right), and refine with [`newton_bisect`].

use crate::divergence::DivergenceKind;
use crate::error::{Error, Result};
use crate::grid::Density;
use crate::reparam::Reparameterization;
use crate::roots::newton_bisect;
use crate::sum::neumaier;

/// Largest accepted `|m(c) - 1|`.
pub const MASS_RESIDUAL_TOL: f64 = 1e-12;
/// Newton target for `|m(c) - 1|`, tighter than the acceptance tolerance.
const NEWTON_TARGET: f64 = 1e-14;
const MAX_ITER: usize = 200;
/// Relative widening applied to both bracket endpoints.
const WIDEN: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Normalization {
    pub c: f64,
    /// `|m(c) - 1|`.
    pub residual: f64,
    /// Mass evaluations spent by the root finder (0 for the closed form).
    pub evaluations: usize,
}

/// `m(c)` and `m'(c)`.
pub fn mass(r: &Reparameterization<'_>, g_tilde: &[f64], c: f64) -> Result<(f64, f64)> {
    let mut ps = Vec::with_capacity(g_tilde.len());
    let mut ds = Vec::with_capacity(g_tilde.len());
    for (i, &g) in g_tilde.iter().enumerate() {
        let p = r.inverse_component(i, g + c)?;
        ds.push(1.0 / r.derivative(i, p));
        ps.push(p);
    }
    Ok((neumaier(ps), neumaier(ds)))
}

/// The scheme's bracket before widening.
fn raw_bracket(r: &Reparameterization<'_>, g_tilde: &[f64]) -> Result<(f64, f64)> {
    let n = g_tilde.len() as f64;
    let mu = r.mu();
    let alpha = |i: usize| r.alpha().map_or(0.0, |a| a[i]);
    let left = |i: usize| -> f64 {
        let g = g_tilde[i];
        match r.kind() {
            DivergenceKind::Kl => (1.0 / n).ln() + alpha(i) / n - g,
            DivergenceKind::ReverseKl => -g - n * mu[i] + alpha(i) / n,
            DivergenceKind::Hellinger => -g - (n * mu[i]).sqrt() + alpha(i) / n,
        }
    };
    if r.kind() == DivergenceKind::Kl && !r.is_shifted() {
        return Err(Error::InvalidArgument("plain KL normalization uses the closed form, not a bracket".into()));
    }
    let lo = (0..g_tilde.len()).map(left).fold(f64::INFINITY, f64::min);
    let hi = (0..g_tilde.len()).map(|i| r.sup_component(i) - g_tilde[i]).fold(f64::INFINITY, f64::min);
    Ok((lo, hi))
}

/// The bracket `(lo, hi)` with `m(lo) < 1 < m(hi)`, widened by
/// `1e-9 * max(1, |lo|, |hi|)` on both sides. For plain reverse KL and
/// Hellinger the right widening stops halfway to the pole of `phi^{-1}` at `g = 0`.
pub fn bracket(r: &Reparameterization<'_>, g_tilde: &[f64]) -> Result<(f64, f64)> {
    crate::error::check_len(r.len(), g_tilde.len())?;
    if g_tilde.iter().any(|g| !g.is_finite()) {
        return Err(Error::NonFinite("g~".into()));
    }
    let (lo, hi) = raw_bracket(r, g_tilde)?;
    let delta = WIDEN * lo.abs().max(hi.abs()).max(1.0);
    let lo = lo - delta;
    let hi = if r.is_shifted() {
        hi + delta
    } else {
        let pole = g_tilde.iter().map(|g| -g).fold(f64::INFINITY, f64::min);
        hi + delta.min(0.5 * (pole - hi))
    };
    let (m_lo, _) = mass(r, g_tilde, lo)?;
    let (m_hi, _) = mass(r, g_tilde, hi)?;
    if m_lo < 1.0 && m_hi > 1.0 {
        Ok((lo, hi))
    } else {
        Err(Error::BadBracket { lo, hi, mass_lo: m_lo, mass_hi: m_hi })
    }
}

/// Solves `m(c) = 1`.
pub fn solve_c(r: &Reparameterization<'_>, g_tilde: &[f64]) -> Result<Normalization> {
    crate::error::check_len(r.len(), g_tilde.len())?;
    if g_tilde.iter().any(|g| !g.is_finite()) {
        return Err(Error::NonFinite("g~".into()));
    }
    if r.kind() == DivergenceKind::Kl && !r.is_shifted() {
        let max = g_tilde.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let c = -(max + neumaier(g_tilde.iter().map(|g| (g - max).exp())).ln());
        let (m, _) = mass(r, g_tilde, c)?;
        return Ok(Normalization { c, residual: (m - 1.0).abs(), evaluations: 0 });
    }
    let (lo, hi) = bracket(r, g_tilde)?;
    let (_, raw_hi) = raw_bracket(r, g_tilde)?;
    let mut failure = None;
    let root = newton_bisect(
        |c| match mass(r, g_tilde, c) {
            Ok((m, dm)) => (m - 1.0, dm),
            Err(e) => {
                failure.get_or_insert(e);
                (f64::NAN, f64::NAN)
            }
        },
        lo,
        hi,
        // Convex m: start right of the root.
        raw_hi,
        NEWTON_TARGET,
        |c| 4.0 * f64::EPSILON * c.abs().max(1.0),
        MAX_ITER,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    let root = root?;
    let (m, _) = mass(r, g_tilde, root.x)?;
    let residual = (m - 1.0).abs();
    if residual > MASS_RESIDUAL_TOL {
        return Err(Error::NoConvergence { iterations: root.iterations, residual });
    }
    Ok(Normalization { c: root.x, residual, evaluations: root.iterations })
}

/// `g = g~ + c` and `p = phi^{-1}(g)`, rescaled by its sum so the density is
/// exactly on the simplex.
pub fn normalize_state(r: &Reparameterization<'_>, g_tilde: &[f64]) -> Result<(Vec<f64>, Density, f64)> {
    let norm = solve_c(r, g_tilde)?;
    let g: Vec<f64> = g_tilde.iter().map(|x| x + norm.c).collect();
    let raw = g.iter().enumerate().map(|(i, &gi)| r.inverse_component(i, gi)).collect::<Result<Vec<f64>>>()?;
    let p = Density::from_weights(raw)?;
    Ok((g, p, norm.c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn scheme<'a>(kind: DivergenceKind, mu: &'a [f64], alpha: Option<&'a [f64]>) -> Reparameterization<'a> {
        Reparameterization::new(kind, mu, alpha).unwrap()
    }

    #[test]
    fn kl_plain_closed_form() {
        let mu = [0.5, 0.5];
        let r = scheme(DivergenceKind::Kl, &mu, None);
        let gt = [0.2f64.ln(), 0.3f64.ln()];
        let sol = solve_c(&r, &gt).unwrap();
        assert!((sol.c - 2f64.ln()).abs() < 1e-15);
        assert_eq!(sol.evaluations, 0);
        let (_, p, _) = normalize_state(&r, &gt).unwrap();
        assert!((p.as_slice()[0] - 0.4).abs() < 1e-15);
        assert!((p.as_slice()[1] - 0.6).abs() < 1e-15);

        let mu = [0.25; 4];
        let r = scheme(DivergenceKind::Kl, &mu, None);
        let t = 3.7;
        let sol = solve_c(&r, &[t; 4]).unwrap();
        assert!((sol.c - (-t - 4f64.ln())).abs() < 1e-14);

        // Large |g~| would overflow a naive sum of exponentials.
        let sol = solve_c(&r, &[700.0, 699.0, -5.0, 0.0]).unwrap();
        assert!(sol.c.is_finite() && sol.residual <= MASS_RESIDUAL_TOL, "{sol:?}");
        assert!(bracket(&r, &[0.0; 4]).is_err());
    }

    #[test]
    fn reverse_kl_degenerate_bracket() {
        let mu = [0.5, 0.5];
        let r = scheme(DivergenceKind::ReverseKl, &mu, None);
        let (raw_lo, raw_hi) = raw_bracket(&r, &[0.0, 0.0]).unwrap();
        assert_eq!((raw_lo, raw_hi), (-1.0, -0.5));
        // Mass at the raw left end is exactly 1; widening restores the sign condition.
        assert_eq!(mass(&r, &[0.0, 0.0], raw_lo).unwrap().0, 1.0);
        let (lo, hi) = bracket(&r, &[0.0, 0.0]).unwrap();
        assert!(lo < -1.0 && hi >= -0.5);
        let sol = solve_c(&r, &[0.0, 0.0]).unwrap();
        assert!((sol.c + 1.0).abs() < 1e-12);
    }

    #[test]
    fn kl_shifted_bracket() {
        let mu = [0.5, 0.5];
        let alpha = [2.0, 2.0];
        let r = scheme(DivergenceKind::Kl, &mu, Some(&alpha));
        let (lo, hi) = raw_bracket(&r, &[0.0, 0.0]).unwrap();
        assert!((lo - (0.5f64.ln() + 1.0)).abs() < 1e-15);
        assert!((lo - 0.306853).abs() < 1e-6);
        assert_eq!(hi, 2.0);
        let sol = solve_c(&r, &[0.0, 0.0]).unwrap();
        assert!((sol.c - (0.5f64.ln() + 1.0)).abs() < 1e-12);
    }

    #[test]
    fn one_step_fixed_points() {
        let mu = [0.25, 0.75];
        let r = scheme(DivergenceKind::ReverseKl, &mu, None);
        let (g, p, c) = normalize_state(&r, &[0.0, 0.0]).unwrap();
        assert!((c + 1.0).abs() < 1e-12);
        assert!((g[0] + 1.0).abs() < 1e-12);
        for (a, b) in p.as_slice().iter().zip(&mu) {
            assert!((a - b).abs() < 1e-12);
        }

        let mu = [0.1, 0.2, 0.3, 0.4];
        let r = scheme(DivergenceKind::Hellinger, &mu, None);
        let (_, p, c) = normalize_state(&r, &[0.0; 4]).unwrap();
        assert!((c + 1.0).abs() < 1e-12);
        for (a, b) in p.as_slice().iter().zip(&mu) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_input() {
        let mu = [0.5, 0.5];
        let r = scheme(DivergenceKind::ReverseKl, &mu, None);
        assert!(solve_c(&r, &[f64::NAN, 0.0]).is_err());
        assert!(solve_c(&r, &[0.0]).is_err());
    }

    proptest! {
        #[test]
        fn shift_invariance(
            gt in prop::collection::vec(-3.0f64..3.0, 3..7),
            s in -5.0f64..5.0,
            which in 0usize..6,
        ) {
            let n = gt.len();
            let mu: Vec<f64> = (1..=n).map(|i| i as f64 / (n * (n + 1) / 2) as f64).collect();
            let alpha = vec![4.0; n];
            let kind = DivergenceKind::ALL[which / 2];
            let r = scheme(kind, &mu, if which % 2 == 1 { Some(&alpha) } else { None });
            let a = solve_c(&r, &gt).unwrap();
            let shifted: Vec<f64> = gt.iter().map(|g| g + s).collect();
            let b = solve_c(&r, &shifted).unwrap();
            prop_assert!((b.c - (a.c - s)).abs() <= 1e-12 * a.c.abs().max(1.0));
            let (_, pa, _) = normalize_state(&r, &gt).unwrap();
            let (_, pb, _) = normalize_state(&r, &shifted).unwrap();
            for (x, y) in pa.as_slice().iter().zip(pb.as_slice()) {
                prop_assert!((x - y).abs() <= 1e-12);
            }
        }

        #[test]
        fn mass_is_increasing(
            gt in prop::collection::vec(-3.0f64..3.0, 3..7),
            which in 1usize..6,
            t in prop::collection::vec(0.0f64..1.0, 8),
        ) {
            let n = gt.len();
            let mu = vec![1.0 / n as f64; n];
            let alpha = vec![4.0; n];
            let kind = DivergenceKind::ALL[which / 2];
            let r = scheme(kind, &mu, if which % 2 == 1 { Some(&alpha) } else { None });
            let (lo, hi) = bracket(&r, &gt).unwrap();
            let mut cs: Vec<f64> = t.iter().map(|t| lo + t * (hi - lo)).collect();
            cs.sort_by(|a, b| a.partial_cmp(b).unwrap());
            cs.dedup();
            let ms: Vec<f64> = cs.iter().map(|&c| mass(&r, &gt, c).unwrap().0).collect();
            for w in ms.windows(2) {
                prop_assert!(w[0] <= w[1]);
            }
        }
    }
}
