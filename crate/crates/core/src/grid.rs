//! Grids on (0, 1], probability densities, reference measures and potentials.

use rand::distributions::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::sum::neumaier;

/// Allowed deviation of a density's total mass from one.
pub const MASS_TOLERANCE: f64 = 1e-12;

/// Sample points of a one-dimensional domain.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    points: Vec<f64>,
    periodic: bool,
}

impl Grid {
    /// The grid `x_i = i / n` for `i = 1..=n`.
    pub fn uniform(n: usize, periodic: bool) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument(format!("grid needs n >= 2, got {n}")));
        }
        let points = (1..=n).map(|i| i as f64 / n as f64).collect();
        Ok(Self { points, periodic })
    }

    /// A grid from explicit coordinates, which must be strictly increasing in (0, 1].
    pub fn from_points(points: Vec<f64>, periodic: bool) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidArgument(format!("grid needs n >= 2, got {}", points.len())));
        }
        if !points.iter().all(|&x| x > 0.0 && x <= 1.0) {
            return Err(Error::InvalidArgument("grid points must lie in (0, 1]".into()));
        }
        if !points.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidArgument("grid points must be strictly increasing".into()));
        }
        Ok(Self { points, periodic })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn is_periodic(&self) -> bool {
        self.periodic
    }
}

fn validate_simplex(values: &[f64], what: &str) -> Result<()> {
    if values.len() < 2 {
        return Err(Error::InvalidArgument(format!("{what} needs n >= 2 entries")));
    }
    if let Some((i, &v)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
        return Err(Error::OutOfDomain { index: i, value: v });
    }
    if let Some((i, &v)) = values.iter().enumerate().find(|(_, &v)| v <= 0.0) {
        return Err(Error::OutOfDomain { index: i, value: v });
    }
    let total = neumaier(values.iter().copied());
    if (total - 1.0).abs() > MASS_TOLERANCE {
        return Err(Error::InvalidArgument(format!("{what} must sum to 1, sums to {total:.17e}")));
    }
    Ok(())
}

fn normalized(weights: Vec<f64>, what: &str) -> Result<Vec<f64>> {
    if let Some((i, &v)) = weights.iter().enumerate().find(|(_, v)| !(v.is_finite() && **v > 0.0)) {
        return Err(Error::OutOfDomain { index: i, value: v });
    }
    let total = neumaier(weights.iter().copied());
    let values: Vec<f64> = weights.into_iter().map(|w| w / total).collect();
    validate_simplex(&values, what)?;
    Ok(values)
}

/// A strictly positive probability vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Density(Vec<f64>);

impl Density {
    /// Wraps `values`, which must already be strictly positive with unit mass.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        validate_simplex(&values, "density")?;
        Ok(Self(values))
    }

    /// Divides strictly positive weights by their sum.
    pub fn from_weights(weights: Vec<f64>) -> Result<Self> {
        normalized(weights, "density").map(Self)
    }

    pub fn uniform(n: usize) -> Result<Self> {
        Self::from_weights(vec![1.0; n])
    }

    /// I.i.d. uniform(0, 1) entries from a seeded ChaCha8 stream, normalized.
    pub fn random(n: usize, seed: u64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument(format!("density needs n >= 2, got {n}")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let weights = (0..n).map(|_| rng.sample::<f64, _>(Open01)).collect();
        Self::from_weights(weights)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl AsRef<[f64]> for Density {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// The reference measure `mu` of the divergence term.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceMeasure(Vec<f64>);

impl ReferenceMeasure {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        validate_simplex(&values, "reference measure")?;
        Ok(Self(values))
    }

    pub fn from_weights(weights: Vec<f64>) -> Result<Self> {
        normalized(weights, "reference measure").map(Self)
    }

    pub fn uniform(n: usize) -> Result<Self> {
        Self::from_weights(vec![1.0; n])
    }

    /// `mu_i = x_i^exponent / sum_j x_j^exponent`.
    pub fn power(grid: &Grid, exponent: f64) -> Result<Self> {
        if !(exponent >= 0.0 && exponent.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "power measure exponent must be finite and >= 0, got {exponent}"
            )));
        }
        Self::from_weights(grid.points().iter().map(|x| x.powf(exponent)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

impl AsRef<[f64]> for ReferenceMeasure {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// The external potential `V`.
#[derive(Debug, Clone, PartialEq)]
pub struct Potential(Vec<f64>);

impl Potential {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some((i, &v)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::OutOfDomain { index: i, value: v });
        }
        Ok(Self(values))
    }

    pub fn zero(n: usize) -> Self {
        Self(vec![0.0; n])
    }

    /// `V_i = amplitude * sin(frequency * pi * x_i)`.
    pub fn sine(grid: &Grid, frequency: f64, amplitude: f64) -> Result<Self> {
        Self::new(grid.points().iter().map(|x| amplitude * (frequency * std::f64::consts::PI * x).sin()).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

impl AsRef<[f64]> for Potential {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn uniform_grid_points() {
        let g = Grid::uniform(4, false).unwrap();
        assert_eq!(g.points(), &[0.25, 0.5, 0.75, 1.0]);
        assert!(!g.is_periodic());

        let g = Grid::uniform(1024, true).unwrap();
        assert_eq!(g.len(), 1024);
        assert_eq!(*g.points().last().unwrap(), 1.0);
        assert!(g.is_periodic());
        assert_eq!(g.points(), Grid::uniform(1024, false).unwrap().points());

        assert!(Grid::uniform(1, false).is_err());
        assert!(Grid::uniform(0, true).is_err());
    }

    #[test]
    fn from_points_validates() {
        assert!(Grid::from_points(vec![0.5, 0.4], false).is_err());
        assert!(Grid::from_points(vec![0.0, 0.4], false).is_err());
        assert!(Grid::from_points(vec![0.5, 1.5], false).is_err());
        assert!(Grid::from_points(vec![0.5], false).is_err());
        assert!(Grid::from_points(vec![0.1, 0.4], false).is_ok());
    }

    #[test]
    fn power_measure_small_cases() {
        let g = Grid::from_points(vec![0.5, 1.0], false).unwrap();
        let mu = ReferenceMeasure::power(&g, 0.0).unwrap();
        assert_eq!(mu.as_slice(), &[0.5, 0.5]);

        let mu = ReferenceMeasure::power(&g, 4.0).unwrap();
        assert!((mu.as_slice()[0] - 0.0625 / 1.0625).abs() < 1e-15);
        assert!((mu.as_slice()[1] - 1.0 / 1.0625).abs() < 1e-15);
        assert!((mu.as_slice()[0] - 0.058824).abs() < 1e-6);

        assert!(ReferenceMeasure::power(&g, -1.0).is_err());
    }

    #[test]
    fn power_measure_ratio_at_full_resolution() {
        let g = Grid::uniform(1024, false).unwrap();
        let mu = ReferenceMeasure::power(&g, 4.0).unwrap();
        let max = mu.as_slice().iter().cloned().fold(f64::MIN, f64::max);
        let min = mu.as_slice().iter().cloned().fold(f64::MAX, f64::min);
        let ratio = max / min;
        assert!((ratio / 1024f64.powi(4) - 1.0).abs() < 1e-12);
        assert!((ratio - 1.0995e12).abs() / 1.0995e12 < 1e-4);
    }

    #[test]
    fn sine_potential() {
        let g = Grid::uniform(4, false).unwrap();
        let v = Potential::sine(&g, 4.0, 1.0).unwrap();
        assert!(v.as_slice().iter().all(|x| x.abs() < 1e-15));

        let g = Grid::from_points(vec![0.125, 0.5], false).unwrap();
        let v = Potential::sine(&g, 4.0, 1.0).unwrap();
        assert!((v.as_slice()[0] - 1.0).abs() < 1e-15);

        let g = Grid::uniform(1024, true).unwrap();
        let v = Potential::sine(&g, 4.0, 1.0).unwrap();
        assert_eq!(v.len(), 1024);
        assert!((v.as_slice()[127] - (4.0 * std::f64::consts::PI * 0.125).sin()).abs() < 1e-15);
    }

    #[test]
    fn random_density_is_reproducible_and_normalized() {
        let a = Density::random(3, 17).unwrap();
        let b = Density::random(3, 17).unwrap();
        assert_eq!(a, b);
        assert!((a.as_slice().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(a.as_slice().iter().all(|&p| p > 0.0));
        assert_ne!(a, Density::random(3, 18).unwrap());
        assert!(Density::random(1, 0).is_err());
    }

    #[test]
    fn construction_fails_loudly() {
        assert!(Density::new(vec![0.5, 0.5 + 1e-9]).is_err());
        assert!(Density::new(vec![1.0, 0.0]).is_err());
        assert!(Density::new(vec![1.5, -0.5]).is_err());
        assert!(Density::from_weights(vec![1.0, f64::NAN]).is_err());
        assert!(ReferenceMeasure::new(vec![0.25, 0.75]).is_ok());
        assert!(Potential::new(vec![0.0, f64::INFINITY]).is_err());
    }

    proptest! {
        #[test]
        fn power_measure_is_scale_free(
            raw in prop::collection::vec(0.01f64..1.0, 2..12),
            scale in 0.05f64..1.0,
            exponent in 0.0f64..6.0,
        ) {
            let mut pts = raw;
            pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
            pts.dedup();
            prop_assume!(pts.len() >= 2);
            let g = Grid::from_points(pts.clone(), false).unwrap();
            let scaled = Grid::from_points(pts.iter().map(|x| x * scale).collect(), false).unwrap();
            let a = ReferenceMeasure::power(&g, exponent).unwrap();
            let b = ReferenceMeasure::power(&scaled, exponent).unwrap();
            for (x, y) in a.as_slice().iter().zip(b.as_slice()) {
                prop_assert!((x - y).abs() <= 1e-12 * x.max(*y));
            }
        }

        #[test]
        fn random_density_satisfies_invariants(n in 2usize..300, seed in any::<u64>()) {
            let p = Density::random(n, seed).unwrap();
            prop_assert!(p.as_slice().iter().all(|&v| v > 0.0));
            prop_assert!((neumaier(p.as_slice().iter().copied()) - 1.0).abs() <= 1e-12);
        }
    }
}
