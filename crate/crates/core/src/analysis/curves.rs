//! Multi-seed learning-curve aggregation.
//!
//! Training experiments repeat each configuration across seeds; what
//! gets plotted is the positionwise mean of the per-seed series with a
//! population-std band. Curves live in `f64` regardless of the net's
//! scalar type, matching the reporting convention used elsewhere.

use crate::error::{Error, Result};

/// Per-seed series (losses or accuracies) of equal length.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveBundle {
    curves: Vec<Vec<f64>>,
}

impl CurveBundle {
    /// Bundle one series per seed. At least one seed is required and
    /// every series must have the same length.
    pub fn new(curves: Vec<Vec<f64>>) -> Result<CurveBundle> {
        let first_len = match curves.first() {
            None => return Err(Error::Config("curve bundle needs at least one seed".into())),
            Some(c) => c.len(),
        };
        if let Some((i, c)) = curves
            .iter()
            .enumerate()
            .find(|(_, c)| c.len() != first_len)
        {
            return Err(Error::Config(format!(
                "curve for seed index {i} has {} points, expected {first_len}",
                c.len()
            )));
        }
        Ok(CurveBundle { curves })
    }

    /// Number of seeds in the bundle.
    pub fn seeds(&self) -> usize {
        self.curves.len()
    }

    /// Number of points in each per-seed series.
    pub fn len(&self) -> usize {
        self.curves[0].len()
    }

    /// True when the per-seed series have no points (e.g. zero epochs).
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The per-seed series, one inner slice per seed.
    pub fn curves(&self) -> &[Vec<f64>] {
        &self.curves
    }
}

/// Positionwise mean and population standard deviation across seeds.
pub fn average_curves(bundle: &CurveBundle) -> (Vec<f64>, Vec<f64>) {
    let seeds = bundle.seeds() as f64;
    let len = bundle.len();
    let mut mean = vec![0.0; len];
    for curve in bundle.curves() {
        for (m, v) in mean.iter_mut().zip(curve) {
            *m += v / seeds;
        }
    }
    let mut std = vec![0.0; len];
    for curve in bundle.curves() {
        for (s, (v, m)) in std.iter_mut().zip(curve.iter().zip(&mean)) {
            *s += (v - m) * (v - m) / seeds;
        }
    }
    for s in &mut std {
        *s = s.sqrt();
    }
    (mean, std)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Rng;

    #[test]
    fn single_seed_averages_to_itself() {
        let series = vec![3.0, 2.0, 1.5, 1.25];
        let bundle = CurveBundle::new(vec![series.clone()]).unwrap();
        let (mean, std) = average_curves(&bundle);
        assert_eq!(mean, series);
        assert_eq!(std, vec![0.0; 4]);
    }

    #[test]
    fn two_point_population_statistics() {
        let bundle = CurveBundle::new(vec![vec![1.0], vec![3.0]]).unwrap();
        let (mean, std) = average_curves(&bundle);
        assert_eq!(mean, vec![2.0]);
        assert_eq!(std, vec![1.0]);
    }

    #[test]
    fn twenty_seeds_match_a_scalar_loop() {
        let mut rng = Rng::new(91);
        let curves: Vec<Vec<f64>> = (0..20)
            .map(|_| (0..50).map(|_| rng.uniform(0.0f64, 4.0)).collect())
            .collect();
        let bundle = CurveBundle::new(curves.clone()).unwrap();
        let (mean, std) = average_curves(&bundle);
        // Independent two-pass computation, summed in the other order.
        for pos in 0..50 {
            let mut sum = 0.0;
            for curve in &curves {
                sum += curve[pos];
            }
            let m = sum / 20.0;
            let mut sq = 0.0;
            for curve in &curves {
                sq += (curve[pos] - m).powi(2);
            }
            let s = (sq / 20.0).sqrt();
            assert!((mean[pos] - m).abs() < 1e-12, "mean at {pos}");
            assert!((std[pos] - s).abs() < 1e-12, "std at {pos}");
        }
    }

    #[test]
    fn ragged_bundles_are_rejected() {
        let err = CurveBundle::new(vec![vec![1.0, 2.0], vec![1.0]]).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("seed index 1"), "{msg}");
        assert!(msg.contains("expected 2"), "{msg}");
    }

    #[test]
    fn empty_bundle_is_rejected() {
        assert!(CurveBundle::new(Vec::new()).is_err());
    }

    #[test]
    fn zero_length_series_are_allowed() {
        let bundle = CurveBundle::new(vec![vec![], vec![]]).unwrap();
        assert!(bundle.is_empty());
        let (mean, std) = average_curves(&bundle);
        assert!(mean.is_empty() && std.is_empty());
    }
}
