use super::UncertaintyIntervals;
use crate::error::{Error, Result};

/// Widens every coordinate range by the drift accumulated over `h` steps.
pub fn forecast_uncertainty(intervals: &UncertaintyIntervals, drift: &[f64], h: usize) -> Result<UncertaintyIntervals> {
    let tau = intervals.time;
    if tau + h >= drift.len() {
        return Err(Error::invalid(format!(
            "forecast target {} is beyond the last step {}",
            tau + h,
            drift.len().saturating_sub(1)
        )));
    }
    let budget: f64 = drift[tau..tau + h].iter().sum();
    let lo = intervals.lower().iter().map(|l| (l - budget).max(0.0)).collect();
    let hi = intervals.upper().iter().map(|u| (u + budget).min(1.0)).collect();
    UncertaintyIntervals::from_bounds(tau + h, intervals.n_states(), intervals.n_actions(), lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn point(v: f64) -> UncertaintyIntervals {
        UncertaintyIntervals::from_bounds(0, 2, 1, vec![v, 1.0 - v, 0.5, 0.5], vec![v, 1.0 - v, 0.5, 0.5]).unwrap()
    }

    #[test]
    fn zero_lookahead_is_identity() {
        let iv = point(0.6);
        let f = forecast_uncertainty(&iv, &[0.05; 4], 0).unwrap();
        assert_eq!(f.lower(), iv.lower());
        assert_eq!(f.upper(), iv.upper());
    }

    #[test]
    fn point_interval_widens_by_budget() {
        let f = forecast_uncertainty(&point(0.6), &[0.05; 4], 2).unwrap();
        let (lo, hi) = f.interval(0, 0, 0);
        assert!((lo - 0.5).abs() < 1e-12 && (hi - 0.7).abs() < 1e-12);
        assert_eq!(f.time, 2);
    }

    #[test]
    fn zero_drift_keeps_diameters() {
        let iv = point(0.3);
        for h in 0..4 {
            let f = forecast_uncertainty(&iv, &[0.0; 4], h).unwrap();
            assert_eq!(f.diameter(0, 0), iv.diameter(0, 0));
        }
        assert!(forecast_uncertainty(&iv, &[0.0; 4], 4).is_err());
    }

    proptest! {
        #[test]
        fn diameter_is_monotone_in_lookahead(v in 0.0f64..1.0, eps in proptest::collection::vec(0.0f64..0.3, 8)) {
            let iv = point(v);
            let mut prev = 0.0;
            for h in 0..8 {
                let u = forecast_uncertainty(&iv, &eps, h).unwrap().diameter(0, 0);
                prop_assert!(u >= prev - 1e-15 && u <= 1.0);
                prev = u;
            }
        }
    }
}
