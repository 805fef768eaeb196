use crate::error::{Error, Result};

/// Span seminorm `max f - min f`.
pub fn span(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::invalid("span of an empty function"));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("span of a function with non-finite values"));
    }
    Ok(span_unchecked(values))
}

pub(crate) fn span_unchecked(values: &[f64]) -> f64 {
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    if values.is_empty() {
        0.0
    } else {
        hi - lo
    }
}

/// Total variation distance `½ Σ |μ − ν|`.
pub fn tv_distance(mu: &[f64], nu: &[f64]) -> Result<f64> {
    if mu.len() != nu.len() {
        return Err(Error::invalid(format!(
            "tv_distance support mismatch: {} vs {}",
            mu.len(),
            nu.len()
        )));
    }
    if mu.is_empty() {
        return Err(Error::invalid("tv_distance over an empty support"));
    }
    Ok(tv_unchecked(mu, nu))
}

pub(crate) fn tv_unchecked(mu: &[f64], nu: &[f64]) -> f64 {
    0.5 * mu.iter().zip(nu).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn span_examples() {
        assert_eq!(span(&[5.0, 5.0, 5.0]).unwrap(), 0.0);
        assert_eq!(span(&[1.0, 4.0, 2.0]).unwrap(), 3.0);
        assert!(matches!(span(&[]), Err(Error::InvalidInput(_))));
        assert!(span(&[1.0, f64::NAN]).is_err());
    }

    #[test]
    fn span_matches_pairwise_brute_force() {
        let f = [0.3, -1.25, 7.5, 2.0, 7.25, -0.5];
        let mut best = 0.0f64;
        for a in &f {
            for b in &f {
                best = best.max(a - b);
            }
        }
        assert_eq!(span(&f).unwrap(), best);
    }

    #[test]
    fn tv_examples() {
        assert_eq!(tv_distance(&[0.5, 0.5], &[0.5, 0.5]).unwrap(), 0.0);
        assert_eq!(tv_distance(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 1.0);
        assert!((tv_distance(&[0.7, 0.3], &[0.4, 0.6]).unwrap() - 0.3).abs() < 1e-15);
        assert!(matches!(
            tv_distance(&[1.0], &[0.5, 0.5]),
            Err(Error::InvalidInput(_))
        ));
    }

    fn distribution(n: usize) -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(0.0f64..1.0, n).prop_map(|w| {
            let total: f64 = w.iter().sum::<f64>() + 1e-9;
            w.iter().map(|x| (x + 1e-9 / w.len() as f64) / total).collect()
        })
    }

    proptest! {
        #[test]
        fn tv_is_a_metric(mu in distribution(5), nu in distribution(5), xi in distribution(5)) {
            let d_mn = tv_distance(&mu, &nu).unwrap();
            let d_nm = tv_distance(&nu, &mu).unwrap();
            prop_assert!((d_mn - d_nm).abs() <= 1e-12);
            let d_mx = tv_distance(&mu, &xi).unwrap();
            let d_xn = tv_distance(&xi, &nu).unwrap();
            prop_assert!(d_mn <= d_mx + d_xn + 1e-12);
            prop_assert!(tv_distance(&mu, &mu).unwrap() == 0.0);
        }

        #[test]
        fn span_shift_and_scale(f in prop::collection::vec(-10.0f64..10.0, 1..8), c in -5.0f64..5.0, lambda in -3.0f64..3.0) {
            let base = span(&f).unwrap();
            let shifted: Vec<f64> = f.iter().map(|x| x + c).collect();
            let scaled: Vec<f64> = f.iter().map(|x| lambda * x).collect();
            prop_assert!((span(&shifted).unwrap() - base).abs() <= 1e-12);
            prop_assert!((span(&scaled).unwrap() - lambda.abs() * base).abs() <= 1e-12);
        }
    }
}
