use crate::error::{PandaError, Result};

/// Mean absolute percentage error as a fraction: `(1/n) Σ |y - ŷ| / y`.
pub fn mape(labels: &[f64], preds: &[f64]) -> Result<f64> {
    if labels.len() != preds.len() {
        return Err(PandaError::DimensionMismatch(format!(
            "{} labels vs {} predictions",
            labels.len(),
            preds.len()
        )));
    }
    if labels.is_empty() {
        return Err(PandaError::InvalidArgument("mape of empty vectors".into()));
    }
    if labels.iter().any(|y| *y == 0.0) {
        return Err(PandaError::InvalidArgument("mape undefined for zero label".into()));
    }
    let total: f64 = labels.iter().zip(preds).map(|(y, p)| ((y - p) / y).abs()).sum();
    Ok(total / labels.len() as f64)
}

/// Pearson correlation coefficient.
pub fn pearson_r(labels: &[f64], preds: &[f64]) -> Result<f64> {
    if labels.len() != preds.len() {
        return Err(PandaError::DimensionMismatch(format!(
            "{} labels vs {} predictions",
            labels.len(),
            preds.len()
        )));
    }
    let n = labels.len();
    if n < 2 {
        return Err(PandaError::Degenerate("correlation needs at least two points".into()));
    }
    let my = labels.iter().sum::<f64>() / n as f64;
    let mp = preds.iter().sum::<f64>() / n as f64;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (y, p) in labels.iter().zip(preds) {
        let (dy, dp) = (y - my, p - mp);
        sxy += dy * dp;
        sxx += dy * dy;
        syy += dp * dp;
    }
    if sxx <= 0.0 || syy <= 0.0 {
        return Err(PandaError::Degenerate("zero variance".into()));
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn mape_examples() {
        assert!((mape(&[1.0, 2.0], &[1.1, 1.8]).unwrap() - 0.10).abs() < 1e-15);
        assert_eq!(mape(&[3.0, 5.0], &[3.0, 5.0]).unwrap(), 0.0);
        assert_eq!(mape(&[4.0], &[5.0]).unwrap(), 0.25);
        assert!(mape(&[0.0], &[1.0]).is_err());
        assert!(mape(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn pearson_examples() {
        let y = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(pearson_r(&y, &y).unwrap(), 1.0);
        let neg: Vec<f64> = y.iter().map(|v| -v).collect();
        assert_eq!(pearson_r(&y, &neg).unwrap(), -1.0);
        assert!(pearson_r(&y, &[1.0, 1.0, 1.0, 1.0]).is_err());
        assert!(pearson_r(&[1.0], &[1.0]).is_err());
    }

    #[test]
    fn pearson_five_point_hand_computed() {
        // x = 1..5, y = [2, 4, 5, 4, 5]: mean 4, Sxy = 6, Sxx = 10, Syy = 6.
        let x = [1.0, 2.0, 3.0, 4.0, 5.0];
        let y = [2.0, 4.0, 5.0, 4.0, 5.0];
        let expect = 6.0 / (10.0f64.sqrt() * 6.0f64.sqrt());
        assert!((pearson_r(&x, &y).unwrap() - expect).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn symmetric_under_joint_permutation(
            pairs in proptest::collection::vec((0.1f64..10.0, 0.1f64..10.0), 3..30),
            shift in 0usize..30,
        ) {
            let (y, p): (Vec<f64>, Vec<f64>) = pairs.iter().cloned().unzip();
            let k = shift % y.len();
            let mut y2 = y.clone();
            let mut p2 = p.clone();
            y2.rotate_left(k);
            p2.rotate_left(k);
            let a = mape(&y, &p).unwrap();
            let b = mape(&y2, &p2).unwrap();
            prop_assert!((a - b).abs() <= 1e-12 * a.max(1.0));
            if let (Ok(r1), Ok(r2)) = (pearson_r(&y, &p), pearson_r(&y2, &p2)) {
                prop_assert!((r1 - r2).abs() < 1e-9);
            }
        }
    }
}
