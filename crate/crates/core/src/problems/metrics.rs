use super::ProblemError;
use crate::scalar::Scalar;

/// Relative L2 error and maximum absolute pointwise error over a sample set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorMetrics {
    pub rel_l2: f64,
    pub max_abs: f64,
}

/// `||pred - reference||_2 / ||reference||_2`.
pub fn rel_l2<S: Scalar>(pred: &[S], reference: &[S]) -> Result<f64, ProblemError> {
    assert_eq!(pred.len(), reference.len());
    let mut num = 0.0f64;
    let mut den = 0.0f64;
    for (p, r) in pred.iter().zip(reference) {
        let d = p.value() - r.value();
        num += d * d;
        den += r.value() * r.value();
    }
    if den == 0.0 {
        return Err(ProblemError::UndefinedMetric);
    }
    Ok((num / den).sqrt())
}

/// `max |pred - reference|`.
pub fn max_abs_error<S: Scalar>(pred: &[S], reference: &[S]) -> f64 {
    pred.iter()
        .zip(reference)
        .map(|(p, r)| (p.value() - r.value()).abs())
        .fold(0.0, f64::max)
}

/// Metrics for one field. Gauge fields (pressure) are compared after
/// removing the mean difference, since they are determined only up to a
/// constant; if such a reference is identically zero the relative error
/// degrades to the root-mean-square of the shifted prediction (an absolute
/// measure), because no reference scale exists.
pub fn field_metrics<S: Scalar>(
    pred: &[S],
    reference: &[S],
    gauge: bool,
) -> Result<ErrorMetrics, ProblemError> {
    if gauge {
        let n = pred.len() as f64;
        let shift: f64 = pred
            .iter()
            .zip(reference)
            .map(|(p, r)| p.value() - r.value())
            .sum::<f64>()
            / n;
        let shifted: Vec<f64> = pred.iter().map(|p| p.value() - shift).collect();
        let reference: Vec<f64> = reference.iter().map(|r| r.value()).collect();
        let ref_norm_sq: f64 = reference.iter().map(|r| r * r).sum();
        let rel = if ref_norm_sq == 0.0 {
            (shifted
                .iter()
                .zip(&reference)
                .map(|(p, r)| (p - r) * (p - r))
                .sum::<f64>()
                / n)
                .sqrt()
        } else {
            rel_l2(&shifted, &reference)?
        };
        Ok(ErrorMetrics {
            rel_l2: rel,
            max_abs: max_abs_error(&shifted, &reference),
        })
    } else {
        Ok(ErrorMetrics {
            rel_l2: rel_l2(pred, reference)?,
            max_abs: max_abs_error(pred, reference),
        })
    }
}
