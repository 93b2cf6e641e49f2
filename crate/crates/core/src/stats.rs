//! Aggregation helpers shared by the agreement and evaluation reports.

use num_traits::{CheckedAdd, CheckedDiv, ToPrimitive};
use serde::Serialize;

use crate::Ratio;

/// Mean and population variance over values that may be NA.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    /// Values that contributed.
    pub count: usize,
    /// NA values left out.
    pub skipped: usize,
    pub mean: Option<f64>,
    /// Population variance (divides by `count`).
    pub variance: Option<f64>,
    /// Exact rational mean, when it fits in 64-bit terms.
    #[serde(skip)]
    pub exact_mean: Option<Ratio>,
}

pub fn summarize(values: impl IntoIterator<Item = Option<Ratio>>) -> Summary {
    let mut present = Vec::new();
    let mut skipped = 0;
    for v in values {
        match v {
            Some(r) => present.push(r),
            None => skipped += 1,
        }
    }
    let floats: Vec<f64> = present.iter().map(to_f64).collect();
    let (mean, variance) = mean_variance(&floats);
    let exact_mean = exact_mean(&present);
    Summary {
        count: present.len(),
        skipped,
        mean,
        variance,
        exact_mean,
    }
}

pub fn mean_variance(values: &[f64]) -> (Option<f64>, Option<f64>) {
    if values.is_empty() {
        return (None, None);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (Some(mean), Some(var))
}

fn exact_mean(values: &[Ratio]) -> Option<Ratio> {
    if values.is_empty() {
        return None;
    }
    let mut sum = Ratio::from_integer(0);
    for v in values {
        sum = sum.checked_add(v)?;
    }
    sum.checked_div(&Ratio::from_integer(values.len() as u64))
}

pub fn to_f64(r: &Ratio) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn skips_na() {
        let s = summarize([Some(Ratio::new(1, 2)), None, Some(Ratio::new(1, 4))]);
        assert_eq!(s.count, 2);
        assert_eq!(s.skipped, 1);
        assert_eq!(s.exact_mean, Some(Ratio::new(3, 8)));
        assert_eq!(s.mean, Some(0.375));
        assert_eq!(s.variance, Some(0.015625));
    }

    #[test]
    fn all_na() {
        let s = summarize([None, None]);
        assert_eq!((s.count, s.skipped, s.mean, s.variance), (0, 2, None, None));
    }
}
