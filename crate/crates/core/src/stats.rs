//! Mean and standard deviation over seeds.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StdKind {
    /// Divide by `n − 1`; zero for a single value.
    Sample,
    /// Divide by `n`.
    Population,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    pub std: f64,
    pub n: usize,
}

/// Welford's single-pass update.
pub fn summarize(values: &[f64], kind: StdKind) -> Summary {
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for (i, &v) in values.iter().enumerate() {
        let delta = v - mean;
        mean += delta / (i + 1) as f64;
        m2 += delta * (v - mean);
    }
    let n = values.len();
    let denom = match kind {
        StdKind::Sample => n.saturating_sub(1),
        StdKind::Population => n,
    };
    let std = if denom == 0 {
        0.0
    } else {
        (m2 / denom as f64).max(0.0).sqrt()
    };
    Summary {
        mean: if n == 0 { f64::NAN } else { mean },
        std,
        n,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cases() {
        let s = summarize(
            &[2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0],
            StdKind::Population,
        );
        assert!((s.mean - 5.0).abs() < 1e-15);
        assert!((s.std - 2.0).abs() < 1e-15);
        let s = summarize(&[1.0, 3.0], StdKind::Sample);
        assert!((s.std - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(summarize(&[3.5], StdKind::Sample).std, 0.0);
    }
}
