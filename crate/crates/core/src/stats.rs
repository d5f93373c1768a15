//! Paired t-test and Cohen's d.

use statrs::distribution::{ContinuousCDF, StudentsT};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StatsError {
    #[error("samples differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("need at least 2 observations per sample, got {0}")]
    TooFew(usize),
    #[error("pooled standard deviation is zero but the means differ")]
    ZeroPooledSd,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TTest {
    pub t: f64,
    /// Two-sided.
    pub p: f64,
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample variance with `n - 1` in the denominator.
pub fn variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64
}

/// Paired t-test of `a - b`. Constant differences give `t = ±inf, p = 0`,
/// or `t = 0, p = 1` when they are all zero.
pub fn paired_t_test(a: &[f64], b: &[f64]) -> Result<TTest, StatsError> {
    if a.len() != b.len() {
        return Err(StatsError::LengthMismatch(a.len(), b.len()));
    }
    let n = a.len();
    if n < 2 {
        return Err(StatsError::TooFew(n));
    }
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let (md, sd) = (mean(&d), variance(&d).sqrt());
    if sd == 0.0 {
        return Ok(if md == 0.0 {
            TTest { t: 0.0, p: 1.0 }
        } else {
            TTest { t: md.signum() * f64::INFINITY, p: 0.0 }
        });
    }
    let t = md / (sd / (n as f64).sqrt());
    let dist = StudentsT::new(0.0, 1.0, (n - 1) as f64).expect("positive degrees of freedom");
    Ok(TTest { t, p: (2.0 * dist.sf(t.abs())).min(1.0) })
}

/// `(mean(a) - mean(b)) / pooled_sd`. Two constant samples with equal means
/// give 0.
pub fn cohens_d(a: &[f64], b: &[f64]) -> Result<f64, StatsError> {
    let n = a.len().min(b.len());
    if n < 2 {
        return Err(StatsError::TooFew(n));
    }
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let pooled = (((na - 1.0) * variance(a) + (nb - 1.0) * variance(b)) / (na + nb - 2.0)).sqrt();
    let diff = mean(a) - mean(b);
    if pooled == 0.0 {
        return if diff == 0.0 { Ok(0.0) } else { Err(StatsError::ZeroPooledSd) };
    }
    Ok(diff / pooled)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn hand_computed_fixture() {
        // diffs [1,2,2,3]: mean 2, sd sqrt(2/3), t = 2 / (sqrt(2/3)/2) = sqrt(24)
        let a = [1.0, 2.0, 3.0, 4.0];
        let b = [0.0, 0.0, 1.0, 1.0];
        let r = paired_t_test(&a, &b).unwrap();
        assert_abs_diff_eq!(r.t, 24f64.sqrt(), epsilon = 1e-12);
        // scipy.stats.ttest_rel(a, b).pvalue
        assert_abs_diff_eq!(r.p, 0.016_276_603_459_428_56, epsilon = 1e-9);

        // means 2.5 and 0.5; variances 5/3 and 1/3; pooled sd = 1
        assert_abs_diff_eq!(cohens_d(&a, &b).unwrap(), 2.0, epsilon = 1e-12);
    }

    #[test]
    fn symmetry() {
        let a = [0.3, 1.9, 2.2, 0.7, 1.1];
        let b = [0.1, 1.0, 2.5, 0.2, 0.4];
        let (ab, ba) = (paired_t_test(&a, &b).unwrap(), paired_t_test(&b, &a).unwrap());
        assert_abs_diff_eq!(ab.t, -ba.t, epsilon = 1e-12);
        assert_abs_diff_eq!(ab.p, ba.p, epsilon = 1e-12);
        assert_abs_diff_eq!(cohens_d(&a, &b).unwrap(), -cohens_d(&b, &a).unwrap(), epsilon = 1e-12);
    }

    #[test]
    fn degenerate_cases() {
        let a = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(paired_t_test(&a, &a).unwrap(), TTest { t: 0.0, p: 1.0 });
        assert_eq!(cohens_d(&a, &a).unwrap(), 0.0);
        let c = [2.0; 3];
        assert_eq!(cohens_d(&c, &c).unwrap(), 0.0);
        assert_eq!(cohens_d(&c, &[1.0; 3]), Err(StatsError::ZeroPooledSd));
        let shifted: Vec<f64> = a.iter().map(|x| x + 1.0).collect();
        let r = paired_t_test(&shifted, &a).unwrap();
        assert_eq!(r.p, 0.0);
        assert!(r.t.is_infinite() && r.t > 0.0);
        assert_eq!(paired_t_test(&[1.0], &[0.0]), Err(StatsError::TooFew(1)));
        assert_eq!(paired_t_test(&[1.0, 2.0], &[0.0]), Err(StatsError::LengthMismatch(2, 1)));
    }
}
