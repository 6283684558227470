//! Streaming CUSUM and Page-CUSUM detectors over weighted WLS residuals.
//!
//! Detectors work on raw residual sums; scaling by the boundary happens in the
//! monitor.

use crate::error::{Error, Result};
use crate::model::{weighted_residual, WlsFit};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DetectorKind {
    /// `|S_k|`.
    Cusum,
    /// `max_{1<=l<=k} |S_k - S_{l-1}|`.
    Page,
}

/// Constant-size detector state. `prefix_sum` is `S_k`; `run_min`/`run_max`
/// cover `S_0..S_{k-1}` (with `S_0 = 0`) and are only maintained for Page.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorState {
    pub kind: DetectorKind,
    pub k: usize,
    pub prefix_sum: f64,
    pub run_min: f64,
    pub run_max: f64,
}

impl DetectorState {
    pub fn new(kind: DetectorKind) -> Self {
        Self {
            kind,
            k: 0,
            prefix_sum: 0.0,
            run_min: 0.0,
            run_max: 0.0,
        }
    }

    /// Consumes one weighted residual and returns the detector value at the
    /// new step.
    pub fn update(&mut self, r: f64) -> Result<f64> {
        if !r.is_finite() {
            return Err(Error::NonFinite("detector residual"));
        }
        let s = self.prefix_sum + r;
        if !s.is_finite() {
            return Err(Error::NonFinite("detector prefix sum"));
        }
        let z = match self.kind {
            DetectorKind::Cusum => s.abs(),
            DetectorKind::Page => {
                // the running extremes still exclude S_k here
                let z = (s - self.run_min).max(self.run_max - s);
                self.run_min = self.run_min.min(s);
                self.run_max = self.run_max.max(s);
                z
            }
        };
        self.prefix_sum = s;
        self.k += 1;
        Ok(z)
    }
}

/// Weighted residual of a new observation against the training fit.
pub fn residual(y_new: f64, y_prev: f64, fit: &WlsFit, x_new: Option<&[f64]>) -> Result<f64> {
    let lx = match (&fit.lambda_hat, x_new) {
        (None, None) => None,
        (Some(l), Some(x)) if l.len() == x.len() => Some((l.as_slice(), x)),
        (l, x) => {
            return Err(Error::ArityMismatch {
                expected: l.as_ref().map_or(0, Vec::len),
                got: x.map_or(0, <[f64]>::len),
            })
        }
    };
    let r = weighted_residual(y_new, y_prev, fit.beta_hat, lx);
    if r.is_finite() {
        Ok(r)
    } else {
        Err(Error::NonFinite("weighted residual"))
    }
}

pub fn cusum_update(mut state: DetectorState, r: f64) -> Result<(DetectorState, f64)> {
    debug_assert_eq!(state.kind, DetectorKind::Cusum);
    let z = state.update(r)?;
    Ok((state, z))
}

pub fn page_update(mut state: DetectorState, r: f64) -> Result<(DetectorState, f64)> {
    debug_assert_eq!(state.kind, DetectorKind::Page);
    let z = state.update(r)?;
    Ok((state, z))
}

/// Prefix sums `S_0 = 0, S_1, ..., S_n` accumulated left to right.
pub fn prefix_sums(residuals: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(residuals.len() + 1);
    let mut s = 0.0;
    out.push(s);
    for r in residuals {
        s += r;
        out.push(s);
    }
    out
}

/// Page detector by definition: for every `k`, the max over `l` of
/// `|S_k - S_{l-1}|`. Quadratic in the stream length; used as an oracle.
pub fn page_bruteforce(residuals: &[f64]) -> Vec<f64> {
    let s = prefix_sums(residuals);
    (1..s.len())
        .map(|k| (1..=k).map(|l| (s[k] - s[l - 1]).abs()).fold(0.0, f64::max))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn run(kind: DetectorKind, rs: &[f64]) -> Vec<f64> {
        let mut st = DetectorState::new(kind);
        rs.iter().map(|&r| st.update(r).unwrap()).collect()
    }

    fn plain_fit(beta: f64) -> WlsFit {
        WlsFit {
            beta_hat: beta,
            lambda_hat: None,
            s2_hat: 1.0,
            m: 10,
            scales: None,
        }
    }

    #[test]
    fn residual_examples() {
        let fit = plain_fit(0.7);
        assert_eq!(residual(0.7 * 3.0, 3.0, &fit, None).unwrap(), 0.0);
        assert_eq!(residual(2.0, 1.0, &plain_fit(0.0), None).unwrap(), 1.0);
        let r = residual(5.0, 1e12, &fit, None).unwrap();
        assert!(r.abs() <= (5.0f64 - 0.7e12).abs() * 1e-12 * (1.0 + 1e-12));
    }

    #[test]
    fn residual_arity() {
        let fit = plain_fit(0.5);
        assert!(matches!(
            residual(1.0, 1.0, &fit, Some(&[1.0])),
            Err(Error::ArityMismatch { expected: 0, got: 1 })
        ));
        let mut cov = plain_fit(0.5);
        cov.lambda_hat = Some(vec![1.0, 2.0]);
        assert!(residual(1.0, 1.0, &cov, None).is_err());
        assert!(residual(1.0, 1.0, &cov, Some(&[1.0])).is_err());
        let r = residual(4.0, 1.0, &cov, Some(&[1.0, 0.5])).unwrap();
        assert_eq!(r, (4.0 - 0.5 - 1.0 - 1.0) * 0.5);
    }

    #[test]
    fn cusum_examples() {
        assert_eq!(run(DetectorKind::Cusum, &[0.0, 0.0, 0.0]), vec![0.0; 3]);
        assert_eq!(run(DetectorKind::Cusum, &[1.0, -2.0, 3.0]), vec![1.0, 1.0, 2.0]);
        let (st, z) = cusum_update(DetectorState::new(DetectorKind::Cusum), -4.0).unwrap();
        assert_eq!((st.k, z), (1, 4.0));
    }

    #[test]
    fn page_examples() {
        assert_eq!(run(DetectorKind::Page, &[0.0, 0.0, 0.0]), vec![0.0; 3]);
        assert_eq!(run(DetectorKind::Page, &[1.0, -2.0, 3.0]), vec![1.0, 2.0, 3.0]);
        assert_eq!(page_bruteforce(&[1.0, -2.0, 3.0]), vec![1.0, 2.0, 3.0]);
        let (st, z) = page_update(DetectorState::new(DetectorKind::Page), 2.0).unwrap();
        assert_eq!((st.run_min, st.run_max, z), (0.0, 2.0, 2.0));
    }

    #[test]
    fn non_finite_residual_rejected() {
        let mut st = DetectorState::new(DetectorKind::Page);
        assert!(st.update(f64::NAN).is_err());
        assert_eq!(st.k, 0);
    }

    #[test]
    fn page_recursion_matches_bruteforce_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let n = rng.random_range(1..=200);
            let scale = 10f64.powi(rng.random_range(-3..4));
            let rs: Vec<f64> = (0..n).map(|_| scale * rng.random_range(-1.0..1.0)).collect();
            let fast = run(DetectorKind::Page, &rs);
            let slow = page_bruteforce(&rs);
            assert!(fast.iter().zip(&slow).all(|(a, b)| a.to_bits() == b.to_bits()));
        }
    }

    #[test]
    fn cusum_matches_resummation() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let rs: Vec<f64> = (0..300).map(|_| rng.random_range(-1.0..1.0)).collect();
        let z = run(DetectorKind::Cusum, &rs);
        for k in 1..=rs.len() {
            let direct: f64 = rs[..k].iter().sum();
            assert_eq!(z[k - 1], direct.abs());
        }
    }

    proptest! {
        #[test]
        fn page_dominates_cusum(rs in proptest::collection::vec(-10.0f64..10.0, 1..100)) {
            let c = run(DetectorKind::Cusum, &rs);
            let p = run(DetectorKind::Page, &rs);
            prop_assert_eq!(c[0], p[0]);
            for (a, b) in c.iter().zip(&p) {
                prop_assert!(b >= a);
            }
        }

        #[test]
        fn sign_equivariance(rs in proptest::collection::vec(-10.0f64..10.0, 1..100)) {
            let neg: Vec<f64> = rs.iter().map(|r| -r).collect();
            for kind in [DetectorKind::Cusum, DetectorKind::Page] {
                prop_assert_eq!(run(kind, &rs), run(kind, &neg));
            }
        }

        #[test]
        fn extremes_bracket_zero(rs in proptest::collection::vec(-10.0f64..10.0, 0..50)) {
            let mut st = DetectorState::new(DetectorKind::Page);
            for r in rs {
                st.update(r).unwrap();
                prop_assert!(st.run_min <= 0.0 && st.run_max >= 0.0);
            }
        }
    }
}
