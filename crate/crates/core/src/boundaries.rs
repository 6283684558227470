//! Boundary functions and closed-form critical values.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Bracket searched for the Vostrikova critical value.
pub const VOSTRIKOVA_BRACKET: (f64, f64) = (1.0, 20.0);
/// Smallest horizon accepted by the Darling-Erdős critical value.
pub const DE_MIN_HORIZON: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    OpenEnded,
    ClosedLong,
    ClosedShort,
    Covariate,
}

/// Where a critical value came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CritSource {
    Simulated,
    DarlingErdos,
    Vostrikova,
    /// Supplied directly by the caller.
    User,
}

impl CritSource {
    pub fn as_str(self) -> &'static str {
        match self {
            CritSource::Simulated => "simulated",
            CritSource::DarlingErdos => "de",
            CritSource::Vostrikova => "vostrikova",
            CritSource::User => "user",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundarySpec {
    pub psi: f64,
    pub scheme: Scheme,
    pub c: f64,
    /// Scale, the square root of the long-run variance estimate.
    pub s: f64,
    pub m: usize,
    pub m_star: Option<usize>,
    pub sx2: Option<f64>,
    pub sxd2: Option<f64>,
    pub c_source: CritSource,
}

impl BoundarySpec {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=0.5).contains(&self.psi) {
            return Err(Error::Config(format!("psi = {} outside [0, 1/2]", self.psi)));
        }
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(Error::Config(format!("critical value {} is not positive", self.c)));
        }
        if self.m == 0 {
            return Err(Error::Config("training length must be positive".into()));
        }
        match self.scheme {
            Scheme::ClosedLong | Scheme::ClosedShort if self.m_star.is_none() => Err(
                Error::Config("closed-ended schemes need a monitoring horizon".into()),
            ),
            Scheme::Covariate => match (self.sx2, self.sxd2) {
                (Some(a), Some(b)) if a > 0.0 && b > 0.0 => Ok(()),
                _ => Err(Error::Config(
                    "covariate boundary needs positive sx2 and sxd2".into(),
                )),
            },
            _ if !(self.s >= 0.0 && self.s.is_finite()) => {
                Err(Error::Config(format!("scale {} is not valid", self.s)))
            }
            _ => Ok(()),
        }
    }

    /// Boundary at monitoring step `k >= 1`.
    pub fn value(&self, k: usize) -> Result<f64> {
        boundary_value(self, k)
    }
}

pub fn boundary_value(spec: &BoundarySpec, k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::Domain("boundary is defined for k >= 1".into()));
    }
    let kf = k as f64;
    let m = spec.m as f64;
    let check_horizon = || match spec.m_star {
        Some(ms) if k > ms => Err(Error::OutOfHorizon { k, m_star: ms }),
        Some(ms) => Ok(ms),
        None => Err(Error::Config("closed-ended schemes need a monitoring horizon".into())),
    };
    let g = match spec.scheme {
        Scheme::OpenEnded => spec.c * spec.s * m.sqrt() * (1.0 + kf / m) * (kf / (m + kf)).powf(spec.psi),
        Scheme::ClosedLong => {
            check_horizon()?;
            spec.c * spec.s * m.sqrt() * (1.0 + kf / m) * (kf / (m + kf)).powf(spec.psi)
        }
        Scheme::ClosedShort => {
            let ms = check_horizon()? as f64;
            spec.c * spec.s * ms.powf(0.5 - spec.psi) * kf.powf(spec.psi)
        }
        Scheme::Covariate => {
            let (sx2, sxd2) = spec.sx2.zip(spec.sxd2).ok_or_else(|| {
                Error::Config("covariate boundary needs sx2 and sxd2".into())
            })?;
            let dm = sxd2 * m;
            spec.c * sx2 * m.sqrt() * (1.0 + kf / dm) * (kf / (dm + kf)).powf(spec.psi)
        }
    };
    Ok(g)
}

/// Darling-Erdős norming pair `(gamma(x), delta(x))`.
pub fn de_norming(x: f64) -> Result<(f64, f64)> {
    if !(x > 1.0 && x.is_finite()) {
        return Err(Error::Domain(format!("norming needs x > 1, got {x}")));
    }
    let lx = x.ln();
    let gamma = (2.0 * lx).sqrt();
    let delta = 2.0 * lx + 0.5 * lx.ln() - 0.5 * PI.ln();
    Ok((gamma, delta))
}

/// Upper-alpha quantile of the standard Gumbel law, `-log(-log(1 - alpha))`.
pub fn gumbel_upper_quantile(alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    Ok(-(-(1.0 - alpha).ln()).ln())
}

/// Asymptotic critical value for the standardised (`psi = 1/2`) CUSUM.
pub fn critval_de(alpha: f64, m_star: usize) -> Result<f64> {
    if m_star < DE_MIN_HORIZON {
        return Err(Error::Domain(format!(
            "Darling-Erdős critical values need m* >= {DE_MIN_HORIZON}, got {m_star}"
        )));
    }
    let x = gumbel_upper_quantile(alpha)?;
    let (gamma, delta) = de_norming((m_star as f64).ln())?;
    Ok((x + delta) / gamma)
}

/// Default tuning `h = sqrt(log m*)`.
pub fn default_h(m_star: usize) -> f64 {
    (m_star as f64).ln().sqrt()
}

/// `log phi` with `phi = (m* + h) / (2h)`.
pub fn vostrikova_log_phi(m_star: usize, h: Option<f64>) -> Result<f64> {
    let h = h.unwrap_or_else(|| default_h(m_star));
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::Domain(format!("h must be positive, got {h}")));
    }
    let phi = (m_star as f64 + h) / (2.0 * h);
    if phi <= 1.0 {
        return Err(Error::Domain(format!(
            "phi = {phi} must exceed 1 (m* = {m_star}, h = {h})"
        )));
    }
    Ok(phi.ln())
}

/// Left side minus alpha of the equation defining the Vostrikova critical value.
pub fn vostrikova_residual(c: f64, alpha: f64, log_phi: f64) -> f64 {
    c * (-0.5 * c * c).exp() / (2.0 * PI).sqrt() * (log_phi + (4.0 - log_phi) / (c * c)) - alpha
}

/// Finite-sample critical value for the standardised CUSUM: the largest root
/// of [`vostrikova_residual`] in [`VOSTRIKOVA_BRACKET`], found by bisection.
pub fn critval_vostrikova(alpha: f64, m_star: usize, h: Option<f64>) -> Result<f64> {
    check_alpha(alpha)?;
    if m_star < 3 {
        return Err(Error::Domain(format!("m* must be at least 3, got {m_star}")));
    }
    let log_phi = vostrikova_log_phi(m_star, h)?;
    let f = |c: f64| vostrikova_residual(c, alpha, log_phi);
    let (lo, hi) = VOSTRIKOVA_BRACKET;

    // scan downwards for the last sign change, then bisect inside it
    const STEPS: usize = 1900;
    let width = (hi - lo) / STEPS as f64;
    let mut bracket = None;
    let mut right = hi;
    let mut f_right = f(right);
    for i in (0..STEPS).rev() {
        let left = lo + width * i as f64;
        let f_left = f(left);
        if f_left == 0.0 {
            return Ok(left);
        }
        if f_left.signum() != f_right.signum() {
            bracket = Some((left, right, f_left));
            break;
        }
        right = left;
        f_right = f_left;
    }
    let (mut a, mut b, fa) = bracket.ok_or(Error::NoRoot { lo, hi })?;
    let mut best = a;
    let mut best_f = fa;
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let fm = f(mid);
        if fm.abs() < best_f.abs() {
            best = mid;
            best_f = fm;
        }
        if fm == 0.0 {
            break;
        }
        if fm.signum() == fa.signum() {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(best)
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("alpha must lie in (0, 1), got {alpha}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn spec(scheme: Scheme, psi: f64) -> BoundarySpec {
        BoundarySpec {
            psi,
            scheme,
            c: 1.0,
            s: 1.0,
            m: 100,
            m_star: Some(400),
            sx2: Some(1.0),
            sxd2: Some(1.0),
            c_source: CritSource::User,
        }
    }

    #[test]
    fn boundary_examples() {
        assert_eq!(boundary_value(&spec(Scheme::OpenEnded, 0.0), 100).unwrap(), 20.0);
        let g = boundary_value(&spec(Scheme::OpenEnded, 0.5), 100).unwrap();
        assert!((g - 14.142_135_623_730_95).abs() < 1e-12);
        let g = boundary_value(&spec(Scheme::ClosedShort, 0.5), 4).unwrap();
        assert!((g - 2.0).abs() < 1e-15);
        // unit covariate scales reduce to the plain boundary
        let a = boundary_value(&spec(Scheme::Covariate, 0.3), 37).unwrap();
        let b = boundary_value(&spec(Scheme::OpenEnded, 0.3), 37).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn horizon_and_domain_errors() {
        let sp = spec(Scheme::ClosedLong, 0.25);
        assert!(matches!(
            boundary_value(&sp, 401),
            Err(Error::OutOfHorizon { k: 401, m_star: 400 })
        ));
        assert!(boundary_value(&sp, 0).is_err());
        let mut open = spec(Scheme::OpenEnded, 0.25);
        open.m_star = None;
        assert!(boundary_value(&open, 10_000).is_ok());
        let mut short = spec(Scheme::ClosedShort, 0.25);
        short.m_star = None;
        assert!(short.validate().is_err());
        let mut cov = spec(Scheme::Covariate, 0.25);
        cov.sxd2 = None;
        assert!(cov.validate().is_err());
        assert!(spec(Scheme::ClosedLong, 0.6).validate().is_err());
    }

    #[test]
    fn short_horizon_standardised_ignores_horizon() {
        let mut a = spec(Scheme::ClosedShort, 0.5);
        let g1 = boundary_value(&a, 9).unwrap();
        a.m_star = Some(10_000);
        assert_eq!(boundary_value(&a, 9).unwrap(), g1);
        assert!((g1 - 3.0).abs() < 1e-15);
    }

    #[test]
    fn norming_examples() {
        let (g, d) = de_norming(std::f64::consts::E).unwrap();
        assert!((g - 2f64.sqrt()).abs() < 1e-15);
        assert!((d - 1.427_635_057_075_299_9).abs() < 1e-14);
        // independent 40-digit evaluation: log log e^e = 1
        let (g, d) = de_norming(std::f64::consts::E.exp()).unwrap();
        assert!((g - 2.331_643_981_597_124).abs() < 1e-14);
        assert!((d - 5.364_198_713_993_39).abs() < 1e-13);
        assert!(de_norming(1.0).is_err());
        assert!(de_norming(0.5).is_err());
        let mut last = de_norming(1.001).unwrap();
        for i in 1..500 {
            let cur = de_norming(1.001 + 0.37 * i as f64).unwrap();
            assert!(cur.0 > last.0 && cur.1 > last.1);
            last = cur;
        }
    }

    #[test]
    fn de_examples() {
        let c = critval_de(1.0 - (-1.0f64).exp(), 100).unwrap();
        let (g, d) = de_norming(100f64.ln()).unwrap();
        assert!((c - d / g).abs() < 1e-12);
        // 40-digit reference evaluation
        let c = critval_de(0.05, 100).unwrap();
        assert!((c - 3.240_825_043_448_737).abs() < 1e-12);
        assert!(critval_de(0.01, 100).unwrap() > c && c > critval_de(0.10, 100).unwrap());
        assert!(critval_de(0.05, 15).is_err());
        assert!(critval_de(0.0, 100).is_err());
        assert!(critval_de(1.0, 100).is_err());
    }

    #[test]
    fn de_round_trip() {
        for &ms in &[25usize, 100, 800] {
            for &a in &[0.01, 0.05, 0.1] {
                let c = critval_de(a, ms).unwrap();
                let (g, d) = de_norming((ms as f64).ln()).unwrap();
                assert!((g * c - d - gumbel_upper_quantile(a).unwrap()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn vostrikova_examples() {
        let c = critval_vostrikova(0.05, 200, None).unwrap();
        let lp = vostrikova_log_phi(200, None).unwrap();
        assert!((lp.exp() - 43.944_121_100_300_19).abs() < 1e-9);
        assert!(vostrikova_residual(c, 0.05, lp).abs() < 1e-12);
        // independent 40-digit bisection
        assert!((c - 3.004_585_029_465_724).abs() < 1e-6);
        let cs: Vec<f64> = [25, 100, 800]
            .iter()
            .map(|&ms| critval_vostrikova(0.05, ms, None).unwrap())
            .collect();
        assert!(cs[0] < cs[1] && cs[1] < cs[2]);
        assert!((cs[0] - 2.801_454_152_455_631).abs() < 1e-6);
        assert!((cs[2] - 3.099_914_947_899_576).abs() < 1e-6);
    }

    #[test]
    fn vostrikova_larger_h_is_smaller() {
        let a = critval_vostrikova(0.05, 400, Some(2.0)).unwrap();
        let b = critval_vostrikova(0.05, 400, Some(8.0)).unwrap();
        assert!(b < a);
    }

    #[test]
    fn vostrikova_errors() {
        assert!(critval_vostrikova(0.05, 2, None).is_err());
        assert!(critval_vostrikova(1.5, 100, None).is_err());
        // phi <= 1 when h >= m*
        assert!(critval_vostrikova(0.05, 10, Some(20.0)).is_err());
        // alpha too large for any sign change on the bracket
        assert!(matches!(
            critval_vostrikova(0.99, 25, None),
            Err(Error::NoRoot { .. })
        ));
    }

    proptest! {
        #[test]
        fn boundary_increasing_and_linear(psi in 0.0f64..=0.5, k in 1usize..399, c in 0.1f64..5.0, s in 0.1f64..5.0) {
            for scheme in [Scheme::OpenEnded, Scheme::ClosedLong, Scheme::ClosedShort, Scheme::Covariate] {
                let mut sp = spec(scheme, psi);
                let g0 = boundary_value(&sp, k).unwrap();
                let g1 = boundary_value(&sp, k + 1).unwrap();
                // the short-horizon boundary is flat in k at psi = 0
                if scheme == Scheme::ClosedShort && psi < 1e-3 {
                    prop_assert!(g1 >= g0);
                } else {
                    prop_assert!(g1 > g0);
                }
                sp.c = c;
                sp.s = s;
                sp.sx2 = Some(s);
                let g = boundary_value(&sp, k).unwrap();
                prop_assert!((g - c * s * g0).abs() <= 1e-12 * g.abs());
            }
        }
    }
}
