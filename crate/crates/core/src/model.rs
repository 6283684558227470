//! Weighted least squares estimation on the training window.
//!
//! Every regression row is weighted by `1 / (1 + y_{i-1}^2)`, which keeps the
//! estimator well behaved whether the series is stationary or explosive.

use crate::error::{finite, Error, Result};
use crate::series::Series;

/// Relative pivot threshold below which the weighted Gram matrix is treated
/// as singular.
pub const GRAM_PIVOT_TOL: f64 = 1e-12;

/// Training-window estimates.
#[derive(Debug, Clone, PartialEq)]
pub struct WlsFit {
    pub beta_hat: f64,
    /// Covariate coefficients, present iff the fit used covariates.
    pub lambda_hat: Option<Vec<f64>>,
    /// Long-run variance estimate of the weighted score.
    pub s2_hat: f64,
    /// Training length.
    pub m: usize,
    /// Plug-in covariate scales, present iff `lambda_hat` is.
    pub scales: Option<CovariateScales>,
}

impl WlsFit {
    /// Covariate dimension, 0 for the plain model.
    pub fn dim(&self) -> usize {
        self.lambda_hat.as_ref().map_or(0, Vec::len)
    }

    pub fn s_hat(&self) -> f64 {
        self.s2_hat.sqrt()
    }
}

/// Plug-in estimates of the scale constants entering the covariate boundary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovariateScales {
    /// Quadratic form `a' Q C Q a` built from training-sample means.
    pub sx1_sq: f64,
    /// Mean squared y-weighted score.
    pub sx2_sq: f64,
    /// Boundary multiplier, `sx2_sq / sqrt(sx1_sq)`.
    pub sx2: f64,
    /// Time-scale factor, `sx2_sq / sx1_sq`.
    pub sxd2: f64,
}

/// Which branch of the covariate scale constants applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Regime {
    #[default]
    Stationary,
    Explosive,
}

impl WlsFit {
    /// `(sx2, sxd2)` used by the covariate boundary for the declared regime.
    ///
    /// In the explosive regime the multiplier is `sigma_1`, estimated by
    /// `sqrt(s2_hat)` (the score variance converges to `sigma_1^2` there), and
    /// the time-scale factor is 1.
    pub fn boundary_scales(&self, regime: Regime) -> Option<(f64, f64)> {
        let scales = self.scales?;
        Some(match regime {
            Regime::Stationary => (scales.sx2, scales.sxd2),
            Regime::Explosive => (self.s_hat(), 1.0),
        })
    }
}

/// `(y - beta y_prev - lambda'x) y_prev / (1 + y_prev^2)`.
#[inline]
pub(crate) fn weighted_residual(
    y: f64,
    y_prev: f64,
    beta: f64,
    lambda_x: Option<(&[f64], &[f64])>,
) -> f64 {
    let mut e = y - beta * y_prev;
    if let Some((lambda, x)) = lambda_x {
        for (l, xi) in lambda.iter().zip(x) {
            e -= l * xi;
        }
    }
    e * y_prev / (1.0 + y_prev * y_prev)
}

/// Fits the plain RCA model on the whole of `training` (covariates, if any,
/// are ignored).
pub fn fit_wls(training: &Series) -> Result<WlsFit> {
    let y = training.values();
    let m = y.len();
    if m < 3 {
        return Err(Error::DegenerateTraining(format!(
            "need at least 3 observations, got {m}"
        )));
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for w in y.windows(2) {
        let (yp, yc) = (w[0], w[1]);
        let d = 1.0 + yp * yp;
        den += (yp * yp) / d;
        num += (yc * yp) / d;
    }
    finite(num, "WLS numerator")?;
    finite(den, "WLS denominator")?;
    if den == 0.0 {
        return Err(Error::DegenerateTraining(
            "all lagged observations are zero".into(),
        ));
    }
    let beta_hat = finite(num / den, "WLS estimate")?;
    let s2_hat = lrv(y, None, beta_hat, None, m)?;
    Ok(WlsFit {
        beta_hat,
        lambda_hat: None,
        s2_hat,
        m,
        scales: None,
    })
}

/// Fits `y_i = beta y_{i-1} + lambda' x_i + e_i` by weighted least squares
/// and estimates the covariate scale constants.
pub fn fit_wls_covariates(training: &Series) -> Result<WlsFit> {
    let cov = training.covariates().ok_or_else(|| {
        Error::Config("covariate fit requested but the series has no covariates".into())
    })?;
    let p = training.dim();
    let m = training.len();
    if m < p + 3 {
        return Err(Error::DegenerateTraining(format!(
            "need at least {} observations for {p} covariates, got {m}",
            p + 3
        )));
    }
    let (gram, rhs) = normal_equations(training.values(), Some(cov), p);
    if gram[0][0] == 0.0 {
        return Err(Error::DegenerateTraining(
            "all lagged observations are zero".into(),
        ));
    }
    let coef = solve_symmetric(gram, rhs)?;
    let beta_hat = coef[0];
    let lambda_hat = coef[1..].to_vec();
    let s2_hat = lrv(training.values(), Some(cov), beta_hat, Some(&lambda_hat), m)?;
    let mut fit = WlsFit {
        beta_hat,
        lambda_hat: Some(lambda_hat),
        s2_hat,
        m,
        scales: None,
    };
    fit.scales = Some(estimate_covariate_scales(training, &fit)?);
    Ok(fit)
}

/// Weighted normal equations `(Q'WQ, Q'WY)` with rows `(y_{i-1}, x_i')`.
pub(crate) fn normal_equations(
    y: &[f64],
    cov: Option<&[Vec<f64>]>,
    p: usize,
) -> (Vec<Vec<f64>>, Vec<f64>) {
    let dim = p + 1;
    let mut gram = vec![vec![0.0; dim]; dim];
    let mut rhs = vec![0.0; dim];
    let mut row = vec![0.0; dim];
    for i in 1..y.len() {
        let (yp, yc) = (y[i - 1], y[i]);
        let d = 1.0 + yp * yp;
        row[0] = yp;
        if let Some(cov) = cov {
            row[1..].copy_from_slice(&cov[i]);
        }
        for a in 0..dim {
            for b in 0..dim {
                gram[a][b] += (row[a] * row[b]) / d;
            }
            rhs[a] += (yc * row[a]) / d;
        }
    }
    (gram, rhs)
}

/// Gaussian elimination with partial pivoting on a small dense system.
///
/// Conditioning is judged on the unit-diagonal rescaling of `a`, so a
/// regressor living on a tiny scale (e.g. covariates next to an explosive
/// lag) is not mistaken for a degenerate one.
#[allow(clippy::needless_range_loop)]
pub(crate) fn solve_symmetric(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Result<Vec<f64>> {
    let n = b.len();
    if a.iter().flatten().chain(&b).any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("weighted normal equations"));
    }
    check_conditioning(&a)?;
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        if a[piv][col] == 0.0 {
            return Err(Error::SingularGram(0.0));
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            if f != 0.0 {
                for c in col..n {
                    a[r][c] -= f * a[col][c];
                }
                b[r] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let mut acc = b[r];
        for c in r + 1..n {
            acc -= a[r][c] * x[c];
        }
        x[r] = finite(acc / a[r][r], "WLS coefficients")?;
    }
    Ok(x)
}

/// Eliminates `D^{-1/2} a D^{-1/2}` (`D = diag a`) and fails if a pivot
/// drops to `GRAM_PIVOT_TOL` or below.
#[allow(clippy::needless_range_loop)]
fn check_conditioning(a: &[Vec<f64>]) -> Result<()> {
    let n = a.len();
    let d: Vec<f64> = (0..n).map(|i| a[i][i].sqrt()).collect();
    if d.iter().any(|&v| v.is_nan() || v <= 0.0) {
        return Err(Error::SingularGram(0.0));
    }
    let mut s: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| a[i][j] / d[i] / d[j]).collect())
        .collect();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| s[i][col].abs().total_cmp(&s[j][col].abs()))
            .unwrap();
        let ratio = s[piv][col].abs();
        if ratio <= GRAM_PIVOT_TOL {
            return Err(Error::SingularGram(ratio));
        }
        s.swap(col, piv);
        for r in col + 1..n {
            let f = s[r][col] / s[col][col];
            for c in col..n {
                s[r][c] -= f * s[col][c];
            }
        }
    }
    Ok(())
}

fn lrv(
    y: &[f64],
    cov: Option<&[Vec<f64>]>,
    beta: f64,
    lambda: Option<&[f64]>,
    m: usize,
) -> Result<f64> {
    let mut acc = 0.0;
    for i in 1..y.len() {
        let lx = match (lambda, cov) {
            (Some(l), Some(c)) => Some((l, c[i].as_slice())),
            _ => None,
        };
        let r = weighted_residual(y[i], y[i - 1], beta, lx);
        acc += r * r;
    }
    finite(acc / m as f64, "long-run variance")
}

/// Plug-in estimates of the covariate scale constants.
///
/// With `q_i = (y_{i-1}, x_i')`, `d_i = 1 + y_{i-1}^2` and `e_i` the WLS
/// residual, the training means are
/// `Q = mean(q q' / d)`, `C = mean(e^2 q q' / d^2)`, `a = mean(q y_{i-1} / d)`,
/// all normalised by `m`. Then `sx1_sq = a'QCQa` and `sx2_sq` is the mean
/// squared y-weighted score.
pub fn estimate_covariate_scales(training: &Series, fit: &WlsFit) -> Result<CovariateScales> {
    let lambda = fit
        .lambda_hat
        .as_deref()
        .ok_or_else(|| Error::Config("fit has no covariate coefficients".into()))?;
    let cov = training
        .covariates()
        .ok_or_else(|| Error::Config("series has no covariates".into()))?;
    if training.dim() != lambda.len() {
        return Err(Error::ArityMismatch {
            expected: lambda.len(),
            got: training.dim(),
        });
    }
    let y = training.values();
    let dim = lambda.len() + 1;
    let m = y.len() as f64;
    let mut q = vec![vec![0.0; dim]; dim];
    let mut c = vec![vec![0.0; dim]; dim];
    let mut a = vec![0.0; dim];
    let mut sx2_sq = 0.0;
    let mut row = vec![0.0; dim];
    for i in 1..y.len() {
        let yp = y[i - 1];
        let d = 1.0 + yp * yp;
        row[0] = yp;
        row[1..].copy_from_slice(&cov[i]);
        let mut e = y[i] - fit.beta_hat * yp;
        for (l, x) in lambda.iter().zip(&cov[i]) {
            e -= l * x;
        }
        for r in 0..dim {
            for s in 0..dim {
                q[r][s] += row[r] * row[s] / d;
                c[r][s] += e * e * row[r] * row[s] / (d * d);
            }
            a[r] += row[r] * yp / d;
        }
        let score = e * yp / d;
        sx2_sq += score * score;
    }
    for r in 0..dim {
        for s in 0..dim {
            q[r][s] /= m;
            c[r][s] /= m;
        }
        a[r] /= m;
    }
    sx2_sq /= m;
    let qa = mat_vec(&q, &a);
    let cqa = mat_vec(&c, &qa);
    let sx1_sq: f64 = qa.iter().zip(&cqa).map(|(u, v)| u * v).sum();
    finite(sx1_sq, "covariate scale")?;
    finite(sx2_sq, "covariate scale")?;
    if sx1_sq <= 0.0 || sx2_sq <= 0.0 {
        return Err(Error::DegenerateScales(format!(
            "sx1^2 = {sx1_sq:e}, sx2^2 = {sx2_sq:e}"
        )));
    }
    Ok(CovariateScales {
        sx1_sq,
        sx2_sq,
        sx2: sx2_sq / sx1_sq.sqrt(),
        sxd2: sx2_sq / sx1_sq,
    })
}

fn mat_vec(a: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    a.iter()
        .map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum())
        .collect()
}
