//! Monte Carlo critical values from the limiting Wiener functionals.
//!
//! Each replication draws a discretised Wiener path on its own random stream
//! (see [`crate::rng`]), evaluates the functional, and the upper quantile is
//! read off the sorted maxima as a plain order statistic.

use std::f64::consts::PI;
use std::fmt;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::rng::{map_indexed, replication_rng};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimPlan {
    /// Wiener steps per unit time.
    pub n_grid: usize,
    pub reps: usize,
    pub seed: u64,
    /// Open-ended Page functionals are evaluated on `(0, truncation_x]`.
    pub truncation_x: f64,
}

impl Default for SimPlan {
    fn default() -> Self {
        Self {
            n_grid: 10_000,
            reps: 100_000,
            seed: 20_240_517,
            truncation_x: 100.0,
        }
    }
}

impl SimPlan {
    /// Default grid with 20 000 replications.
    pub fn desk() -> Self {
        Self {
            reps: 20_000,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_grid < 100 {
            return Err(Error::Config(format!("n_grid = {} < 100", self.n_grid)));
        }
        if self.reps < 100 {
            return Err(Error::Config(format!("reps = {} < 100", self.reps)));
        }
        if !(self.truncation_x > 0.0 && self.truncation_x.is_finite()) {
            return Err(Error::Config("truncation_x must be positive".into()));
        }
        Ok(())
    }
}

/// Horizon of a Page-CUSUM limit functional.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PageHorizon {
    /// `sup` over `0 < x <= m0`, `m0 = lim m*/m`.
    Long(f64),
    /// `sup` over `0 < x < inf`, truncated at `SimPlan::truncation_x`.
    Open,
    /// Short horizon: `sup_{0<x<=1} sup_t |W(x) - W(t)| / x^psi`.
    Short,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Functional {
    /// `sup_{0<u<=frac} |W(u)| / u^psi`.
    Cusum { psi: f64, m_star_frac: f64 },
    Page { psi: f64, horizon: PageHorizon },
}

impl Functional {
    pub fn psi(&self) -> f64 {
        match *self {
            Functional::Cusum { psi, .. } | Functional::Page { psi, .. } => psi,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Functional::Cusum { .. } => "cusum",
            Functional::Page {
                horizon: PageHorizon::Long(_),
                ..
            } => "page_long",
            Functional::Page {
                horizon: PageHorizon::Open,
                ..
            } => "page_open",
            Functional::Page {
                horizon: PageHorizon::Short,
                ..
            } => "page_short",
        }
    }

    /// `m_star_frac` for CUSUM, `m0` for long Page, infinity for open-ended,
    /// 1 for short.
    pub fn horizon_param(&self) -> f64 {
        match *self {
            Functional::Cusum { m_star_frac, .. } => m_star_frac,
            Functional::Page { horizon, .. } => match horizon {
                PageHorizon::Long(m0) => m0,
                PageHorizon::Open => f64::INFINITY,
                PageHorizon::Short => 1.0,
            },
        }
    }

    fn validate(&self) -> Result<()> {
        let psi = self.psi();
        if !(0.0..0.5).contains(&psi) {
            return Err(Error::Domain(format!(
                "simulated critical values need 0 <= psi < 1/2, got {psi}"
            )));
        }
        match *self {
            Functional::Cusum { m_star_frac, .. } if !(m_star_frac > 0.0 && m_star_frac <= 1.0) => {
                Err(Error::Domain(format!("m_star_frac = {m_star_frac} outside (0, 1]")))
            }
            Functional::Page {
                horizon: PageHorizon::Long(m0),
                ..
            } if !(m0 > 0.0 && m0.is_finite()) => {
                Err(Error::Domain(format!("m0 = {m0} must be positive and finite")))
            }
            _ => Ok(()),
        }
    }
}

/// Random-walk approximation of `W` on `[0, 1]`: `path[0] = 0` and
/// `path[j] = path[j-1] + g_j / sqrt(n_grid)`.
pub fn simulate_wiener_path<R: Rng + ?Sized>(n_grid: usize, rng: &mut R) -> Vec<f64> {
    let step = 1.0 / (n_grid as f64).sqrt();
    let mut path = Vec::with_capacity(n_grid + 1);
    let mut w = 0.0;
    path.push(w);
    for _ in 0..n_grid {
        let g: f64 = rng.sample(StandardNormal);
        w += g * step;
        path.push(w);
    }
    path
}

/// Grid for the Page functional: uniform steps of `1/n_grid` up to
/// `min(1, x_max)`, then geometric steps `x -> x (1 + 1/n_grid)`.
#[derive(Debug, Clone)]
pub struct PageGrid {
    x: Vec<f64>,
    step_sd: Vec<f64>,
    weight: Vec<f64>,
}

impl PageGrid {
    pub fn new(x_max: f64, n_grid: usize, psi: f64) -> Self {
        let n = n_grid as f64;
        let head = x_max.min(1.0);
        let n_head = (head * n).ceil().max(1.0) as usize;
        let mut x = vec![0.0];
        for j in 1..=n_head {
            x.push(head * j as f64 / n_head as f64);
        }
        let mut cur = head;
        while cur < x_max {
            cur = (cur * (1.0 + 1.0 / n)).min(x_max);
            x.push(cur);
        }
        let step_sd = x.windows(2).map(|w| (w[1] - w[0]).sqrt()).collect();
        let weight = x[1..]
            .iter()
            .map(|&v| 1.0 / ((1.0 + v) * (v / (1.0 + v)).powf(psi)))
            .collect();
        Self { x, step_sd, weight }
    }

    pub fn len(&self) -> usize {
        self.step_sd.len()
    }

    pub fn is_empty(&self) -> bool {
        self.step_sd.is_empty()
    }

    /// Returns `(page, cusum)` for one path: the Page functional and the
    /// matching standard-CUSUM functional `sup_x |D(x)| / denom(x)`, both on
    /// the drifted path `D(x) = W2(x) - x W1(1)`.
    pub fn evaluate<R: Rng + ?Sized>(&self, rng: &mut R) -> (f64, f64) {
        let w1: f64 = rng.sample(StandardNormal);
        let (mut w2, mut lo, mut hi) = (0.0f64, 0.0f64, 0.0f64);
        let (mut page, mut cusum) = (0.0f64, 0.0f64);
        for j in 0..self.step_sd.len() {
            let g: f64 = rng.sample(StandardNormal);
            w2 += g * self.step_sd[j];
            let d = w2 - self.x[j + 1] * w1;
            lo = lo.min(d);
            hi = hi.max(d);
            let inner = (d - lo).max(hi - d);
            page = page.max(inner * self.weight[j]);
            cusum = cusum.max(d.abs() * self.weight[j]);
        }
        (page, cusum)
    }
}

fn uniform_weights(steps: usize, n_grid: usize, psi: f64) -> Vec<f64> {
    (1..=steps)
        .map(|j| (j as f64 / n_grid as f64).powf(-psi))
        .collect()
}

/// One functional value per replication, in replication order.
pub fn simulate_functional(functional: &Functional, plan: &SimPlan) -> Result<Vec<f64>> {
    plan.validate()?;
    functional.validate()?;
    let n = plan.n_grid;
    let step = 1.0 / (n as f64).sqrt();
    let out = match *functional {
        Functional::Cusum { psi, m_star_frac } => {
            let steps = ((m_star_frac * n as f64).ceil() as usize).clamp(1, n);
            let weights = uniform_weights(steps, n, psi);
            map_indexed(plan.reps, |i| {
                let mut rng = replication_rng(plan.seed, i as u64);
                let (mut w, mut best) = (0.0f64, 0.0f64);
                for wt in &weights {
                    let g: f64 = rng.sample(StandardNormal);
                    w += g * step;
                    best = best.max(w.abs() * wt);
                }
                best
            })
        }
        Functional::Page {
            psi,
            horizon: PageHorizon::Short,
        } => {
            let weights = uniform_weights(n, n, psi);
            map_indexed(plan.reps, |i| {
                let mut rng = replication_rng(plan.seed, i as u64);
                let (mut w, mut lo, mut hi, mut best) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
                for wt in &weights {
                    let g: f64 = rng.sample(StandardNormal);
                    w += g * step;
                    lo = lo.min(w);
                    hi = hi.max(w);
                    best = best.max((w - lo).max(hi - w) * wt);
                }
                best
            })
        }
        Functional::Page { psi, horizon } => {
            let x_max = match horizon {
                PageHorizon::Long(m0) => m0,
                _ => plan.truncation_x,
            };
            let grid = PageGrid::new(x_max, n, psi);
            map_indexed(plan.reps, |i| {
                grid.evaluate(&mut replication_rng(plan.seed, i as u64)).0
            })
        }
    };
    Ok(out)
}

/// Paired `(page, cusum)` values on shared paths of the long-horizon Page
/// functional.
pub fn simulate_page_paired(psi: f64, m0: f64, plan: &SimPlan) -> Result<Vec<(f64, f64)>> {
    plan.validate()?;
    Functional::Page {
        psi,
        horizon: PageHorizon::Long(m0),
    }
    .validate()?;
    let grid = PageGrid::new(m0, plan.n_grid, psi);
    Ok(map_indexed(plan.reps, |i| {
        grid.evaluate(&mut replication_rng(plan.seed, i as u64))
    }))
}

fn order_index(n: usize, alpha: f64) -> usize {
    // 1-based index ceil((1 - alpha) n), clamped to the sample
    let idx = ((1.0 - alpha) * n as f64 - 1e-9).ceil() as usize;
    idx.clamp(1, n) - 1
}

/// Upper-`alpha` quantile of an already sorted sample: the order statistic at
/// 1-based index `ceil((1 - alpha) n)`.
pub fn upper_quantile(sorted: &[f64], alpha: f64) -> f64 {
    sorted[order_index(sorted.len(), alpha)]
}

/// Half-width of the binomial order-statistic band around the quantile, a
/// standard-error proxy for MC quantiles.
pub fn quantile_standard_error(sorted: &[f64], alpha: f64) -> f64 {
    let n = sorted.len();
    let idx = order_index(n, alpha) as f64;
    let band = (n as f64 * alpha * (1.0 - alpha)).sqrt();
    let lo = (idx - band).floor().max(0.0) as usize;
    let hi = ((idx + band).ceil() as usize).min(n - 1);
    0.5 * (sorted[hi] - sorted[lo])
}

pub fn sorted(mut values: Vec<f64>) -> Vec<f64> {
    values.sort_by(f64::total_cmp);
    values
}

pub fn critical_value(functional: &Functional, alpha: f64, plan: &SimPlan) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    let values = sorted(simulate_functional(functional, plan)?);
    Ok(upper_quantile(&values, alpha))
}

pub fn critval_cusum_weighted(alpha: f64, psi: f64, m_star_frac: f64, plan: &SimPlan) -> Result<f64> {
    critical_value(&Functional::Cusum { psi, m_star_frac }, alpha, plan)
}

pub fn critval_page(alpha: f64, psi: f64, horizon: PageHorizon, plan: &SimPlan) -> Result<f64> {
    critical_value(&Functional::Page { psi, horizon }, alpha, plan)
}

/// `m_* = m0 / (1 + m0)`, or 1 when `m0` is infinite.
pub fn m_star_fraction(m0: f64) -> f64 {
    if m0.is_infinite() {
        1.0
    } else {
        m0 / (1.0 + m0)
    }
}

/// `P(sup_{[0,1]} |W| <= x)` by its alternating series, truncated once terms
/// fall below 1e-14.
pub fn sup_abs_wiener_cdf(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let mut sum = 0.0;
    let mut n = 0u32;
    loop {
        let k = (2 * n + 1) as f64;
        let term = (-(k * k) * PI * PI / (8.0 * x * x)).exp() / k;
        if term < 1e-14 {
            break;
        }
        sum += if n.is_multiple_of(2) { term } else { -term };
        n += 1;
    }
    (4.0 / PI * sum).clamp(0.0, 1.0)
}

/// Inverts [`sup_abs_wiener_cdf`] by bisection.
pub fn sup_abs_wiener_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!("probability must lie in (0, 1), got {p}")));
    }
    let (mut lo, mut hi) = (0.05, 20.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if sup_abs_wiener_cdf(mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// One row of an exported quantile table.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantileRecord {
    pub functional: &'static str,
    pub alpha: f64,
    pub psi: f64,
    pub horizon_param: f64,
    pub n_grid: usize,
    pub reps: usize,
    pub seed: u64,
    pub quantile: f64,
}

impl QuantileRecord {
    pub const HEADER: &'static str = "functional,alpha,psi,horizon_param,n_grid,reps,seed,quantile";

    pub fn compute(functional: &Functional, alpha: f64, plan: &SimPlan) -> Result<Self> {
        Ok(Self {
            functional: functional.name(),
            alpha,
            psi: functional.psi(),
            horizon_param: functional.horizon_param(),
            n_grid: plan.n_grid,
            reps: plan.reps,
            seed: plan.seed,
            quantile: critical_value(functional, alpha, plan)?,
        })
    }
}

impl fmt::Display for QuantileRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{},{},{},{},{},{},{},{}",
            self.functional,
            self.alpha,
            self.psi,
            self.horizon_param,
            self.n_grid,
            self.reps,
            self.seed,
            self.quantile
        )
    }
}

/// Renders records as CSV with a header line.
pub fn quantile_table_csv(records: &[QuantileRecord]) -> String {
    let mut out = String::from(QuantileRecord::HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&r.to_string());
        out.push('\n');
    }
    out
}
