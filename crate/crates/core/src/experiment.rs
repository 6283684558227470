//! Batch size and power experiments over simulated RCA paths.
//!
//! Replication `r` simulates from seed `derive_seed(seed, r)`, so a table is
//! reproducible bit for bit whatever the number of worker threads.

use crate::boundaries::Scheme;
use crate::dgp::{generate_rca, CaseParams, Change};
use crate::error::{Error, Result};
use crate::monitor::{
    resolve_critical_value, run_to_completion, start_monitor_with, CriticalValue, MonitorConfig,
};
use crate::rng::{derive_seed, map_indexed};

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRow {
    pub label: String,
    pub m: usize,
    pub m_star: usize,
    /// Post-change level; `None` for size experiments.
    pub beta_a: Option<f64>,
    pub critical_value: f64,
    pub reps: usize,
    pub detected: usize,
    /// Fraction of replications with an alarm within `m*`.
    pub rejection: f64,
    /// Median alarm step among detected replications.
    pub median_delay: Option<f64>,
}

/// Median of a sample, averaging the two central values for even sizes.
pub fn median(values: &mut [usize]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_unstable();
    let n = values.len();
    Some(if n % 2 == 1 {
        values[n / 2] as f64
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2]) as f64
    })
}

/// Rejection frequencies under the no-change DGP.
pub fn size_experiment(
    case: &CaseParams,
    m: usize,
    m_star: usize,
    configs: &[MonitorConfig],
    reps: usize,
    seed: u64,
) -> Result<Vec<ExperimentRow>> {
    run_experiment(case, None, m, m_star, configs, reps, seed)
}

/// Rejection frequencies and median delays when the autoregressive level
/// switches to `beta_a` at the first monitored observation.
pub fn power_experiment(
    case: &CaseParams,
    beta_a: f64,
    m: usize,
    m_star: usize,
    configs: &[MonitorConfig],
    reps: usize,
    seed: u64,
) -> Result<Vec<ExperimentRow>> {
    run_experiment(case, Some(beta_a), m, m_star, configs, reps, seed)
}

fn run_experiment(
    case: &CaseParams,
    beta_a: Option<f64>,
    m: usize,
    m_star: usize,
    configs: &[MonitorConfig],
    reps: usize,
    seed: u64,
) -> Result<Vec<ExperimentRow>> {
    if reps == 0 {
        return Err(Error::Config("experiments need at least one replication".into()));
    }
    if m_star == 0 {
        return Err(Error::Config("experiments need a positive horizon".into()));
    }
    let mut resolved: Vec<(MonitorConfig, CriticalValue)> = Vec::with_capacity(configs.len());
    for cfg in configs {
        if cfg.scheme == Scheme::OpenEnded {
            return Err(Error::Config("experiments run closed-ended monitors".into()));
        }
        let cfg = MonitorConfig {
            m_star: Some(m_star),
            use_covariates: cfg.use_covariates && case.lambda0 != 0.0,
            ..*cfg
        };
        let crit = resolve_critical_value(&cfg, m)?;
        resolved.push((cfg, crit));
    }

    let k_star = beta_a.map(|_| 0);
    let outcomes: Vec<Result<Vec<Option<usize>>>> = map_indexed(reps, |r| {
        let mut spec = case.dgp(m + m_star, derive_seed(seed, r as u64));
        spec.change = beta_a.map(|beta_a| Change { k_star: m, beta_a });
        let series = generate_rca(&spec)?;
        let (training, stream) = series.split_at(m)?;
        resolved
            .iter()
            .map(|(cfg, crit)| {
                let mut engine = start_monitor_with(&training, *cfg, *crit)?;
                Ok(run_to_completion(&mut engine, &stream, k_star)?.tau)
            })
            .collect()
    });

    let mut taus: Vec<Vec<usize>> = vec![Vec::new(); resolved.len()];
    for outcome in outcomes {
        for (j, tau) in outcome?.into_iter().enumerate() {
            if let Some(t) = tau {
                taus[j].push(t);
            }
        }
    }
    Ok(resolved
        .iter()
        .zip(taus)
        .map(|((cfg, crit), mut t)| ExperimentRow {
            label: cfg.label(),
            m,
            m_star,
            beta_a,
            critical_value: crit.value,
            reps,
            detected: t.len(),
            rejection: t.len() as f64 / reps as f64,
            median_delay: if beta_a.is_some() { median(&mut t) } else { None },
        })
        .collect())
}

/// Size table: one line per `(m, m*)`, one column per configuration.
pub fn size_table_csv(rows: &[ExperimentRow]) -> String {
    table_csv(rows, false)
}

/// Power table: for each configuration a rejection and a median-delay column.
pub fn power_table_csv(rows: &[ExperimentRow]) -> String {
    table_csv(rows, true)
}

fn table_csv(rows: &[ExperimentRow], with_delay: bool) -> String {
    let mut labels: Vec<&str> = Vec::new();
    let mut keys: Vec<(Option<f64>, usize, usize)> = Vec::new();
    for r in rows {
        if !labels.contains(&r.label.as_str()) {
            labels.push(&r.label);
        }
        if !keys.contains(&(r.beta_a, r.m, r.m_star)) {
            keys.push((r.beta_a, r.m, r.m_star));
        }
    }
    let mut out = String::from(if with_delay { "beta_a,m,m_star" } else { "m,m_star" });
    for l in &labels {
        if with_delay {
            out.push_str(&format!(",{l} rejection,{l} median_delay"));
        } else {
            out.push_str(&format!(",{l}"));
        }
    }
    out.push('\n');
    for (beta_a, m, ms) in keys {
        if with_delay {
            if let Some(b) = beta_a {
                out.push_str(&format!("{b}"));
            }
            out.push(',');
        }
        out.push_str(&format!("{m},{ms}"));
        for l in &labels {
            let cell = rows
                .iter()
                .find(|r| r.beta_a == beta_a && r.m == m && r.m_star == ms && r.label == *l);
            match cell {
                Some(r) => {
                    out.push_str(&format!(",{:.3}", r.rejection));
                    if with_delay {
                        match r.median_delay {
                            Some(d) => out.push_str(&format!(",{d}")),
                            None => out.push(','),
                        }
                    }
                }
                None if with_delay => out.push_str(",,"),
                None => out.push(','),
            }
        }
        out.push('\n');
    }
    out
}
