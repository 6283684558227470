#![allow(dead_code)]

use rca_monitor::monitor::start_monitor_with;
use rca_monitor::{BoundarySpec, DetectorKind, MonitorConfig, Scheme, Series};

/// Boundary recomputed from scratch, independent of the library's
/// `boundary_value`.
pub fn boundary(spec: &BoundarySpec, k: usize) -> f64 {
    let (k, m) = (k as f64, spec.m as f64);
    match spec.scheme {
        Scheme::OpenEnded | Scheme::ClosedLong => {
            spec.c * spec.s * m.sqrt() * (1.0 + k / m) * (k / (m + k)).powf(spec.psi)
        }
        Scheme::ClosedShort => {
            let ms = spec.m_star.unwrap() as f64;
            spec.c * spec.s * ms.powf(0.5 - spec.psi) * k.powf(spec.psi)
        }
        Scheme::Covariate => {
            let (sx2, d) = (spec.sx2.unwrap(), spec.sxd2.unwrap());
            spec.c * sx2 * m.sqrt() * (1.0 + k / (d * m)) * (k / (d * m + k)).powf(spec.psi)
        }
    }
}

/// First crossing computed from the whole stream at once: residual scores,
/// then detector values by brute force over all onsets, then the first
/// `k <= limit` with `Z(k) >= g(k)`.
pub fn offline_tau(training: &Series, stream: &Series, config: MonitorConfig, c: f64) -> Option<usize> {
    let crit = rca_monitor::monitor::CriticalValue {
        value: c,
        source: rca_monitor::CritSource::User,
    };
    let engine = start_monitor_with(training, config, crit).unwrap();
    let fit = engine.fit().clone();
    let spec = engine.boundary().clone();
    let m = training.len();
    let limit = match config.scheme {
        Scheme::OpenEnded => config.max_steps.unwrap_or(10 * m),
        _ => config.m_star.unwrap(),
    }
    .min(stream.len());

    let mut y_prev = *training.values().last().unwrap();
    let mut scores = Vec::with_capacity(limit);
    for i in 0..limit {
        let y = stream.values()[i];
        let mut e = y - fit.beta_hat * y_prev;
        if config.use_covariates {
            let x = stream.covariate(i).unwrap();
            for (l, xi) in fit.lambda_hat.as_ref().unwrap().iter().zip(x) {
                e -= l * xi;
            }
        }
        scores.push(e * y_prev / (1.0 + y_prev * y_prev));
        y_prev = y;
    }
    let mut s = vec![0.0];
    for r in &scores {
        s.push(s.last().unwrap() + r);
    }
    (1..=limit).find(|&k| {
        let z = match config.detector {
            DetectorKind::Cusum => s[k].abs(),
            DetectorKind::Page => (0..k).map(|l| (s[k] - s[l]).abs()).fold(s[k].abs(), f64::max),
        };
        z >= boundary(&spec, k)
    })
}

/// Every scheme, a spread of weights, and both covariate regimes, all with a
/// user-supplied critical value so no simulation is needed.
pub fn scan_configs(detector: DetectorKind, c: f64) -> Vec<MonitorConfig> {
    use rca_monitor::{CritvalSource, Regime};
    let base = MonitorConfig::closed_long(detector, 0.0, 100, CritvalSource::Fixed(c));
    let mut out = Vec::new();
    for psi in [0.0, 0.25, 0.45, 0.5] {
        out.push(MonitorConfig { psi, ..base });
        out.push(MonitorConfig {
            psi,
            scheme: Scheme::ClosedShort,
            m_star: Some(30),
            ..base
        });
        out.push(MonitorConfig {
            psi,
            scheme: Scheme::OpenEnded,
            m_star: None,
            max_steps: Some(250),
            ..base
        });
        for regime in [Regime::Stationary, Regime::Explosive] {
            out.push(MonitorConfig {
                psi,
                use_covariates: true,
                regime,
                ..base
            });
        }
    }
    out
}

/// Training window of 100 and a 250-step stream from Case I with a
/// covariate; odd runs switch to an explosive level midway.
pub fn scan_data(run: u64) -> (Series, Series) {
    use rca_monitor::dgp::{generate_rca, Case, Change};
    let mut spec = Case::I.params().with_covariates(1.0).dgp(350, 7_000 + run);
    if run % 2 == 1 {
        spec.change = Some(Change {
            k_star: 100 + (run as usize * 13) % 120,
            beta_a: 1.02,
        });
    }
    generate_rca(&spec).unwrap().split_at(100).unwrap()
}
