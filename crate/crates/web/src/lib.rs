//! Browser bindings for the monitoring toolkit. Every export returns a JSON
//! string; errors surface as JavaScript exceptions carrying the message.

use rca_monitor::boundaries::{critval_de, critval_vostrikova, boundary_value};
use rca_monitor::dgp::{generate_rca, Change, DgpSpec};
use rca_monitor::monitor::{resolve_critical_value, run_to_completion, start_monitor_with};
use rca_monitor::{BoundarySpec, CritSource, CritvalSource, DetectorKind, MonitorConfig, Scheme, SimPlan};
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Replications behind simulated critical values in the browser.
const BROWSER_PLAN: SimPlan = SimPlan {
    n_grid: 1_000,
    reps: 4_000,
    seed: 20_240_517,
    truncation_x: 100.0,
};

#[derive(Serialize)]
struct MonitorRun {
    series: Vec<f64>,
    m: usize,
    critical_value: f64,
    source: &'static str,
    beta_hat: f64,
    s_hat: f64,
    detector: Vec<f64>,
    boundary: Vec<f64>,
    tau: Option<usize>,
    verdict: Option<&'static str>,
}

#[derive(Serialize)]
struct CritvalCurves {
    alpha: f64,
    m_star: Vec<usize>,
    darling_erdos: Vec<f64>,
    vostrikova: Vec<f64>,
}

fn js(e: impl std::fmt::Display) -> JsError {
    JsError::new(&e.to_string())
}

fn parse_detector(s: &str) -> Result<DetectorKind, String> {
    match s {
        "cusum" => Ok(DetectorKind::Cusum),
        "page" => Ok(DetectorKind::Page),
        _ => Err(format!("unknown detector `{s}`")),
    }
}

fn parse_source(s: &str) -> Result<CritvalSource, String> {
    match s {
        "sim" => Ok(CritvalSource::Simulated(BROWSER_PLAN)),
        "de" => Ok(CritvalSource::DarlingErdos),
        "vostrikova" => Ok(CritvalSource::Vostrikova { h: None }),
        _ => Err(format!("unknown critical value source `{s}`")),
    }
}

/// Simulates an RCA path whose level moves from `beta0` to `beta_a` after
/// `change_after` monitoring steps, then monitors it over a closed horizon.
#[allow(clippy::too_many_arguments)]
pub fn simulate_monitor_json(
    beta0: f64,
    beta_a: f64,
    sigma1: f64,
    sigma2: f64,
    m: usize,
    m_star: usize,
    change_after: usize,
    psi: f64,
    detector: &str,
    source: &str,
    seed: u64,
) -> Result<String, String> {
    let e = |x: rca_monitor::Error| x.to_string();
    let config = MonitorConfig::closed_long(parse_detector(detector)?, psi, m_star, parse_source(source)?);
    let spec = DgpSpec {
        change: (beta_a != beta0 && change_after < m_star).then_some(Change {
            k_star: m + change_after,
            beta_a,
        }),
        ..DgpSpec::new(beta0, sigma1, sigma2, m + m_star, seed)
    };
    let series = generate_rca(&spec).map_err(e)?;
    let (training, stream) = series.split_at(m).map_err(e)?;
    let crit = resolve_critical_value(&config, m).map_err(e)?;
    let mut engine = start_monitor_with(&training, config, crit).map_err(e)?;
    let (beta_hat, s_hat) = (engine.fit().beta_hat, engine.fit().s_hat());
    let result = run_to_completion(&mut engine, &stream, None).map_err(e)?;
    Ok(serde_json::to_string(&MonitorRun {
        series: series.values().to_vec(),
        m,
        critical_value: crit.value,
        source: crit.source.as_str(),
        beta_hat,
        s_hat,
        detector: result.events.iter().map(|ev| ev.detector_value).collect(),
        boundary: result.events.iter().map(|ev| ev.boundary_value).collect(),
        tau: result.tau,
        verdict: result.last_verdict().map(|v| v.as_str()),
    })
    .expect("serializable"))
}

/// Darling-Erdős and Vostrikova critical values over a grid of horizons.
pub fn critical_value_curves_json(alpha: f64) -> Result<String, String> {
    let m_star: Vec<usize> = (0..=20).map(|i| (25.0 * 2f64.powf(i as f64 / 4.0)).round() as usize).collect();
    let mut de = Vec::new();
    let mut vo = Vec::new();
    for &ms in &m_star {
        de.push(critval_de(alpha, ms).map_err(|e| e.to_string())?);
        vo.push(critval_vostrikova(alpha, ms, None).map_err(|e| e.to_string())?);
    }
    Ok(serde_json::to_string(&CritvalCurves {
        alpha,
        m_star,
        darling_erdos: de,
        vostrikova: vo,
    })
    .expect("serializable"))
}

/// Boundary `g(k)`, `k = 1..=m_star`, for unit critical value and scale.
pub fn boundary_curve_json(psi: f64, scheme: &str, m: usize, m_star: usize) -> Result<String, String> {
    let scheme = match scheme {
        "closed-long" => Scheme::ClosedLong,
        "closed-short" => Scheme::ClosedShort,
        "open" => Scheme::OpenEnded,
        _ => return Err(format!("unknown scheme `{scheme}`")),
    };
    let spec = BoundarySpec {
        psi,
        scheme,
        c: 1.0,
        s: 1.0,
        m,
        m_star: Some(m_star),
        sx2: None,
        sxd2: None,
        c_source: CritSource::User,
    };
    let g: Vec<f64> = (1..=m_star)
        .map(|k| boundary_value(&spec, k))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    Ok(serde_json::to_string(&g).expect("serializable"))
}

#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn simulate_monitor(
    beta0: f64,
    beta_a: f64,
    sigma1: f64,
    sigma2: f64,
    m: usize,
    m_star: usize,
    change_after: usize,
    psi: f64,
    detector: &str,
    source: &str,
    seed: u32,
) -> Result<String, JsError> {
    simulate_monitor_json(
        beta0, beta_a, sigma1, sigma2, m, m_star, change_after, psi, detector, source, seed as u64,
    )
    .map_err(js)
}

#[wasm_bindgen]
pub fn critical_value_curves(alpha: f64) -> Result<String, JsError> {
    critical_value_curves_json(alpha).map_err(js)
}

#[wasm_bindgen]
pub fn boundary_curve(psi: f64, scheme: &str, m: usize, m_star: usize) -> Result<String, JsError> {
    boundary_curve_json(psi, scheme, m, m_star).map_err(js)
}
