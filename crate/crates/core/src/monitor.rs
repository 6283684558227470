//! Streaming monitor: fit the training window once, then apply the stopping
//! rule one observation at a time.

use std::fmt;

use crate::boundaries::{critval_de, critval_vostrikova, BoundarySpec, CritSource, Scheme};
use crate::detectors::{residual, DetectorKind, DetectorState};
use crate::error::{Error, Result};
use crate::limit_sim::{critical_value, m_star_fraction, Functional, PageHorizon, SimPlan};
use crate::model::{fit_wls, fit_wls_covariates, Regime, WlsFit};
use crate::series::Series;

/// Open-ended monitors stop after `DEFAULT_CAP_FACTOR * m` steps unless told
/// otherwise.
pub const DEFAULT_CAP_FACTOR: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CritvalSource {
    Simulated(SimPlan),
    DarlingErdos,
    Vostrikova { h: Option<f64> },
    /// A critical value chosen by the caller.
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonitorConfig {
    pub detector: DetectorKind,
    /// One of `OpenEnded`, `ClosedLong`, `ClosedShort`.
    pub scheme: Scheme,
    pub psi: f64,
    pub alpha: f64,
    pub m_star: Option<usize>,
    pub critval: CritvalSource,
    pub use_covariates: bool,
    pub regime: Regime,
    /// Step cap for open-ended monitoring.
    pub max_steps: Option<usize>,
}

impl MonitorConfig {
    /// Closed-ended, long-horizon monitoring at the 5% level.
    pub fn closed_long(detector: DetectorKind, psi: f64, m_star: usize, critval: CritvalSource) -> Self {
        Self {
            detector,
            scheme: Scheme::ClosedLong,
            psi,
            alpha: 0.05,
            m_star: Some(m_star),
            critval,
            use_covariates: false,
            regime: Regime::Stationary,
            max_steps: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if !(0.0..=0.5).contains(&self.psi) {
            return bad(format!("psi = {} outside [0, 1/2]", self.psi));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return bad(format!("alpha = {} outside (0, 1)", self.alpha));
        }
        let closed = match self.scheme {
            Scheme::OpenEnded => false,
            Scheme::ClosedLong | Scheme::ClosedShort => true,
            Scheme::Covariate => {
                return bad("use `use_covariates` instead of the covariate scheme".into())
            }
        };
        if closed && self.m_star.is_none_or(|ms| ms == 0) {
            return bad("closed-ended monitoring needs a positive m_star".into());
        }
        if self.max_steps == Some(0) {
            return bad("max_steps must be positive".into());
        }
        if self.use_covariates && self.scheme == Scheme::ClosedShort {
            return bad("short-horizon monitoring is not available with covariates".into());
        }
        let standardised = self.psi == 0.5;
        match self.critval {
            CritvalSource::Fixed(c) if !(c > 0.0 && c.is_finite()) => {
                bad(format!("fixed critical value {c} must be positive"))
            }
            CritvalSource::Fixed(_) => Ok(()),
            CritvalSource::Simulated(_) if standardised => {
                bad("psi = 1/2 needs Darling-Erdős or Vostrikova critical values".into())
            }
            CritvalSource::Simulated(plan) => plan.validate(),
            CritvalSource::DarlingErdos | CritvalSource::Vostrikova { .. } => {
                if !standardised {
                    bad(format!(
                        "closed-form critical values exist only for psi = 1/2, got {}",
                        self.psi
                    ))
                } else if self.detector != DetectorKind::Cusum {
                    bad("closed-form critical values exist only for the standard CUSUM".into())
                } else if !closed {
                    bad("closed-form critical values need a closed-ended horizon".into())
                } else {
                    Ok(())
                }
            }
        }
    }

    /// Limit functional whose quantile calibrates this configuration.
    pub fn functional(&self, m: usize) -> Functional {
        let m0 = self.m_star.map_or(f64::INFINITY, |ms| ms as f64 / m as f64);
        match (self.detector, self.scheme) {
            (DetectorKind::Cusum, Scheme::ClosedLong) => Functional::Cusum {
                psi: self.psi,
                m_star_frac: m_star_fraction(m0),
            },
            (DetectorKind::Cusum, _) => Functional::Cusum {
                psi: self.psi,
                m_star_frac: 1.0,
            },
            (DetectorKind::Page, Scheme::ClosedLong) => Functional::Page {
                psi: self.psi,
                horizon: PageHorizon::Long(m0),
            },
            (DetectorKind::Page, Scheme::ClosedShort) => Functional::Page {
                psi: self.psi,
                horizon: PageHorizon::Short,
            },
            (DetectorKind::Page, _) => Functional::Page {
                psi: self.psi,
                horizon: PageHorizon::Open,
            },
        }
    }

    /// Short column label, e.g. `cusum psi=0.45 sim`.
    pub fn label(&self) -> String {
        let det = match self.detector {
            DetectorKind::Cusum => "cusum",
            DetectorKind::Page => "page",
        };
        let src = match self.critval {
            CritvalSource::Simulated(_) => "sim".to_string(),
            CritvalSource::DarlingErdos => "de".to_string(),
            CritvalSource::Vostrikova { .. } => "vostrikova".to_string(),
            CritvalSource::Fixed(c) => format!("c={c}"),
        };
        format!("{det} psi={} {src}", self.psi)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalValue {
    pub value: f64,
    pub source: CritSource,
}

/// Computes (or simulates) the critical value a configuration calls for.
pub fn resolve_critical_value(config: &MonitorConfig, m: usize) -> Result<CriticalValue> {
    config.validate()?;
    let horizon = || {
        config
            .m_star
            .ok_or_else(|| Error::Config("critical value needs m_star".into()))
    };
    Ok(match config.critval {
        CritvalSource::Fixed(value) => CriticalValue {
            value,
            source: CritSource::User,
        },
        CritvalSource::DarlingErdos => CriticalValue {
            value: critval_de(config.alpha, horizon()?)?,
            source: CritSource::DarlingErdos,
        },
        CritvalSource::Vostrikova { h } => CriticalValue {
            value: critval_vostrikova(config.alpha, horizon()?, h)?,
            source: CritSource::Vostrikova,
        },
        CritvalSource::Simulated(plan) => CriticalValue {
            value: critical_value(&config.functional(m), config.alpha, &plan)?,
            source: CritSource::Simulated,
        },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Continue,
    Alarm,
    /// Closed-ended horizon `m*` reached without an alarm.
    HorizonReached,
    /// Open-ended step cap reached without an alarm.
    StepCap,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Continue => "continue",
            Verdict::Alarm => "alarm",
            Verdict::HorizonReached => "horizon",
            Verdict::StepCap => "cap",
        }
    }

    pub fn is_terminal(self) -> bool {
        self != Verdict::Continue
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonitorEvent {
    pub verdict: Verdict,
    pub k: usize,
    pub detector_value: f64,
    pub boundary_value: f64,
}

impl MonitorEvent {
    pub const CSV_HEADER: &'static str = "k,detector_value,boundary_value,verdict";
}

impl fmt::Display for MonitorEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{},{},{},{}",
            self.k,
            self.detector_value,
            self.boundary_value,
            self.verdict.as_str()
        )
    }
}

#[derive(Debug, Clone)]
pub struct MonitorEngine {
    config: MonitorConfig,
    fit: WlsFit,
    spec: BoundarySpec,
    state: DetectorState,
    y_prev: f64,
    horizon: Option<usize>,
    cap: Option<usize>,
    terminal: Option<Verdict>,
}

/// Fits the training window and resolves the critical value.
pub fn start_monitor(training: &Series, config: MonitorConfig) -> Result<MonitorEngine> {
    config.validate()?;
    let crit = resolve_critical_value(&config, training.len())?;
    start_monitor_with(training, config, crit)
}

/// As [`start_monitor`] with a critical value resolved beforehand, e.g. once
/// for many replications.
pub fn start_monitor_with(
    training: &Series,
    config: MonitorConfig,
    crit: CriticalValue,
) -> Result<MonitorEngine> {
    config.validate()?;
    if config.use_covariates && training.covariates().is_none() {
        return Err(Error::Config(
            "covariates requested but the training series has none".into(),
        ));
    }
    let fit = if config.use_covariates {
        fit_wls_covariates(training)?
    } else {
        fit_wls(training)?
    };
    let m = fit.m;
    let (scheme, sx2, sxd2) = if config.use_covariates {
        let (sx2, sxd2) = fit
            .boundary_scales(config.regime)
            .ok_or_else(|| Error::DegenerateScales("covariate scales missing".into()))?;
        (Scheme::Covariate, Some(sx2), Some(sxd2))
    } else {
        (config.scheme, None, None)
    };
    let s = fit.s_hat();
    let scale = sx2.unwrap_or(s);
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::DegenerateTraining(format!(
            "boundary scale {scale} is not positive"
        )));
    }
    let spec = BoundarySpec {
        psi: config.psi,
        scheme,
        c: crit.value,
        s,
        m,
        m_star: config.m_star,
        sx2,
        sxd2,
        c_source: crit.source,
    };
    spec.validate()?;
    let (horizon, cap) = match config.scheme {
        Scheme::OpenEnded => (None, Some(config.max_steps.unwrap_or(DEFAULT_CAP_FACTOR * m))),
        _ => (config.m_star, None),
    };
    Ok(MonitorEngine {
        config,
        y_prev: *training.values().last().expect("training has at least 3 values"),
        fit,
        spec,
        state: DetectorState::new(config.detector),
        horizon,
        cap,
        terminal: None,
    })
}

impl MonitorEngine {
    pub fn fit(&self) -> &WlsFit {
        &self.fit
    }

    pub fn boundary(&self) -> &BoundarySpec {
        &self.spec
    }

    pub fn config(&self) -> &MonitorConfig {
        &self.config
    }

    /// Steps consumed so far.
    pub fn k(&self) -> usize {
        self.state.k
    }

    pub fn terminal(&self) -> Option<Verdict> {
        self.terminal
    }

    /// Consumes the next observation. Terminal verdicts are absorbing.
    pub fn step(&mut self, y_new: f64, x_new: Option<&[f64]>) -> Result<MonitorEvent> {
        if self.terminal.is_some() {
            return Err(Error::StepAfterTerminal(self.state.k));
        }
        if !y_new.is_finite() {
            return Err(Error::NonFinite("observation"));
        }
        let x = if self.config.use_covariates { x_new } else { None };
        let r = residual(y_new, self.y_prev, &self.fit, x)?;
        let mut next = self.state;
        let z = next.update(r)?;
        let k = next.k;
        let g = self.spec.value(k)?;
        let verdict = if z >= g {
            Verdict::Alarm
        } else if self.horizon.is_some_and(|h| k >= h) {
            Verdict::HorizonReached
        } else if self.cap.is_some_and(|c| k >= c) {
            Verdict::StepCap
        } else {
            Verdict::Continue
        };
        self.state = next;
        self.y_prev = y_new;
        if verdict.is_terminal() {
            self.terminal = Some(verdict);
        }
        Ok(MonitorEvent {
            verdict,
            k,
            detector_value: z,
            boundary_value: g,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonitorResult {
    /// Alarm step, if any.
    pub tau: Option<usize>,
    /// `tau - k_star` for alarms after a known change.
    pub delay: Option<usize>,
    /// An alarm at or before the known change.
    pub early_alarm: bool,
    pub events: Vec<MonitorEvent>,
}

impl MonitorResult {
    pub fn last_verdict(&self) -> Option<Verdict> {
        self.events.last().map(|e| e.verdict)
    }
}

/// Feeds `stream` until a terminal verdict or the end of the data.
///
/// `k_star` is the number of monitoring steps before a known change, so the
/// first post-change observation is step `k_star + 1`.
pub fn run_to_completion(
    engine: &mut MonitorEngine,
    stream: &Series,
    k_star: Option<usize>,
) -> Result<MonitorResult> {
    let mut events = Vec::new();
    for i in 0..stream.len() {
        if engine.terminal().is_some() {
            break;
        }
        events.push(engine.step(stream.values()[i], stream.covariate(i))?);
    }
    let tau = events
        .last()
        .filter(|e| e.verdict == Verdict::Alarm)
        .map(|e| e.k);
    let (delay, early_alarm) = match (tau, k_star) {
        (Some(t), Some(ks)) if t > ks => (Some(t - ks), false),
        (Some(_), Some(_)) => (None, true),
        _ => (None, false),
    };
    Ok(MonitorResult {
        tau,
        delay,
        early_alarm,
        events,
    })
}

/// Renders an event log as CSV with a header line.
pub fn events_csv(events: &[MonitorEvent]) -> String {
    let mut out = String::from(MonitorEvent::CSV_HEADER);
    out.push('\n');
    for e in events {
        out.push_str(&e.to_string());
        out.push('\n');
    }
    out
}
