//! Sequential changepoint monitoring for random coefficient autoregressive
//! (RCA) series.
//!
//! A training window is fitted by weighted least squares ([`model`]), after
//! which each new observation feeds a CUSUM or Page-CUSUM detector
//! ([`detectors`]) that is compared with a boundary function
//! ([`boundaries`]). Critical values come from closed forms or from Monte
//! Carlo simulation of the limiting Wiener functionals ([`limit_sim`]).
//! [`monitor`] ties these together into a streaming state machine and
//! [`dgp`] / [`experiment`] reproduce size and power studies.
//!
//! ```
//! use rca_monitor::dgp::{generate_rca, Case, Change};
//! use rca_monitor::monitor::{run_to_completion, start_monitor};
//! use rca_monitor::{CritvalSource, DetectorKind, MonitorConfig, Verdict};
//!
//! // 200 training points, then the level drops from 1.05 to 0.95.
//! let mut spec = Case::II.params().dgp(400, 7);
//! spec.change = Some(Change { k_star: 200, beta_a: 0.95 });
//! let (training, stream) = generate_rca(&spec)?.split_at(200)?;
//!
//! let config = MonitorConfig::closed_long(
//!     DetectorKind::Cusum,
//!     0.5,
//!     200,
//!     CritvalSource::Vostrikova { h: None },
//! );
//! let mut engine = start_monitor(&training, config)?;
//! let result = run_to_completion(&mut engine, &stream, Some(0))?;
//! assert_eq!(result.last_verdict(), Some(Verdict::Alarm));
//! # Ok::<(), rca_monitor::Error>(())
//! ```

pub mod boundaries;
pub mod detectors;
pub mod dgp;
pub mod error;
pub mod experiment;
pub mod limit_sim;
pub mod model;
pub mod monitor;
pub mod rng;
pub mod series;
#[cfg(feature = "cli")]
pub mod cli;

pub use boundaries::{BoundarySpec, CritSource, Scheme};
pub use detectors::{DetectorKind, DetectorState};
pub use error::{Error, Result};
pub use limit_sim::{PageHorizon, SimPlan};
pub use model::{fit_wls, fit_wls_covariates, Regime, WlsFit};
pub use monitor::{CritvalSource, MonitorConfig, MonitorEngine, MonitorEvent, Verdict};
pub use series::Series;
