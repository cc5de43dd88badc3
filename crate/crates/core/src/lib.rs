//! Numerical laboratory for the capacity-distortion limits of integrated
//! sensing and communication (ISAC) when the transmitter passes through a
//! finite AI representation budget and the receiver is a fluid antenna
//! selecting one of `L` spatially correlated ports.
//!
//! The crate is organised bottom-up:
//!
//! - [`bottleneck`]: AI budget, representation noise and SNR ceilings.
//! - [`special`]: Bessel `J0` used by the Jakes correlation.
//! - [`channel`]: Jakes correlation, correlated channel draws, port selection.
//! - [`baselines`]: SISO and 2x2 MIMO reference links.
//! - [`montecarlo`]: counter-based trial streams and deterministic aggregation.
//! - [`metrics`]: per-draw and expected rate/distortion, quadrature oracle.
//! - [`dof`]: numerical rank, outage curves and diversity fitting.
//! - [`experiments`]: sweep configuration, orchestration and CSV output.

pub mod baselines;
pub mod bottleneck;
pub mod channel;
pub mod dof;
pub mod error;
pub mod experiments;
pub mod metrics;
pub mod montecarlo;
pub mod quadrature;
pub mod special;

pub use baselines::BaselineKind;
pub use bottleneck::{AiBudget, CAi, SystemParams};
pub use channel::{ChannelDraw, FasGeometry, PortSelection, SpatialCorrelation};
pub use dof::DofReport;
pub use error::{Error, Result};
pub use metrics::RegionPoint;
pub use montecarlo::{MonteCarloEstimate, Workers};
