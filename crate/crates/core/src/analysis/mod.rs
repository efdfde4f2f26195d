//! Post-processing of correlator output and link-level metrics.

mod link;
mod peaks;
mod spectrum;

pub use link::{
    fit_ple, fspl, linearity_check, path_loss, xpd, xpd_stats, Linearity, LinkBudget, PleFit,
    XpdRecord, XpdStats, SPEED_OF_LIGHT,
};
pub use peaks::{detect_peaks, MultipathEstimate};
pub use spectrum::{find_null_and_sidelobe, power_spectrum, power_spectrum_with, Psd};
