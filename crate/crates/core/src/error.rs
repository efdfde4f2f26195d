use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("register length {0} outside supported range 5..=12")]
    StagesOutOfRange(usize),
    #[error("seed must be nonzero (the all-zero state locks the register)")]
    ZeroSeed,
    #[error("seed {seed:#x} does not fit in {n_stages} stages")]
    SeedTooWide { seed: u32, n_stages: usize },
    #[error("invalid tap set: {0}")]
    InvalidTaps(String),
    #[error("invalid programming word {word:?}: {reason}")]
    InvalidWord { word: String, reason: String },
    #[error("invalid clock rates alpha={alpha_hz} Hz, beta={beta_hz} Hz: need 0 < beta < alpha")]
    InvalidRates { alpha_hz: f64, beta_hz: f64 },
    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("sample grid too coarse: replica slips {slip_samples:.3} samples per period, need at least 1 (raise oversample)")]
    GridTooCoarse { slip_samples: f64 },
    #[error("empty input: {0}")]
    EmptyInput(&'static str),
    #[error("found {found} sync pulse(s), need at least 2 (span too short or threshold too high)")]
    NoPulses { found: usize },
    #[error("power delay profile is already on the undilated delay axis")]
    AlreadyUndilated,
    #[error("power delay profile must be undilated before peak detection")]
    NotUndilated,
    #[error("tap delay {delay_ns} ns is finer than half a sample ({half_sample_ns} ns); raise oversample")]
    DelayTooFine { delay_ns: f64, half_sample_ns: f64 },
    #[error("input has zero power; SNR is undefined")]
    ZeroPower,
    #[error("no peaks found")]
    NoPeaks,
    #[error("input too short: need {needed} samples, got {got}")]
    TooShort { needed: usize, got: usize },
    #[error("no spectral null found within the frequency grid")]
    NoNull,
    #[error("need at least {needed} {what}, got {got}")]
    InsufficientData {
        what: &'static str,
        needed: usize,
        got: usize,
    },
}
