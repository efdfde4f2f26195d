//! Programmable LFSR pseudo-noise generation.
//!
//! The register follows the PNSG programming model of the sounder IC: a
//! 3-bit length word selects the register length `N` (5..=12) and a 12-bit
//! switch word selects the feedback stages. The generator is in Fibonacci
//! form. Stage 1 receives the feedback bit, the contents shift towards stage
//! `N`, and stage `N` is the output. The feedback is the XOR of all tapped
//! stages.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::exec::Execution;

/// Smallest register length the IC can be programmed to.
pub const MIN_STAGES: usize = 5;
/// Largest register length the IC can be programmed to.
pub const MAX_STAGES: usize = 12;

/// Largest register this module will simulate when the IC range is lifted.
const MAX_SIM_STAGES: usize = 24;

/// Maximal-length feedback taps for `N = 5..=12`.
const DEFAULT_TAPS: [&[usize]; 8] = [
    &[5, 3],
    &[6, 5],
    &[7, 6],
    &[8, 6, 5, 4],
    &[9, 5],
    &[10, 7],
    &[11, 9],
    &[12, 6, 4, 1],
];

/// Default maximal-length tap set for a register of `n_stages`.
pub fn default_taps(n_stages: usize) -> Result<&'static [usize]> {
    if !(MIN_STAGES..=MAX_STAGES).contains(&n_stages) {
        return Err(Error::StagesOutOfRange(n_stages));
    }
    Ok(DEFAULT_TAPS[n_stages - MIN_STAGES])
}

/// Generator configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct PnConfig {
    n_stages: usize,
    /// Tapped stages, sorted descending (`[12, 6, 4, 1]`).
    taps: Vec<usize>,
    /// Bit `i - 1` holds stage `i`.
    seed: u32,
    chip_rate_hz: f64,
}

impl PnConfig {
    /// Configuration inside the IC's programmable range (`N = 5..=12`).
    pub fn new(n_stages: usize, taps: &[usize], seed: u32, chip_rate_hz: f64) -> Result<Self> {
        if !(MIN_STAGES..=MAX_STAGES).contains(&n_stages) {
            return Err(Error::StagesOutOfRange(n_stages));
        }
        Self::with_any_length(n_stages, taps, seed, chip_rate_hz)
    }

    /// Like [`PnConfig::new`] but accepts any register length from 2 to 24.
    /// Useful for short textbook sequences; the hardware cannot produce these.
    pub fn with_any_length(
        n_stages: usize,
        taps: &[usize],
        seed: u32,
        chip_rate_hz: f64,
    ) -> Result<Self> {
        if !(2..=MAX_SIM_STAGES).contains(&n_stages) {
            return Err(Error::StagesOutOfRange(n_stages));
        }
        let taps = normalize_taps(taps, n_stages)?;
        if seed == 0 {
            return Err(Error::ZeroSeed);
        }
        if seed >> n_stages != 0 {
            return Err(Error::SeedTooWide { seed, n_stages });
        }
        if !(chip_rate_hz.is_finite() && chip_rate_hz > 0.0) {
            return Err(Error::InvalidParameter {
                name: "chip_rate_hz",
                reason: format!("must be positive, got {chip_rate_hz}"),
            });
        }
        Ok(Self {
            n_stages,
            taps,
            seed,
            chip_rate_hz,
        })
    }

    /// Default taps for `n_stages` with the all-ones seed.
    pub fn standard(n_stages: usize, chip_rate_hz: f64) -> Result<Self> {
        let taps = default_taps(n_stages)?;
        Self::new(n_stages, taps, all_ones(n_stages), chip_rate_hz)
    }

    pub fn n_stages(&self) -> usize {
        self.n_stages
    }

    pub fn taps(&self) -> &[usize] {
        &self.taps
    }

    pub fn seed(&self) -> u32 {
        self.seed
    }

    pub fn chip_rate_hz(&self) -> f64 {
        self.chip_rate_hz
    }

    /// Period of a maximal-length sequence for this register, `2^N - 1`.
    pub fn maximal_length(&self) -> usize {
        (1usize << self.n_stages) - 1
    }

    pub fn with_chip_rate(&self, chip_rate_hz: f64) -> Result<Self> {
        Self::with_any_length(self.n_stages, &self.taps, self.seed, chip_rate_hz)
    }
}

/// Register state with every stage set.
pub fn all_ones(n_stages: usize) -> u32 {
    (1u32 << n_stages) - 1
}

fn normalize_taps(taps: &[usize], n_stages: usize) -> Result<Vec<usize>> {
    if taps.is_empty() {
        return Err(Error::InvalidTaps("tap set is empty".into()));
    }
    let mut t = taps.to_vec();
    t.sort_unstable_by(|a, b| b.cmp(a));
    t.dedup();
    if let Some(&bad) = t.iter().find(|&&s| s == 0 || s > n_stages) {
        return Err(Error::InvalidTaps(format!(
            "stage {bad} outside 1..={n_stages}"
        )));
    }
    if t[0] != n_stages {
        return Err(Error::InvalidTaps(format!(
            "output stage {n_stages} must be tapped"
        )));
    }
    Ok(t)
}

fn tap_mask(taps: &[usize]) -> u32 {
    taps.iter().fold(0, |m, &s| m | 1 << (s - 1))
}

/// Advances a Fibonacci register by one chip, returning the output bit.
#[inline]
fn step(state: &mut u32, mask: u32, n_stages: usize) -> u8 {
    let out = (*state >> (n_stages - 1)) & 1;
    let fb = (*state & mask).count_ones() & 1;
    *state = ((*state << 1) | fb) & all_ones(n_stages);
    out as u8
}

/// One period of generator output.
#[derive(Debug, Clone, PartialEq)]
pub struct ChipSequence {
    chips: Vec<u8>,
    config: PnConfig,
}

impl ChipSequence {
    pub fn chips(&self) -> &[u8] {
        &self.chips
    }

    pub fn config(&self) -> &PnConfig {
        &self.config
    }

    pub fn len(&self) -> usize {
        self.chips.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chips.is_empty()
    }

    pub fn is_maximal(&self) -> bool {
        self.chips.len() == self.config.maximal_length()
    }

    pub fn ones(&self) -> usize {
        self.chips.iter().filter(|&&c| c == 1).count()
    }

    pub fn zeros(&self) -> usize {
        self.chips.len() - self.ones()
    }

    /// Chip 1 maps to +1 and chip 0 to -1.
    pub fn to_bipolar(&self) -> Vec<i8> {
        to_bipolar(&self.chips)
    }
}

/// Chip 1 maps to +1 and chip 0 to -1.
pub fn to_bipolar(chips: &[u8]) -> Vec<i8> {
    chips.iter().map(|&c| if c != 0 { 1 } else { -1 }).collect()
}

/// Runs the register from its seed until the state repeats and returns that
/// cycle. For a maximal tap set this is `2^N - 1` chips.
pub fn generate(config: &PnConfig) -> ChipSequence {
    let n = config.n_stages;
    let mask = tap_mask(&config.taps);
    let mut state = config.seed;
    let mut chips = Vec::with_capacity(config.maximal_length());
    loop {
        chips.push(step(&mut state, mask, n));
        if state == config.seed {
            break;
        }
    }
    ChipSequence {
        chips,
        config: config.clone(),
    }
}

/// Cycle length of the register from `seed`.
fn period_from(taps: &[usize], n_stages: usize, seed: u32) -> usize {
    let mask = tap_mask(taps);
    let mut state = seed;
    let mut period = 0;
    loop {
        step(&mut state, mask, n_stages);
        period += 1;
        if state == seed {
            return period;
        }
    }
}

/// True iff the tap set yields a period of exactly `2^N - 1`, checked by
/// running the register through its cycle.
pub fn validate_maximal(taps: &[usize], n_stages: usize) -> Result<bool> {
    if !(2..=MAX_SIM_STAGES).contains(&n_stages) {
        return Err(Error::StagesOutOfRange(n_stages));
    }
    let taps = normalize_taps(taps, n_stages)?;
    Ok(period_from(&taps, n_stages, 1) == (1usize << n_stages) - 1)
}

fn parse_bits(word: &str, width: usize) -> Result<u32> {
    let bad = |reason: String| Error::InvalidWord {
        word: word.to_string(),
        reason,
    };
    if word.len() != width {
        return Err(bad(format!("expected {width} bits, got {}", word.len())));
    }
    word.chars().try_fold(0u32, |acc, c| match c {
        '0' => Ok(acc << 1),
        '1' => Ok((acc << 1) | 1),
        other => Err(bad(format!("unexpected character {other:?}"))),
    })
}

/// Decodes the 12-bit feedback switch word `SW<12:1>` (leftmost character is
/// bit 12). The output stage `n_stages` is always fed back, whether or not
/// its bit is set.
pub fn taps_from_switch_word(word: &str, n_stages: usize) -> Result<Vec<usize>> {
    if !(1..=MAX_STAGES).contains(&n_stages) {
        return Err(Error::StagesOutOfRange(n_stages));
    }
    let bits = parse_bits(word, 12)?;
    if bits >> n_stages != 0 {
        return Err(Error::InvalidWord {
            word: word.to_string(),
            reason: format!("bits set above stage {n_stages}"),
        });
    }
    let mut taps: Vec<usize> = (1..=n_stages)
        .filter(|i| bits >> (i - 1) & 1 == 1)
        .collect();
    if !taps.contains(&n_stages) {
        taps.push(n_stages);
    }
    taps.sort_unstable_by(|a, b| b.cmp(a));
    Ok(taps)
}

/// Encodes a tap set as `SW<12:1>`. The output stage bit is left clear,
/// matching the published word for `[12, 6, 4, 1]`.
pub fn switch_word_from_taps(taps: &[usize], n_stages: usize) -> Result<String> {
    if !(1..=MAX_STAGES).contains(&n_stages) {
        return Err(Error::StagesOutOfRange(n_stages));
    }
    let taps = normalize_taps(taps, n_stages)?;
    Ok((1..=12)
        .rev()
        .map(|i| {
            if i != n_stages && taps.contains(&i) {
                '1'
            } else {
                '0'
            }
        })
        .collect())
}

/// Decodes the 3-bit length word `S<2:0>`: `N = 5 + value`.
pub fn stages_from_length_word(word: &str) -> Result<usize> {
    Ok(MIN_STAGES + parse_bits(word, 3)? as usize)
}

pub fn length_word_from_stages(n_stages: usize) -> Result<String> {
    if !(MIN_STAGES..=MAX_STAGES).contains(&n_stages) {
        return Err(Error::StagesOutOfRange(n_stages));
    }
    Ok(format!("{:03b}", n_stages - MIN_STAGES))
}

/// Circular autocorrelation of the bipolar sequence at every lag.
pub fn circular_autocorrelation(seq: &ChipSequence) -> Vec<i64> {
    circular_autocorrelation_with(seq, Execution::default())
}

pub fn circular_autocorrelation_with(seq: &ChipSequence, exec: Execution) -> Vec<i64> {
    let b = seq.to_bipolar();
    let len = b.len();
    exec.map_range(len, |k| {
        b.iter()
            .zip(b.iter().cycle().skip(k))
            .map(|(&x, &y)| i64::from(x) * i64::from(y))
            .sum()
    })
}

/// Circular run-length histogram per symbol: run length -> count.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RunStats {
    pub ones: BTreeMap<usize, usize>,
    pub zeros: BTreeMap<usize, usize>,
}

impl RunStats {
    pub fn total_runs(&self) -> usize {
        self.ones.values().sum::<usize>() + self.zeros.values().sum::<usize>()
    }

    /// Runs of length `len` over both symbols.
    pub fn runs_of(&self, len: usize) -> usize {
        self.ones.get(&len).copied().unwrap_or(0) + self.zeros.get(&len).copied().unwrap_or(0)
    }
}

/// Run lengths of the sequence, treated as one circular period.
pub fn run_length_stats(seq: &ChipSequence) -> RunStats {
    run_lengths(seq.chips())
}

pub fn run_lengths(chips: &[u8]) -> RunStats {
    let mut stats = RunStats::default();
    let len = chips.len();
    if len == 0 {
        return stats;
    }
    let record = |stats: &mut RunStats, sym: u8, run: usize| {
        let hist = if sym == 1 {
            &mut stats.ones
        } else {
            &mut stats.zeros
        };
        *hist.entry(run).or_insert(0) += 1;
    };
    // start at a run boundary so no run wraps around the end
    let Some(start) = (0..len).find(|&i| chips[i] != chips[(i + len - 1) % len]) else {
        record(&mut stats, chips[0], len);
        return stats;
    };
    let mut run = 0;
    let mut sym = chips[start];
    for i in 0..len {
        let c = chips[(start + i) % len];
        if c == sym {
            run += 1;
        } else {
            record(&mut stats, sym, run);
            sym = c;
            run = 1;
        }
    }
    record(&mut stats, sym, run);
    stats
}
