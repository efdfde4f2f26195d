use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use sounderlab_core::analysis::power_spectrum_with;
use sounderlab_core::pnseq::{circular_autocorrelation_with, generate, PnConfig};
use sounderlab_core::sounder::{
    discrete_correlation_with, sliding_correlate_direct_with, sliding_correlate_fast, SounderConfig,
};
use sounderlab_core::Execution;

const STRATEGIES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn autocorrelation(c: &mut Criterion) {
    let mut g = c.benchmark_group("autocorrelation");
    for n in [10, 12] {
        let seq = generate(&PnConfig::standard(n, 1e9).unwrap());
        for (name, exec) in STRATEGIES {
            g.bench_with_input(BenchmarkId::new(name, seq.len()), &seq, |b, s| {
                b.iter(|| circular_autocorrelation_with(s, exec))
            });
        }
    }
    g.finish();
}

fn discrete(c: &mut Criterion) {
    let mut g = c.benchmark_group("discrete_correlation");
    let cfg = SounderConfig::with_gamma(PnConfig::standard(8, 1e9).unwrap(), 100.0, 10).unwrap();
    let s = cfg.transmit_waveform().real_part();
    for (name, exec) in STRATEGIES {
        g.bench_function(name, |b| {
            b.iter(|| discrete_correlation_with(&s, &s, 1e-10, exec).unwrap())
        });
    }
    g.finish();
}

fn direct(c: &mut Criterion) {
    let mut g = c.benchmark_group("direct_oracle");
    g.sample_size(10);
    let cfg = SounderConfig::with_gamma(PnConfig::standard(7, 1e6).unwrap(), 150.0, 10).unwrap();
    let rx = cfg.transmit_waveform();
    for (name, exec) in STRATEGIES {
        g.bench_function(name, |b| {
            b.iter(|| sliding_correlate_direct_with(&rx, &cfg, exec).unwrap())
        });
    }
    g.finish();
}

fn spectrum(c: &mut Criterion) {
    let mut g = c.benchmark_group("power_spectrum");
    g.sample_size(10);
    let cfg = SounderConfig::with_gamma(PnConfig::standard(12, 1e9).unwrap(), 20000.0, 10).unwrap();
    let tx = cfg.transmit_waveform();
    let res = tx.sample_rate_hz() / tx.len() as f64;
    let w = tx.repeat(8);
    for (name, exec) in STRATEGIES {
        g.bench_function(name, |b| {
            b.iter(|| power_spectrum_with(&w, res, exec).unwrap())
        });
    }
    g.finish();
}

/// Full-size sequence and slide factor through the FFT correlator.
fn full_scale(c: &mut Criterion) {
    let mut g = c.benchmark_group("fast_correlator");
    g.sample_size(10);
    let cfg = SounderConfig::new(PnConfig::standard(12, 1e9).unwrap(), 999.95e6, 10).unwrap();
    let rx = cfg.transmit_waveform();
    g.bench_function("L4095_gamma20000", |b| {
        b.iter(|| sliding_correlate_fast(&rx, &cfg).unwrap())
    });
    g.finish();
}

criterion_group!(
    benches,
    autocorrelation,
    discrete,
    direct,
    spectrum,
    full_scale
);
criterion_main!(benches);
