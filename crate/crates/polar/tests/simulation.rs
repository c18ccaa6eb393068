//! Monte-Carlo behavior of the sweep harness at moderate scale.

use polar::channel::SnrConvention;
use polar::code::CodeSpec;
use polar::sc::CombineMode;
use polar::sim::{run_sweep, DecoderConfig, SimConfig};

/// FER declines with SNR, allowing adjacent confidence intervals to
/// overlap.
#[test]
fn fer_declines_with_snr() {
    let config = SimConfig {
        spec: CodeSpec::build(8, 128, None, 2.0).unwrap(),
        decoder: DecoderConfig::Sc {
            mode: CombineMode::Exact,
        },
        snr_points_db: vec![1.0, 2.0, 3.0],
        snr_convention: SnrConvention::EbN0,
        max_frames: 10_000,
        max_errors: 0,
        master_seed: 2024,
    };
    let report = run_sweep(&config, 0).unwrap();
    for pair in report.rows.windows(2) {
        let (lo, hi) = (&pair[0], &pair[1]);
        assert!(
            hi.fer <= lo.fer + lo.fer_ci95 + hi.fer_ci95,
            "FER rose from {} ({} dB) to {} ({} dB)",
            lo.fer,
            lo.snr_db,
            hi.fer,
            hi.snr_db
        );
    }
    // The spread over 2 dB is large enough to be meaningful.
    assert!(report.rows[0].fer > 4.0 * report.rows[2].fer.max(1e-4));
}

/// Min-sum decoding tracks the exact rule closely at these rates.
#[test]
fn min_sum_mode_is_close_to_exact() {
    let mk = |mode| SimConfig {
        spec: CodeSpec::build(7, 64, None, 2.0).unwrap(),
        decoder: DecoderConfig::Sc { mode },
        snr_points_db: vec![2.5],
        snr_convention: SnrConvention::EbN0,
        max_frames: 4_000,
        max_errors: 0,
        master_seed: 77,
    };
    let exact = run_sweep(&mk(CombineMode::Exact), 0).unwrap();
    let min_sum = run_sweep(&mk(CombineMode::MinSum), 0).unwrap();
    let (fe, fm) = (exact.rows[0].fer, min_sum.rows[0].fer);
    assert!(
        fm <= 2.0 * fe + 0.02 && fe <= 2.0 * fm + 0.02,
        "exact {fe} vs min-sum {fm}"
    );
}
