//! Opt-in scale rehearsals, excluded from the default run:
//! `cargo test -p ontomat --test stretch -- --ignored --nocapture`

use ontomat::bench::{self, BenchConfig, RowStatus};
use ontomat::synth::{self, ScaledProfile};
use std::time::Duration;

/// Saturates a dataset with a multi-million-instance roster: the term
/// dictionary and A-box dominate memory here, unlike the acceptance
/// budget run whose cost is inference volume.
#[test]
#[ignore = "several minutes; run explicitly"]
fn mid_scale_streaming_rehearsal() {
    let dir = tempfile::tempdir().unwrap();
    let dump = dir.path().join("mid.nt");
    let profile = ScaledProfile {
        n_classes: 400_000,
        n_restrictions: 50_000,
        n_instances: 6_000_000,
        n_properties: 338,
        seed: 7,
    };
    let summary = synth::write_scaled_dataset_file(&dump, &profile).unwrap();
    println!("generated {} triples", summary.n_triples);

    let threads = std::thread::available_parallelism()
        .map(|n| n.get().min(8))
        .unwrap_or(1);
    let config = BenchConfig {
        dataset_paths: vec![dump],
        timeout: Duration::from_secs(2 * 3600),
        threads,
        streaming: true,
        ..Default::default()
    };
    let report = bench::run_benchmark(&config).unwrap();
    let row = &report.rows[0];
    println!("{}", report.to_csv());
    assert_eq!(row.status, RowStatus::Ok);
    assert!(bench::peak_rss_mb() < 16 * 1024);
}
