//! A reduced version of the synthetic benchmark: both algorithms on one grid
//! point, printed as a summary table and written as CSV.
//!
//! cargo run --release --example small_benchmark -- [trials] [kappa] [out.csv]

use atds::experiments::{run_trials, write_csv, Algorithm, TrialConfig};

fn main() -> atds::Result<()> {
    let mut args = std::env::args().skip(1);
    let trials: usize = args.next().map_or(10, |s| s.parse().expect("trials"));
    let kappa: f64 = args.next().map_or(5.0, |s| s.parse().expect("kappa"));
    let out = args.next();

    let mut batches = Vec::new();
    for algorithm in [Algorithm::Atds, Algorithm::Shrt] {
        let cfg = TrialConfig {
            kappa,
            algorithm,
            ..TrialConfig::default()
        };
        batches.push(run_trials(&cfg, trials)?);
    }

    println!("n = 5, K = 20, SNR = 50 dB, kappa = {kappa}, {trials} trials");
    println!(
        "{:<6} {:>9} {:>9} {:>10} {:>10}",
        "algo", "thresh", "success", "mean it", "mean ms"
    );
    for b in &batches {
        for t in &b.summary.thresholds {
            println!(
                "{:<6} {:>9.0e} {:>8.0}% {:>10} {:>10}",
                b.config.algorithm.as_str(),
                t.threshold,
                100.0 * t.success_rate,
                t.mean_iterations.map_or("-".into(), |v| format!("{v:.2}")),
                t.mean_wall_ms.map_or("-".into(), |v| format!("{v:.2}")),
            );
        }
        println!(
            "{:<6} mean err_S {:.3e}",
            b.config.algorithm.as_str(),
            b.summary.mean_err_s
        );
    }
    if let Some(path) = out {
        write_csv(std::fs::File::create(&path)?, &batches)?;
        println!("wrote {path}");
    }
    Ok(())
}
