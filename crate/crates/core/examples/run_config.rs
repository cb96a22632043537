//! Build a run config in code, execute two commands and reread the manifest.

use hmimo::experiments::{execute, Axis, Command, EeConfig, Range, RunConfig};

fn main() -> hmimo::Result<()> {
    let mut cfg = RunConfig::new("example");
    cfg.sigma2_w = 1e-3;
    cfg.ee = Some(EeConfig {
        l_s: 5.0,
        l_r: 1.0,
        p_u: vec![0.001, 0.01, 1.0],
        n_s: Axis::Sweep(Range { start: None, stop: 300, step: 10 }),
        n_r: Axis::Optimal,
        oracle: true,
    });
    let out = std::env::temp_dir().join("hmimo-run-config-example");

    let run = execute(Command::EeSweep, &cfg, &out, 2)?;
    let csv = std::fs::read_to_string(&run.files[0])?;
    println!("{} rows in {}", csv.lines().count() - 1, run.files[0].display());
    for line in csv.lines().filter(|l| l.ends_with("optimum")) {
        println!("  {line}");
    }

    let run = execute(Command::Optimize, &cfg, &out, 0)?;
    let report: serde_json::Value = serde_json::from_str(run.stdout.as_deref().unwrap())?;
    for r in report["results"].as_array().unwrap() {
        println!("p_u {:<6} -> ({}, {}) {}", r["p_u"], r["Ns_opt"], r["Nr_opt"], r["case"]);
    }

    // the manifest is itself a valid config
    let again = RunConfig::load(&out.join("manifest.json"))?;
    assert_eq!(again.ee, cfg.ee);
    println!("manifest reloads to the same config");
    Ok(())
}
