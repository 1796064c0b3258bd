//! Building a run configuration from JSON and running a command into a
//! temporary directory.
//!
//! ```bash
//! cargo run --release --example run_config
//! ```

use sgflux::cli::{cmd_figure2, RunConfig};

fn main() -> sgflux::Result<()> {
    let cfg = RunConfig::from_json(
        r#"{
            "preset": "paper-sec4",
            "antiparallel": true,
            "sweep": { "samples": 101, "y_min": -0.6, "y_max": 0.6 }
        }"#,
    )?;
    let out = std::env::temp_dir().join("sgflux-run-config-example");
    let s = cmd_figure2(&cfg, &out)?;
    println!("antiparallel mean {:.4} (reference {:.2}), crossings {:?}", s.average, s.reference_average, s.crossings);
    println!("files in {}", out.display());

    // Unknown keys are rejected.
    assert!(RunConfig::from_json(r#"{"tua": 1e-3}"#).is_err());
    Ok(())
}
