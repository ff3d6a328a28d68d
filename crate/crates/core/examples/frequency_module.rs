//! Recovering the frequencies of a limit-periodic potential from a window.
use limitband::potentials::{estimate_frequency_module, hull_metric_potential};
use limitband::procyclic::make_frequency_set;

fn main() -> limitband::Result<()> {
    let v = hull_metric_potential(&make_frequency_set(&[2, 4, 8])?);
    let alphas: Vec<f64> = (0..16).map(|j| j as f64 / 16.0).collect();
    let report = estimate_frequency_module(&v, &alphas, 4096)?;
    for (entry, present) in report.entries.iter().zip(report.above(1e-6)) {
        println!("alpha {:.4}: |a| = {:.3e} {}", entry.alpha, entry.amplitude_modulus, if present { "*" } else { "" });
    }
    Ok(())
}
