//! Opening every gap of a potential with a single small perturbation.
use limitband::constructions::{analyze_gaps, open_all_gaps};
use limitband::potentials::PeriodicPotential;

fn main() -> limitband::Result<()> {
    let zero = PeriodicPotential::constant(0.0, 6);
    let before = analyze_gaps(&zero, 1e-9)?;
    println!("before: {} open, {} closed", before.open_gaps, before.closed_gaps);
    let (opened, report) = open_all_gaps(&zero, 0.1, 1e-9)?;
    println!(
        "after t = {:?}: {} open, smallest {:.4e}, perturbation {:.4}",
        report.perturbation_t,
        report.open_gaps,
        report.min_gap_size.unwrap_or(0.0),
        report.perturbation_size
    );
    println!("values {:?}", opened.values());
    Ok(())
}
