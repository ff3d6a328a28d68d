//! Iterated block concatenation and the cover sums of its spectra.
use limitband::constructions::{block_cascade, block_concatenate, cascade_cover_sums};
use limitband::potentials::PeriodicPotential;

fn main() -> limitband::Result<()> {
    let base = vec![PeriodicPotential::new(vec![0.0])?, PeriodicPotential::new(vec![5.0])?];
    let one = block_concatenate(&base, 8, 2, &[1, 0])?;
    println!("layout {:?}", one.layout);
    println!("values {:?}", one.potential.values());

    let t_vectors = [vec![0, 0], vec![1, 0]];
    let levels = block_cascade(&base, &[8, 64, 512], 2, &t_vectors)?;
    for alpha in [1.0, 0.5, 0.25] {
        let sums = cascade_cover_sums(&levels, 1.0, alpha)?;
        let row: Vec<String> = sums.iter().map(|s| format!("{:.4}", s.sum)).collect();
        println!("alpha {alpha}: {}", row.join("  "));
    }
    Ok(())
}
