//! Bands and gaps of a periodic potential.
use limitband::floquet::{band_spectrum, discriminant};
use limitband::potentials::PeriodicPotential;

fn main() -> limitband::Result<()> {
    let p = PeriodicPotential::new(vec![1.0, -0.5, 0.25, 0.0])?;
    let s = band_spectrum(&p, 1e-9)?;
    for (i, b) in s.bands().iter().enumerate() {
        let mid = 0.5 * (b[0] + b[1]);
        println!("band {i}: [{:.6}, {:.6}]  Delta(mid) = {:+.4}", b[0], b[1], discriminant(mid, &p));
    }
    for g in s.gaps() {
        println!("gap ({:.6}, {:.6}) width {:.3e}", g[0], g[1], g[1] - g[0]);
    }
    println!("total measure {:.6}", s.total_length());
    Ok(())
}
