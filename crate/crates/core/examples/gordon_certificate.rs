//! Certifying the Gordon condition in fixed-point arithmetic.
use limitband::constructions::cantor_iterate;
use limitband::potentials::{gordon_check, period_multiples, series_scales, LimitPeriodicPotential, PeriodicPotential};

fn main() -> limitband::Result<()> {
    let p = PeriodicPotential::new(vec![0.3, -1.0, 2.0])?;
    let cert = gordon_check(&LimitPeriodicPotential::from_periodic(p), &period_multiples(3, 5), 256)?;
    println!("periodic: valid {}", cert.valid());

    let f0 = PeriodicPotential::new(vec![0.0])?;
    let trail = cantor_iterate(&f0, &[2, 4, 8], 0.5, 3, 1e-9)?;
    let mut terms = vec![f0];
    terms.extend(trail.into_iter().map(|s| s.s_k));
    let v = LimitPeriodicPotential::from_tables(terms, 0.0)?;
    let cert = gordon_check(&v, &series_scales(&v, 3), 256)?;
    for s in &cert.scales {
        println!("q = {}: defect {:.3e}, log2 bound {:.2}, passes {}", s.q, s.defect, s.bound_log2, s.passes);
    }
    match gordon_check(&v, &[2, 4, 8], 8) {
        Err(e) => println!("8 bits: {e}"),
        Ok(c) => println!("8 bits: valid {}", c.valid()),
    }
    Ok(())
}
