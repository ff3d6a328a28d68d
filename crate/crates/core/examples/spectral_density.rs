//! Spectral measure density of a finitely supported vector, and its integrals.
use limitband::floquet::{density_integral, density_lt_norm, density_profile, parseval_integral, FiniteVector};
use limitband::potentials::PeriodicPotential;

fn main() -> limitband::Result<()> {
    let p = PeriodicPotential::new(vec![0.8, -0.3, 0.0])?;
    let u = FiniteVector::new([(0, 1.0), (2, -0.5)]);
    let energies: Vec<f64> = (0..=40).map(|i| -3.0 + 6.5 * i as f64 / 40.0).collect();
    let profile = density_profile(&p, &u, &energies)?;
    for (e, g) in profile.samples.iter().step_by(4) {
        println!("g({e:+.4}) = {g:.6}");
    }
    println!("|u|^2 = {}", u.norm_sq());
    println!("quasimomentum integral {:.10}", parseval_integral(&p, &u)?);
    println!("energy integral        {:.10}", density_integral(&p, &u)?);
    println!("L^1.5 norm             {:.10}", density_lt_norm(&p, &u, 1.5)?);
    Ok(())
}
