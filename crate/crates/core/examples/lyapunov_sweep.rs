//! Lyapunov exponent across an energy range, with the long-product cross-check.
use limitband::cocycle::{lyapunov_limit, lyapunov_periodic, lyapunov_product};
use limitband::potentials::{hull_metric_potential, PeriodicPotential};
use limitband::procyclic::make_frequency_set;

fn main() -> limitband::Result<()> {
    let p = PeriodicPotential::new(vec![1.5, -1.0, 0.5])?;
    println!("E, L, product estimate");
    for i in 0..=12 {
        let e = -5.0 + 10.0 * i as f64 / 12.0;
        let l = lyapunov_periodic(e, &p).exponent;
        println!("{e:+.3}, {l:.6}, {:.6}", lyapunov_product(e, &p, 30_000));
    }

    // Along the approximants of a limit-periodic potential.
    let v = hull_metric_potential(&make_frequency_set(&[2, 4, 8, 16, 32, 64])?);
    let approximants = (1..=v.depth()).map(|d| v.approximant(d)).collect::<limitband::Result<Vec<_>>>()?;
    let limit = lyapunov_limit(3.0, &approximants, 1e-6)?;
    for s in &limit.trail {
        println!("period {:>2}: L(3) = {:.6}", s.period_used, s.exponent);
    }
    println!("converged at 1e-6: {}", limit.converged);
    Ok(())
}
