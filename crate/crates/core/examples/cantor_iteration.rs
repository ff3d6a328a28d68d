//! Stagewise gap opening over a period basis, with persistence of old gaps.
use limitband::constructions::{cantor_iterate, retained_fraction};
use limitband::floquet::band_spectrum;
use limitband::potentials::PeriodicPotential;

fn main() -> limitband::Result<()> {
    let f0 = PeriodicPotential::new(vec![0.0])?;
    let basis = [2, 4, 8, 16];
    let trail = cantor_iterate(&f0, &basis, 0.5, 3, 1e-9)?;
    for s in &trail {
        println!(
            "stage {} period {:>2}: |s_k| = {:.3e}, budget {:.3e}, smallest gap {:.3e}",
            s.stage,
            s.period,
            s.s_k.sup_norm(),
            s.budget,
            s.min_gap.unwrap_or(0.0)
        );
    }
    let last = band_spectrum(&trail.last().unwrap().f_k, 1e-9)?;
    for g in band_spectrum(&trail[0].f_k, 1e-9)?.gaps() {
        println!("stage-1 gap {g:?} retains {:.3} of its width", retained_fraction(g, &last));
    }
    // The stage budget eventually drops below what the gap tolerance resolves.
    if let Err(e) = cantor_iterate(&f0, &basis, 0.5, 4, 1e-9) {
        println!("four stages: {e}");
    }
    Ok(())
}
