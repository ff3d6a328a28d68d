//! Distal and Pöschel-type potentials and their site separations.
use limitband::potentials::{
    distal_potential, distal_separation_bound, poschel_potential, select_distal_subset, Potential,
};
use limitband::procyclic::make_frequency_set;

fn min_separation(v: &impl Potential, k: i64, reach: i64) -> f64 {
    (-reach..=reach)
        .map(|i| (v.value(i) - v.value(i + k)).abs())
        .fold(f64::INFINITY, f64::min)
}

fn main() -> limitband::Result<()> {
    let chain = make_frequency_set(&[2, 4, 8, 64, 512, 4096])?;
    let set = select_distal_subset(&chain, 2)?;
    let v = distal_potential(&set, 2)?;
    println!("distal chain {set}");
    for k in [1u64, 2, 3, 7, 100] {
        let bound = distal_separation_bound(&set, 2, k);
        println!("k = {k:>3}: min separation {:.4e}, bound {bound}", min_separation(&v, k as i64, 2000));
    }

    let w = poschel_potential(10)?;
    for k in [1i64, 3, 15] {
        println!("poschel k = {k:>2}: 16 k min separation {:.4}", 16.0 * k as f64 * min_separation(&w, k, 900));
    }
    Ok(())
}
