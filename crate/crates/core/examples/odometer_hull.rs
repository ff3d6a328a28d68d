//! Odometer arithmetic on a frequency chain and hull isomorphism.
use std::sync::Arc;

use limitband::procyclic::{
    group_metric, hulls_isomorphic, is_generator, make_frequency_set, maximal_refinement, odometer_translate,
    OdometerPoint,
};
use num_bigint::BigInt;

fn main() -> limitband::Result<()> {
    let set = Arc::new(make_frequency_set(&[2, 6, 30, 210])?);
    println!("chain {set}, maximal refinement {}", maximal_refinement(&set));

    let e = OdometerPoint::generator(set.clone());
    let x = OdometerPoint::from_integer(set.clone(), &BigInt::from(-17));
    let y = odometer_translate(&x, &e, 40)?;
    println!("-17 + 40 = {:?}", y.residues());
    println!("d(-17, 23) = {}", group_metric(&x, &y)?);

    for k in [1, 11, 15] {
        println!("{k} generates: {}", is_generator(k, &set));
    }
    let other = make_frequency_set(&[6, 210])?;
    println!("isomorphic to {other}: {}", hulls_isomorphic(&set, &other));
    Ok(())
}
