//! How far a unimodular matrix can shrink or stretch angles.
use limitband::cocycle::{angle_distortion_bounds, image_angle, transfer_matrix};
use limitband::potentials::PeriodicPotential;

fn main() -> limitband::Result<()> {
    let p = PeriodicPotential::new(vec![0.5, -0.7])?;
    let m = transfer_matrix(1.1, &p, 0, 6);
    let (lo, hi) = angle_distortion_bounds(&m)?;
    println!("norm {:.4}, factors [{lo:.4e}, {hi:.4e}]", m.norm());
    for (u, v) in [([1.0, 0.0], [0.0, 1.0]), ([1.0, 0.1], [1.0, 0.2]), ([0.3, -1.0], [-0.2, 1.0])] {
        let (before, after) = image_angle(&m, u, v);
        println!("angle {before:.4} -> {after:.4}, ratio {:.4}", after / before);
    }
    Ok(())
}
