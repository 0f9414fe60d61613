//! Gaussian fixed point and involution of the radial Hankel-type transform.

use dunklpot::radial_transform::{hankel, sample_profile, DunklParams, GridSpec};

fn main() -> dunklpot::Result<()> {
    let grid = GridSpec::new(1e-3, 30.0, 600)?;
    let params = DunklParams::new(2, 0.6)?;
    let gauss = sample_profile(|r| (-0.5 * r * r).exp(), &grid)?;
    let image = hankel(&gauss, &params, &grid)?;
    println!("v = {}", params.v());
    println!("sup |H(G) - G| = {:.3e}", image.sup_distance(&gauss));

    let f = sample_profile(|r| (-r * r).exp() * (1.0 + r * r), &grid)?;
    let back = hankel(&hankel(&f, &params, &grid)?, &params, &grid)?;
    println!("sup |H(H(f)) - f| = {:.3e}", back.sup_distance(&f));
    for r in [0.0, 0.5, 1.0, 2.0] {
        println!("r = {r:4}: H(G)(r) = {:.12}  exp(-r^2/2) = {:.12}", image.eval(r), (-0.5 * r * r).exp());
    }
    Ok(())
}
