//! Riesz, Bessel and Flett potentials of a Gaussian, by spectral multipliers
//! and by the time integrals of the semigroups.

use dunklpot::potentials::{
    biparametric, biparametric_via_time_integral, riesz, riesz_via_time_integral, PotentialSpec,
};
use dunklpot::radial_transform::{sample_profile, DunklParams, GridSpec};

fn main() -> dunklpot::Result<()> {
    let params = DunklParams::new(2, 0.6)?;
    let grid = GridSpec::new(1e-3, 20.0, 400)?;
    let f = sample_profile(|r| (-0.5 * r * r).exp(), &grid)?;

    let spec = PotentialSpec::riesz(1.0, params)?;
    let direct = riesz(&f, &spec)?;
    for beta in [1.0, 2.0, 3.0] {
        let via = riesz_via_time_integral(&f, &spec, beta)?;
        println!("Riesz alpha = 1, beta = {beta}: sup gap {:.3e}", direct.sup_distance(&via));
    }
    let tail = direct.tail().expect("Riesz potentials carry their power tail");
    println!("Riesz tail leading exponent {}", tail.leading_exponent());

    for (name, spec) in [
        ("Bessel", PotentialSpec::bessel(1.5, params)?),
        ("Flett", PotentialSpec::flett(1.5, params)?),
        ("beta = 0.7", PotentialSpec::biparametric(1.5, 0.7, params)?),
    ] {
        let a = biparametric(&f, &spec)?;
        let b = biparametric_via_time_integral(&f, &spec)?;
        println!("{name:>10}: value at origin {:.10}, route gap {:.3e}", a.origin_value(), a.sup_distance(&b));
    }
    Ok(())
}
