//! Pointwise convergence rates at the origin against eta(Y(eps)).

use dunklpot::inversion::InversionSpec;
use dunklpot::radial_transform::{sample_profile, DunklParams, GridSpec};
use dunklpot::rates::{convergence_rate, smoothness_constant_at_origin, Modulus};

fn main() -> dunklpot::Result<()> {
    let params = DunklParams::new(3, 0.0)?;
    let f = sample_profile(|r| (-0.5 * r * r).exp(), &GridSpec::new(1e-3, 30.0, 600)?)?;
    let eta = Modulus::power(1.0, 1.0, 0.5)?;
    println!("N_eta f(0) = {:.8}", smoothness_constant_at_origin(&f, &eta, &params)?);

    let eps: Vec<f64> = (0..8).map(|i| 10f64.powf(-1.0 - 3.0 * i as f64 / 7.0)).collect();
    for (beta, alpha, nu) in [(2.0, 1.0, "1:1,2:-1"), (1.0, 1.0, "1:1,2:-2,3:1"), (0.5, 0.25, "1:1,2:-1")] {
        for spec in [
            InversionSpec::riesz(nu.parse()?, alpha, beta, params)?,
            InversionSpec::biparametric(nu.parse()?, alpha, beta, params)?,
        ] {
            let rep = convergence_rate(&f, &spec, &eta, &eps)?;
            println!(
                "{:?} beta = {beta}: slope {:.3} (predicted {:.3}), passed {}",
                spec.kind, rep.fitted_slope, rep.predicted_exponent, rep.passed
            );
        }
    }
    Ok(())
}
