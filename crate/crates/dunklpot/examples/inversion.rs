//! Recovering a Gaussian from its Riesz and Bessel potentials with truncated
//! wavelet integrals.

use dunklpot::inversion::{truncated_biparam_inverse_sweep, truncated_riesz_inverse_sweep, InversionSpec};
use dunklpot::potentials::{biparametric, riesz, PotentialSpec};
use dunklpot::radial_transform::{sample_profile, DunklParams, GridSpec};
use dunklpot::wavelet::WaveletMeasure;

fn main() -> dunklpot::Result<()> {
    let params = DunklParams::new(3, 0.0)?;
    let grid = GridSpec::new(1e-3, 20.0, 400)?;
    let f = sample_profile(|r| (-0.5 * r * r).exp(), &grid)?;
    let eps = [1e-1, 1e-2, 1e-3, 1e-4];

    for nu in ["1:1,2:-1", "1:1,2:-2,3:1"] {
        let nu: WaveletMeasure = nu.parse()?;
        let spec = InversionSpec::riesz(nu.clone(), 1.0, 2.0, params)?;
        let c = spec.constant()?;
        let g = riesz(&f, &PotentialSpec::riesz(1.0, params)?)?;
        println!("Riesz, nu = {nu}, C = {c:.10}");
        for (e, out) in eps.iter().zip(truncated_riesz_inverse_sweep(&g, &spec, &eps)?) {
            println!("  eps = {e:.0e}: sup error {:.4e}", out.scaled(1.0 / c).sup_distance(&f));
        }

        let spec = InversionSpec::biparametric(nu, 1.0, 2.0, params)?;
        let g = biparametric(&f, &PotentialSpec::bessel(1.0, params)?)?;
        println!("Bessel, same measure");
        for (e, out) in eps.iter().zip(truncated_biparam_inverse_sweep(&g, &spec, &eps)?) {
            println!("  eps = {e:.0e}: sup error {:.4e}", out.scaled(1.0 / c).sup_distance(&f));
        }
    }
    Ok(())
}
