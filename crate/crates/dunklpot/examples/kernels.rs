//! Kernels of the beta-semigroup: closed forms, quadrature and the power tail.

use dunklpot::radial_transform::{DunklParams, GridSpec};
use dunklpot::semigroup::{kernel_closed_form, kernel_profile, kernel_value, tail_slope, SemigroupSpec};

fn main() -> dunklpot::Result<()> {
    let params = DunklParams::new(2, 0.5)?;
    println!("{:>6} {:>22} {:>22}", "r", "beta = 1", "beta = 2");
    for r in [0.0, 0.1, 1.0, 5.0, 20.0] {
        let poisson = kernel_closed_form(&SemigroupSpec::new(1.0, 1.0, params)?, r)?;
        let heat = kernel_closed_form(&SemigroupSpec::new(2.0, 1.0, params)?, r)?;
        println!("{r:>6} {poisson:>22.15e} {heat:>22.15e}");
    }

    let grid = GridSpec::new(1e-2, 1e3, 400)?;
    for beta in [0.5, 1.0, 1.5] {
        let spec = SemigroupSpec::new(beta, 1.0, params)?;
        let w = kernel_profile(&spec, &grid)?;
        let slope = tail_slope(&w, (100.0, 1000.0))?;
        println!(
            "beta = {beta}: W(0) = {:.10}, W(1) = {:.10}, tail slope {:.4} (n + 2 gamma + beta = {})",
            w.origin_value(),
            kernel_value(&spec, 1.0)?,
            slope,
            params.homogeneity() + beta
        );
    }

    let w4 = kernel_profile(&SemigroupSpec::new(4.0, 1.0, params)?, &GridSpec::new(1e-2, 20.0, 200)?)?;
    let min = w4.values().iter().cloned().fold(f64::INFINITY, f64::min);
    println!("beta = 4 is not positive: min W = {min:.4e}");
    Ok(())
}
