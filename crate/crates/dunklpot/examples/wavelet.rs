//! Wavelet measures with vanishing moments and their normalizing constants.

use dunklpot::wavelet::{construct_vanishing_moments, WaveletMeasure};

fn main() -> dunklpot::Result<()> {
    let nu = construct_vanishing_moments(&[1.0, 2.0, 3.0], 1)?;
    println!("measure {nu} with {} vanishing moments", nu.vanishing_order() + 1);
    for r in [0.5, 1.0, 1.5] {
        println!(
            "C({r}, nu): closed form {:.12}, by quadrature {:.12}",
            nu.normalizing_constant(r)?,
            nu.normalizing_constant_via_mu(r, 1e-10)?
        );
    }
    println!("integral of K_1/2 = {:.10}", nu.rl_kernel_integral(0.5, 1e-8)?);

    let simple: WaveletMeasure = "1:1,2:-1".parse()?;
    for t in [1e-3, 0.1, 1.0, 10.0] {
        println!("mu({t}) = {:.6e}", simple.laplace_transform(t));
    }
    println!("kappa(1/2) = {}", simple.kappa(0.5));
    Ok(())
}
