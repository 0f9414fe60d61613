//! Applying the heat and Poisson semigroups to a profile.

use dunklpot::radial_transform::{normalized_weighted_norm, sample_profile, DunklParams, GridSpec};
use dunklpot::semigroup::{apply_semigroup, SemigroupSpec};

fn main() -> dunklpot::Result<()> {
    let params = DunklParams::new(3, 0.25)?;
    let grid = GridSpec::new(1e-3, 1e3, 700)?;
    let f = sample_profile(|r| (-0.5 * r * r).exp(), &grid)?;
    let h = params.homogeneity() / 2.0;
    for t in [0.01, 0.1, 0.5, 2.0] {
        let heat = apply_semigroup(&f, &SemigroupSpec::new(2.0, t, params)?)?;
        let s = 1.0 + 2.0 * t;
        let exact = s.powf(-h);
        let poisson = apply_semigroup(&f, &SemigroupSpec::new(1.0, t, params)?)?.with_fitted_tail();
        println!(
            "t = {t:5}: heat(0) = {:.12} (closed form {exact:.12}), poisson(0) = {:.12}, poisson mass = {:.8}",
            heat.origin_value(),
            poisson.origin_value(),
            normalized_weighted_norm(&poisson, 1.0, &params)?
        );
    }
    Ok(())
}
