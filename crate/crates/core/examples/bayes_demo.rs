//! Prior impact and nonparametric-Bayes coverage for a linear Gaussian
//! model, exact against Monte Carlo.
//!
//! cargo run --release --example bayes_demo

use ballprob::bayesdemo::{self, scenario_suite};
use ballprob::quadform::InversionConfig;
use nalgebra::DMatrix;

fn main() -> ballprob::Result<()> {
    let cfg = InversionConfig::default();
    let sc = &scenario_suite()[0];
    let model = sc.model()?;
    let (g, g1) = (sc.g_sq()?, sc.g1_sq()?);
    let w = DMatrix::identity(model.p(), model.p());

    let (impact, coverage) = sc.run(&cfg)?;
    let r = impact.extras["radius"];
    let mc = bayesdemo::prior_impact_monte_carlo(&model, &g, &g1, &w, r, 100_000, 11)?;
    println!(
        "prior impact   |Δ| {:.5}  rhs {:.4}  exceedance {:.5}  mc {mc:.5}",
        impact.observed, impact.extras["rhs"], impact.extras["exceedance"]
    );

    let a = DMatrix::identity(model.n(), model.n());
    let r = coverage.extras["radius"];
    let mc = bayesdemo::coverage_monte_carlo(&model, &g, &a, r, 100_000, 12)?;
    println!(
        "coverage miss  exact {:.5}  mc {mc:.5}  α={}",
        coverage.extras["miss_probability"], sc.alpha
    );

    // weak data, very unequal priors: the Pinsker baseline blows up
    let (bad, _) = bayesdemo::ill_conditioned_scenario().run(&cfg)?;
    println!(
        "ill-conditioned |Δ| {:.4}  rhs {:.4}  pinsker {:.4e}",
        bad.observed, bad.extras["rhs"], bad.extras["pinsker"]
    );
    Ok(())
}
