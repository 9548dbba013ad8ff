//! Evolves two data sets with known solutions and prints the relative error:
//! `g(s) = s e^{-s²/4}` (exact solution `r (1+t)^{-3/2} e^{-r²/4(1+t)}`) and
//! the indicator of `(1, 2]` (erf closed form).
//!
//! `cargo run --release --example exact_evolution`

use heatgrad::solver::SolutionField;
use heatgrad::validate::{indicator_solution, moment_profile, moment_solution, moment_solution_dr, relative_error};
use heatgrad::quadrature::RadialProfile;

fn main() -> heatgrad::Result<()> {
    let g = moment_profile();
    println!("g(s) = s e^(-s²/4)");
    println!("{:>8} {:>8} {:>24} {:>10} {:>10}", "t", "r", "v", "err v", "err ∂_r v");
    for t in [1e-2, 1.0, 1e2, 1e4] {
        let field = SolutionField::new(&g, t)?;
        for r in [0.5, 3.0, 40.0] {
            let (v, dv) = field.pair(r);
            println!(
                "{t:>8.0e} {r:>8} {v:>24.16e} {:>10.2e} {:>10.2e}",
                relative_error(v, moment_solution(t, r)),
                relative_error(dv, moment_solution_dr(t, r))
            );
        }
    }

    let g = RadialProfile::indicator(1.0, 2.0, 1.0)?;
    println!("\ng = 1 on (1, 2]");
    println!("{:>8} {:>8} {:>24} {:>10}", "t", "r", "v", "err v");
    for t in [1e-2, 1.0, 1e2] {
        let field = SolutionField::new(&g, t)?;
        for r in [0.0, 1.5, 10.0] {
            let v = field.v(r);
            println!("{t:>8.0e} {r:>8} {v:>24.16e} {:>10.2e}", relative_error(v, indicator_solution(t, r, 1.0, 2.0)));
        }
    }
    Ok(())
}
