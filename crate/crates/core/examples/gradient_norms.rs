//! Builds exterior data from analytic pieces and computes `‖f‖_p` and
//! `‖∇u(t)‖_p` both through the half-line identity and directly in the
//! original radial variable.
//!
//! `cargo run --release --example gradient_norms`

use heatgrad::quadrature::{Form, RadialProfile, Segment};
use heatgrad::solver::{data_norm, gradient_norm, gradient_norm_direct, solution_sup_norm, ExteriorData};
use heatgrad::Exponent;

fn main() -> heatgrad::Result<()> {
    // F = 1 on (1, 2], continued by 4 r^{-2} e^{-(r-2)²}
    let mut tail = Form::power(4.0, -2.0);
    tail.gauss = Some(heatgrad::quadrature::GaussFactor { rate: 1.0, center: 2.0 });
    let profile = RadialProfile::new(vec![
        Segment::new(1.0, 2.0, Form::constant(1.0)),
        Segment::new(2.0, f64::INFINITY, tail),
    ])?;

    println!("{:>5} {:>8} {:>14} {:>22} {:>22} {:>10}", "p", "t", "‖f‖_p", "‖∇u‖_p (half-line)", "‖∇u‖_p (direct)", "rel diff");
    for p in ["1", "2", "3", "6", "inf"] {
        let p: Exponent = p.parse()?;
        let data = ExteriorData::new(profile.clone(), p)?;
        for t in [0.1, 1.0, 100.0] {
            let fast = gradient_norm(&data, t)?;
            let direct = gradient_norm_direct(&data, t)?;
            println!(
                "{p:>5} {t:>8} {:>14.6e} {fast:>22.15e} {direct:>22.15e} {:>10.2e}",
                data_norm(&data)?,
                (fast / direct - 1.0).abs()
            );
        }
    }
    let data = ExteriorData::new(profile, Exponent::ONE)?;
    println!("\n‖u(10)‖_∞ = {:.6e}", solution_sup_norm(&data, 10.0)?);
    Ok(())
}
