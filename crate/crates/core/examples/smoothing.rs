//! `L^p → L^∞` smoothing: `t^{3/(2p)} ‖u(t)‖_∞ / ‖f‖_p` over `t ∈ [1, 10^4]`
//! for the corpus, next to the free-space constant from Young's inequality.
//!
//! `cargo run --release --example smoothing`

use std::f64::consts::PI;

use heatgrad::decay::{check_smoothing, time_grid};
use heatgrad::{corpus, Exponent};

fn main() -> heatgrad::Result<()> {
    let times = time_grid(1.0, 1e4, 8)?;
    for p in [1.0, 2.0] {
        let q: f64 = if p == 1.0 { f64::INFINITY } else { p / (p - 1.0) };
        let young = (4.0 * PI).powf(-1.5 / p) * if q.is_finite() { q.powf(-1.5 / q) } else { 1.0 };
        println!("p = {p}: free-space constant {young:.6e}");
        for datum in corpus::builtin() {
            let check = check_smoothing(&datum.exterior(Exponent::new(p)?)?, &times)?;
            let at = |t: f64| check.rows.iter().find(|r| r.0 == t).map_or(f64::NAN, |r| r.1);
            println!(
                "  {:<16} max {:.6e}   t=1: {:.4e}  t=1e4: {:.4e}",
                datum.name,
                check.max_ratio,
                at(1.0),
                at(1e4)
            );
        }
    }
    Ok(())
}
