//! Sweeps `‖∇u(t)‖_p` over `t ∈ [10^{-2}, 10^4]` for one corpus datum and fits
//! the large-time slope against `-μ(p)`.
//!
//! `cargo run --release --example gradient_decay -- [datum]` (default `indicator`)

use heatgrad::decay::{time_grid, upper_bound_sweep, LARGE_T_WINDOW, SLOPE_SLACK};
use heatgrad::optimality::mu;
use heatgrad::{corpus, Exponent};

fn main() -> heatgrad::Result<()> {
    let name = std::env::args().nth(1).unwrap_or_else(|| "indicator".into());
    let datum = corpus::find(&name)?;
    println!("{}: {}", datum.name, datum.summary);
    let times = time_grid(1e-2, 1e4, 8)?;
    println!(
        "{:>5} {:>6} {:>12} {:>12} {:>10} {:>10}  fit on [{:.0e}, {:.0e}]",
        "p", "μ", "sup t≤1", "sup t>1", "slope", "limit", LARGE_T_WINDOW.0, LARGE_T_WINDOW.1
    );
    for p in ["1", "2", "3", "6", "inf"] {
        let p: Exponent = p.parse()?;
        let (_, check) = upper_bound_sweep(&datum.exterior(p)?, &times)?;
        let slope = check.fit.map_or(f64::NAN, |f| f.slope);
        println!(
            "{p:>5} {:>6.3} {:>12.4e} {:>12.4e} {slope:>10.4} {:>10.4}  {}",
            mu(p),
            check.short_time_ratio,
            check.long_time_ratio,
            -mu(p) + SLOPE_SLACK,
            match check.slope_ok {
                Some(true) => "ok",
                Some(false) => "SLOW",
                None => "-",
            }
        );
    }
    Ok(())
}
