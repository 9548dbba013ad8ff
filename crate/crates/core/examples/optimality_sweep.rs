//! The extremal family `f_m`: `C_m`, `t_m = m²` and `Q_m = t_m^μ ‖∇u_m(t_m)‖_p`
//! with the stabilization ratios `Q_{2m}/Q_m`.
//!
//! `cargo run --release --example optimality_sweep`

use heatgrad::optimality::{optimality_sweep, scaled_cm, stabilization_ratios};
use heatgrad::Exponent;

fn main() -> heatgrad::Result<()> {
    let ms = [4, 8, 16, 32, 64, 128];
    for p in ["1", "2", "3", "6", "inf"] {
        let p: Exponent = p.parse()?;
        let records = optimality_sweep(p, &ms)?;
        println!("p = {p}");
        println!("  {:>5} {:>8} {:>14} {:>14} {:>12}", "m", "t_m", "C_m", "C_m m^(3/p-1)", "Q_m");
        for r in &records {
            println!(
                "  {:>5} {:>8} {:>14.6e} {:>14.8} {:>12.6}",
                r.m,
                r.t_m,
                r.c_m,
                scaled_cm(r.m, p)?,
                r.q_m
            );
        }
        let ratios: Vec<String> = stabilization_ratios(&records, 16)
            .iter()
            .map(|(m, x)| format!("Q_{}/Q_{m} = {x:.4}", 2 * m))
            .collect();
        println!("  {}\n", ratios.join(", "));
    }
    Ok(())
}
