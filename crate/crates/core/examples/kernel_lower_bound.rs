//! `m K(m², r, s)` on `10 ≤ r ≤ m^{1/4}`, `m ≤ s ≤ 2m`, compared with the
//! large-m leading term and with the expansion to first order in `rs/m²`.
//!
//! `cargo run --release --example kernel_lower_bound`

use heatgrad::optimality::check_kernel_lower_bound;

fn main() -> heatgrad::Result<()> {
    for m in [20_000, 100_000, 1_000_000] {
        let rec = check_kernel_lower_bound(m)?;
        println!(
            "m = {m}: min m·K = {:.6e} at r = {:.3}, s = {:.0}",
            rec.min_scaled, rec.argmin.0, rec.argmin.1
        );
        println!(
            "  worst deviation / (10 r²/m): leading term {:.2}, first order in rs/m² {:.2e}",
            rec.max_expansion_ratio, rec.max_consistent_ratio
        );
        println!("  {:>8} {:>9} {:>14} {:>14}", "r", "s", "m·K", "m·leading");
        for s in rec.samples.iter().filter(|s| s.r == 10.0).step_by(8) {
            println!("  {:>8.3} {:>9.0} {:>14.6e} {:>14.6e}", s.r, s.s, s.scaled, m as f64 * s.leading_term);
        }
    }
    Ok(())
}
