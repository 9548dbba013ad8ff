//! Half-line kernels: the image difference, its r-derivative, the recombined
//! gradient kernel K and erf/erfc.
//!
//! `cargo run --release --example kernels`

use heatgrad::special_kernels::{
    erf, erfc, gaussian_1d, half_line_dirichlet_kernel, half_line_dirichlet_kernel_dr, optimality_kernel,
    KernelPoint,
};

fn main() -> heatgrad::Result<()> {
    println!("erf(0.5) = {:.17}, erfc(6) = {:.6e}", erf(0.5), erfc(6.0));
    println!("G(1, 0) = {:.17}", gaussian_1d(1.0, 0.0)?);

    println!("\n{:>8} {:>8} {:>8} {:>24} {:>24}", "t", "r", "s", "G_D(t,r,s)", "∂_r G_D");
    for (t, r, s) in [(1.0, 0.0, 1.0), (1.0, 0.5, 1.0), (1e6, 1e-3, 1e-3), (0.01, 5.0, 5.2)] {
        let pt = KernelPoint::new(t, r, s)?;
        println!(
            "{t:>8.0e} {r:>8} {s:>8} {:>24.16e} {:>24.16e}",
            half_line_dirichlet_kernel(pt),
            half_line_dirichlet_kernel_dr(pt)
        );
    }

    // at large t and small r, s the naive difference of exponentials cancels to nothing
    let (t, r, s) = (1e6f64, 1e-3, 1e-3);
    let naive = (-(r - s) * (r - s) / (4.0 * t)).exp() - (-(r + s) * (r + s) / (4.0 * t)).exp();
    let pt = KernelPoint::new(t, r, s)?;
    println!(
        "\nimage difference at t = 1e6, r = s = 1e-3: naive {naive:.3e}, factorized {:.16e}",
        half_line_dirichlet_kernel(pt) * (4.0 * std::f64::consts::PI * t).sqrt()
    );

    let m = 20_000.0f64;
    println!("\nm K(m², r, s) for m = {m}:");
    for (r, s) in [(10.0, m), (10.0, 2.0 * m), (11.8, 2.0 * m)] {
        println!("  r = {r:>5}, s = {s:>7}: {:.6e}", m * optimality_kernel(m * m, r, s)?);
    }
    Ok(())
}
