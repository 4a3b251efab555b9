//! Transfer matrix of two separated packets: direct 3×3 integration against the product
//! of embedded 2×2 packet matrices, in both orders.
//!
//! cargo run --release --example transfer_product

use num_complex::Complex64;
use twri::ensemble::{compose_transfer_product, ProductOrder};
use twri::model::{ModelParams, Packet, Shape};
use twri::ode::Tolerance;
use twri::oracle::{packets_window, transfer_matrix};

fn main() -> twri::Result<()> {
    let params = ModelParams::with_epsilon(0.4)?;
    let ps = vec![
        Packet::with_support(1, Shape::Sech, 1.0, 1.0, -6.0, 5.5, 1e-2)?,
        Packet::with_support(2, Shape::Gaussian, 0.9, 1.0, 6.0, 4.0, 1e-2)?,
    ];
    let window = packets_window(&ps).expect("packets");
    let tol = Tolerance::default();
    for lambda in [Complex64::new(0.3, 0.0), Complex64::new(-0.5, 0.4), Complex64::new(0.2, -0.7)] {
        let direct = transfer_matrix(&ps, lambda, &params, window, tol)?;
        let scale = direct.max_abs().max(1.0);
        let rl = compose_transfer_product(&params, &ps, lambda, ProductOrder::RightToLeft, tol)?;
        let lr = compose_transfer_product(&params, &ps, lambda, ProductOrder::LeftToRight, tol)?;
        println!(
            "lambda {lambda:.2}: |T| {scale:.2e}, right-to-left error {:.2e}, left-to-right error {:.2e}, |det - 1| {:.1e}",
            rl.max_diff(&direct) / scale,
            lr.max_diff(&direct) / scale,
            (direct.det() - 1.0).norm()
        );
    }
    Ok(())
}
