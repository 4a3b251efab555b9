//! Composes the soliton ensemble of two separated packets and prints its poles before
//! and after evolving the scattering data.
//!
//! cargo run --release --example ensemble -- [epsilon] [time]

use twri::app::build_ensemble;
use twri::model::{ModelParams, Packet, Shape};
use twri::recon::evolve;

fn main() -> twri::Result<()> {
    let mut args = std::env::args().skip(1).map(|s| s.parse::<f64>().expect("number"));
    let eps = args.next().unwrap_or(0.4);
    let t = args.next().unwrap_or(2.0);
    let params = ModelParams::with_epsilon(eps)?;
    let packets = [
        Packet::with_support(1, Shape::Sech, 1.0, 1.0, -6.0, 5.5, 1e-2)?,
        Packet::with_support(3, Shape::Gaussian, 0.8, 1.2, 6.0, 4.5, 1e-2)?,
    ];
    let e = build_ensemble(&params, &packets)?;
    let later = evolve(&e, t)?;
    println!("{} poles, norming convention {}", e.len(), e.norming_convention);
    for (p, q) in e.poles.iter().zip(&later.poles) {
        println!("  mode {} lambda {:.5}  log gamma {:.4} -> {:.4} at t = {t}", p.mode, p.lambda, p.log_norming, q.log_norming);
    }
    println!("{}", serde_json::to_string_pretty(&e.poles[0]).expect("json"));
    Ok(())
}
