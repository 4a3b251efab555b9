//! Direct simulation of a two-packet collision with the default and the high-accuracy
//! schemes, comparing Manley–Rowe drift.
//!
//! cargo run --release --example simulate -- [nx]

use twri::app::manley_rowe_drift;
use twri::model::{GridSpec, ModelParams, Packet, Shape};
use twri::sim::{initialize, Coupling, SimOptions, Simulator, Transport};

fn main() -> twri::Result<()> {
    let nx: usize = std::env::args().nth(1).map(|s| s.parse().expect("nx")).unwrap_or(2048);
    let params = ModelParams::with_epsilon(0.5)?;
    let packets = [
        Packet::with_support(1, Shape::Sech, 1.0, 1.0, -8.0, 5.5, 1e-2)?,
        Packet::with_support(3, Shape::Sech, 0.8, 1.0, 8.0, 5.5, 1e-2)?,
    ];
    let spec = GridSpec { x_min: -30.0, x_max: 30.0, nx, t_min: 0.0, t_max: 16.0, nt: 33 };
    let s = initialize(&packets, params, spec)?;
    let accurate = SimOptions { transport: Transport::Spectral, coupling: Coupling::ImplicitMidpoint, ..Default::default() };
    for (name, opts) in [("upwind / explicit midpoint", SimOptions::default()), ("spectral / implicit midpoint", accurate)] {
        let g = Simulator::new(opts).run_to_grid(&s, spec, 0.5)?;
        let last = twri::sim::SimState::from_grid_slice(&g, spec.nt - 1)?;
        println!("{name}: Manley-Rowe drift {:.2e}, final masses {:.4} {:.4} {:.4}", manley_rowe_drift(&g)?, last.mass(0), last.mass(1), last.mass(2));
    }
    Ok(())
}
