//! Reconstructs a two-packet ensemble on a grid, reports the PDE residual and
//! conditioning, and writes the grid in the binary manifest format.
//!
//! cargo run --release --example reconstruct -- [out_dir]

use std::path::PathBuf;

use twri::app::build_ensemble;
use twri::io::{read_field_grid, write_field_grid};
use twri::model::{residual_norm, GridSpec, ModelParams, Packet, Shape};
use twri::recon::{conditioning, grid_solve};

fn main() -> twri::Result<()> {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "out/reconstruct".into()));
    let params = ModelParams::with_epsilon(0.4)?;
    let packets = [
        Packet::with_support(1, Shape::Sech, 1.0, 1.0, -6.0, 5.5, 1e-2)?,
        Packet::with_support(3, Shape::Gaussian, 0.8, 1.2, 6.0, 4.5, 1e-2)?,
    ];
    let e = build_ensemble(&params, &packets)?;
    let spec = GridSpec { x_min: -15.0, x_max: 15.0, nx: 601, t_min: 0.0, t_max: 8.0, nt: 161 };
    let g = grid_solve(&e, spec)?;
    let r = residual_norm(&g)?;
    println!("residual max per mode {:.2e} {:.2e} {:.2e}", r.max[0], r.max[1], r.max[2]);
    let c = conditioning(&e, &[(0.0, 0.0), (0.0, 4.0), (-10.0, 8.0)])?;
    println!("max condition {:.2e}, precision {:?}", c.max_condition, c.precision);
    let manifest = out.join("grid.json");
    write_field_grid(&g, &manifest, None)?;
    let (back, _) = read_field_grid(&manifest)?;
    assert_eq!(back, g);
    println!("wrote {}", manifest.display());
    Ok(())
}
