//! Three packets, one per mode, collide; renders |q1|, |q2|, |q3| heatmaps of the
//! reconstructed soliton ensemble.
//!
//! cargo run --release --example collision_heatmaps -- [out_dir] [epsilon]

use std::path::PathBuf;

use twri::app::build_ensemble;
use twri::io::{render_heatmap, total_variation};
use twri::model::{GridSpec, ModelParams, Packet, Shape};
use twri::recon::grid_solve;

fn main() -> twri::Result<()> {
    let mut args = std::env::args().skip(1);
    let out = PathBuf::from(args.next().unwrap_or_else(|| "out/heatmaps".into()));
    let eps: f64 = args.next().map(|s| s.parse().expect("epsilon")).unwrap_or(0.1);

    let params = ModelParams::with_epsilon(eps)?;
    let packets = [
        Packet::with_support(1, Shape::Sech, 1.0, 1.0, -9.0, 5.5, 1e-2)?,
        Packet::with_support(2, Shape::Gaussian, 0.8, 1.5, 0.0, 3.3, 1e-2)?,
        Packet::with_support(3, Shape::Sech, 1.2, 0.8, 9.0, 4.5, 1e-2)?,
    ];
    let e = build_ensemble(&params, &packets)?;
    println!("{} poles at eps = {eps}", e.len());
    let spec = GridSpec { x_min: -20.0, x_max: 20.0, nx: 800, t_min: 0.0, t_max: 16.0, nt: 400 };
    let g = grid_solve(&e, spec)?;
    for mode in 1..=3 {
        let path = out.join(format!("q{mode}.png"));
        let s = render_heatmap(&g, mode, &path)?;
        println!("{}: max |q{mode}| = {:.3}, total variation {:.1}", path.display(), s.max, total_variation(&g, mode));
    }
    Ok(())
}
