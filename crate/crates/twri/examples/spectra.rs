//! Bohr–Sommerfeld eigenvalues and WKB norming constants of a Gaussian packet, checked
//! against eigenvalues located with the 2×2 scattering oracle.
//!
//! cargo run --release --example spectra -- [epsilon]

use twri::model::Packet;
use twri::ode::Tolerance;
use twri::oracle::{locate_zs_eigenvalues, LocateOptions, Region};
use twri::spectra::{bohr_sommerfeld_spectrum, wkb_norming_constants};

fn main() -> twri::Result<()> {
    let eps: f64 = std::env::args().nth(1).map(|s| s.parse().expect("epsilon")).unwrap_or(0.25);
    let p = Packet::gaussian(1, 1.0, 1.0, 0.0)?;
    let wkb = wkb_norming_constants(&p, &bohr_sommerfeld_spectrum(&p, eps))?;
    let found = locate_zs_eigenvalues(&p, eps, Region::new((-0.3, 0.2), (0.005, 1.1)), Tolerance::default(), LocateOptions::default())?
        .sorted_points();
    println!("gaussian A = 1, w = 1, eps = {eps}: {} WKB eigenvalues, {} located", wkb.len(), found.len());
    for (k, (tau, gamma)) in wkb.taus.iter().zip(&wkb.norming).enumerate() {
        let oracle = found.get(k).map_or("-".to_string(), |z| format!("{:.6}", z.im));
        println!("  k = {k}: tau = {tau:.6}  oracle {oracle}  gamma = {gamma:.3}");
    }
    Ok(())
}
