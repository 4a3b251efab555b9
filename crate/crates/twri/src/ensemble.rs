//! Soliton ensembles: per-packet 2×2 spectral data embedded into the 3×3 problem.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{LaxPair, ModelParams, Packet};
use crate::ode::Tolerance;
use crate::oracle::{zs_transfer_matrix, TransferMatrix};
use crate::spectra::{ZSData, NORMING_CONVENTION};

/// Two poles closer than this are rejected as a collision.
pub const COLLISION_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    /// Index of the packet in the list passed to [`compose_ensemble`].
    pub packet: usize,
    /// Quantization index within that packet's spectrum.
    pub index: usize,
}

/// One discrete eigenvalue of the 3×3 problem with its norming constant.
///
/// `lambda` is always in the upper half plane. The polarization is `e_k + gamma e_l` in the
/// block `(k, l)` of `mode`, stored as `log_norming = log(gamma)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pole {
    pub lambda: Complex64,
    /// 1-based.
    pub mode: usize,
    pub log_norming: Complex64,
    pub provenance: Option<Provenance>,
}

impl Pole {
    pub fn norming(&self) -> Complex64 {
        self.log_norming.exp()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleData {
    pub params: ModelParams,
    pub poles: Vec<Pole>,
    pub time: f64,
    pub norming_convention: String,
}

impl EnsembleData {
    pub fn new(params: ModelParams, poles: Vec<Pole>) -> Result<Self> {
        params.lax()?;
        for p in &poles {
            if !(1..=3).contains(&p.mode) || !(p.lambda.im > 0.0) {
                return Err(Error::InvalidParams(format!("pole {} of mode {}", p.lambda, p.mode)));
            }
        }
        Ok(Self { params, poles, time: 0.0, norming_convention: NORMING_CONVENTION.to_string() })
    }

    pub fn lax(&self) -> Result<LaxPair> {
        self.params.lax()
    }

    pub fn len(&self) -> usize {
        self.poles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.poles.is_empty()
    }
}

fn clog(z: Complex64) -> Complex64 {
    Complex64::new(z.norm().ln(), z.arg())
}

/// 3×3 poles of one packet from its 2×2 data (eigenvalues `i tau`, norming `gamma` relative
/// to the packet center). No interaction corrections.
pub fn embed_packet_data(params: &ModelParams, packet: &Packet, data: &ZSData) -> Result<Vec<Pole>> {
    let lax = params.lax()?;
    let j = packet.mode_index();
    let (k, l) = lax.block(j);
    let kappa = lax.kappa(j);
    if data.norming.len() != data.taus.len() {
        return Err(Error::InvalidParams("norming constants missing from spectral data".into()));
    }
    let x0 = packet.center;
    let mut poles = Vec::with_capacity(data.len());
    for (n, (&tau, &gamma)) in data.taus.iter().zip(&data.norming).enumerate() {
        let lambda = Complex64::new(0.0, tau / kappa);
        // gauge of the block potential, then translation to the packet center
        let log_g = clog(gamma) + clog(lax.omega.conj())
            - Complex64::i() * (lax.a[k] - lax.a[l]) * lambda * x0 / lax.epsilon;
        let (lambda, log_g) = if kappa > 0.0 {
            (lambda, log_g)
        } else {
            // lower-half-plane pole traded for its conjugate: gamma -> -1 / conj(gamma)
            (lambda.conj(), -log_g.conj() + Complex64::new(0.0, std::f64::consts::PI))
        };
        poles.push(Pole { lambda, mode: j + 1, log_norming: log_g, provenance: Some(Provenance { packet: 0, index: n }) });
    }
    Ok(poles)
}

/// Checks that supports are pairwise disjoint with a strict gap and that no mode repeats.
pub fn check_packets(packets: &[Packet]) -> Result<()> {
    for (i, a) in packets.iter().enumerate() {
        for (jj, b) in packets.iter().enumerate().skip(i + 1) {
            if a.mode == b.mode {
                return Err(Error::DuplicateMode(a.mode));
            }
            let (al, ar) = a.support();
            let (bl, br) = b.support();
            if !(ar < bl || br < al) {
                return Err(Error::OverlappingSupports(i, jj));
            }
        }
    }
    Ok(())
}

/// Ensemble of several packets, with the norming constants of each packet corrected for the
/// poles of the packets on either side.
pub fn compose_ensemble(params: &ModelParams, packets: &[Packet], data: &[ZSData]) -> Result<EnsembleData> {
    if packets.len() != data.len() {
        return Err(Error::InvalidParams(format!("{} packets but {} spectral data sets", packets.len(), data.len())));
    }
    check_packets(packets)?;
    let lax = params.lax()?;
    let mut groups = Vec::with_capacity(packets.len());
    for (i, (p, d)) in packets.iter().zip(data).enumerate() {
        let mut poles = embed_packet_data(params, p, d)?;
        for pole in &mut poles {
            pole.provenance = Some(Provenance { packet: i, index: pole.provenance.map_or(0, |v| v.index) });
        }
        groups.push(poles);
    }
    let all: Vec<Pole> = groups.iter().flatten().copied().collect();
    for (i, a) in all.iter().enumerate() {
        for b in &all[i + 1..] {
            if (a.lambda - b.lambda).norm() < COLLISION_TOL || (a.lambda - b.lambda.conj()).norm() < COLLISION_TOL {
                return Err(Error::PoleCollision { a: a.lambda.to_string(), b: b.lambda.to_string() });
            }
        }
    }
    let mut out = Vec::with_capacity(all.len());
    for (i, p) in packets.iter().enumerate() {
        let (k, l) = lax.block(p.mode_index());
        for pole in &groups[i] {
            let mut log_g = pole.log_norming;
            for (o, q) in packets.iter().enumerate() {
                if o == i {
                    continue;
                }
                let (ko, lo) = lax.block(q.mode_index());
                let left = q.center < p.center;
                // index carrying the other pole's weight throughout this packet's region
                let dom = match (left, lax.a[ko] > lax.a[lo]) {
                    (true, true) | (false, false) => ko,
                    _ => lo,
                };
                for other in &groups[o] {
                    let (mu, lp) = (other.lambda, pole.lambda);
                    if dom == l {
                        log_g += clog((lp - mu.conj()) / (lp - mu));
                    } else if dom == k {
                        log_g += clog((lp - mu) / (lp - mu.conj()));
                    }
                }
            }
            out.push(Pole { log_norming: log_g, ..*pole });
        }
    }
    Ok(EnsembleData { params: *params, poles: out, time: 0.0, norming_convention: NORMING_CONVENTION.to_string() })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum ProductOrder {
    /// `T_n ... T_2 T_1` with packets sorted left to right; the ordering that matches
    /// propagation across the line.
    #[default]
    RightToLeft,
    LeftToRight,
}

/// 3×3 transfer matrix of the whole configuration at `lambda` as a product of embedded
/// 2×2 packet transfer matrices.
pub fn compose_transfer_product(
    params: &ModelParams,
    packets: &[Packet],
    lambda: Complex64,
    order: ProductOrder,
    tol: Tolerance,
) -> Result<TransferMatrix> {
    check_packets(packets)?;
    let lax = params.lax()?;
    let mut sorted: Vec<&Packet> = packets.iter().collect();
    sorted.sort_by(|a, b| a.center.total_cmp(&b.center));
    let (xl, xr) = match (sorted.first(), sorted.last()) {
        (Some(a), Some(b)) => (a.support().0, b.support().1),
        _ => (0.0, 0.0),
    };
    let mut total = TransferMatrix::identity(3, lambda, xl, xr);
    for p in sorted {
        let j = p.mode_index();
        let (k, l) = lax.block(j);
        let t2 = zs_transfer_matrix(p, lax.kappa(j) * lambda, lax.zs_epsilon(j), tol)?;
        let mut t = TransferMatrix::identity(3, lambda, t2.x_left, t2.x_right);
        // conjugation by diag(1, conj(omega)) on the block
        let w = lax.omega;
        t.entries[k * 3 + k] = t2.get(0, 0);
        t.entries[k * 3 + l] = t2.get(0, 1) * w;
        t.entries[l * 3 + k] = t2.get(1, 0) * w.conj();
        t.entries[l * 3 + l] = t2.get(1, 1);
        total = match order {
            ProductOrder::RightToLeft => t.compose(&total),
            ProductOrder::LeftToRight => total.compose(&t),
        };
    }
    total.x_left = xl;
    total.x_right = xr;
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Shape;
    use crate::oracle::{packets_window, transfer_matrix};

    fn packets() -> Vec<Packet> {
        vec![
            Packet::with_support(2, Shape::Sech, 1.0, 1.0, -8.0, 5.5, 1e-2).unwrap(),
            Packet::with_support(1, Shape::Gaussian, 0.8, 1.2, 2.5, 4.5, 1e-2).unwrap(),
            Packet::with_support(3, Shape::Sech, 0.7, 0.8, 12.0, 4.5, 1e-2).unwrap(),
        ]
    }

    #[test]
    fn product_matches_direct_integration() {
        let params = ModelParams::with_epsilon(0.4).unwrap();
        let ps = packets();
        let window = packets_window(&ps).unwrap();
        for lambda in [Complex64::new(0.3, 0.0), Complex64::new(-0.7, 0.2), Complex64::new(0.1, -0.15)] {
            let direct = transfer_matrix(&ps, lambda, &params, window, Tolerance::default()).unwrap();
            let prod = compose_transfer_product(&params, &ps, lambda, ProductOrder::RightToLeft, Tolerance::default()).unwrap();
            let scale = direct.max_abs().max(1.0);
            assert!(prod.max_diff(&direct) / scale < 1e-6, "{lambda}: {}", prod.max_diff(&direct));
            let wrong = compose_transfer_product(&params, &ps, lambda, ProductOrder::LeftToRight, Tolerance::default()).unwrap();
            assert!(wrong.max_diff(&direct) / scale > 1e-3);
        }
    }

    #[test]
    fn rejects_bad_configurations() {
        let params = ModelParams::with_epsilon(0.4).unwrap();
        let mut ps = packets();
        ps[1].center = -4.0;
        assert!(matches!(check_packets(&ps), Err(Error::OverlappingSupports(0, 1))));
        let mut ps = packets();
        ps[2].mode = 2;
        assert!(matches!(check_packets(&ps), Err(Error::DuplicateMode(2))));
        let a = Packet::with_support(1, Shape::Sech, 1.0, 1.0, -8.0, 5.5, 1e-2).unwrap();
        let b = Packet::with_support(3, Shape::Sech, 1.0, 1.0, 8.0, 5.5, 1e-2).unwrap();
        let lax = params.lax().unwrap();
        let d = crate::spectra::sech_spectrum_exact(1.0, 1.0, lax.zs_epsilon(0));
        let d = crate::spectra::wkb_norming_constants(&a, &d).unwrap();
        assert!(matches!(compose_ensemble(&params, &[a, b], &[d.clone(), d]), Err(Error::PoleCollision { .. })));
    }
}
