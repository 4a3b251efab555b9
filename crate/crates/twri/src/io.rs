//! Experiment configuration, grid serialization and heatmap rendering.

use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::ensemble::ProductOrder;
use crate::error::{Error, Result};
use crate::model::{FieldGrid, GridSpec, ModelParams, Packet, Shape, DEFAULT_TRUNCATION_TOL};
use crate::recon::Precision;
use crate::sim::{Coupling, Transport};
use crate::spectra::NORMING_CONVENTION;

/// A packet as written in a config; the support defaults to the truncation tolerance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PacketSpec {
    pub mode: usize,
    pub shape: Shape,
    pub amplitude: f64,
    pub width: f64,
    #[serde(default)]
    pub center: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub support_halfwidth: Option<f64>,
}

impl PacketSpec {
    pub fn to_packet(&self, truncation_tol: f64) -> Result<Packet> {
        let l = self.support_halfwidth.unwrap_or_else(|| self.width * self.shape.default_halfwidth(truncation_tol));
        Packet::with_support(self.mode, self.shape.clone(), self.amplitude, self.width, self.center, l, truncation_tol)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunOptions {
    /// Extra semiclassical parameters to sweep; empty means only `model.epsilon`.
    pub epsilon_sweep: Vec<f64>,
    pub cfl: f64,
    pub ode_tol: f64,
    pub truncation_tol: f64,
    pub output_dir: Option<String>,
    pub precision: Precision,
    pub transport: Transport,
    pub coupling: Coupling,
    pub product_order: ProductOrder,
    /// Must name the convention this build implements.
    pub norming_convention: String,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            epsilon_sweep: Vec::new(),
            cfl: 0.5,
            ode_tol: 1e-12,
            truncation_tol: DEFAULT_TRUNCATION_TOL,
            output_dir: None,
            precision: Precision::Double,
            transport: Transport::Upwind,
            coupling: Coupling::ExplicitMidpoint,
            product_order: ProductOrder::RightToLeft,
            norming_convention: NORMING_CONVENTION.to_string(),
        }
    }
}

fn default_grid() -> GridSpec {
    GridSpec { x_min: -20.0, x_max: 20.0, nx: 1024, t_min: 0.0, t_max: 1.0, nt: 101 }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelParams,
    pub packets: Vec<PacketSpec>,
    #[serde(default = "default_grid")]
    pub grid: GridSpec,
    #[serde(default)]
    pub run: RunOptions,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let sem = |what: &str, e: Error| Error::Config(format!("{what}: {e}"));
        self.model.validate().map_err(|e| sem("model", e))?;
        self.grid.validate().map_err(|e| sem("grid", e))?;
        let r = &self.run;
        if !(r.cfl > 0.0 && r.cfl <= 1.0) {
            return Err(Error::Config(format!("run.cfl must lie in (0, 1], got {}", r.cfl)));
        }
        if !(r.ode_tol > 0.0 && r.ode_tol < 1.0) {
            return Err(Error::Config(format!("run.ode_tol must lie in (0, 1), got {}", r.ode_tol)));
        }
        if !(r.truncation_tol > 0.0 && r.truncation_tol < 1.0) {
            return Err(Error::Config(format!("run.truncation_tol must lie in (0, 1), got {}", r.truncation_tol)));
        }
        if let Some(e) = r.epsilon_sweep.iter().find(|e| !(**e > 0.0 && e.is_finite())) {
            return Err(Error::Config(format!("run.epsilon_sweep entries must be positive, got {e}")));
        }
        if r.norming_convention != NORMING_CONVENTION {
            return Err(Error::Config(format!(
                "run.norming_convention {:?} is not supported (this build implements {NORMING_CONVENTION:?})",
                r.norming_convention
            )));
        }
        for (i, p) in self.packets.iter().enumerate() {
            p.to_packet(r.truncation_tol).map_err(|e| sem(&format!("packets[{i}]"), e))?;
        }
        Ok(())
    }

    pub fn packets(&self) -> Result<Vec<Packet>> {
        self.packets.iter().map(|p| p.to_packet(self.run.truncation_tol)).collect()
    }

    /// `model.epsilon` followed by the sweep values.
    pub fn epsilons(&self) -> Vec<f64> {
        std::iter::once(self.model.epsilon).chain(self.run.epsilon_sweep.iter().copied()).collect()
    }
}

/// Parses and validates a JSON config.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let cfg: ExperimentConfig = serde_json::from_str(text)
        .map_err(|e| Error::Config(format!("line {} column {}: {e}", e.line(), e.column())))?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    parse_config(&fs::read_to_string(path)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Payload {
    pub name: String,
    /// Relative to the manifest's directory.
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridManifest {
    pub tool_version: String,
    pub dtype: String,
    pub byte_order: String,
    /// `[nt, nx]`, t-major.
    pub shape: [usize; 2],
    pub grid: GridSpec,
    pub hx: f64,
    pub ht: f64,
    pub params: ModelParams,
    pub norming_convention: String,
    pub payloads: Vec<Payload>,
    pub config: Option<ExperimentConfig>,
}

const CHANNELS: [&str; 6] = ["q1.re", "q1.im", "q2.re", "q2.im", "q3.re", "q3.im"];

fn payload_path(manifest: &Path, name: &str) -> (PathBuf, String) {
    let stem = manifest.file_stem().and_then(|s| s.to_str()).unwrap_or("grid");
    let file = format!("{stem}.{name}.f64");
    (manifest.with_file_name(&file), file)
}

/// Writes the six payloads next to `manifest_path` and the manifest itself.
pub fn write_field_grid(g: &FieldGrid, manifest_path: &Path, config: Option<&ExperimentConfig>) -> Result<GridManifest> {
    if let Some(dir) = manifest_path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    let mut payloads = Vec::with_capacity(6);
    for (c, name) in CHANNELS.iter().enumerate() {
        let part = |z: &Complex64| if c % 2 == 0 { z.re } else { z.im };
        let bytes: Vec<u8> = g.q[c / 2].iter().flat_map(|z| part(z).to_le_bytes()).collect();
        let (path, rel) = payload_path(manifest_path, name);
        fs::write(&path, &bytes)?;
        payloads.push(Payload { name: name.to_string(), path: rel, bytes: bytes.len() as u64, sha256: hex::encode(Sha256::digest(&bytes)) });
    }
    let m = GridManifest {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        dtype: "f64".into(),
        byte_order: "little-endian".into(),
        shape: [g.spec.nt, g.spec.nx],
        grid: g.spec,
        hx: g.spec.hx(),
        ht: g.spec.ht(),
        params: g.params,
        norming_convention: NORMING_CONVENTION.into(),
        payloads,
        config: config.cloned(),
    };
    fs::write(manifest_path, serde_json::to_string_pretty(&m)? + "\n")?;
    Ok(m)
}

/// Reads a grid back, verifying every checksum.
pub fn read_field_grid(manifest_path: &Path) -> Result<(FieldGrid, GridManifest)> {
    let m: GridManifest = serde_json::from_str(&fs::read_to_string(manifest_path)?)?;
    if m.dtype != "f64" || m.byte_order != "little-endian" {
        return Err(Error::Config(format!("unsupported payload encoding {} / {}", m.dtype, m.byte_order)));
    }
    let mut g = FieldGrid::zeros(m.grid, m.params)?;
    let n = m.grid.nx * m.grid.nt;
    for (c, name) in CHANNELS.iter().enumerate() {
        let p = m.payloads.iter().find(|p| p.name == *name).ok_or_else(|| Error::Config(format!("manifest lacks payload {name}")))?;
        let bytes = fs::read(manifest_path.with_file_name(&p.path))?;
        let sum = hex::encode(Sha256::digest(&bytes));
        if sum != p.sha256 {
            return Err(Error::Checksum(format!("{}: expected {}, found {sum}", p.path, p.sha256)));
        }
        if bytes.len() != 8 * n {
            return Err(Error::Checksum(format!("{}: {} bytes for {n} samples", p.path, bytes.len())));
        }
        for (i, chunk) in bytes.chunks_exact(8).enumerate() {
            let v = f64::from_le_bytes(chunk.try_into().expect("8-byte chunk"));
            if c % 2 == 0 {
                g.q[c / 2][i].re = v;
            } else {
                g.q[c / 2][i].im = v;
            }
        }
    }
    Ok((g, m))
}

/// Anchors of the viridis colormap at `0, 1/8, ..., 1`, linearly interpolated.
const VIRIDIS: [[f64; 3]; 9] = [
    [68.0, 1.0, 84.0],
    [71.0, 44.0, 122.0],
    [59.0, 81.0, 139.0],
    [44.0, 113.0, 142.0],
    [33.0, 144.0, 141.0],
    [39.0, 173.0, 129.0],
    [92.0, 200.0, 99.0],
    [170.0, 220.0, 50.0],
    [253.0, 231.0, 37.0],
];

pub fn viridis(v: f64) -> [u8; 3] {
    let v = if v.is_finite() { v.clamp(0.0, 1.0) } else { 0.0 };
    let s = v * 8.0;
    let i = (s.floor() as usize).min(7);
    let f = s - i as f64;
    [0, 1, 2].map(|c| (VIRIDIS[i][c] * (1.0 - f) + VIRIDIS[i + 1][c] * f).round() as u8)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeatmapScale {
    pub mode: usize,
    pub min: f64,
    pub max: f64,
}

/// PNG of `|q_mode|` (1-based mode): x to the right, t upward, one pixel per sample,
/// linear viridis scale from 0 to the grid maximum. The scale goes to `<path>.scale.txt`.
pub fn render_heatmap(g: &FieldGrid, mode: usize, path: &Path) -> Result<HeatmapScale> {
    if !(1..=3).contains(&mode) {
        return Err(Error::InvalidParams(format!("heatmap channel must be 1, 2 or 3, got {mode}")));
    }
    let (nx, nt) = (g.spec.nx, g.spec.nt);
    if nx == 0 || nt == 0 {
        return Err(Error::InvalidGrid("empty grid".into()));
    }
    let q = &g.q[mode - 1];
    let max = q.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mut data = Vec::with_capacity(3 * nx * nt);
    for row in 0..nt {
        let it = nt - 1 - row;
        for ix in 0..nx {
            let v = if max > 0.0 { q[it * nx + ix].norm() / max } else { 0.0 };
            data.extend_from_slice(&viridis(v));
        }
    }
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    let file = fs::File::create(path)?;
    let mut enc = png::Encoder::new(BufWriter::new(file), nx as u32, nt as u32);
    enc.set_color(png::ColorType::Rgb);
    enc.set_depth(png::BitDepth::Eight);
    let mut w = enc.write_header().map_err(|e| Error::Io(std::io::Error::other(e)))?;
    w.write_image_data(&data).map_err(|e| Error::Io(std::io::Error::other(e)))?;
    w.finish().map_err(|e| Error::Io(std::io::Error::other(e)))?;
    let scale = HeatmapScale { mode, min: 0.0, max };
    let s = &g.spec;
    let text = format!(
        "channel |q{mode}|\ncolormap viridis (9 anchors, linear)\nmin 0\nmax {max:e}\nx {} .. {} (left to right, {nx} px)\nt {} .. {} (bottom to top, {nt} px)\n",
        s.x_min, s.x_max, s.t_min, s.t_max
    );
    fs::write(scale_path(path), text)?;
    Ok(scale)
}

pub fn scale_path(png: &Path) -> PathBuf {
    let mut p = png.as_os_str().to_owned();
    p.push(".scale.txt");
    PathBuf::from(p)
}

/// Total variation of `|q_mode|` along x, summed over t-slices.
pub fn total_variation(g: &FieldGrid, mode: usize) -> f64 {
    (0..g.spec.nt)
        .map(|it| g.slice(mode - 1, it).windows(2).map(|w| (w[1].norm() - w[0].norm()).abs()).sum::<f64>())
        .sum()
}
