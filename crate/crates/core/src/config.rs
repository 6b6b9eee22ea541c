//! Run configuration read from TOML, with dotted-path overrides.
//!
//! Every key has a default, so an empty file (or no file) is a valid
//! configuration. Overrides are applied to the parsed document before it is
//! deserialized, which means they are validated exactly like file contents.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{Medium, ModulatedWave};
use crate::geometry::{Surface, SurfaceShape};
use crate::grid::{GridData, Rect};
use crate::math::{CVec3, Vec3};
use crate::phase::{make_phase, PhaseDiscontinuity, PhaseParams};
use crate::quadrature::QuadSpec;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    /// Angular frequency shared by all waves.
    pub omega: f64,
    /// Speed of light in the chosen units.
    pub c: f64,
    pub output: OutputSpec,
    pub surface: SurfaceSpec,
    pub media: MediaSpec,
    pub phase: PhaseSpec,
    pub trace: TraceSpec,
    pub audit: AuditSpec,
    pub weakcheck: WeakcheckSpec,
    pub admit: AdmitSpec,
    pub design: DesignSpec,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            omega: 2.0 * std::f64::consts::PI,
            c: 1.0,
            output: OutputSpec::default(),
            surface: SurfaceSpec::default(),
            media: MediaSpec::default(),
            phase: PhaseSpec::default(),
            trace: TraceSpec::default(),
            audit: AuditSpec::default(),
            weakcheck: WeakcheckSpec::default(),
            admit: AdmitSpec::default(),
            design: DesignSpec::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSpec {
    pub dir: PathBuf,
}

impl Default for OutputSpec {
    fn default() -> Self {
        Self { dir: PathBuf::from("out") }
    }
}

/// Catalog surface: `flat`, `plane`, `paraboloid`, `gaussian-bump`, `grid`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SurfaceSpec {
    pub kind: String,
    /// `[x1_min, x1_max, x2_min, x2_max]`
    pub domain: [f64; 4],
    pub height: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub amplitude: f64,
    pub center: [f64; 2],
    pub sigma: f64,
    pub csv: Option<PathBuf>,
}

impl Default for SurfaceSpec {
    fn default() -> Self {
        Self {
            kind: "flat".into(),
            domain: [-2.0, 2.0, -2.0, 2.0],
            height: 0.0,
            a: 0.0,
            b: 0.0,
            c: 0.0,
            amplitude: 0.0,
            center: [0.0, 0.0],
            sigma: 1.0,
            csv: None,
        }
    }
}

impl SurfaceSpec {
    pub fn build(&self) -> Result<Surface> {
        let [x0, x1, y0, y1] = self.domain;
        let domain = Rect::new(x0, x1, y0, y1)?;
        let shape = match self.kind.as_str() {
            "flat" => SurfaceShape::Flat { height: self.height },
            "plane" => SurfaceShape::Plane {
                a: self.a,
                b: self.b,
                c: self.c,
            },
            "paraboloid" => SurfaceShape::Paraboloid {
                height: self.height,
                a: self.a,
                b: self.b,
            },
            "gaussian-bump" => SurfaceShape::GaussianBump {
                amplitude: self.amplitude,
                center: self.center,
                sigma: self.sigma,
            },
            "grid" => {
                let path = self
                    .csv
                    .as_ref()
                    .ok_or_else(|| Error::bad_params("grid", "missing `csv`"))?;
                SurfaceShape::Sampled(GridData::read_csv(path)?)
            }
            other => return Err(Error::UnknownCatalogEntry(other.to_string())),
        };
        Surface::new(shape, domain)
    }
}

/// A medium given either by `eps`/`mu` or by a refractive `index`
/// (non-magnetic).
#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MediumSpec {
    pub eps: Option<f64>,
    pub mu: Option<f64>,
    pub index: Option<f64>,
}

impl MediumSpec {
    pub fn build(&self, c: f64) -> Result<Medium> {
        let m = match (self.index, self.eps, self.mu) {
            (Some(n), None, None) => Medium::with_index(n),
            (None, eps, mu) => Medium::new(eps.unwrap_or(1.0), mu.unwrap_or(1.0)),
            _ => return Err(Error::bad_params("medium", "give either `index` or `eps`/`mu`")),
        }
        .with_c(c);
        m.validate()?;
        Ok(m)
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MediaSpec {
    pub lower: MediumSpec,
    pub upper: MediumSpec,
}

impl Default for MediaSpec {
    fn default() -> Self {
        Self {
            lower: MediumSpec::default(),
            upper: MediumSpec {
                index: Some(1.5),
                ..MediumSpec::default()
            },
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PhaseSpec {
    pub kind: Option<String>,
    pub params: PhaseParams,
}

impl PhaseSpec {
    pub fn build(&self) -> Result<PhaseDiscontinuity> {
        make_phase(self.kind.as_deref().unwrap_or("zero"), &self.params)
    }
}

/// Complex amplitude as `[[re, im]; 3]` and unit propagation direction.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaveSpec {
    pub amplitude: [[f64; 2]; 3],
    pub k_dir: [f64; 3],
}

impl WaveSpec {
    pub fn amplitude(&self) -> CVec3 {
        CVec3::from_fn(|i, _| Complex64::new(self.amplitude[i][0], self.amplitude[i][1]))
    }

    pub fn build(&self, omega: f64, medium: Medium) -> Result<ModulatedWave> {
        ModulatedWave::new(self.amplitude(), Vec3::from(self.k_dir), omega, medium)
    }
}

/// Incident rays: a fan of incidence angles aimed at one surface point, or a
/// square bundle of parallel rays.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TraceSpec {
    pub mode: String,
    pub theta_min_deg: f64,
    pub theta_max_deg: f64,
    pub count: usize,
    pub azimuth_deg: f64,
    pub target: [f64; 2],
    /// Distance from the ray origin to the aimed-at point.
    pub distance: f64,
    /// Parallel mode: common direction, half-width of the launch square and
    /// height of the launch plane.
    pub direction: [f64; 3],
    pub half_width: f64,
    pub launch_height: f64,
    pub segment_length: f64,
    pub tol: f64,
}

impl Default for TraceSpec {
    fn default() -> Self {
        Self {
            mode: "fan".into(),
            theta_min_deg: 0.0,
            theta_max_deg: 60.0,
            count: 7,
            azimuth_deg: 0.0,
            target: [0.0, 0.0],
            distance: 1.0,
            direction: [0.0, 0.0, 1.0],
            half_width: 0.5,
            launch_height: -1.0,
            segment_length: 1.0,
            tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AuditSpec {
    pub incident: WaveSpec,
    pub reflected: Option<WaveSpec>,
    /// When absent the transmitted wave is built from the refraction law and
    /// the tangential match at `match_point`.
    pub transmitted: Option<WaveSpec>,
    pub match_point: [f64; 2],
    /// Multiplies the matched transmitted amplitude.
    pub amplitude_scale: f64,
    pub time: f64,
    /// Samples per axis on the `sample_half` square around `match_point`.
    pub samples_per_axis: usize,
    pub sample_half: f64,
    pub tol: f64,
}

impl Default for AuditSpec {
    fn default() -> Self {
        Self {
            incident: WaveSpec {
                amplitude: [[0.0, 0.0], [1.0, 0.0], [0.0, 0.0]],
                k_dir: [0.0, 0.0, 1.0],
            },
            reflected: None,
            transmitted: None,
            match_point: [0.0, 0.0],
            amplitude_scale: 1.0,
            time: 0.0,
            samples_per_axis: 1,
            sample_half: 0.0,
            tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WeakcheckSpec {
    pub cases: usize,
    pub tol: f64,
    pub benchmark_tol: f64,
    pub quadrature: QuadSpec,
}

impl Default for WeakcheckSpec {
    fn default() -> Self {
        Self {
            cases: 50,
            tol: 1e-5,
            benchmark_tol: 1e-6,
            quadrature: QuadSpec::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AdmitSpec {
    pub wave: WaveSpec,
    /// Random sample points are drawn from `[-half, half]^2 x [z_min, z_max]`.
    pub samples: usize,
    pub half: f64,
    pub z_min: f64,
    pub z_max: f64,
    pub time: f64,
    pub fd_step: f64,
    pub orthogonality_tol: f64,
    pub tol: f64,
}

impl Default for AdmitSpec {
    fn default() -> Self {
        Self {
            wave: WaveSpec {
                amplitude: [[0.0, 0.0], [1.0, 0.0], [0.0, 0.0]],
                k_dir: [0.0, 0.0, 1.0],
            },
            samples: 20,
            half: 0.5,
            z_min: 0.1,
            z_max: 0.6,
            time: 0.0,
            fd_step: 2e-5,
            orthogonality_tol: 1e-10,
            tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DesignSpec {
    pub incident: [f64; 3],
    pub focus: [f64; 3],
    pub grid: usize,
    /// Half-width of the square design aperture.
    pub half: f64,
    /// Rays per axis in the verification bundle.
    pub rays_per_axis: usize,
    pub focus_tol: f64,
    pub curl_tol: f64,
}

impl Default for DesignSpec {
    fn default() -> Self {
        Self {
            incident: [0.0, 0.0, 1.0],
            focus: [0.0, 0.0, 5.0],
            grid: 64,
            half: 0.25,
            rays_per_axis: 5,
            focus_tol: 1e-3,
            curl_tol: 1e-6,
        }
    }
}

/// Parse a `key.path=value` override. The value is read as a TOML value
/// when possible and as a bare string otherwise.
pub fn parse_override(text: &str) -> Result<(String, toml::Value)> {
    let (key, raw) = text
        .split_once('=')
        .ok_or_else(|| Error::ConfigParse(format!("override `{text}` is not key=value")))?;
    let key = key.trim();
    if key.is_empty() || key.split('.').any(str::is_empty) {
        return Err(Error::ConfigParse(format!("bad override key `{key}`")));
    }
    let raw = raw.trim();
    let value = toml::from_str::<toml::Table>(&format!("v = {raw}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()));
    Ok((key.to_string(), value))
}

fn set_path(doc: &mut toml::Table, key: &str, value: toml::Value) -> Result<()> {
    let mut parts: Vec<&str> = key.split('.').collect();
    let last = parts.pop().expect("non-empty key");
    let mut table = doc;
    for part in parts {
        let entry = table
            .entry(part.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        table = entry
            .as_table_mut()
            .ok_or_else(|| Error::ConfigParse(format!("`{part}` in `{key}` is not a table")))?;
    }
    table.insert(last.to_string(), value);
    Ok(())
}

/// Parse TOML text and apply overrides in order.
pub fn load_str(text: &str, overrides: &[(String, toml::Value)]) -> Result<RunConfig> {
    let mut doc: toml::Table = toml::from_str(text).map_err(|e| Error::ConfigParse(e.to_string()))?;
    for (k, v) in overrides {
        set_path(&mut doc, k, v.clone())?;
    }
    let cfg: RunConfig = doc.try_into().map_err(|e: toml::de::Error| Error::ConfigParse(e.to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}

/// Load a config file (or defaults when `path` is `None`).
pub fn load(path: Option<&Path>, overrides: &[(String, toml::Value)]) -> Result<RunConfig> {
    let text = match path {
        Some(p) => std::fs::read_to_string(p).map_err(|e| Error::io(p, e))?,
        None => String::new(),
    };
    load_str(&text, overrides)
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("omega", self.omega),
            ("c", self.c),
            ("trace.tol", self.trace.tol),
            ("audit.tol", self.audit.tol),
            ("weakcheck.tol", self.weakcheck.tol),
            ("weakcheck.benchmark_tol", self.weakcheck.benchmark_tol),
            ("admit.tol", self.admit.tol),
            ("admit.orthogonality_tol", self.admit.orthogonality_tol),
            ("admit.fd_step", self.admit.fd_step),
            ("design.focus_tol", self.design.focus_tol),
            ("design.curl_tol", self.design.curl_tol),
            ("design.half", self.design.half),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::ConfigParse(format!("`{name}` must be positive, got {v}")));
            }
        }
        let nonempty = [
            ("trace.count", self.trace.count),
            ("audit.samples_per_axis", self.audit.samples_per_axis),
            ("admit.samples", self.admit.samples),
            ("design.rays_per_axis", self.design.rays_per_axis),
        ];
        for (name, n) in nonempty {
            if n == 0 {
                return Err(Error::ConfigParse(format!("`{name}` must be at least 1")));
            }
        }
        if self.design.grid < 2 {
            return Err(Error::ConfigParse("`design.grid` must be at least 2".into()));
        }
        if !matches!(self.trace.mode.as_str(), "fan" | "parallel") {
            return Err(Error::ConfigParse(format!("unknown trace mode `{}`", self.trace.mode)));
        }
        // Resolve catalog names early so errors surface before any work.
        self.surface.build()?;
        self.phase.build()?;
        self.media.lower.build(self.c)?;
        self.media.upper.build(self.c)?;
        Ok(())
    }

    pub fn surface(&self) -> Result<Surface> {
        self.surface.build()
    }

    pub fn lower(&self) -> Result<Medium> {
        self.media.lower.build(self.c)
    }

    pub fn upper(&self) -> Result<Medium> {
        self.media.upper.build(self.c)
    }

    pub fn phase(&self) -> Result<PhaseDiscontinuity> {
        self.phase.build()
    }
}
