//! INI-style run configuration.
//!
//! ```text
//! seed = 0
//!
//! [profile]
//! n0 = 0.05
//!
//! [[perturbation]]      ; repeatable
//! n_tilde = 0.005
//! ell0 = 1
//! q0 = 0.2
//! phase = 0             ; optional
//!
//! [proca]
//! E_amp = 1
//! grad_phi_par = 0.1
//! ```
//!
//! Lines starting with `;` or `#` are comments. Unknown sections and keys are
//! rejected. A result file written by the CLI embeds its resolved
//! configuration as `# `-prefixed lines and can be passed back as a config.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use oamproca_core::plasma::{HelicalTerm, PlasmaProfile};
use oamproca_core::proca_mass::{EvalPoint, FormulaId, ProcaInputs};
use oamproca_core::tower::TowerKind;

use crate::error::{CliError, Result};

/// First line of an embedded configuration block.
pub const EMBED_MARKER: &str = "; oamproca";

#[derive(Debug, Clone, PartialEq)]
struct Section {
    name: String,
    repeated: bool,
    entries: Vec<(String, String)>,
}

/// Untyped key/value document, kept in file order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Document {
    sections: Vec<Section>,
}

const SCHEMA: &[(&str, &[&str])] = &[
    ("", &["seed"]),
    ("profile", &["n0"]),
    ("perturbation", &["n_tilde", "ell0", "q0", "phase"]),
    (
        "proca",
        &[
            "E_amp",
            "grad_phi_par",
            "delta_v_dot",
            "box_grad_phi_par",
            "r",
            "phi",
            "z",
        ],
    ),
    ("sweep", &["param", "min", "max", "count", "scale"]),
    ("output", &["format", "path"]),
    ("mass", &["formulas"]),
    ("tower", &["mstar", "kind", "levels", "include_zero"]),
    ("check", &["random"]),
    (
        "dispersion",
        &[
            "points",
            "length",
            "dt",
            "samples",
            "modes",
            "amplitude",
            "substeps",
            "field_dump",
            "field_format",
        ],
    ),
    (
        "rs",
        &[
            "points", "length", "mode", "helicity", "time", "steps", "dump", "format",
        ],
    ),
    ("modes", &["ell_min", "ell_max", "k_center", "radial_cut"]),
];

fn allowed_keys(section: &str) -> Option<&'static [&'static str]> {
    SCHEMA.iter().find(|(s, _)| *s == section).map(|(_, k)| *k)
}

impl Document {
    pub fn parse(text: &str) -> Result<Self> {
        let mut doc = Document {
            sections: vec![Section {
                name: String::new(),
                repeated: false,
                entries: Vec::new(),
            }],
        };
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            let at = |msg: String| CliError::Config(format!("line {}: {msg}", lineno + 1));
            if line.is_empty() || line.starts_with(';') || line.starts_with('#') {
                continue;
            }
            if let Some(inner) = line.strip_prefix("[[") {
                let name = inner
                    .strip_suffix("]]")
                    .ok_or_else(|| at(format!("malformed section header `{line}`")))?
                    .trim();
                if name != "perturbation" {
                    return Err(at(format!("only [[perturbation]] may repeat, got [[{name}]]")));
                }
                doc.sections.push(Section {
                    name: name.to_string(),
                    repeated: true,
                    entries: Vec::new(),
                });
            } else if let Some(inner) = line.strip_prefix('[') {
                let name = inner
                    .strip_suffix(']')
                    .ok_or_else(|| at(format!("malformed section header `{line}`")))?
                    .trim();
                if allowed_keys(name).is_none() || name.is_empty() {
                    return Err(at(format!("unknown section [{name}]")));
                }
                if name == "perturbation" {
                    return Err(at("perturbation blocks are written [[perturbation]]".into()));
                }
                if doc.sections.iter().any(|s| s.name == name) {
                    return Err(at(format!("duplicate section [{name}]")));
                }
                doc.sections.push(Section {
                    name: name.to_string(),
                    repeated: false,
                    entries: Vec::new(),
                });
            } else {
                let (key, value) = line
                    .split_once('=')
                    .ok_or_else(|| at(format!("expected key = value, got `{line}`")))?;
                let (key, value) = (key.trim(), value.trim());
                let section = doc.sections.last_mut().expect("root section");
                check_key(&section.name, key).map_err(|e| at(e.to_string()))?;
                if section.entries.iter().any(|(k, _)| k == key) {
                    return Err(at(format!("duplicate key `{key}`")));
                }
                section.entries.push((key.to_string(), value.to_string()));
            }
        }
        Ok(doc)
    }

    /// Parse a config file, or the configuration embedded in a CSV or JSON
    /// result file.
    pub fn parse_any(text: &str) -> Result<Self> {
        let trimmed = text.trim_start();
        if trimmed.starts_with('{') {
            let v: serde_json::Value =
                serde_json::from_str(trimmed).map_err(|e| CliError::Config(format!("result JSON: {e}")))?;
            let cfg = v
                .get("config")
                .and_then(|c| c.as_str())
                .ok_or_else(|| CliError::Config("result JSON has no `config` string".into()))?;
            return Self::parse(cfg);
        }
        if trimmed.starts_with(&format!("# {EMBED_MARKER}")) {
            let embedded: String = trimmed
                .lines()
                .map_while(|l| l.strip_prefix("# ").or_else(|| (l == "#").then_some("")))
                .fold(String::new(), |mut acc, l| {
                    acc.push_str(l);
                    acc.push('\n');
                    acc
                });
            return Self::parse(&embedded);
        }
        Self::parse(text)
    }

    /// Apply `section.key=value`, `perturbation.N.key=value` (1-based; `N`
    /// one past the end appends a block) or `key=value` for root keys.
    pub fn set(&mut self, assignment: &str) -> Result<()> {
        let (path, value) = assignment
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("--set expects key=value, got `{assignment}`")))?;
        let (path, value) = (path.trim(), value.trim().to_string());
        let parts: Vec<&str> = path.split('.').collect();
        let (section_idx, key) = match parts.as_slice() {
            [key] => (0, *key),
            ["perturbation", n, key] => {
                let n: usize = n
                    .parse()
                    .ok()
                    .filter(|&n| n >= 1)
                    .ok_or_else(|| CliError::Config(format!("bad perturbation index in `{path}`")))?;
                let blocks: Vec<usize> = self
                    .sections
                    .iter()
                    .enumerate()
                    .filter(|(_, s)| s.repeated)
                    .map(|(i, _)| i)
                    .collect();
                if n == blocks.len() + 1 {
                    self.sections.push(Section {
                        name: "perturbation".into(),
                        repeated: true,
                        entries: Vec::new(),
                    });
                    (self.sections.len() - 1, *key)
                } else {
                    let idx = *blocks.get(n - 1).ok_or_else(|| {
                        CliError::Config(format!("no perturbation block {n} (have {})", blocks.len()))
                    })?;
                    (idx, *key)
                }
            }
            [section, key] => {
                if allowed_keys(section).is_none() || *section == "perturbation" || section.is_empty() {
                    return Err(CliError::Config(format!("unknown section [{section}]")));
                }
                let idx = match self.sections.iter().position(|s| s.name == *section) {
                    Some(i) => i,
                    None => {
                        self.sections.push(Section {
                            name: section.to_string(),
                            repeated: false,
                            entries: Vec::new(),
                        });
                        self.sections.len() - 1
                    }
                };
                (idx, *key)
            }
            _ => return Err(CliError::Config(format!("cannot interpret `{path}`"))),
        };
        let section = &mut self.sections[section_idx];
        check_key(&section.name, key)?;
        match section.entries.iter_mut().find(|(k, _)| k == key) {
            Some(entry) => entry.1 = value,
            None => section.entries.push((key.to_string(), value)),
        }
        Ok(())
    }

    fn section(&self, name: &str) -> Option<&Section> {
        self.sections.iter().find(|s| s.name == name)
    }
}

fn check_key(section: &str, key: &str) -> Result<()> {
    let keys = allowed_keys(section).expect("section validated on creation");
    if keys.contains(&key) {
        Ok(())
    } else if section.is_empty() {
        Err(CliError::Config(format!("unknown key `{key}`")))
    } else {
        Err(CliError::Config(format!("unknown key `{key}` in [{section}]")))
    }
}

/// Typed view over one section's entries.
struct Entries<'a> {
    prefix: String,
    entries: &'a [(String, String)],
}

impl<'a> Entries<'a> {
    fn of(doc: &'a Document, name: &str) -> Self {
        Self {
            prefix: name.to_string(),
            entries: doc.section(name).map_or(&[], |s| s.entries.as_slice()),
        }
    }

    fn full(&self, key: &str) -> String {
        if self.prefix.is_empty() {
            key.to_string()
        } else {
            format!("{}.{key}", self.prefix)
        }
    }

    fn raw(&self, key: &str) -> Option<&'a str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    fn parsed<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        self.raw(key)
            .map(|v| {
                v.parse::<T>().map_err(|_| CliError::MalformedNumber {
                    key: self.full(key),
                    value: v.to_string(),
                })
            })
            .transpose()
    }

    fn float(&self, key: &str) -> Result<Option<f64>> {
        match self.parsed::<f64>(key)? {
            Some(v) if !v.is_finite() => Err(CliError::MalformedNumber {
                key: self.full(key),
                value: self.raw(key).unwrap_or_default().to_string(),
            }),
            other => Ok(other),
        }
    }

    fn float_or(&self, key: &str, default: f64) -> Result<f64> {
        Ok(self.float(key)?.unwrap_or(default))
    }

    fn required_float(&self, key: &str) -> Result<f64> {
        self.float(key)?.ok_or_else(|| CliError::MissingKey(key.to_string()))
    }

    fn text(&self, key: &str) -> Option<String> {
        self.raw(key).map(str::to_string)
    }

    fn flag(&self, key: &str) -> Result<Option<bool>> {
        self.raw(key)
            .map(|v| match v {
                "true" => Ok(true),
                "false" => Ok(false),
                other => Err(CliError::Config(format!(
                    "{} must be true or false, got `{other}`",
                    self.full(key)
                ))),
            })
            .transpose()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturbationSpec {
    pub n_tilde: f64,
    pub ell0: i64,
    pub q0: f64,
    pub phase: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ProcaSpec {
    pub e_amp: Option<f64>,
    pub grad_phi_par: f64,
    pub delta_v_dot: f64,
    pub box_grad_phi_par: f64,
    pub r: f64,
    pub phi: f64,
    pub z: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepScale {
    Linear,
    Log,
}

/// Scalar inputs a sweep may vary. `n_tilde`, `n_tilde_ratio` (`ñ/n0`),
/// `q0` and `phase` act on the first perturbation block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    N0,
    NTilde,
    NTildeRatio,
    Q0,
    Phase,
    EAmp,
    GradPhiPar,
    DeltaVDot,
    BoxGradPhiPar,
    R,
    Phi,
    Z,
}

impl SweepParam {
    const ALL: [(SweepParam, &'static str); 12] = [
        (SweepParam::N0, "n0"),
        (SweepParam::NTilde, "n_tilde"),
        (SweepParam::NTildeRatio, "n_tilde_ratio"),
        (SweepParam::Q0, "q0"),
        (SweepParam::Phase, "phase"),
        (SweepParam::EAmp, "E_amp"),
        (SweepParam::GradPhiPar, "grad_phi_par"),
        (SweepParam::DeltaVDot, "delta_v_dot"),
        (SweepParam::BoxGradPhiPar, "box_grad_phi_par"),
        (SweepParam::R, "r"),
        (SweepParam::Phi, "phi"),
        (SweepParam::Z, "z"),
    ];

    pub fn name(self) -> &'static str {
        Self::ALL.iter().find(|(p, _)| *p == self).expect("listed").1
    }

    fn parse(s: &str) -> Result<Self> {
        Self::ALL.iter().find(|(_, n)| *n == s).map(|(p, _)| *p).ok_or_else(|| {
            let names: Vec<&str> = Self::ALL.iter().map(|(_, n)| *n).collect();
            CliError::Config(format!(
                "unknown sweep param `{s}` (expected one of {})",
                names.join(", ")
            ))
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSpec {
    pub param: SweepParam,
    pub min: f64,
    pub max: f64,
    pub count: usize,
    pub scale: SweepScale,
}

impl SweepSpec {
    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.min];
        }
        let last = (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                let t = i as f64 / last;
                match self.scale {
                    SweepScale::Linear => self.min + (self.max - self.min) * t,
                    SweepScale::Log => self.min * (self.max / self.min).powf(t),
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DumpFormat {
    Csv,
    Binary,
}

fn dump_format(s: Option<String>, key: &str) -> Result<DumpFormat> {
    match s.as_deref() {
        None | Some("csv") => Ok(DumpFormat::Csv),
        Some("binary") => Ok(DumpFormat::Binary),
        Some(other) => Err(CliError::Config(format!("{key} must be csv or binary, got `{other}`"))),
    }
}

fn dump_format_name(f: DumpFormat) -> &'static str {
    match f {
        DumpFormat::Csv => "csv",
        DumpFormat::Binary => "binary",
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TowerSpec {
    pub mstar: Option<f64>,
    pub kind: TowerKind,
    pub levels: usize,
    pub include_zero: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DispersionSpec {
    pub points: usize,
    pub length: f64,
    pub dt: f64,
    pub samples: usize,
    pub modes: Vec<i64>,
    pub amplitude: f64,
    pub substeps: usize,
    pub field_dump: Option<PathBuf>,
    pub field_format: DumpFormat,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RsSpec {
    pub points: usize,
    pub length: f64,
    pub mode: [i64; 3],
    pub helicity: i32,
    pub time: f64,
    pub steps: usize,
    pub dump: Option<PathBuf>,
    pub format: DumpFormat,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModesSpec {
    pub ell_min: i64,
    pub ell_max: i64,
    pub k_center: f64,
    pub radial_cut: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub seed: u64,
    pub n0: Option<f64>,
    pub perturbations: Vec<PerturbationSpec>,
    pub proca: ProcaSpec,
    pub sweep: Option<SweepSpec>,
    pub format: OutputFormat,
    pub path: Option<PathBuf>,
    pub formulas: Vec<FormulaId>,
    pub tower: TowerSpec,
    pub check_random: usize,
    pub dispersion: DispersionSpec,
    pub rs: RsSpec,
    pub modes: ModesSpec,
}

fn int_list<T: FromStr>(raw: &str, key: &str) -> Result<Vec<T>> {
    raw.split(',')
        .map(|s| s.trim())
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<T>().map_err(|_| CliError::MalformedNumber {
                key: key.to_string(),
                value: s.to_string(),
            })
        })
        .collect()
}

fn positive(key: &str, v: f64) -> Result<f64> {
    if v > 0.0 {
        Ok(v)
    } else {
        Err(CliError::Config(format!("{key} must be > 0, got {v}")))
    }
}

fn at_least_one(key: &str, v: usize) -> Result<usize> {
    if v >= 1 {
        Ok(v)
    } else {
        Err(CliError::Config(format!("{key} must be >= 1")))
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        Self::from_document(&Document::parse(text)?)
    }

    pub fn from_document(doc: &Document) -> Result<Self> {
        let root = Entries::of(doc, "");
        let seed = root.parsed::<u64>("seed")?.unwrap_or(0);

        let n0 = Entries::of(doc, "profile").float("n0")?;
        let mut perturbations = Vec::new();
        for (i, s) in doc.sections.iter().filter(|s| s.repeated).enumerate() {
            let e = Entries {
                prefix: format!("perturbation.{}", i + 1),
                entries: &s.entries,
            };
            let p = PerturbationSpec {
                n_tilde: e.required_float("n_tilde")?,
                ell0: e
                    .parsed::<i64>("ell0")?
                    .ok_or_else(|| CliError::MissingKey("ell0".into()))?,
                q0: e.required_float("q0")?,
                phase: e.float_or("phase", 0.0)?,
            };
            if p.n_tilde < 0.0 {
                return Err(CliError::Config(format!(
                    "{} must be >= 0, got {}",
                    e.full("n_tilde"),
                    p.n_tilde
                )));
            }
            perturbations.push(p);
        }
        if let Some(n0) = n0 {
            if n0 < 0.0 {
                return Err(CliError::Config(format!("profile.n0 must be > 0, got {n0}")));
            }
            let sum: f64 = perturbations.iter().map(|p| p.n_tilde).sum();
            if !perturbations.is_empty() && sum >= n0 {
                return Err(CliError::PerturbationExceedsDensity { sum, n0 });
            }
        }

        let p = Entries::of(doc, "proca");
        let proca = ProcaSpec {
            e_amp: p.float("E_amp")?,
            grad_phi_par: p.float_or("grad_phi_par", 0.0)?,
            delta_v_dot: p.float_or("delta_v_dot", 0.0)?,
            box_grad_phi_par: p.float_or("box_grad_phi_par", 0.0)?,
            r: p.float_or("r", 0.0)?,
            phi: p.float_or("phi", 0.0)?,
            z: p.float_or("z", 0.0)?,
        };

        let sweep = match doc.section("sweep") {
            None => None,
            Some(_) => {
                let s = Entries::of(doc, "sweep");
                let param = SweepParam::parse(&s.text("param").ok_or_else(|| CliError::MissingKey("param".into()))?)?;
                let min = s.required_float("min")?;
                let count = s.parsed::<usize>("count")?.unwrap_or(1);
                let max = match s.float("max")? {
                    Some(v) => v,
                    None if count == 1 => min,
                    None => return Err(CliError::MissingKey("max".into())),
                };
                let scale = match s.text("scale").as_deref() {
                    None | Some("linear") => SweepScale::Linear,
                    Some("log") => SweepScale::Log,
                    Some(other) => {
                        return Err(CliError::Config(format!(
                            "sweep.scale must be linear or log, got `{other}`"
                        )))
                    }
                };
                at_least_one("sweep.count", count)?;
                if scale == SweepScale::Log && !(min > 0.0 && max > 0.0) {
                    return Err(CliError::Config("log sweeps need min > 0 and max > 0".into()));
                }
                Some(SweepSpec {
                    param,
                    min,
                    max,
                    count,
                    scale,
                })
            }
        };

        let o = Entries::of(doc, "output");
        let format = match o.text("format").as_deref() {
            None | Some("csv") => OutputFormat::Csv,
            Some("json") => OutputFormat::Json,
            Some(other) => {
                return Err(CliError::Config(format!(
                    "output.format must be csv or json, got `{other}`"
                )))
            }
        };
        let path = o.text("path").map(PathBuf::from);

        let formulas = match Entries::of(doc, "mass").text("formulas") {
            None => FormulaId::ALL.to_vec(),
            Some(list) => parse_formulas(&list)?,
        };

        let t = Entries::of(doc, "tower");
        let tower = TowerSpec {
            mstar: t.float("mstar")?.map(|v| positive("tower.mstar", v)).transpose()?,
            kind: match t.text("kind") {
                None => TowerKind::Bosonic,
                Some(k) => k
                    .parse()
                    .map_err(|_| CliError::Config(format!("tower.kind must be bosonic or fermionic, got `{k}`")))?,
            },
            levels: at_least_one("tower.levels", t.parsed::<usize>("levels")?.unwrap_or(10))?,
            include_zero: t.flag("include_zero")?.unwrap_or(false),
        };

        let check_random = Entries::of(doc, "check").parsed::<usize>("random")?.unwrap_or(0);

        let d = Entries::of(doc, "dispersion");
        let defaults = oamproca_core::dispersion::DispersionSetup::default();
        let dispersion = DispersionSpec {
            points: d.parsed::<usize>("points")?.unwrap_or(defaults.points),
            length: positive("dispersion.length", d.float_or("length", defaults.length)?)?,
            dt: positive("dispersion.dt", d.float_or("dt", defaults.dt)?)?,
            samples: d.parsed::<usize>("samples")?.unwrap_or(defaults.samples),
            modes: match d.raw("modes") {
                None => defaults.modes.clone(),
                Some(raw) => int_list(raw, "dispersion.modes")?,
            },
            amplitude: d.float_or("amplitude", defaults.amplitude)?,
            substeps: at_least_one(
                "dispersion.substeps",
                d.parsed::<usize>("substeps")?.unwrap_or(defaults.substeps),
            )?,
            field_dump: d.text("field_dump").map(PathBuf::from),
            field_format: dump_format(d.text("field_format"), "dispersion.field_format")?,
        };

        let r = Entries::of(doc, "rs");
        let mode = match r.raw("mode") {
            None => [1, 0, 0],
            Some(raw) => {
                let v: Vec<i64> = int_list(raw, "rs.mode")?;
                <[i64; 3]>::try_from(v).map_err(|_| CliError::Config("rs.mode needs three integers".into()))?
            }
        };
        let helicity = r.parsed::<i32>("helicity")?.unwrap_or(1);
        if helicity != 1 && helicity != -1 {
            return Err(CliError::Config(format!("rs.helicity must be 1 or -1, got {helicity}")));
        }
        let rs = RsSpec {
            points: r.parsed::<usize>("points")?.unwrap_or(8),
            length: positive("rs.length", r.float_or("length", 2.0 * std::f64::consts::PI)?)?,
            mode,
            helicity,
            time: r.float_or("time", 1.0)?,
            steps: at_least_one("rs.steps", r.parsed::<usize>("steps")?.unwrap_or(1))?,
            dump: r.text("dump").map(PathBuf::from),
            format: dump_format(r.text("format"), "rs.format")?,
        };

        let m = Entries::of(doc, "modes");
        let modes = ModesSpec {
            ell_min: m.parsed::<i64>("ell_min")?.unwrap_or(-2),
            ell_max: m.parsed::<i64>("ell_max")?.unwrap_or(2),
            k_center: m.float_or("k_center", 1.0)?,
            radial_cut: m.parsed::<usize>("radial_cut")?.unwrap_or(1),
        };

        Ok(RunConfig {
            seed,
            n0,
            perturbations,
            proca,
            sweep,
            format,
            path,
            formulas,
            tower,
            check_random,
            dispersion,
            rs,
            modes,
        })
    }

    pub fn require_n0(&self) -> Result<f64> {
        self.n0.ok_or_else(|| CliError::MissingKey("n0".into()))
    }

    pub fn require_e_amp(&self) -> Result<f64> {
        self.proca.e_amp.ok_or_else(|| CliError::MissingKey("E_amp".into()))
    }

    pub fn terms(&self) -> Vec<HelicalTerm> {
        self.perturbations
            .iter()
            .map(|p| HelicalTerm::new(p.n_tilde, p.ell0, p.q0).with_phase(p.phase))
            .collect()
    }

    /// The plasma profile; `n0 = 0` without perturbations is vacuum.
    pub fn profile(&self) -> Result<PlasmaProfile> {
        let n0 = self.require_n0()?;
        if n0 == 0.0 && self.perturbations.is_empty() {
            return Ok(PlasmaProfile::vacuum());
        }
        Ok(PlasmaProfile::new(n0, self.terms())?)
    }

    pub fn proca_inputs(&self) -> Result<ProcaInputs> {
        let e_amp = self.require_e_amp()?;
        let profile = self.profile()?;
        let p = &self.proca;
        Ok(ProcaInputs {
            e_amp,
            grad_phi_par: p.grad_phi_par,
            delta_v_dot: p.delta_v_dot,
            box_grad_phi_par: p.box_grad_phi_par,
            profile,
            at: EvalPoint {
                r: p.r,
                phi: p.phi,
                z: p.z,
            },
        })
    }

    /// Copy with one sweep parameter replaced.
    pub fn with_param(&self, param: SweepParam, value: f64) -> Result<RunConfig> {
        let mut c = self.clone();
        fn first(c: &mut RunConfig, param: SweepParam) -> Result<&mut PerturbationSpec> {
            c.perturbations
                .first_mut()
                .ok_or_else(|| CliError::Config(format!("sweep param {} needs a [[perturbation]] block", param.name())))
        }
        match param {
            SweepParam::N0 => c.n0 = Some(value),
            SweepParam::NTilde => first(&mut c, param)?.n_tilde = value,
            SweepParam::NTildeRatio => {
                let n0 = c.require_n0()?;
                first(&mut c, param)?.n_tilde = value * n0;
            }
            SweepParam::Q0 => first(&mut c, param)?.q0 = value,
            SweepParam::Phase => first(&mut c, param)?.phase = value,
            SweepParam::EAmp => c.proca.e_amp = Some(value),
            SweepParam::GradPhiPar => c.proca.grad_phi_par = value,
            SweepParam::DeltaVDot => c.proca.delta_v_dot = value,
            SweepParam::BoxGradPhiPar => c.proca.box_grad_phi_par = value,
            SweepParam::R => c.proca.r = value,
            SweepParam::Phi => c.proca.phi = value,
            SweepParam::Z => c.proca.z = value,
        }
        Ok(c)
    }

    /// Canonical text with every default spelled out. `output.path` is left
    /// out: it names the file the text is embedded in.
    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "seed = {}", self.seed);
        if let Some(n0) = self.n0 {
            let _ = write!(s, "\n[profile]\nn0 = {n0}\n");
        }
        for p in &self.perturbations {
            let _ = write!(
                s,
                "\n[[perturbation]]\nn_tilde = {}\nell0 = {}\nq0 = {}\nphase = {}\n",
                p.n_tilde, p.ell0, p.q0, p.phase
            );
        }
        let p = &self.proca;
        s.push_str("\n[proca]\n");
        if let Some(e) = p.e_amp {
            let _ = writeln!(s, "E_amp = {e}");
        }
        let _ = write!(
            s,
            "grad_phi_par = {}\ndelta_v_dot = {}\nbox_grad_phi_par = {}\nr = {}\nphi = {}\nz = {}\n",
            p.grad_phi_par, p.delta_v_dot, p.box_grad_phi_par, p.r, p.phi, p.z
        );
        if let Some(sw) = &self.sweep {
            let scale = match sw.scale {
                SweepScale::Linear => "linear",
                SweepScale::Log => "log",
            };
            let _ = write!(
                s,
                "\n[sweep]\nparam = {}\nmin = {}\nmax = {}\ncount = {}\nscale = {scale}\n",
                sw.param.name(),
                sw.min,
                sw.max,
                sw.count
            );
        }
        let format = match self.format {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        };
        let _ = write!(s, "\n[output]\nformat = {format}\n");
        let formulas: Vec<&str> = self.formulas.iter().map(|f| f.as_str()).collect();
        let _ = write!(s, "\n[mass]\nformulas = {}\n", formulas.join(","));

        let t = &self.tower;
        s.push_str("\n[tower]\n");
        if let Some(m) = t.mstar {
            let _ = writeln!(s, "mstar = {m}");
        }
        let kind = match t.kind {
            TowerKind::Bosonic => "bosonic",
            TowerKind::Fermionic => "fermionic",
        };
        let _ = write!(
            s,
            "kind = {kind}\nlevels = {}\ninclude_zero = {}\n",
            t.levels, t.include_zero
        );

        let _ = write!(s, "\n[check]\nrandom = {}\n", self.check_random);

        let d = &self.dispersion;
        let modes: Vec<String> = d.modes.iter().map(|m| m.to_string()).collect();
        let _ = write!(
            s,
            "\n[dispersion]\npoints = {}\nlength = {}\ndt = {}\nsamples = {}\nmodes = {}\namplitude = {}\nsubsteps = {}\n",
            d.points,
            d.length,
            d.dt,
            d.samples,
            modes.join(","),
            d.amplitude,
            d.substeps
        );
        if let Some(p) = &d.field_dump {
            let _ = writeln!(s, "field_dump = {}", p.display());
        }
        let _ = writeln!(s, "field_format = {}", dump_format_name(d.field_format));

        let r = &self.rs;
        let _ = write!(
            s,
            "\n[rs]\npoints = {}\nlength = {}\nmode = {},{},{}\nhelicity = {}\ntime = {}\nsteps = {}\n",
            r.points, r.length, r.mode[0], r.mode[1], r.mode[2], r.helicity, r.time, r.steps
        );
        if let Some(p) = &r.dump {
            let _ = writeln!(s, "dump = {}", p.display());
        }
        let _ = writeln!(s, "format = {}", dump_format_name(r.format));

        let m = &self.modes;
        let _ = write!(
            s,
            "\n[modes]\nell_min = {}\nell_max = {}\nk_center = {}\nradial_cut = {}\n",
            m.ell_min, m.ell_max, m.k_center, m.radial_cut
        );
        s
    }
}

pub fn parse_formulas(list: &str) -> Result<Vec<FormulaId>> {
    let mut out = Vec::new();
    for name in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let f = FormulaId::ALL
            .into_iter()
            .find(|f| f.as_str().eq_ignore_ascii_case(name))
            .ok_or_else(|| CliError::Config(format!("unknown formula `{name}` (expected EQ1, EQ2, EQ11 or EQ12)")))?;
        if !out.contains(&f) {
            out.push(f);
        }
    }
    if out.is_empty() {
        return Err(CliError::Config("mass.formulas is empty".into()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "[profile]\nn0 = 0.05\n[proca]\nE_amp = 1\n";

    #[test]
    fn minimal_config_gets_defaults() {
        let c = RunConfig::parse(MINIMAL).unwrap();
        assert_eq!(c.seed, 0);
        assert_eq!(c.n0, Some(0.05));
        assert_eq!(c.proca.e_amp, Some(1.0));
        assert_eq!(c.proca.box_grad_phi_par, 0.0);
        assert!(c.perturbations.is_empty());
        assert_eq!(c.format, OutputFormat::Csv);
        assert_eq!(c.formulas, FormulaId::ALL.to_vec());
    }

    #[test]
    fn perturbation_blocks_repeat_and_default_phase() {
        let text = format!("{MINIMAL}[[perturbation]]\nn_tilde = 0.001\nell0 = 1\nq0 = 0.2\n[[perturbation]]\nn_tilde = 0.002\nell0 = -2\nq0 = 0\nphase = 1.5\n");
        let c = RunConfig::parse(&text).unwrap();
        assert_eq!(c.perturbations.len(), 2);
        assert_eq!(c.perturbations[0].phase, 0.0);
        assert_eq!(c.perturbations[1].ell0, -2);
        assert_eq!(c.perturbations[1].phase, 1.5);
    }

    #[test]
    fn errors_and_their_exit_codes() {
        let missing = RunConfig::parse("[proca]\nE_amp = 1\n")
            .unwrap()
            .require_n0()
            .unwrap_err();
        assert_eq!(missing.to_string(), "missing key: n0");
        assert_eq!(missing.exit_code(), 2);

        let bad = RunConfig::parse("[profile]\nn0 = abc\n").unwrap_err();
        assert!(matches!(bad, CliError::MalformedNumber { .. }));
        assert_eq!(bad.exit_code(), 2);
        assert!(matches!(
            RunConfig::parse("[profile]\nn0 = nan\n"),
            Err(CliError::MalformedNumber { .. })
        ));

        let over =
            RunConfig::parse("[profile]\nn0 = 0.01\n[[perturbation]]\nn_tilde = 0.01\nell0 = 1\nq0 = 0\n").unwrap_err();
        assert!(over.to_string().starts_with("perturbation exceeds density"));
        assert_eq!(over.exit_code(), 3);

        assert!(matches!(
            RunConfig::parse("[profile]\nn1 = 0.05\n"),
            Err(CliError::Config(_))
        ));
        assert!(matches!(RunConfig::parse("[plasma]\n"), Err(CliError::Config(_))));
        assert!(matches!(
            RunConfig::parse("[profile]\nn0 = 1\nn0 = 2\n"),
            Err(CliError::Config(_))
        ));
    }

    #[test]
    fn render_round_trips() {
        let text = format!(
            "seed = 9\n{MINIMAL}[[perturbation]]\nn_tilde = 0.001\nell0 = 1\nq0 = 0.2\n[sweep]\nparam = n_tilde_ratio\nmin = 0\nmax = 0.1\ncount = 11\n[output]\nformat = json\npath = out.json\n"
        );
        let c = RunConfig::parse(&text).unwrap();
        let back = RunConfig::parse(&c.render()).unwrap();
        assert_eq!(back, RunConfig { path: None, ..c });
    }

    #[test]
    fn set_overrides_and_appends() {
        let mut doc = Document::parse(MINIMAL).unwrap();
        doc.set("proca.E_amp=2").unwrap();
        doc.set("perturbation.1.n_tilde=0.001").unwrap();
        doc.set("perturbation.1.ell0=3").unwrap();
        doc.set("perturbation.1.q0=0.1").unwrap();
        doc.set("seed=4").unwrap();
        let c = RunConfig::from_document(&doc).unwrap();
        assert_eq!(c.proca.e_amp, Some(2.0));
        assert_eq!(c.perturbations[0].ell0, 3);
        assert_eq!(c.seed, 4);
        assert!(doc.set("perturbation.3.q0=0").is_err());
        assert!(doc.set("proca.E=1").is_err());
    }

    #[test]
    fn sweep_values() {
        let lin = SweepSpec {
            param: SweepParam::N0,
            min: 0.0,
            max: 0.1,
            count: 11,
            scale: SweepScale::Linear,
        };
        let v = lin.values();
        assert_eq!(v.len(), 11);
        assert_eq!(v[0], 0.0);
        assert_eq!(v[10], 0.1);
        let log = SweepSpec {
            param: SweepParam::N0,
            min: 1.0,
            max: 100.0,
            count: 3,
            scale: SweepScale::Log,
        };
        assert!((log.values()[1] - 10.0).abs() < 1e-12);
        let one = SweepSpec { count: 1, ..lin };
        assert_eq!(one.values(), vec![0.0]);
    }

    #[test]
    fn embedded_config_is_recovered() {
        let c = RunConfig::parse(MINIMAL).unwrap();
        let mut file = format!("# {EMBED_MARKER} 0.1.0\n");
        for line in c.render().lines() {
            file.push_str(&format!("# {line}\n").replace("# \n", "#\n"));
        }
        file.push_str("index,value\n0,1\n");
        let back = RunConfig::from_document(&Document::parse_any(&file).unwrap()).unwrap();
        assert_eq!(back, c);
    }
}
