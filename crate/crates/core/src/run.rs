//! Run configurations, figure presets and dataset output.
//!
//! A run is one scenario plus a list of datasets. Each dataset becomes one
//! CSV file; the run also writes a JSON manifest holding the resolved
//! configuration, the library version and the derived momenta.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::composer::{ApproxMode, Composer};
use crate::error::{Error, Result};
use crate::gridsim::{run_probes, GridParams};
use crate::model::{MomentumSet, Scenario};
use crate::observables::{density, observe, ObservableSample};
use crate::transient::{Alpha, TermDescriptor};
use crate::Complex64 as C64;

pub const CSV_VERSION: u32 = 1;
pub const CSV_COLUMNS: &str = "x,t,re,im,density,flux,hbar_omega,method";
pub const MANIFEST_VERSION: u32 = 1;
pub const PRESETS: [&str; 8] = [
    "fig1", "fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Approx,
    Oracle,
    Grid,
    /// Exact, approximate, `I''` part and long-time limit side by side.
    Compare,
}

impl std::str::FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Mode::Exact),
            "approx" => Ok(Mode::Approx),
            "oracle" => Ok(Mode::Oracle),
            "grid" => Ok(Mode::Grid),
            "compare" => Ok(Mode::Compare),
            _ => Err(Error::Config(format!("unknown mode {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ApproxChoice {
    #[default]
    Full,
    Dominant,
}

/// Sample positions or times: an explicit list or `steps` evenly spaced
/// values from `start` to `end` inclusive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Axis {
    Values(Vec<f64>),
    Range { start: f64, end: f64, steps: usize },
}

impl Axis {
    pub fn single(v: f64) -> Self {
        Axis::Values(vec![v])
    }

    pub fn range(start: f64, end: f64, steps: usize) -> Self {
        Axis::Range { start, end, steps }
    }

    pub fn values(&self) -> Vec<f64> {
        match self {
            Axis::Values(v) => v.clone(),
            Axis::Range { start, end, steps } => match steps {
                0 => Vec::new(),
                1 => vec![*start],
                n => (0..*n)
                    .map(|i| start + (end - start) * i as f64 / (n - 1) as f64)
                    .collect(),
            },
        }
    }

    fn validate(&self, what: &str) -> Result<()> {
        let v = self.values();
        if v.is_empty() {
            return Err(Error::Config(format!("{what}: empty range")));
        }
        if let Axis::Range { start, end, .. } = self {
            if end < start {
                return Err(Error::Config(format!("{what}: end {end} < start {start}")));
            }
        }
        if v.iter().any(|z| !z.is_finite()) {
            return Err(Error::Config(format!("{what}: non-finite value")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub name: String,
    /// Overrides the run's mode.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<Mode>,
    /// Positions; probe positions in grid mode.
    pub x: Axis,
    /// Times; in grid mode a range from 0 whose spacing sets the record
    /// stride.
    pub t: Axis,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridParams>,
    /// Individual terms such as `"1T"`; each adds rows labelled `term:1T`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub terms: Vec<String>,
    #[serde(default)]
    pub approx: ApproxChoice,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Dataset {
    pub fn new(name: &str, x: Axis, t: Axis) -> Self {
        Dataset {
            name: name.into(),
            mode: None,
            x,
            t,
            grid: None,
            terms: Vec::new(),
            approx: ApproxChoice::Full,
            note: None,
        }
    }

    fn with_mode(mut self, m: Mode) -> Self {
        self.mode = Some(m);
        self
    }

    fn with_grid(mut self, g: GridParams) -> Self {
        self.grid = Some(g);
        self.mode = Some(Mode::Grid);
        self
    }

    fn with_note(mut self, note: String) -> Self {
        self.note = Some(note);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub name: String,
    pub mode: Mode,
    /// Quadrature tolerance; the library default when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    /// Output directory; the current directory when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    pub scenario: Scenario,
    pub datasets: Vec<Dataset>,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let c: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn mode_of(&self, d: &Dataset) -> Mode {
        d.mode.unwrap_or(self.mode)
    }

    /// Forces every dataset to `mode`.
    pub fn override_mode(&mut self, mode: Mode) {
        self.mode = mode;
        for d in &mut self.datasets {
            d.mode = None;
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.scenario.validate()?;
        if self.name.is_empty() || self.name.contains(['/', '\\']) {
            return Err(Error::Config(format!("invalid run name {:?}", self.name)));
        }
        if let Some(tol) = self.tol {
            if !(tol > 0.0 && tol < 1.0) {
                return Err(Error::Config(format!("tol must lie in (0, 1), got {tol}")));
            }
        }
        if self.datasets.is_empty() {
            return Err(Error::Config("no datasets".into()));
        }
        let mut names: Vec<&str> = self.datasets.iter().map(|d| d.name.as_str()).collect();
        names.sort_unstable();
        if names.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Config("dataset names must be unique".into()));
        }
        for d in &self.datasets {
            let ctx = |what: &str| format!("dataset {}: {what}", d.name);
            if d.name.is_empty() || d.name.contains(['/', '\\']) {
                return Err(Error::Config(ctx("invalid name")));
            }
            d.x.validate(&ctx("x"))?;
            d.t.validate(&ctx("t"))?;
            if d.t.values().iter().any(|&t| t < 0.0) {
                return Err(Error::Config(ctx("t must be >= 0")));
            }
            for term in &d.terms {
                parse_term(term).map_err(|e| Error::Config(ctx(&e.to_string())))?;
            }
            if self.mode_of(d) == Mode::Grid {
                let g = d
                    .grid
                    .ok_or_else(|| Error::Config(ctx("grid mode needs [grid] parameters")))?;
                g.validate()?;
                grid_schedule(d, &g).map_err(|e| Error::Config(ctx(&e.to_string())))?;
            }
        }
        Ok(())
    }
}

/// `"1T"` -> `(1, Alpha::T)`.
pub fn parse_term(s: &str) -> Result<(u8, Alpha)> {
    let b = s.as_bytes();
    let bad = || Error::InvalidArgument(format!("term {s:?} is not of the form 1I..4T"));
    if b.len() != 2 || !(b'1'..=b'4').contains(&b[0]) {
        return Err(bad());
    }
    let alpha = match b[1] {
        b'I' => Alpha::I,
        b'R' => Alpha::R,
        b'T' => Alpha::T,
        _ => return Err(bad()),
    };
    Ok((b[0] - b'0', alpha))
}

/// End time and record stride (in steps) of a grid dataset.
fn grid_schedule(d: &Dataset, g: &GridParams) -> Result<(f64, usize)> {
    let ts = d.t.values();
    if ts[0] != 0.0 {
        return Err(Error::InvalidArgument("grid times must start at 0".into()));
    }
    let t_end = *ts.last().unwrap();
    let stride = if ts.len() > 1 {
        ((ts[1] - ts[0]) / g.dt).round() as usize
    } else {
        1
    };
    if stride == 0 {
        return Err(Error::InvalidArgument("record spacing is below dt".into()));
    }
    Ok((t_end, stride))
}

/// One CSV row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub x: f64,
    pub t: f64,
    pub psi: C64,
    pub density: f64,
    pub flux: f64,
    pub hbar_omega: Option<f64>,
    pub method: String,
}

impl Row {
    fn from_obs(o: ObservableSample, psi: C64, method: &str) -> Self {
        Row {
            x: o.x,
            t: o.t,
            psi,
            density: o.density,
            flux: o.flux,
            hbar_omega: o.hbar_omega,
            method: method.into(),
        }
    }
}

pub fn csv_string(rows: &[Row]) -> String {
    let mut s = format!("# stepswitch csv v{CSV_VERSION}\n{CSV_COLUMNS}\n");
    for r in rows {
        let w = r.hbar_omega.map(|w| w.to_string()).unwrap_or_default();
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{}",
            r.x, r.t, r.psi.re, r.psi.im, r.density, r.flux, w, r.method
        );
    }
    s
}

fn points(d: &Dataset) -> Vec<(f64, f64)> {
    let xs = d.x.values();
    let ts = d.t.values();
    // t outer, x inner
    ts.iter()
        .flat_map(|&t| xs.iter().map(move |&x| (x, t)))
        .collect()
}

fn sampled_rows<S>(pts: &[(f64, f64)], m: f64, label: &str, sampler: S) -> Result<Vec<Row>>
where
    S: Fn(f64, f64) -> Result<C64> + Sync,
{
    pts.par_iter()
        .map(|&(x, t)| {
            let o = observe(&sampler, m, x, t)?;
            Ok(Row::from_obs(o, sampler(x, t)?, label))
        })
        .collect()
}

fn term_rows(c: &Composer, d: &Dataset, pts: &[(f64, f64)], tol: f64) -> Result<Vec<Row>> {
    let m = c.scenario.m();
    let mut rows = Vec::new();
    for name in &d.terms {
        let (j, alpha) = parse_term(name)?;
        let term: &TermDescriptor = c
            .terms()
            .iter()
            .find(|k| k.j == j && k.alpha == alpha)
            .expect("all twelve terms are built");
        let label = format!("term:{name}");
        rows.extend(sampled_rows(pts, m, &label, |x, t| {
            if t == 0.0 {
                // a single term has no closed form at t = 0
                return Err(Error::InvalidArgument("term rows need t > 0".into()));
            }
            term.eval(x, t, tol)
        })?);
    }
    Ok(rows)
}

/// Rows of one dataset, plus any warnings.
pub fn dataset_rows(cfg: &RunConfig, d: &Dataset) -> Result<(Vec<Row>, Vec<String>)> {
    let tol = cfg.tol.unwrap_or(crate::transient::DEFAULT_TOL);
    let s = cfg.scenario;
    let m = s.m();
    let c = Composer::new(&s)?.with_tol(tol);
    let pts = points(d);
    let approx_mode = match d.approx {
        ApproxChoice::Full => ApproxMode::Full,
        ApproxChoice::Dominant => ApproxMode::Dominant,
    };
    let mut warnings = Vec::new();
    let mut rows = match cfg.mode_of(d) {
        Mode::Exact => sampled_rows(&pts, m, "exact", |x, t| c.exact(x, t))?,
        Mode::Approx => sampled_rows(&pts, m, "approx", |x, t| c.approx(x, t, approx_mode))?,
        Mode::Oracle => sampled_rows(&pts, m, "oracle", |x, t| c.oracle(x, t))?,
        Mode::Compare => {
            let mut r = sampled_rows(&pts, m, "exact", |x, t| c.exact(x, t))?;
            r.extend(sampled_rows(&pts, m, "approx", |x, t| {
                c.approx(x, t, approx_mode)
            })?);
            r.extend(sampled_rows(&pts, m, "isecond", |x, t| {
                if t == 0.0 {
                    Ok(C64::new(0.0, 0.0))
                } else {
                    c.isecond_part(x, t)
                }
            })?);
            r.extend(pts.iter().map(|&(x, t)| {
                let psi = c.longtime_at(x, t);
                let o = ObservableSample {
                    x,
                    t,
                    density: density(psi),
                    flux: crate::observables::flux_at(&|y, s| Ok(c.longtime_at(y, s)), m, x, t)
                        .unwrap_or(f64::NAN),
                    hbar_omega: Some(c.longtime_energy()),
                };
                Row::from_obs(o, psi, "limit")
            }));
            r
        }
        Mode::Grid => {
            let g = d
                .grid
                .ok_or_else(|| Error::Config(format!("dataset {}: missing grid", d.name)))?;
            let (t_end, stride) = grid_schedule(d, &g)?;
            let run = run_probes(&s, g, t_end, &d.x.values(), stride)?;
            warnings.extend(run.warnings.iter().map(|w| format!("{}: {w}", d.name)));
            let n_rec = run.series.first().map_or(0, |p| p.records.len());
            let mut r = Vec::with_capacity(n_rec * run.series.len());
            for k in 0..n_rec {
                for p in &run.series {
                    let rec = &p.records[k];
                    r.push(Row {
                        x: p.x_grid,
                        t: rec.t,
                        psi: rec.psi,
                        density: rec.density,
                        flux: rec.flux,
                        hbar_omega: rec.hbar_omega,
                        method: "grid".into(),
                    });
                }
            }
            r
        }
    };
    rows.extend(term_rows(&c, d, &pts, tol)?);
    Ok((rows, warnings))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputFile {
    pub dataset: String,
    pub path: PathBuf,
    pub rows: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub manifest_version: u32,
    pub csv_version: u32,
    pub library_version: String,
    pub config: RunConfig,
    pub momenta: MomentumSet,
    pub files: Vec<OutputFile>,
    pub warnings: Vec<String>,
}

/// The configuration recorded in a manifest.
pub fn config_from_manifest(json: &str) -> Result<RunConfig> {
    let v: serde_json::Value =
        serde_json::from_str(json).map_err(|e| Error::Config(e.to_string()))?;
    let c = v
        .get("config")
        .ok_or_else(|| Error::Config("manifest has no config".into()))?;
    serde_json::from_value(c.clone()).map_err(|e| Error::Config(e.to_string()))
}

/// Computes every dataset and writes the CSV files and the manifest.
pub fn run(cfg: &RunConfig) -> Result<Manifest> {
    cfg.validate()?;
    let dir = cfg.out.clone().unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir)?;
    let mut files = Vec::new();
    let mut warnings = Vec::new();
    for d in &cfg.datasets {
        let (rows, w) = dataset_rows(cfg, d)?;
        warnings.extend(w);
        let path = dir.join(format!("{}_{}.csv", cfg.name, d.name));
        fs::write(&path, csv_string(&rows))?;
        files.push(OutputFile {
            dataset: d.name.clone(),
            path,
            rows: rows.len(),
        });
    }
    let manifest = Manifest {
        manifest_version: MANIFEST_VERSION,
        csv_version: CSV_VERSION,
        library_version: env!("CARGO_PKG_VERSION").into(),
        config: cfg.clone(),
        momenta: cfg.scenario.momenta()?,
        files,
        warnings,
    };
    let json = serde_json::to_string_pretty(&manifest).map_err(|e| Error::Config(e.to_string()))?;
    fs::write(dir.join(format!("{}_manifest.json", cfg.name)), json)?;
    Ok(manifest)
}

fn markers(s: &Scenario, t: f64) -> String {
    let ms = s.momenta().expect("preset scenarios are valid");
    let m = s.m();
    format!(
        "markers at t = {t} fs: -q0 t/m = {:.3} nm, p0 t/m = {:.3} nm, p0' t/m = {:.3} nm",
        -ms.q0.re * t / m,
        ms.p0.re * t / m,
        ms.p0_new.re * t / m
    )
}

fn arrivals(s: &Scenario, x: f64) -> String {
    let ms = s.momenta().expect("preset scenarios are valid");
    let m = s.m();
    format!(
        "arrival times at x = {x} nm: |x| m/q0 = {:.3} fs, x m/p0 = {:.3} fs, x m/p0' = {:.3} fs",
        x.abs() * m / ms.q0.re,
        x * m / ms.p0.re,
        x * m / ms.p0_new.re
    )
}

/// Configuration reproducing one figure.
pub fn preset(name: &str) -> Result<RunConfig> {
    let a = Scenario::set_a();
    let b = Scenario::set_b();
    let cfg = |name: &str, mode, scenario, datasets| RunConfig {
        name: name.into(),
        mode,
        tol: None,
        out: None,
        scenario,
        datasets,
    };
    // grid presets: J at the probes is the flux column
    let grid_exact = |x: f64, t_end: f64, note: String| {
        Dataset::new("exact", Axis::single(x), Axis::range(0.0, t_end, 1001))
            .with_mode(Mode::Exact)
            .with_note(note)
    };
    let c = match name {
        "fig1" => cfg(
            "fig1",
            Mode::Compare,
            a,
            vec![
                Dataset::new("density", Axis::single(100.0), Axis::range(1.0, 150.0, 597))
                    .with_note(arrivals(&a, 100.0)),
            ],
        ),
        "fig2" => {
            let mut d = Dataset::new("terms", Axis::range(-30.0, 60.0, 451), Axis::single(10.0))
                .with_note(markers(&a, 10.0));
            d.terms = vec!["1T".into(), "2T".into(), "3I".into()];
            d.mode = Some(Mode::Exact);
            cfg("fig2", Mode::Exact, a, vec![d])
        }
        "fig3" | "fig5" => {
            let s = if name == "fig3" {
                a
            } else {
                Scenario {
                    v0_old: 0.8,
                    v0_new: 0.2,
                    ..a
                }
            };
            let xs = Axis::range(-150.0, 150.0, 1201);
            cfg(
                name,
                Mode::Exact,
                s,
                vec![
                    Dataset::new("t10", xs.clone(), Axis::single(10.0))
                        .with_note(markers(&s, 10.0)),
                    Dataset::new("t50", xs, Axis::single(50.0)).with_note(markers(&s, 50.0)),
                ],
            )
        }
        "fig4" => cfg(
            "fig4",
            Mode::Exact,
            a,
            vec![
                Dataset::new("omega", Axis::single(100.0), Axis::range(1.0, 200.0, 797))
                    .with_note(arrivals(&a, 100.0)),
            ],
        ),
        "fig6" | "fig8" => {
            let x = if name == "fig6" { -22.48 } else { 22.48 };
            let t_end = 100.0;
            cfg(
                name,
                Mode::Grid,
                b,
                vec![
                    Dataset::new("grid", Axis::single(x), Axis::range(0.0, t_end, 1001))
                        .with_grid(GridParams::new(44.96, 10_000, 1e-6))
                        .with_note(arrivals(&b, x)),
                    grid_exact(x, t_end, arrivals(&b, x)),
                ],
            )
        }
        "fig7" => {
            let t_end = 100.0;
            cfg(
                "fig7",
                Mode::Grid,
                b,
                vec![
                    Dataset::new(
                        "grid_large",
                        Axis::single(0.0),
                        Axis::range(0.0, t_end, 1001),
                    )
                    .with_grid(GridParams::new(179.84, 80_000, 5e-5)),
                    Dataset::new(
                        "grid_small",
                        Axis::single(0.0),
                        Axis::range(0.0, t_end, 1001),
                    )
                    .with_grid(GridParams::new(44.96, 20_000, 5e-5)),
                    grid_exact(0.0, t_end, "same grid density in both boxes".into()),
                ],
            )
        }
        _ => {
            return Err(Error::Config(format!(
                "unknown preset {name:?}; known: {}",
                PRESETS.join(", ")
            )))
        }
    };
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_are_valid_and_round_trip() {
        for p in PRESETS {
            let c = preset(p).unwrap();
            c.validate().unwrap();
            let back = RunConfig::from_toml(&c.to_toml().unwrap()).unwrap();
            assert_eq!(back, c, "{p}");
        }
        assert!(preset("fig9").is_err());
    }

    #[test]
    fn preset_parameters_match_their_scenarios() {
        let f6 = preset("fig6").unwrap();
        assert_eq!(f6.scenario, Scenario::set_b());
        let g = f6.datasets[0].grid.unwrap();
        assert_eq!((g.length, g.n, g.dt), (44.96, 10_000, 1e-6));
        assert_eq!(f6.datasets[0].x.values(), vec![-22.48]);
        let f7 = preset("fig7").unwrap();
        let g = f7.datasets[0].grid.unwrap();
        assert_eq!((g.length, g.n, g.dt), (179.84, 80_000, 5e-5));
        let f3 = preset("fig3").unwrap();
        assert_eq!(f3.datasets.len(), 2);
        assert_eq!(f3.datasets[1].t.values(), vec![50.0]);
        let f5 = preset("fig5").unwrap();
        assert_eq!((f5.scenario.v0_old, f5.scenario.v0_new), (0.8, 0.2));
    }

    #[test]
    fn empty_ranges_are_rejected() {
        let mut c = preset("fig4").unwrap();
        c.datasets[0].t = Axis::range(0.0, 1.0, 0);
        assert!(matches!(c.validate(), Err(Error::Config(_))));
        c.datasets[0].t = Axis::Values(vec![]);
        assert!(c.validate().is_err());
        c.datasets[0].t = Axis::range(5.0, 1.0, 3);
        assert!(c.validate().is_err());
        let mut c = preset("fig4").unwrap();
        c.override_mode(Mode::Grid);
        assert!(c.validate().is_err());
    }

    #[test]
    fn axis_values() {
        assert_eq!(Axis::range(0.0, 1.0, 3).values(), vec![0.0, 0.5, 1.0]);
        assert_eq!(Axis::range(2.0, 2.0, 1).values(), vec![2.0]);
        assert_eq!(parse_term("3I").unwrap(), (3, Alpha::I));
        assert!(parse_term("5T").is_err());
        assert!(parse_term("1X").is_err());
    }
}
