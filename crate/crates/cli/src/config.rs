//! Run configuration: a sectioned `key = value` file plus flag overrides.
//!
//! ```text
//! # comments start with '#'
//! [trammel]
//! pivot_separation_studs = 5      # or pivot_separation_mm
//! pen_offset_mm = 140             # or pen_offset_studs
//! shuttle_length_mm = 32
//! shuttle_width_mm = 8
//! channel_half_length_mm = 72
//!
//! [page]
//! preset = a4                     # or width_mm / height_mm
//! margin_mm = 0
//!
//! [output]
//! format = svg                    # svg | csv
//! path = ellipse.svg              # stdout when absent
//! max_chord_mm = 0.5
//!
//! [solver]
//! tol = 1e-9
//! max_iter = 25
//! ```
//!
//! Stud lengths are converted to millimetres (×8) while parsing.

use std::collections::HashSet;
use std::path::PathBuf;

use ellipsograph::export::PageSpec;
use ellipsograph::solver::SolverConfig;
use ellipsograph::{ShuttleFootprint, TrammelConfig, STUD_MM};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Svg,
    Csv,
}

impl Format {
    fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "svg" => Some(Format::Svg),
            "csv" => Some(Format::Csv),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub pivot_separation_mm: f64,
    pub pen_offset_mm: f64,
    pub shuttle_length_mm: f64,
    pub shuttle_width_mm: f64,
    pub channel_half_length_mm: f64,
    pub page_width_mm: f64,
    pub page_height_mm: f64,
    pub margin_mm: f64,
    pub format: Format,
    pub path: Option<PathBuf>,
    pub max_chord_mm: f64,
    pub solver_tol: f64,
    pub max_iter: usize,
}

impl Default for RunConfig {
    /// Reconstructed layout: the dimensions of the built model were never
    /// published. 5-stud pivot spacing and a 140 mm pen offset draw a
    /// 280 × 200 mm ellipse.
    fn default() -> Self {
        Self {
            pivot_separation_mm: 5.0 * STUD_MM,
            pen_offset_mm: 140.0,
            shuttle_length_mm: 4.0 * STUD_MM,
            shuttle_width_mm: STUD_MM,
            channel_half_length_mm: 72.0,
            page_width_mm: PageSpec::A4.width(),
            page_height_mm: PageSpec::A4.height(),
            margin_mm: 0.0,
            format: Format::Svg,
            path: None,
            max_chord_mm: 0.5,
            solver_tol: 1e-9,
            max_iter: 25,
        }
    }
}

impl RunConfig {
    pub fn trammel(&self) -> Result<TrammelConfig, CliError> {
        let shuttle = ShuttleFootprint::new(self.shuttle_length_mm, self.shuttle_width_mm)
            .map_err(|e| CliError::Validation(e.to_string()))?;
        TrammelConfig::new(
            self.pivot_separation_mm,
            self.pen_offset_mm,
            shuttle,
            self.channel_half_length_mm,
        )
        .map_err(|e| CliError::Validation(e.to_string()))
    }

    pub fn page(&self) -> Result<PageSpec, CliError> {
        PageSpec::new(self.page_width_mm, self.page_height_mm, self.margin_mm)
            .map_err(|e| CliError::Validation(e.to_string()))
    }

    pub fn solver(&self) -> Result<SolverConfig, CliError> {
        SolverConfig::new(
            self.solver_tol,
            self.max_iter,
            SolverConfig::default().fd_step,
        )
        .map_err(|e| CliError::Validation(e.to_string()))
    }

    /// Parses a config file on top of the defaults.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut cfg = Self::default();
        let mut section = String::new();
        let mut seen: HashSet<(String, &'static str)> = HashSet::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let err = |msg: String| CliError::Validation(format!("config line {line_no}: {msg}"));
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                let name = name.trim();
                if !matches!(name, "trammel" | "page" | "output" | "solver") {
                    return Err(err(format!("unknown section [{name}]")));
                }
                section = name.to_string();
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(err(format!("expected `key = value`, got {line:?}")));
            };
            let (key, value) = (key.trim(), value.trim());
            let number = || -> Result<f64, CliError> {
                value
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| err(format!("`{key}` expects a number, got {value:?}")))
            };
            // one slot per physical quantity, so studs and mm cannot both be set
            let slot: &'static str = match (section.as_str(), key) {
                ("trammel", "pivot_separation_mm") => {
                    cfg.pivot_separation_mm = number()?;
                    "pivot_separation"
                }
                ("trammel", "pivot_separation_studs") => {
                    cfg.pivot_separation_mm = number()? * STUD_MM;
                    "pivot_separation"
                }
                ("trammel", "pen_offset_mm") => {
                    cfg.pen_offset_mm = number()?;
                    "pen_offset"
                }
                ("trammel", "pen_offset_studs") => {
                    cfg.pen_offset_mm = number()? * STUD_MM;
                    "pen_offset"
                }
                ("trammel", "shuttle_length_mm") => {
                    cfg.shuttle_length_mm = number()?;
                    "shuttle_length"
                }
                ("trammel", "shuttle_width_mm") => {
                    cfg.shuttle_width_mm = number()?;
                    "shuttle_width"
                }
                ("trammel", "channel_half_length_mm") => {
                    cfg.channel_half_length_mm = number()?;
                    "channel_half_length"
                }
                ("page", "preset") => {
                    if !value.eq_ignore_ascii_case("a4") {
                        return Err(err(format!("unknown page preset {value:?}")));
                    }
                    cfg.page_width_mm = PageSpec::A4.width();
                    cfg.page_height_mm = PageSpec::A4.height();
                    "page_size"
                }
                ("page", "width_mm") => {
                    cfg.page_width_mm = number()?;
                    "page_width"
                }
                ("page", "height_mm") => {
                    cfg.page_height_mm = number()?;
                    "page_height"
                }
                ("page", "margin_mm") => {
                    cfg.margin_mm = number()?;
                    "margin"
                }
                ("output", "format") => {
                    cfg.format = Format::parse(value)
                        .ok_or_else(|| err(format!("unknown format {value:?}")))?;
                    "format"
                }
                ("output", "path") => {
                    cfg.path = Some(PathBuf::from(value));
                    "path"
                }
                ("output", "max_chord_mm") => {
                    cfg.max_chord_mm = number()?;
                    "max_chord"
                }
                ("solver", "tol") => {
                    cfg.solver_tol = number()?;
                    "tol"
                }
                ("solver", "max_iter") => {
                    cfg.max_iter = value
                        .parse()
                        .map_err(|_| err(format!("`max_iter` expects a count, got {value:?}")))?;
                    "max_iter"
                }
                ("", _) => return Err(err(format!("`{key}` appears before any section"))),
                (s, k) => return Err(err(format!("unknown key `{k}` in [{s}]"))),
            };
            if !seen.insert((section.clone(), slot)) {
                return Err(err(format!(
                    "`{slot}` is set more than once in [{section}]"
                )));
            }
            if slot == "page_size"
                && (seen.contains(&(section.clone(), "page_width"))
                    || seen.contains(&(section.clone(), "page_height")))
            {
                return Err(err("`preset` conflicts with width_mm/height_mm".into()));
            }
            if matches!(slot, "page_width" | "page_height")
                && seen.contains(&(section.clone(), "page_size"))
            {
                return Err(err("`preset` conflicts with width_mm/height_mm".into()));
            }
        }
        Ok(cfg)
    }
}
