use std::f64::consts::TAU;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use ellipsograph::bom::{self, Bom};
use ellipsograph::clearance::{self, ClearanceReport};
use ellipsograph::export::{self, Trace};
use ellipsograph::solver::{self, ConstraintState};
use ellipsograph::trammel::design_for_ellipse;
use ellipsograph::{AngleSet, Exec, ShuttleFootprint, Tolerances, TrammelConfig, Variant, STUD_MM};
use serde::Serialize;

use crate::config::{Format, RunConfig};
use crate::{CliError, Command, ConfigArgs, VariantArg};

/// Newton steps allowed per continuation step before `verify` complains.
const MAX_SWEEP_ITERATIONS: usize = 6;
const SWEEP_STEPS: usize = 720;
const GRID_ANGLES: usize = 10_000;

pub fn dispatch(command: Command, out: &mut dyn Write) -> Result<(), CliError> {
    let text = match command {
        Command::Design {
            a,
            b,
            variant,
            shuttle_length_mm,
            shuttle_width_mm,
        } => cmd_design(a, b, variant, shuttle_length_mm, shuttle_width_mm)?,
        Command::Analyze {
            config,
            json,
            angle_tol,
        } => cmd_analyze(&load(&config)?, json, angle_tol)?,
        Command::Trace {
            config,
            format,
            output,
        } => {
            let cfg = load(&config)?;
            let format = format.unwrap_or(cfg.format);
            cmd_trace(&cfg, format, output.as_deref())?
        }
        Command::Svg { config, output } => {
            cmd_trace(&load(&config)?, Format::Svg, output.as_deref())?
        }
        Command::Csv { config, output } => {
            cmd_trace(&load(&config)?, Format::Csv, output.as_deref())?
        }
        Command::Bom { catalog } => cmd_bom(catalog.as_deref())?,
        Command::Verify { config, tol } => cmd_verify(&load(&config)?, tol)?,
    };
    out.write_all(text.as_bytes())
        .map_err(|e| CliError::Io(format!("writing output: {e}")))
}

/// Reads the config file, if any, then applies flag overrides.
pub fn load(args: &ConfigArgs) -> Result<RunConfig, CliError> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Io(format!("reading {}: {e}", path.display())))?;
            RunConfig::parse(&text)?
        }
        None => RunConfig::default(),
    };
    let set = |slot: &mut f64, v: Option<f64>| {
        if let Some(v) = v {
            *slot = v;
        }
    };
    set(&mut cfg.pivot_separation_mm, args.pivot_separation_mm);
    set(
        &mut cfg.pivot_separation_mm,
        args.pivot_separation_studs.map(|v| v * STUD_MM),
    );
    set(&mut cfg.pen_offset_mm, args.pen_offset_mm);
    set(
        &mut cfg.pen_offset_mm,
        args.pen_offset_studs.map(|v| v * STUD_MM),
    );
    set(&mut cfg.shuttle_length_mm, args.shuttle_length_mm);
    set(&mut cfg.shuttle_width_mm, args.shuttle_width_mm);
    set(&mut cfg.channel_half_length_mm, args.channel_half_length_mm);
    set(&mut cfg.page_width_mm, args.page_width_mm);
    set(&mut cfg.page_height_mm, args.page_height_mm);
    set(&mut cfg.margin_mm, args.margin_mm);
    set(&mut cfg.max_chord_mm, args.max_chord_mm);
    set(&mut cfg.solver_tol, args.solver_tol);
    if let Some(n) = args.max_iter {
        cfg.max_iter = n;
    }
    Ok(cfg)
}

fn validation<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Validation(e.to_string())
}

fn mm_and_studs(mm: f64) -> String {
    format!("{mm} mm ({} studs)", mm / STUD_MM)
}

pub fn cmd_design(
    a: f64,
    b: f64,
    variant: VariantArg,
    shuttle_length: f64,
    shuttle_width: f64,
) -> Result<String, CliError> {
    let variant = match variant {
        VariantArg::Outside => Variant::PenOutside,
        VariantArg::Between => Variant::PenBetween,
    };
    let shuttle = ShuttleFootprint::new(shuttle_length, shuttle_width).map_err(validation)?;
    let draft = design_for_ellipse(a, b, variant, shuttle, 0.0).map_err(validation)?;
    let cfg = draft
        .with_channel_half_length(draft.required_channel_half_length())
        .map_err(validation)?;
    let (ax, ay) = cfg.semi_axes();
    let mut s = String::new();
    let _ = writeln!(
        s,
        "variant: {}",
        if variant == Variant::PenOutside {
            "pen_outside"
        } else {
            "pen_between"
        }
    );
    let _ = writeln!(
        s,
        "pivot_separation: {}",
        mm_and_studs(cfg.pivot_separation())
    );
    let _ = writeln!(s, "pen_offset: {}", mm_and_studs(cfg.pen_offset()));
    let _ = writeln!(s, "semi_axes: {ax} x {ay} mm");
    let _ = writeln!(
        s,
        "required_channel_half_length: {}",
        mm_and_studs(cfg.channel_half_length())
    );
    Ok(s)
}

#[derive(Debug, Serialize)]
struct ArcJson {
    lo_rad: f64,
    hi_rad: f64,
    width_rad: f64,
    cause: &'static str,
}

#[derive(Debug, Serialize)]
struct AnalyzeJson {
    pivot_separation_mm: f64,
    pen_offset_mm: f64,
    semi_axes_mm: [f64; 2],
    shuttle_length_mm: f64,
    shuttle_width_mm: f64,
    channel_half_length_mm: f64,
    required_channel_half_length_mm: f64,
    drawable_fraction: f64,
    forbidden: Vec<ArcJson>,
}

pub fn analyze(cfg: &TrammelConfig, angle_tol: f64) -> Result<ClearanceReport, CliError> {
    if !(angle_tol.is_finite() && angle_tol > 0.0) {
        return Err(CliError::Validation(format!(
            "angle tolerance must be positive, got {angle_tol}"
        )));
    }
    Ok(clearance::forbidden_arcs(cfg, angle_tol))
}

pub fn cmd_analyze(run: &RunConfig, json: bool, angle_tol: f64) -> Result<String, CliError> {
    let cfg = run.trammel()?;
    let report = analyze(&cfg, angle_tol)?;
    let (a, b) = cfg.semi_axes();
    if json {
        let doc = AnalyzeJson {
            pivot_separation_mm: cfg.pivot_separation(),
            pen_offset_mm: cfg.pen_offset(),
            semi_axes_mm: [a, b],
            shuttle_length_mm: cfg.shuttle().length,
            shuttle_width_mm: cfg.shuttle().width,
            channel_half_length_mm: cfg.channel_half_length(),
            required_channel_half_length_mm: cfg.required_channel_half_length(),
            drawable_fraction: report.drawable_fraction,
            forbidden: report
                .boundaries
                .iter()
                .map(|arc| ArcJson {
                    lo_rad: arc.lo,
                    hi_rad: arc.hi,
                    width_rad: arc.width(),
                    cause: arc.cause.as_str(),
                })
                .collect(),
        };
        let mut s = serde_json::to_string_pretty(&doc).map_err(validation)?;
        s.push('\n');
        return Ok(s);
    }
    let mut s = String::new();
    let _ = writeln!(
        s,
        "trammel: pivot separation {} mm, pen offset {} mm, shuttles {} x {} mm",
        cfg.pivot_separation(),
        cfg.pen_offset(),
        cfg.shuttle().length,
        cfg.shuttle().width
    );
    let _ = writeln!(s, "ellipse: {a} x {b} mm semi-axes");
    let _ = writeln!(
        s,
        "channels: half-length {} mm (full turn needs {} mm)",
        cfg.channel_half_length(),
        cfg.required_channel_half_length()
    );
    let _ = writeln!(s, "drawable: {:.2}%", 100.0 * report.drawable_fraction);
    let _ = writeln!(s, "forbidden arcs: {}", report.boundaries.len());
    for (i, arc) in report.boundaries.iter().enumerate() {
        let _ = writeln!(
            s,
            "  {}: {:.6} .. {:.6} rad ({:.3} .. {:.3} deg), width {:.6} rad, {}",
            i + 1,
            arc.lo,
            arc.hi,
            arc.lo.to_degrees(),
            arc.hi.to_degrees(),
            arc.width(),
            arc.cause.as_str()
        );
    }
    Ok(s)
}

/// Drawable trace of a run configuration.
pub fn trace(run: &RunConfig) -> Result<(TrammelConfig, Trace), CliError> {
    let cfg = run.trammel()?;
    let domain = clearance::drawable_trace_domain(&cfg, Tolerances::default().angle_tol);
    let trace = export::sample_trace(&cfg, &domain, run.max_chord_mm).map_err(validation)?;
    Ok((cfg, trace))
}

pub fn render(run: &RunConfig, format: Format) -> Result<String, CliError> {
    let (cfg, trace) = trace(run)?;
    match format {
        Format::Csv => Ok(export::to_csv(&trace)),
        Format::Svg => {
            let ellipse = cfg.ellipse();
            let page = run.page()?;
            let page = page.oriented_for(&ellipse).ok_or_else(|| {
                CliError::Validation(format!(
                    "a {} x {} mm ellipse does not fit a {} x {} mm page with {} mm margins",
                    2.0 * ellipse.semi_x(),
                    2.0 * ellipse.semi_y(),
                    page.width(),
                    page.height(),
                    page.margin()
                ))
            })?;
            export::to_svg(&trace, &page).map_err(validation)
        }
    }
}

pub fn cmd_trace(
    run: &RunConfig,
    format: Format,
    output: Option<&Path>,
) -> Result<String, CliError> {
    let doc = render(run, format)?;
    let path: Option<PathBuf> = output.map(Path::to_path_buf).or_else(|| run.path.clone());
    match path {
        None => Ok(doc),
        Some(path) => {
            std::fs::write(&path, doc.as_bytes())
                .map_err(|e| CliError::Io(format!("writing {}: {e}", path.display())))?;
            Ok(format!("wrote {}\n", path.display()))
        }
    }
}

pub fn cmd_bom(catalog: Option<&Path>) -> Result<String, CliError> {
    let bom = match catalog {
        None => bom::default_catalog(),
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Io(format!("reading {}: {e}", path.display())))?;
            bom::load_catalog(&text)
                .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?
        }
    };
    Ok(format_bom(&bom, catalog.is_none()))
}

fn format_bom(bom: &Bom, builtin: bool) -> String {
    let name_width = bom
        .lines()
        .iter()
        .map(|l| l.name.len())
        .max()
        .unwrap_or(4)
        .max(4);
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:<8} {:<name_width$} {:>10} {:>4} {:>10}",
        "part", "name", "unit", "qty", "total"
    );
    for l in bom.lines() {
        let _ = writeln!(
            s,
            "{:<8} {:<name_width$} {:>10} {:>4} {:>10}",
            l.part_id,
            l.name,
            bom::format_eur(l.unit_price_cents),
            l.quantity,
            bom::format_eur(l.line_total_cents())
        );
    }
    let totals = bom.totals();
    let _ = writeln!(
        s,
        "{} lines, {} parts, total {}",
        bom.lines().len(),
        totals.part_count,
        bom::format_eur(totals.cost_cents)
    );
    if builtin {
        let _ = writeln!(
            s,
            "note: a G2 pen refill (below 1 EUR) is also needed and is not listed"
        );
    }
    s
}

/// Outcome of one named verification check.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, value: f64, tol: f64) -> Check {
    Check {
        name,
        passed: value <= tol,
        detail: format!("max {value:.3e} (tol {tol:.1e})"),
    }
}

/// Runs every verification check. `tol` replaces all tolerances when given.
pub fn verify(run: &RunConfig, tol: Option<f64>) -> Result<Vec<Check>, CliError> {
    let tols = match tol {
        Some(t) => Tolerances::new(t, t, t).map_err(validation)?,
        None => Tolerances {
            solver_tol: run.solver_tol,
            ..Tolerances::default()
        },
    };
    let solver_cfg = {
        let mut c = run.solver()?;
        c.tol = tols.solver_tol;
        c
    };
    let (cfg, trace) = trace(run)?;
    let ellipse = cfg.ellipse();
    let exec = Exec::default();

    // the drawable trace plus a uniform grid, so a blocked mechanism still gets checked
    let mut points: Vec<_> = trace.samples().map(|s| s.point).collect();
    points.extend((0..GRID_ANGLES).map(|k| cfg.pen_at(TAU * k as f64 / GRID_ANGLES as f64)));
    let residual = exec
        .max_by_index(points.len(), |i| ellipse.implicit_residual(points[i]).abs())
        .unwrap_or(0.0);
    let major = ellipse.major_semi_axis();
    let focal = exec
        .max_by_index(points.len(), |i| {
            (ellipse.focal_sum(points[i]) - 2.0 * major).abs()
        })
        .unwrap_or(0.0);
    let l = cfg.pivot_separation();
    let rod = exec
        .max_by_index(GRID_ANGLES, |k| {
            let st = cfg.rod_state(TAU * k as f64 / GRID_ANGLES as f64);
            let length = (st.pivot_x.distance(st.pivot_y) - l).abs();
            let cross = (st.pivot_x - st.pivot_y).cross(st.pen - st.pivot_y).abs();
            length.max(cross / l)
        })
        .unwrap_or(0.0);

    let mut checks = vec![
        check("implicit_residual", residual, tols.residual_tol),
        check("focal_sum", focal, tols.solver_tol),
        check("rod_constraints", rod, tols.solver_tol),
    ];

    checks.push(match solver::sweep(l, 0.0, TAU, SWEEP_STEPS, &solver_cfg) {
        Ok(sols) => {
            let dev = sols
                .iter()
                .map(|s| s.state.distance(&ConstraintState::closed_form(l, s.theta)))
                .fold(0.0, f64::max);
            let iters = sols.iter().map(|s| s.iterations).max().unwrap_or(0);
            Check {
                name: "solver_sweep",
                passed: dev <= tols.solver_tol && iters <= MAX_SWEEP_ITERATIONS,
                detail: format!(
                    "max deviation {dev:.3e} (tol {:.1e}), max iterations {iters} (limit {MAX_SWEEP_ITERATIONS})",
                    tols.solver_tol
                ),
            }
        }
        Err(e) => Check {
            name: "solver_sweep",
            passed: false,
            detail: e.to_string(),
        },
    });

    let report = clearance::forbidden_arcs(&cfg, tols.angle_tol);
    let from_bounds = 1.0 - report.boundaries.iter().map(|a| a.width()).sum::<f64>() / TAU;
    let domain: AngleSet = report.drawable();
    checks.push(Check {
        name: "clearance_report",
        passed: (from_bounds - report.drawable_fraction).abs() <= 1e-12
            && (domain.measure() / TAU - report.drawable_fraction).abs() <= 1e-12,
        detail: format!("drawable {:.4}%", 100.0 * report.drawable_fraction),
    });

    let page = run.page()?;
    checks.push(Check {
        name: "page_fit",
        passed: export::fits_page(&ellipse, &page),
        detail: format!(
            "{} x {} mm on {} x {} mm, margin {} mm",
            2.0 * ellipse.semi_x(),
            2.0 * ellipse.semi_y(),
            page.width(),
            page.height(),
            page.margin()
        ),
    });
    Ok(checks)
}

pub fn cmd_verify(run: &RunConfig, tol: Option<f64>) -> Result<String, CliError> {
    let checks = verify(run, tol)?;
    let mut s = String::new();
    for c in &checks {
        let _ = writeln!(
            s,
            "{} {}: {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.detail
        );
    }
    let failed: Vec<&str> = checks
        .iter()
        .filter(|c| !c.passed)
        .map(|c| c.name)
        .collect();
    if failed.is_empty() {
        let _ = writeln!(s, "all {} checks passed", checks.len());
        Ok(s)
    } else {
        Err(CliError::Verification(format!(
            "{}\n{s}",
            failed.join(", ")
        )))
    }
}
