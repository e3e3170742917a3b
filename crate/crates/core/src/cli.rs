//! Command-line front door.
//!
//! Exit codes: 0 when the computation ran and every embedded check passed,
//! 1 when it ran but a claim check failed (the report names it), 2 for
//! input or spec errors.

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::fs;
use std::path::{Path, PathBuf};

use crate::apps;
use crate::dynamics;
use crate::error::{Error, Result};
use crate::geometry::{self, CaratheodoryLimit};
use crate::grid::{GridSpec, RegionMask};
use crate::plseq;
use crate::render;
use crate::seq::SequenceSpec;
use crate::sphere::ExtComplex;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CLAIM_FAILED: i32 = 1;
pub const EXIT_INPUT_ERROR: i32 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "nonauto",
    about = "Iterated Julia sets and polynomial-like sequences for non-autonomous polynomial iteration"
)]
pub struct CliArgs {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct CommonOpts {
    /// Grid resolution (cells per side, power of two in [128, 4096])
    #[arg(long = "grid", default_value_t = 512)]
    pub grid: usize,
    /// Chart half-width; defaults to escape radius + 1 for the sequence
    #[arg(long = "half-width")]
    pub half_width: Option<f64>,
    /// Sieve depth
    #[arg(long = "depth")]
    pub depth: Option<usize>,
    /// Output file
    #[arg(long = "out")]
    pub out: Option<PathBuf>,
    /// Seed for every sampled quantity
    #[arg(long = "seed", default_value_t = 42)]
    pub seed: u64,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Render a filled-set approximation as PGM (or PNG by extension)
    Render {
        #[arg(long = "seq")]
        seq: PathBuf,
        #[arg(long = "time", default_value_t = 0)]
        time: usize,
        /// Also write the connected-component report here
        #[arg(long = "components-out")]
        components_out: Option<PathBuf>,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Sampled forward invariance of boundary cells between two times
    Invariance {
        #[arg(long = "seq")]
        seq: PathBuf,
        #[arg(long = "time", default_value_t = 0)]
        time: usize,
        #[arg(long = "n", default_value_t = 3)]
        n: usize,
        #[arg(long = "samples", default_value_t = 200)]
        samples: usize,
        /// Deviation tolerance in cells for the exit code
        #[arg(long = "tolerance", default_value_t = 3.0)]
        tolerance: f64,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Build a polynomial-like disc-pair sequence and verify it
    Plbuild {
        #[arg(long = "seq")]
        seq: PathBuf,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Stage-I restriction of a polynomial-like sequence
    Restrict {
        #[arg(long = "seq")]
        seq: PathBuf,
        #[arg(long = "B", default_value_t = 4.0)]
        b: f64,
        /// Also export the annulus equators and their pullbacks as CSV
        /// curves into this directory
        #[arg(long = "curves-dir")]
        curves_dir: Option<PathBuf>,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Filled-set preservation under restriction
    Lemma51 {
        #[arg(long = "seq")]
        seq: PathBuf,
        #[arg(long = "B", default_value_t = 4.0)]
        b: f64,
        #[arg(long = "time", default_value_t = 0)]
        time: usize,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Carathéodory limit of a pointed-domain family
    Caratheodory {
        #[arg(long = "seq")]
        seq: PathBuf,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Quasicircle turning constant for small-c quadratic sequences
    Thm71 {
        #[arg(long = "seq")]
        seq: PathBuf,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Piece geometry of the counterexample sequence at time t_j
    Thm72 {
        /// Truncation level, or "limit"
        #[arg(long = "n", default_value = "limit")]
        n: String,
        #[arg(long = "j", default_value_t = 1)]
        j: u32,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Separation data for z^2 + 2
    Separation {
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Bi-equicontinuity violation ratios over a range of j
    Violation {
        #[arg(long = "j-max", default_value_t = 3)]
        j_max: u32,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Hausdorff distances between truncated and limit boundary sets
    Convergence {
        #[arg(long = "n", default_value_t = 4)]
        n: u32,
        #[arg(long = "time", default_value_t = 0)]
        time: usize,
        #[command(flatten)]
        common: CommonOpts,
    },
}

fn validate_common(c: &CommonOpts) -> Result<()> {
    let r = c.grid;
    if !(128..=4096).contains(&r) || !r.is_power_of_two() {
        return Err(Error::SpecInput(format!(
            "resolution {} must be a power of two in [128, 4096]",
            r
        )));
    }
    if let Some(d) = c.depth {
        if !(1..=500).contains(&d) {
            return Err(Error::SpecInput(format!(
                "depth {} must lie in [1, 500]",
                d
            )));
        }
    }
    Ok(())
}

fn read_seq(path: &Path) -> Result<SequenceSpec> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::SpecInput(format!("{}: {}", path.display(), e)))?;
    SequenceSpec::from_json(&text)
}

fn chart_for(seq: &SequenceSpec, common: &CommonOpts) -> GridSpec {
    match common.half_width {
        Some(hw) => GridSpec {
            center: Complex64::new(0.0, 0.0),
            half_width: hw,
            resolution: common.grid,
        },
        None => GridSpec::escape_chart(seq.escape_radius(), common.grid),
    }
}

fn out_path(common: &CommonOpts, default_name: &str) -> PathBuf {
    common
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(default_name))
}

/// PL sequence spec file: {"from_sequence": <sequence spec>, "rho": 4.0,
/// "horizon": 8}
#[derive(Serialize, Deserialize)]
struct PlSpecFile {
    from_sequence: serde_json::Value,
    rho: f64,
    horizon: usize,
}

fn read_pl_spec(path: &Path) -> Result<(SequenceSpec, f64, usize)> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::SpecInput(format!("{}: {}", path.display(), e)))?;
    let file: PlSpecFile =
        serde_json::from_str(&text).map_err(|e| Error::SpecInput(e.to_string()))?;
    let seq = SequenceSpec::from_json(&file.from_sequence.to_string())?;
    Ok((seq, file.rho, file.horizon))
}

/// Pointed-domain family spec for the caratheodory command:
/// {"family": "shrinking-annuli" | "shrinking-discs" | "constant-disc",
///  "count": 64, "half_width": 1.2}
#[derive(Serialize, Deserialize)]
struct FamilySpecFile {
    family: String,
    #[serde(default = "default_count")]
    count: usize,
    #[serde(default = "default_family_hw")]
    half_width: f64,
}

fn default_count() -> usize {
    64
}

fn default_family_hw() -> f64 {
    1.2
}

fn build_family(spec: &FamilySpecFile, resolution: usize) -> Result<Vec<RegionMask>> {
    let grid = GridSpec::new(Complex64::new(0.0, 0.0), spec.half_width, resolution)?;
    let bp = ExtComplex::finite(0.0, 0.0);
    let mut out = Vec::new();
    match spec.family.as_str() {
        "constant-disc" => {
            for _ in 0..spec.count.max(4) {
                out.push(RegionMask::disc(grid, Complex64::new(0.0, 0.0), 1.0, bp)?);
            }
        }
        "shrinking-annuli" => {
            for n in 2..=spec.count.max(8) {
                let c = Complex64::new(1.0 - 2.0 / n as f64, 0.0);
                let r = 1.0 / n as f64;
                let mut bits = vec![false; grid.cells()];
                for iy in 0..resolution {
                    for ix in 0..resolution {
                        let z = grid.cell_center(ix, iy);
                        bits[grid.index(ix, iy)] = z.norm() < 1.0 && (z - c).norm() > r;
                    }
                }
                // lenient about the base point for the first members where
                // the removed disc grazes the origin
                out.push(RegionMask {
                    grid,
                    bits,
                    contains_infinity: false,
                    basepoint: bp,
                });
            }
        }
        "shrinking-discs" => {
            for n in 2..=spec.count.max(8) {
                out.push(RegionMask::disc(
                    grid,
                    Complex64::new(0.0, 0.0),
                    1.0 / n as f64,
                    bp,
                )?);
            }
        }
        other => return Err(Error::SpecInput(format!("unknown family {:?}", other))),
    }
    Ok(out)
}

/// Runs a parsed command; returns the exit code.
pub fn run(args: CliArgs) -> i32 {
    match dispatch(args) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e);
            match e {
                Error::SpecInput(_) | Error::Hypothesis | Error::Io(_) | Error::Json(_) => {
                    EXIT_INPUT_ERROR
                }
                _ => EXIT_CLAIM_FAILED,
            }
        }
    }
}

fn dispatch(args: CliArgs) -> Result<i32> {
    match args.command {
        Command::Render {
            seq,
            time,
            components_out,
            common,
        } => {
            validate_common(&common)?;
            let s = read_seq(&seq)?;
            let grid = chart_for(&s, &common);
            let depth = common.depth.unwrap_or(40);
            let ja = dynamics::filled_julia(&s, time, grid, depth)?;
            let path = out_path(&common, "render.pgm");
            render::write_image(&path, &ja)?;
            if let Some(cpath) = components_out {
                let comps = dynamics::components(&ja.k_mask);
                render::write_json(&cpath, &comps)?;
            }
            println!("wrote {}", path.display());
            Ok(EXIT_OK)
        }
        Command::Invariance {
            seq,
            time,
            n,
            samples,
            tolerance,
            common,
        } => {
            validate_common(&common)?;
            let s = read_seq(&seq)?;
            let grid = chart_for(&s, &common);
            let depth = common.depth.unwrap_or(30);
            let ja_m = dynamics::filled_julia(&s, time, grid, depth)?;
            let ja_n = dynamics::filled_julia(&s, n, grid, depth)?;
            if ja_m.j_cells.is_empty() || ja_n.j_cells.is_empty() {
                return Err(Error::EmptyMask);
            }
            let mut rng = ChaCha8Rng::seed_from_u64(common.seed);
            let dev = dynamics::invariance_check(&s, time, n, &ja_m, &ja_n, samples, &mut rng);
            #[derive(Serialize)]
            struct Report {
                m: usize,
                n: usize,
                samples: usize,
                max_cell_deviation: f64,
                tolerance: f64,
                pass: bool,
            }
            let rep = Report {
                m: time,
                n,
                samples,
                max_cell_deviation: dev,
                tolerance,
                pass: dev <= tolerance,
            };
            render::write_json(&out_path(&common, "invariance.json"), &rep)?;
            println!(
                "invariance deviation {} cells (tolerance {})",
                dev, tolerance
            );
            Ok(if rep.pass { EXIT_OK } else { EXIT_CLAIM_FAILED })
        }
        Command::Plbuild { seq, common } => {
            validate_common(&common)?;
            let (s, rho, horizon) = read_pl_spec(&seq)?;
            let pl = plseq::disc_pl_from_polys(&s, rho, horizon, common.grid)?;
            let report = plseq::verify_pl(&pl, pl.constant)?;
            render::write_json(&out_path(&common, "plbuild.json"), &report)?;
            println!(
                "pl1 {} pl2 {} pl3 {} (constant {:.4})",
                report.pl1_pass, report.pl2_pass, report.pl3_pass, report.constant
            );
            Ok(if report.all_pass() {
                EXIT_OK
            } else {
                EXIT_CLAIM_FAILED
            })
        }
        Command::Restrict {
            seq,
            b,
            curves_dir,
            common,
        } => {
            validate_common(&common)?;
            let (s, rho, horizon) = read_pl_spec(&seq)?;
            let pl = plseq::disc_pl_from_polys(&s, rho, horizon, common.grid)?;
            let (restricted, stages) = plseq::restrict(&pl, b)?;
            let original = plseq::verify_pl(&pl, pl.constant)?;
            let report = restriction_report(&pl, &restricted, &stages, &original)?;
            render::write_json(&out_path(&common, "restrict.json"), &report)?;
            if let Some(dir) = curves_dir {
                fs::create_dir_all(&dir)?;
                for (m, st) in stages.iter().enumerate() {
                    render::write_curve_csv(
                        &dir.join(format!("equator_{:03}.csv", m)),
                        &st.gamma_outer,
                    )?;
                    render::write_curve_csv(
                        &dir.join(format!("pullback_{:03}.csv", m)),
                        &st.gamma_inner,
                    )?;
                }
            }
            let pass = report
                .stages
                .iter()
                .all(|r| r.separating && r.degrees_match)
                && report.pl_report.all_pass();
            println!("restriction stages: {}", report.stages.len());
            Ok(if pass { EXIT_OK } else { EXIT_CLAIM_FAILED })
        }
        Command::Lemma51 {
            seq,
            b,
            time,
            common,
        } => {
            validate_common(&common)?;
            let (s, rho, horizon) = read_pl_spec(&seq)?;
            let depth = common.depth.unwrap_or(30);
            if time + depth > horizon {
                return Err(Error::HorizonExhausted {
                    time,
                    depth,
                    horizon,
                });
            }
            let pl = plseq::disc_pl_from_polys(&s, rho, horizon, common.grid)?;
            let (restricted, _) = plseq::restrict(&pl, b)?;
            let frac = plseq::restriction_preserves_k(&pl, &restricted, time, depth)?;
            #[derive(Serialize)]
            struct Report {
                time: usize,
                depth: usize,
                symmetric_difference_fraction: f64,
                pass: bool,
            }
            let rep = Report {
                time,
                depth,
                symmetric_difference_fraction: frac,
                pass: frac <= 0.01,
            };
            render::write_json(&out_path(&common, "lemma51.json"), &rep)?;
            println!("symmetric difference fraction {}", frac);
            Ok(if rep.pass { EXIT_OK } else { EXIT_CLAIM_FAILED })
        }
        Command::Caratheodory { seq, common } => {
            validate_common(&common)?;
            let text = fs::read_to_string(&seq)
                .map_err(|e| Error::SpecInput(format!("{}: {}", seq.display(), e)))?;
            let spec: FamilySpecFile =
                serde_json::from_str(&text).map_err(|e| Error::SpecInput(e.to_string()))?;
            let family = build_family(&spec, common.grid)?;
            let limit = geometry::caratheodory_limit(&family)?;
            #[derive(Serialize)]
            struct Report {
                outcome: String,
                basepoint: [f64; 2],
                cells: usize,
                caratheodory_bound: Option<f64>,
            }
            let rep = match &limit {
                CaratheodoryLimit::Domain(m) => Report {
                    outcome: "domain".into(),
                    basepoint: m
                        .basepoint
                        .as_finite()
                        .map(|z| [z.re, z.im])
                        .unwrap_or([f64::NAN, f64::NAN]),
                    cells: m.cell_count(),
                    caratheodory_bound: geometry::caratheodory_bound_disc(m).ok(),
                },
                CaratheodoryLimit::DegeneratePoint(p) => Report {
                    outcome: "degenerate-point".into(),
                    basepoint: p.as_finite().map(|z| [z.re, z.im]).unwrap_or([f64::NAN; 2]),
                    cells: 0,
                    caratheodory_bound: None,
                },
            };
            render::write_json(&out_path(&common, "caratheodory.json"), &rep)?;
            println!("outcome: {}", rep.outcome);
            Ok(EXIT_OK)
        }
        Command::Thm71 { seq, common } => {
            validate_common(&common)?;
            let s = read_seq(&seq)?;
            let grid = chart_for(&s, &common);
            let depth = common.depth.unwrap_or(40);
            let rep = apps::thm71_quasicircle(&s, grid, depth)?;
            render::write_json(&out_path(&common, "thm71.json"), &rep)?;
            println!("turning constant {}", rep.constant);
            Ok(EXIT_OK)
        }
        Command::Thm72 { n, j, common } => {
            validate_common(&common)?;
            let n_opt = parse_n(&n)?;
            let seq = apps::counterexample_seq(n_opt);
            let grid = chart_for(&seq, &common);
            let depth = common.depth.unwrap_or(40);
            let row = apps::thm72_geometry(n_opt, j, grid, depth)?;
            let containment = apps::thm72_containment(j, grid, depth)?;
            #[derive(Serialize)]
            struct Report {
                n: Option<u32>,
                row: apps::Thm72Row,
                containment_pass: bool,
            }
            let expected = 1usize << (j + 1);
            let rep = Report {
                n: n_opt,
                row,
                containment_pass: containment,
            };
            render::write_json(&out_path(&common, "thm72.json"), &rep)?;
            println!(
                "components {} (expected {}), containment {}",
                rep.row.component_count, expected, containment
            );
            Ok(if rep.row.component_count == expected && containment {
                EXIT_OK
            } else {
                EXIT_CLAIM_FAILED
            })
        }
        Command::Separation { common } => {
            validate_common(&common)?;
            let seq = apps::z2plus2_sequence();
            let grid = chart_for(&seq, &common);
            let depth = common.depth.unwrap_or(5);
            let rep = apps::z2plus2_separation(grid, depth)?;
            render::write_json(&out_path(&common, "separation.json"), &rep)?;
            println!("R {} delta {} components {}", rep.r, rep.delta, rep.components);
            let pass = rep.delta > 0.0
                && rep.components == 2
                && rep.circle_points_escaped == rep.circle_points_total
                && rep.component_gap >= rep.delta - 4.0 * grid.cell_width();
            Ok(if pass { EXIT_OK } else { EXIT_CLAIM_FAILED })
        }
        Command::Violation { j_max, common } => {
            validate_common(&common)?;
            let seq = apps::counterexample_seq(None);
            let grid = chart_for(&seq, &common);
            let depth = common.depth.unwrap_or(6);
            let sep_seq = apps::z2plus2_sequence();
            let sep_grid = GridSpec::escape_chart(sep_seq.escape_radius(), 512);
            let sep = apps::z2plus2_separation(sep_grid, 5)?;

            // full geometry report: per-j rows for the limit sequence, the
            // z^2+2 separation data, and the ratios delta / gap
            #[derive(Serialize)]
            struct Z2Plus2 {
                #[serde(rename = "R")]
                r: f64,
                delta: f64,
            }
            #[derive(Serialize)]
            struct Report {
                n: String,
                rows: Vec<apps::Thm72Row>,
                z2plus2: Z2Plus2,
                violation_ratios: Vec<f64>,
                strictly_increasing: bool,
            }
            let mut rows = Vec::new();
            let mut ratios = Vec::new();
            for j in 1..=j_max {
                let row = apps::thm72_geometry(None, j, grid, depth)?;
                let gap = row.adjacent_gap.ok_or_else(|| {
                    Error::DepthUnsuitable(format!(
                        "single component at time {}; no adjacent gap",
                        row.time_index
                    ))
                })?;
                ratios.push(sep.delta / gap);
                rows.push(row);
            }
            let increasing = ratios.windows(2).all(|w| w[0] < w[1]);
            let rep = Report {
                n: "limit".into(),
                rows,
                z2plus2: Z2Plus2 {
                    r: sep.r,
                    delta: sep.delta,
                },
                violation_ratios: ratios,
                strictly_increasing: increasing,
            };
            render::write_json(&out_path(&common, "violation.json"), &rep)?;
            println!("ratios {:?}", rep.violation_ratios);
            Ok(if increasing { EXIT_OK } else { EXIT_CLAIM_FAILED })
        }
        Command::Convergence { n, time, common } => {
            validate_common(&common)?;
            let seq = apps::counterexample_seq(None);
            let grid = chart_for(&seq, &common);
            let depth = common.depth.unwrap_or(6);
            let n_list: Vec<u32> = (1..=n).collect();
            let dists = apps::hausdorff_convergence(&n_list, time, grid, depth)?;
            #[derive(Serialize)]
            struct Report {
                n_list: Vec<u32>,
                distances: Vec<f64>,
                non_increasing: bool,
            }
            let mono = dists.windows(2).all(|w| w[1] <= w[0] + 1e-12);
            let rep = Report {
                n_list,
                distances: dists,
                non_increasing: mono,
            };
            render::write_json(&out_path(&common, "convergence.json"), &rep)?;
            println!("distances {:?}", rep.distances);
            Ok(if mono { EXIT_OK } else { EXIT_CLAIM_FAILED })
        }
    }
}

fn parse_n(text: &str) -> Result<Option<u32>> {
    if text == "limit" {
        return Ok(None);
    }
    text.parse::<u32>()
        .map(Some)
        .map_err(|_| Error::SpecInput(format!("--n must be an integer or \"limit\", got {:?}", text)))
}

/// Per-stage restriction summary.
#[derive(Serialize)]
pub struct RestrictionStageReport {
    pub time: usize,
    pub b: f64,
    pub modulus_of_l: f64,
    pub equator_length_cells: f64,
    pub degree: usize,
    pub separating: bool,
    pub degrees_match: bool,
    pub u_prime_in_u: bool,
    pub v_prime_in_v: bool,
}

/// Restriction report: per-stage data plus the verification report of the
/// restricted sequence.
#[derive(Serialize)]
pub struct RestrictionReport {
    pub stages: Vec<RestrictionStageReport>,
    pub pl_report: plseq::PlReport,
}

fn restriction_report(
    pl: &plseq::PlSeq,
    restricted: &plseq::PlSeq,
    stages: &[plseq::RestrictionStage],
    original: &plseq::PlReport,
) -> Result<RestrictionReport> {
    let rest_report = plseq::verify_pl(restricted, restricted.constant)?;
    let cellw = pl.v0.grid.cell_width();
    let mut out = Vec::with_capacity(stages.len());
    for (m, st) in stages.iter().enumerate() {
        let u_bp = pl.triples[m].u.basepoint.as_finite().unwrap();
        let sep_outer = geometry::winding_number(&st.gamma_outer.points, u_bp) != 0;
        let sep_inner = geometry::winding_number(&st.gamma_inner.points, u_bp) != 0;
        out.push(RestrictionStageReport {
            time: m,
            b: st.b,
            modulus_of_l: st.l.modulus,
            equator_length_cells: st.gamma_outer.arc_length() / cellw,
            degree: rest_report.pl2_degrees[m],
            separating: sep_outer && sep_inner,
            degrees_match: original.pl2_degrees[m] == rest_report.pl2_degrees[m],
            u_prime_in_u: st.u_prime.subset_of(&pl.triples[m].u),
            v_prime_in_v: st.v_prime.subset_of(pl.v(m)),
        });
    }
    Ok(RestrictionReport {
        stages: out,
        pl_report: rest_report,
    })
}
