use clap::{Args, ValueEnum};
use poset_search::array::{SortedArray2D, SortedArrayD};
use poset_search::concrete_search::DEFAULT_CELL_BUDGET;
use poset_search::intersect::planted_lists;
use poset_search::oracle::{random_linear_extension, ConcreteInstance};
use poset_search::par::map_trials;
use poset_search::poset::{antichain, chain, grid_poset, random_forest, random_poset};
use poset_search::stats::{fit_loglog, mean, LineFit};
use rand::Rng;
use serde::Serialize;

use crate::error::{usage, CliError};
use crate::run::{execute, Algorithm, Goal, Instance, Mode};
use crate::{Format, Globals};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ScaleFamily {
    Chain,
    Antichain,
    Forest,
    Random,
    Grid,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Targets {
    /// Absent targets for the classical array searches, present otherwise.
    Auto,
    Present,
    Absent,
}

#[derive(Args, Debug)]
pub struct ScaleArgs {
    #[arg(value_enum)]
    pub algorithm: Algorithm,
    /// Smallest size (elements, array side or list length).
    #[arg(long, default_value_t = 16)]
    pub from: usize,
    #[arg(long, default_value_t = 1024)]
    pub to: usize,
    /// Sizes per doubling.
    #[arg(long, default_value_t = 2)]
    pub per_octave: u32,
    /// Poset family of the abstract and chain searches.
    #[arg(long, value_enum)]
    pub family: Option<ScaleFamily>,
    /// Dimension for `ddim`.
    #[arg(long, default_value_t = 3)]
    pub d: usize,
    /// Common values planted for the intersection searches.
    #[arg(long, default_value_t = 1)]
    pub z: usize,
    #[arg(long, value_enum, default_value_t = Mode::Quantum)]
    pub mode: Mode,
    #[arg(long, value_enum, default_value_t = Targets::Auto)]
    pub targets: Targets,
}

#[derive(Clone, Debug, Serialize)]
pub struct Row {
    pub size: usize,
    pub trials: u64,
    pub mean: f64,
    pub max: f64,
    pub mean_per_log2: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Table {
    pub algorithm: Algorithm,
    pub rows: Vec<Row>,
    pub fit: Option<LineFit>,
    /// Fit after dividing by `log2(size)`.
    pub log_corrected_fit: Option<LineFit>,
}

pub fn geometric_sizes(from: usize, to: usize, per_octave: u32) -> Vec<usize> {
    let mut out: Vec<usize> = Vec::new();
    let per = per_octave.max(1) as f64;
    for k in 0.. {
        let s = (from.max(1) as f64 * 2f64.powf(k as f64 / per)).round() as usize;
        if s > to {
            break;
        }
        if out.last() != Some(&s) {
            out.push(s);
        }
    }
    out
}

fn instance(args: &ScaleArgs, size: usize, seed: u64) -> Result<Instance, CliError> {
    use Algorithm::*;
    Ok(match args.algorithm {
        Forest | Halving => {
            let default = if args.algorithm == Forest {
                ScaleFamily::Forest
            } else {
                ScaleFamily::Random
            };
            Instance::Poset(match args.family.unwrap_or(default) {
                ScaleFamily::Chain => chain(size)?,
                ScaleFamily::Antichain => antichain(size)?,
                ScaleFamily::Forest => random_forest(size, seed)?,
                ScaleFamily::Random => random_poset(size, 0.3, seed)?,
                ScaleFamily::Grid => grid_poset(2, size)?,
            })
        }
        DilworthC | DilworthQ => match args.family.unwrap_or(ScaleFamily::Grid) {
            ScaleFamily::Grid => {
                let a = SortedArray2D::random(size, size, seed);
                Instance::Concrete(ConcreteInstance {
                    poset: grid_poset(2, size)?,
                    values: a.cells().to_vec(),
                })
            }
            family => {
                let poset = match family {
                    ScaleFamily::Chain => chain(size)?,
                    ScaleFamily::Antichain => antichain(size)?,
                    ScaleFamily::Forest => random_forest(size, seed)?,
                    _ => random_poset(size, 0.3, seed)?,
                };
                let values = random_linear_extension(&poset, seed);
                Instance::Concrete(ConcreteInstance { poset, values })
            }
        },
        Array2dC | Array2dQ => Instance::Array(SortedArray2D::random(size, size, seed)),
        Ddim => Instance::Cube(SortedArrayD::random(args.d, size, seed, DEFAULT_CELL_BUDGET)?),
        IntersectSingle | IntersectMulti => {
            let z = if args.algorithm == IntersectSingle { 1 } else { args.z.min(size) };
            let (l, m) = planted_lists(size, size, z, seed)?;
            Instance::Lists(l, m)
        }
    })
}

fn goal(args: &ScaleArgs) -> Goal {
    let absent = match args.targets {
        Targets::Absent => true,
        Targets::Present => false,
        Targets::Auto => matches!(args.algorithm, Algorithm::Array2dC | Algorithm::DilworthC),
    };
    if absent {
        Goal::AboveRandom
    } else {
        Goal::Random
    }
}

pub fn build_table(args: &ScaleArgs, g: &Globals) -> Result<Table, CliError> {
    if args.from < 1 || args.to < args.from {
        return Err(usage("need 1 <= --from <= --to"));
    }
    let goal = goal(args);
    let mut rows = Vec::new();
    for size in geometric_sizes(args.from, args.to, args.per_octave) {
        let stream = g.seed ^ (size as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15);
        let counts = map_trials(stream, g.trials, |_, rng| {
            let inst = instance(args, size, rng.gen())?;
            let t = execute(args.algorithm, &inst, &goal, args.mode, g.budget, rng)?;
            Ok::<_, CliError>(t.ledger.total() as f64)
        })
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
        let m = mean(&counts);
        rows.push(Row {
            size,
            trials: g.trials,
            mean: m,
            max: counts.iter().copied().fold(0.0, f64::max),
            mean_per_log2: m / (size.max(2) as f64).log2(),
        });
    }
    let fit_of = |ys: Vec<f64>| {
        let xs: Vec<f64> = rows.iter().map(|r| r.size as f64).collect();
        fit_loglog(&xs, &ys).ok()
    };
    let fit = fit_of(rows.iter().map(|r| r.mean).collect());
    let log_corrected_fit = fit_of(rows.iter().map(|r| r.mean_per_log2).collect());
    Ok(Table {
        algorithm: args.algorithm,
        rows,
        fit,
        log_corrected_fit,
    })
}

fn fit_comment(name: &str, fit: &Option<LineFit>) -> String {
    match fit {
        Some(f) => {
            let (lo, hi) = f.slope_interval();
            format!("# {name} slope={:.4} stderr={:.4} ci95=[{lo:.4},{hi:.4}]\n", f.slope, f.slope_stderr)
        }
        None => format!("# {name} slope unavailable\n"),
    }
}

pub fn cmd_scale(args: &ScaleArgs, g: &Globals) -> Result<(), CliError> {
    let table = build_table(args, g)?;
    let text = match g.format {
        Format::Json => serde_json::to_string_pretty(&table)? + "\n",
        Format::Csv => {
            let mut s = String::from("size,trials,mean,max,mean_per_log2\n");
            for r in &table.rows {
                s.push_str(&format!(
                    "{},{},{:.3},{},{:.3}\n",
                    r.size, r.trials, r.mean, r.max, r.mean_per_log2
                ));
            }
            s.push_str(&fit_comment("fit", &table.fit));
            s.push_str(&fit_comment("log-corrected", &table.log_corrected_fit));
            s
        }
    };
    g.emit(&text)
}
