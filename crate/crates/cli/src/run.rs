use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, ValueEnum};
use poset_search::abstract_search::{forest_search, halving_learner};
use poset_search::array::{ArrayOracle, ArraySession, ArrayView, SortedArray2D, SortedArrayD};
use poset_search::concrete_search::{
    classical_2d_search, ddim_search, dilworth_search_classical, dilworth_search_quantum,
    quantum_2d_search, DdimMode, DEFAULT_CELL_BUDGET,
};
use poset_search::intersect::{multi_block_intersect, parse_list, single_block_search};
use poset_search::oracle::{AbstractOracle, AbstractSession, ConcreteInstance, ConcreteOracle, ConcreteSession, QueryLedger};
use poset_search::par::map_trials;
use poset_search::qsim::RunOptions;
use poset_search::{Element, Error, Poset};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{usage, CliError};
use crate::{Format, Globals};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Forest,
    Halving,
    DilworthC,
    DilworthQ,
    Array2dC,
    Array2dQ,
    Ddim,
    IntersectSingle,
    IntersectMulti,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Classical,
    Quantum,
}

#[derive(Args, Debug)]
pub struct RunArgs {
    #[arg(value_enum)]
    pub algorithm: Algorithm,
    /// Instance file: poset or poset with values, CSV array, or the first
    /// sorted list.
    #[arg(long)]
    pub instance: PathBuf,
    /// Second sorted list, for the intersection algorithms.
    #[arg(long)]
    pub second: Option<PathBuf>,
    /// Marked elements for `forest` and `halving`, comma separated, or
    /// `none`. Default: one uniformly random element per trial.
    #[arg(long)]
    pub marked: Option<String>,
    /// Searched value. Default: the value of a uniformly random element.
    #[arg(long)]
    pub target: Option<i64>,
    /// Search mode of `ddim`.
    #[arg(long, value_enum, default_value_t = Mode::Quantum)]
    pub mode: Mode,
    /// Record wall-clock time per trial (makes output non-reproducible).
    #[arg(long)]
    pub timing: bool,
}

/// A loaded instance.
#[derive(Clone, Debug)]
pub enum Instance {
    Poset(Poset),
    Concrete(ConcreteInstance),
    Array(SortedArray2D),
    Cube(SortedArrayD),
    Lists(Vec<i64>, Vec<i64>),
}

impl Instance {
    pub fn size(&self) -> usize {
        match self {
            Instance::Poset(p) => p.len(),
            Instance::Concrete(c) => c.poset.len(),
            Instance::Array(a) => a.rows().max(a.cols()),
            Instance::Cube(c) => c.m,
            Instance::Lists(l, m) => l.len().max(m.len()),
        }
    }

    fn poset(&self) -> Result<&Poset, CliError> {
        match self {
            Instance::Poset(p) => Ok(p),
            Instance::Concrete(c) => Ok(&c.poset),
            _ => Err(usage("this algorithm needs a poset instance")),
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))
}

/// Parses `path` in the format the algorithm expects.
pub fn load(alg: Algorithm, path: &Path, second: Option<&Path>) -> Result<Instance, CliError> {
    let text = read(path)?;
    Ok(match alg {
        Algorithm::Forest | Algorithm::Halving => match text.parse::<ConcreteInstance>() {
            Ok(c) => Instance::Concrete(c),
            Err(_) => Instance::Poset(text.parse()?),
        },
        Algorithm::DilworthC | Algorithm::DilworthQ => Instance::Concrete(text.parse()?),
        Algorithm::Array2dC | Algorithm::Array2dQ => Instance::Array(SortedArray2D::from_csv(&text)?),
        Algorithm::Ddim => Instance::Cube(SortedArrayD::from_csv(&text)?),
        Algorithm::IntersectSingle | Algorithm::IntersectMulti => {
            let second = second.ok_or_else(|| usage("intersection needs --second"))?;
            Instance::Lists(parse_list(&text)?, parse_list(&read(second)?)?)
        }
    })
}

/// What a trial looks for.
#[derive(Clone, Debug)]
pub enum Goal {
    Marked(Vec<Element>),
    Value(i64),
    /// A uniformly random element or cell (its value, for concrete search).
    Random,
    /// One more than the value of a uniformly random cell.
    AboveRandom,
}

impl Goal {
    pub fn from_args(marked: Option<&str>, target: Option<i64>) -> Result<Self, CliError> {
        if let Some(t) = target {
            return Ok(Goal::Value(t));
        }
        match marked {
            None => Ok(Goal::Random),
            Some("none") => Ok(Goal::Marked(Vec::new())),
            Some(list) => list
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse::<Element>()
                        .map_err(|e| usage(format!("bad marked element {s:?}: {e}")))
                })
                .collect::<Result<Vec<_>, _>>()
                .map(Goal::Marked),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Descriptor {
    pub source: String,
    pub size: usize,
    pub seed: u64,
    pub trial: u64,
    pub target: Value,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub algorithm: Algorithm,
    pub instance: Descriptor,
    pub ledger: QueryLedger,
    pub found: Value,
    /// Probability that the simulated measurement succeeded, where the
    /// algorithm computes it.
    pub success_probability: Option<f64>,
    pub detail: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<f64>,
}

/// The result of one trial, before it is wrapped in a record.
pub struct Trial {
    pub ledger: QueryLedger,
    pub target: Value,
    pub found: Value,
    pub success_probability: Option<f64>,
    pub detail: Value,
}

fn check_budget(ledger: &QueryLedger, budget: Option<u64>) -> Result<(), CliError> {
    match budget {
        Some(b) if ledger.total() > b => Err(Error::Budget(b).into()),
        _ => Ok(()),
    }
}

fn array_target(a: &SortedArray2D, goal: &Goal, rng: &mut ChaCha8Rng) -> Result<i64, CliError> {
    let mut cell = || a.value(rng.gen_range(0..a.rows()), rng.gen_range(0..a.cols()));
    match goal {
        Goal::Value(v) => Ok(*v),
        Goal::Random => Ok(cell()),
        Goal::AboveRandom => Ok(cell() + 1),
        Goal::Marked(_) => Err(usage("array search takes --target, not --marked")),
    }
}

/// Runs one trial of `alg` on `inst`.
pub fn execute(
    alg: Algorithm,
    inst: &Instance,
    goal: &Goal,
    mode: Mode,
    budget: Option<u64>,
    rng: &mut ChaCha8Rng,
) -> Result<Trial, CliError> {
    match alg {
        Algorithm::Forest | Algorithm::Halving => {
            let p = inst.poset()?;
            if p.is_empty() {
                return Err(usage("empty poset"));
            }
            let marked = match goal {
                Goal::Marked(m) => m.clone(),
                Goal::Random | Goal::AboveRandom => vec![rng.gen_range(0..p.len())],
                Goal::Value(_) => return Err(usage("abstract search takes --marked, not --target")),
            };
            let mut s = AbstractSession::new(p, &marked)?.with_budget(budget);
            let (found, detail) = if alg == Algorithm::Forest {
                let trace = forest_search(&mut s, rng)?;
                (json!(trace.found), serde_json::to_value(&trace)?)
            } else {
                if marked.len() != 1 {
                    return Err(usage("halving needs exactly one marked element"));
                }
                let out = halving_learner(&mut s)?;
                (json!(out.element), serde_json::to_value(&out)?)
            };
            Ok(Trial {
                ledger: s.ledger().clone(),
                target: json!(marked),
                found,
                success_probability: (alg == Algorithm::Forest).then_some(1.0),
                detail,
            })
        }
        Algorithm::DilworthC | Algorithm::DilworthQ => {
            let Instance::Concrete(c) = inst else {
                return Err(usage("chain search needs a poset with values"));
            };
            if c.poset.is_empty() {
                return Err(usage("empty poset"));
            }
            let target = match goal {
                Goal::Value(v) => *v,
                Goal::Random => c.values[rng.gen_range(0..c.values.len())],
                Goal::AboveRandom => c.values[rng.gen_range(0..c.values.len())] + 1,
                Goal::Marked(_) => return Err(usage("chain search takes --target, not --marked")),
            };
            let mut sorted = c.values.clone();
            sorted.sort_unstable();
            let distinct = sorted.windows(2).all(|w| w[0] != w[1]);
            let mut s = ConcreteSession::new(&c.poset, &c.values, target, distinct)?.with_budget(budget);
            let found = if alg == Algorithm::DilworthC {
                dilworth_search_classical(&mut s)?
            } else {
                dilworth_search_quantum(&mut s, distinct, rng)?
            };
            Ok(Trial {
                ledger: s.ledger().clone(),
                target: json!(target),
                found: json!(found),
                success_probability: None,
                detail: json!({ "distinct": distinct }),
            })
        }
        Algorithm::Array2dC | Algorithm::Array2dQ => {
            let Instance::Array(a) = inst else {
                return Err(usage("2D search needs a CSV array"));
            };
            let target = array_target(a, goal, rng)?;
            let mut s = ArraySession::new(a).with_budget(budget);
            let (found, p, detail) = if alg == Algorithm::Array2dC {
                let trace = classical_2d_search(&mut s, target)?;
                (json!(trace.found), None, json!({ "levels": trace.levels, "splits": trace.steps.len() }))
            } else {
                let out = quantum_2d_search(a, &mut s, target, &RunOptions::default(), rng)?;
                let detail = json!({
                    "model_probability": out.model_probability,
                    "cost_per_execution": out.cost_per_execution,
                    "executions": out.executions,
                    "rounds": out.rounds,
                });
                (json!(out.found), Some(out.success_probability), detail)
            };
            Ok(Trial {
                ledger: s.ledger().clone(),
                target: json!(target),
                found,
                success_probability: p,
                detail,
            })
        }
        Algorithm::Ddim => {
            let Instance::Cube(c) = inst else {
                return Err(usage("ddim needs a CSV cube"));
            };
            let target = match goal {
                Goal::Value(v) => *v,
                Goal::Random => c.cells[rng.gen_range(0..c.cells.len())],
                Goal::AboveRandom => c.cells[rng.gen_range(0..c.cells.len())] + 1,
                Goal::Marked(_) => return Err(usage("ddim takes --target, not --marked")),
            };
            let mode = match mode {
                Mode::Classical => DdimMode::Classical,
                Mode::Quantum => DdimMode::Quantum,
            };
            let out = ddim_search(c, target, mode, DEFAULT_CELL_BUDGET, rng)?;
            check_budget(&out.ledger, budget)?;
            Ok(Trial {
                target: json!(target),
                found: json!(out.found),
                success_probability: None,
                detail: json!({
                    "d": c.d,
                    "reference_charge": out.reference_charge,
                    "repetition_factor": out.repetition_factor,
                }),
                ledger: out.ledger,
            })
        }
        Algorithm::IntersectSingle | Algorithm::IntersectMulti => {
            let Instance::Lists(l, m) = inst else {
                return Err(usage("intersection needs two sorted lists"));
            };
            let out = if alg == Algorithm::IntersectSingle {
                single_block_search(l, m, rng)?
            } else {
                multi_block_intersect(l, m, rng)?
            };
            check_budget(&out.ledger, budget)?;
            Ok(Trial {
                target: Value::Null,
                found: serde_json::to_value(&out.found)?,
                success_probability: None,
                detail: json!({
                    "queries_L": out.queries_l,
                    "queries_M": out.queries_m,
                    "rounds": out.rounds,
                }),
                ledger: out.ledger,
            })
        }
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_owned()
    }
}

pub fn cmd_run(args: &RunArgs, g: &Globals) -> Result<(), CliError> {
    let inst = load(args.algorithm, &args.instance, args.second.as_deref())?;
    let goal = Goal::from_args(args.marked.as_deref(), args.target)?;
    let results = map_trials(g.seed, g.trials, |trial, rng| {
        let start = Instant::now();
        let t = execute(args.algorithm, &inst, &goal, args.mode, g.budget, rng)?;
        Ok::<_, CliError>(RunRecord {
            algorithm: args.algorithm,
            instance: Descriptor {
                source: args.instance.display().to_string(),
                size: inst.size(),
                seed: g.seed,
                trial,
                target: t.target,
            },
            ledger: t.ledger,
            found: t.found,
            success_probability: t.success_probability,
            detail: t.detail,
            wall_time_ms: args.timing.then(|| start.elapsed().as_secs_f64() * 1e3),
        })
    });
    let mut text = String::new();
    if g.format == Format::Csv {
        text.push_str("trial,found,classical,quantum,total\n");
    }
    for r in results {
        let r = r?;
        match g.format {
            Format::Json => {
                text.push_str(&serde_json::to_string(&r)?);
                text.push('\n');
            }
            Format::Csv => text.push_str(&format!(
                "{},{},{},{},{}\n",
                r.instance.trial,
                csv_field(&r.found.to_string()),
                r.ledger.classical,
                r.ledger.quantum,
                r.ledger.total()
            )),
        }
    }
    g.emit(&text)
}
