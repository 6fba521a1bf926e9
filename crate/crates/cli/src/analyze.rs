use std::path::PathBuf;

use clap::Args;
use poset_search::oracle::ConcreteInstance;
use poset_search::poset::{
    count_ideals, dilworth_decomposition, exact_decision_depth, gamma_bruteforce,
    DECISION_DEPTH_LIMIT, GAMMA_LIMIT, IDEAL_LIMIT,
};
use poset_search::Poset;
use serde::Serialize;

use crate::error::CliError;
use crate::Globals;

#[derive(Args, Debug)]
pub struct AnalyzeArgs {
    /// Poset file, with or without a values section.
    pub instance: PathBuf,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Gamma {
    pub numer: u32,
    pub denom: u32,
    pub value: f64,
}

/// Query budgets predicted by the known upper bounds, without constants.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Budgets {
    /// `ceil(log2 n) * ceil(1 / sqrt(gamma))`, forest-like posets only.
    pub forest_quantum: Option<u64>,
    /// `w * ceil(log2(h + 1))`: binary search along every chain.
    pub chains_classical: u64,
    /// `ceil(sqrt(w)) * ceil(log2(h + 1))`: exact Grover over the chains.
    pub chains_quantum: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub elements: usize,
    pub covers: usize,
    pub width: usize,
    pub height: usize,
    pub forest_like: bool,
    pub chains: Vec<Vec<usize>>,
    pub gamma: Option<Gamma>,
    pub ideals: Option<u64>,
    pub decision_depth: Option<usize>,
    pub budgets: Budgets,
}

fn ceil_log2(n: u64) -> u64 {
    if n <= 1 {
        0
    } else {
        (u64::BITS - (n - 1).leading_zeros()) as u64
    }
}

pub fn report(p: &Poset) -> Result<Report, CliError> {
    let n = p.len();
    let cover = dilworth_decomposition(p);
    let (w, h) = (cover.chains.len(), p.height());
    let gamma = if (2..=GAMMA_LIMIT).contains(&n) {
        let g = gamma_bruteforce(p)?.value;
        Some(Gamma {
            numer: *g.numer(),
            denom: *g.denom(),
            value: *g.numer() as f64 / *g.denom() as f64,
        })
    } else {
        None
    };
    let forest_like = p.is_forest();
    let per_chain = ceil_log2(h as u64 + 1);
    Ok(Report {
        elements: n,
        covers: p.covers().len(),
        width: w,
        height: h,
        forest_like,
        gamma: gamma.clone(),
        ideals: if n <= IDEAL_LIMIT { Some(count_ideals(p)?) } else { None },
        decision_depth: if n <= DECISION_DEPTH_LIMIT {
            Some(exact_decision_depth(p)?)
        } else {
            None
        },
        budgets: Budgets {
            forest_quantum: gamma
                .filter(|_| forest_like)
                .map(|g| ceil_log2(n as u64) * (1.0 / g.value.sqrt()).ceil() as u64),
            chains_classical: w as u64 * per_chain,
            chains_quantum: (w as f64).sqrt().ceil() as u64 * per_chain,
        },
        chains: cover.chains,
    })
}

pub fn cmd_analyze(args: &AnalyzeArgs, g: &Globals) -> Result<(), CliError> {
    let text = std::fs::read_to_string(&args.instance)?;
    let poset = match text.parse::<ConcreteInstance>() {
        Ok(c) => c.poset,
        Err(_) => text.parse::<Poset>()?,
    };
    g.emit(&(serde_json::to_string_pretty(&report(&poset)?)? + "\n"))
}
