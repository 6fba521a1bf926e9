use std::path::PathBuf;

use clap::{Args, ValueEnum};
use poset_search::array::SortedArrayD;
use poset_search::concrete_search::DEFAULT_CELL_BUDGET;
use poset_search::intersect::planted_lists;
use poset_search::oracle::{random_linear_extension, ConcreteInstance};
use poset_search::poset::{antichain, chain, forest_poset, grid_poset, random_forest, random_poset};
use poset_search::Poset;

use crate::error::{usage, CliError};
use crate::Globals;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Chain,
    Antichain,
    Forest,
    Grid,
    Random,
    Lists,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    #[arg(value_enum)]
    pub family: Family,
    /// Number of elements (chain, antichain, random, random forest) or
    /// length of the first list.
    #[arg(long, default_value_t = 16)]
    pub n: usize,
    /// Grid side, or length of the second list.
    #[arg(long, default_value_t = 4)]
    pub m: usize,
    /// Grid dimension.
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    /// Arity of a complete forest; used together with `--levels`.
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    /// Levels of a complete tree. Without it, `forest` is a random forest.
    #[arg(long)]
    pub levels: Option<usize>,
    /// Relation density of `random`.
    #[arg(long, default_value_t = 0.3)]
    pub density: f64,
    /// Common values planted in `lists`.
    #[arg(long, default_value_t = 1)]
    pub z: usize,
}

fn instance(poset: Poset, seed: u64) -> String {
    let values = random_linear_extension(&poset, seed);
    ConcreteInstance { poset, values }.to_string()
}

fn join(list: &[i64]) -> String {
    let words: Vec<String> = list.iter().map(i64::to_string).collect();
    words.join(" ") + "\n"
}

/// File names and contents for one family.
pub fn files(args: &GenArgs, seed: u64) -> Result<Vec<(String, String)>, CliError> {
    let out = match args.family {
        Family::Chain => vec![("chain.instance".into(), instance(chain(args.n)?, seed))],
        Family::Antichain => vec![("antichain.instance".into(), instance(antichain(args.n)?, seed))],
        Family::Forest => {
            let p = match args.levels {
                Some(levels) => forest_poset(args.k, levels)?,
                None => random_forest(args.n, seed)?,
            };
            vec![("forest.instance".into(), instance(p, seed))]
        }
        Family::Random => vec![(
            "random.instance".into(),
            instance(random_poset(args.n, args.density, seed)?, seed),
        )],
        Family::Grid => {
            let poset = grid_poset(args.d, args.m)?;
            let cube = SortedArrayD::random(args.d, args.m, seed, DEFAULT_CELL_BUDGET)?;
            let text = ConcreteInstance {
                poset,
                values: cube.cells.clone(),
            }
            .to_string();
            vec![("grid.instance".into(), text), ("grid.csv".into(), cube.to_csv())]
        }
        Family::Lists => {
            if args.z > args.n.min(args.m) {
                return Err(usage("--z exceeds a list length"));
            }
            let (l, m) = planted_lists(args.n, args.m, args.z, seed)?;
            vec![("L.txt".into(), join(&l)), ("M.txt".into(), join(&m))]
        }
    };
    Ok(out)
}

pub fn cmd_gen(args: &GenArgs, g: &Globals) -> Result<(), CliError> {
    let dir = g.out.clone().unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir)?;
    let mut listing = String::new();
    for (name, text) in files(args, g.seed)? {
        let path = dir.join(name);
        std::fs::write(&path, text)?;
        listing.push_str(&format!("{}\n", path.display()));
    }
    print!("{listing}");
    Ok(())
}
