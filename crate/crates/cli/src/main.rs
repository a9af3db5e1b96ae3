use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use latcomb::algorithms::{compose, nbest, prune_to_node_budget, shortest_path, PathWitness};
use latcomb::edit::{build_modified_edit_fst, build_standard_edit_fst};
use latcomb::io::{
    format_lattice, read_lattice, read_params, read_symbols, read_translation_lattice, read_vocab, resolve_vocab,
    ParamsConfig,
};
use latcomb::validate::{validate, Severity};
use latcomb::{EditCostModel, Error, LatticeKind, ParamVector, SymbolTable, EPSILON, UNK};

mod corpus;

use corpus::{CombineOutcome, Engine};

#[derive(Parser)]
#[command(name = "latcomb", version, about = "Combine NMT and Hiero translation lattices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Combine an NMT lattice with a Hiero lattice (files, or directories of paired files).
    Combine(CombineArgs),
    /// Same as combine, by exhaustive search over all hypothesis pairs.
    OracleCombine {
        #[command(flatten)]
        args: CombineArgs,
        /// Give up on lattices with more paths than this.
        #[arg(long, default_value_t = latcomb::oracle::DEFAULT_MAX_PATHS)]
        max_paths: usize,
    },
    /// Write the edit-distance transducer over a symbol table's words.
    BuildEditFst {
        #[arg(long)]
        vocab: PathBuf,
        #[arg(long)]
        symbols: PathBuf,
        #[arg(long)]
        lambda_sub: f64,
        #[arg(long)]
        lambda_edit: f64,
        /// Plain Levenshtein flower without UNK handling.
        #[arg(long)]
        standard: bool,
    },
    /// Compose two machines.
    Compose { left: PathBuf, right: PathBuf },
    /// Best path of a machine.
    ShortestPath(PathArgs),
    /// The n best paths of a machine.
    Nbest {
        #[command(flatten)]
        path: PathArgs,
        #[arg(short, long, default_value_t = 10)]
        n: usize,
        /// Keep only the best path for each output string.
        #[arg(long)]
        unique: bool,
    },
    /// Prune an acyclic machine to at most `budget` states.
    Prune {
        fst: PathBuf,
        #[arg(long)]
        budget: usize,
        #[arg(long)]
        params: Option<PathBuf>,
    },
    /// Edit-operation report over a corpus of paired lattices, as TSV.
    Stats {
        #[command(flatten)]
        args: CombineArgs,
    },
    /// Check a lattice file and list every problem found.
    Validate {
        fst: PathBuf,
        #[arg(long, value_enum, default_value_t = KindArg::Nmt)]
        kind: KindArg,
        #[arg(long)]
        symbols: Option<PathBuf>,
    },
}

#[derive(Args, Clone)]
struct CombineArgs {
    /// NMT lattice file, or a directory of `<id>.nmt.fst` files.
    #[arg(long)]
    nmt_lattice: PathBuf,
    /// Hiero lattice file, or a directory of `<id>.hiero.fst` files.
    #[arg(long)]
    hiero_lattice: PathBuf,
    /// In-vocabulary words of the NMT system, one per line.
    #[arg(long)]
    vocab: PathBuf,
    /// `key=value` parameter file.
    #[arg(long)]
    params: PathBuf,
    /// Symbol table; defaults to `symbols.txt` beside the NMT lattice.
    #[arg(long)]
    symbols: Option<PathBuf>,
    /// Write the key=value corpus report here.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Write the tab-separated corpus report here.
    #[arg(long)]
    report_tsv: Option<PathBuf>,
    /// n values for the Hiero n-best membership report.
    #[arg(long, value_delimiter = ',', default_values_t = [1usize, 10, 100, 1000])]
    nbest: Vec<usize>,
    /// Print costs, both hypotheses and edit counts after each translation.
    #[arg(long)]
    details: bool,
}

#[derive(Args)]
struct PathArgs {
    fst: PathBuf,
    /// Parameter file for scoring; all features weigh 1 without it.
    #[arg(long)]
    params: Option<PathBuf>,
    #[arg(long)]
    symbols: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Nmt,
    Hiero,
    Generic,
}

impl From<KindArg> for LatticeKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Nmt => LatticeKind::Nmt,
            KindArg::Hiero => LatticeKind::Hiero,
            KindArg::Generic => LatticeKind::Generic,
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("latcomb: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::NoPath => 3,
        _ => 2,
    }
}

fn emit(text: &str) -> latcomb::Result<()> {
    let mut out = std::io::stdout().lock();
    out.write_all(text.as_bytes())
        .and_then(|()| out.flush())
        .map_err(|source| Error::Io {
            path: PathBuf::from("<stdout>"),
            source,
        })
}

fn params_or_uniform(path: Option<&Path>) -> latcomb::Result<ParamVector> {
    Ok(match path {
        Some(p) => read_params(p)?.with_vocab(Default::default())?.param_vector(),
        None => ParamVector::uniform(1.0),
    })
}

fn load_symbols(path: Option<&Path>) -> latcomb::Result<Option<SymbolTable>> {
    path.map(read_symbols).transpose()
}

fn render_path(p: &PathWitness, params: &ParamVector, symbols: Option<&SymbolTable>) -> String {
    let text = |labels: Vec<u32>| match symbols {
        Some(t) => t.render(&labels),
        None => labels.iter().map(u32::to_string).collect::<Vec<_>>().join(" "),
    };
    format!(
        "{}\t{}\t{}\t{}\n",
        p.cost(params).value(),
        text(p.input()),
        text(p.output()),
        p.total
    )
}

fn run(command: Command) -> latcomb::Result<()> {
    match command {
        Command::Combine(args) => run_combine(&args, Engine::Pipeline, false),
        Command::OracleCombine { args, max_paths } => run_combine(&args, Engine::Oracle { max_paths }, false),
        Command::Stats { args } => run_combine(&args, Engine::Pipeline, true),
        Command::BuildEditFst {
            vocab,
            symbols,
            lambda_sub,
            lambda_edit,
            standard,
        } => {
            let table = read_symbols(&symbols)?;
            let alphabet: std::collections::BTreeSet<u32> = table
                .iter()
                .map(|(l, _)| l)
                .filter(|&l| l != EPSILON && l != UNK)
                .collect();
            let fst = if standard {
                build_standard_edit_fst(alphabet.iter())?
            } else {
                let vocab = resolve_vocab(&read_vocab(&vocab)?, &table);
                // λ only enter at scoring time; the machine carries operation counts
                let model = EditCostModel::new(vocab, alphabet, lambda_sub, lambda_edit, 0.0)?;
                build_modified_edit_fst(&model)?
            };
            emit(&format_lattice(&fst)?)
        }
        Command::Compose { left, right } => {
            let l = read_lattice(&left, None, LatticeKind::Generic)?;
            let r = read_lattice(&right, None, LatticeKind::Generic)?;
            emit(&format_lattice(&compose(&l, &r)?)?)
        }
        Command::ShortestPath(args) => {
            let fst = read_lattice(&args.fst, None, LatticeKind::Generic)?;
            let params = params_or_uniform(args.params.as_deref())?;
            let symbols = load_symbols(args.symbols.as_deref())?;
            let p = shortest_path(&fst, &params)?;
            emit(&render_path(&p, &params, symbols.as_ref()))
        }
        Command::Nbest { path, n, unique } => {
            let fst = read_lattice(&path.fst, None, LatticeKind::Generic)?;
            let params = params_or_uniform(path.params.as_deref())?;
            let symbols = load_symbols(path.symbols.as_deref())?;
            let paths = nbest(&fst, n, &params, unique)?;
            let text: String = paths
                .iter()
                .map(|p| render_path(p, &params, symbols.as_ref()))
                .collect();
            emit(&text)
        }
        Command::Prune { fst, budget, params } => {
            let f = read_lattice(&fst, None, LatticeKind::Generic)?;
            let params = params_or_uniform(params.as_deref())?;
            emit(&format_lattice(&prune_to_node_budget(&f, budget, &params)?)?)
        }
        Command::Validate { fst, kind, symbols } => {
            let symbols = load_symbols(symbols.as_deref())?;
            let kind = LatticeKind::from(kind);
            // parse without the lattice contract so every problem gets listed
            let f = read_lattice(&fst, symbols.as_ref(), LatticeKind::Generic)?;
            let diags = validate(&f, kind);
            let mut text = String::new();
            for d in &diags {
                text.push_str(&format!("{}: {d}\n", fst.display()));
            }
            let errors = diags.iter().filter(|d| d.severity == Severity::Error).count();
            if errors == 0 {
                text.push_str(&format!("{}: ok ({kind} lattice)\n", fst.display()));
                emit(&text)
            } else {
                eprint!("{text}");
                Err(Error::input(&fst, None, format!("{errors} error(s)")))
            }
        }
    }
}

fn run_combine(args: &CombineArgs, engine: Engine, stats_only: bool) -> latcomb::Result<()> {
    let corpus_mode = args.nmt_lattice.is_dir();
    let symbols_path = args.symbols.clone().unwrap_or_else(|| {
        let dir = if corpus_mode {
            args.nmt_lattice.clone()
        } else {
            args.nmt_lattice.parent().map(Path::to_path_buf).unwrap_or_default()
        };
        dir.join("symbols.txt")
    });
    let symbols = read_symbols(&symbols_path)?;
    let config: ParamsConfig = read_params(&args.params)?;
    let vocab = resolve_vocab(&read_vocab(&args.vocab)?, &symbols);
    let params = config.with_vocab(vocab).map_err(|e| e.at(&args.params, None))?;

    let pairs = if corpus_mode {
        if !args.hiero_lattice.is_dir() {
            return Err(Error::input(
                &args.hiero_lattice,
                None,
                "expected a directory of Hiero lattices",
            ));
        }
        corpus::pair_files(&args.nmt_lattice, &args.hiero_lattice)?
    } else {
        let id = args
            .nmt_lattice
            .file_name()
            .and_then(|n| n.to_str())
            .map(|n| n.trim_end_matches(".fst").trim_end_matches(".nmt").to_string())
            .unwrap_or_default();
        vec![(id, args.nmt_lattice.clone(), args.hiero_lattice.clone())]
    };

    let outcomes = corpus::combine_all(&pairs, &symbols, &params, engine)?;

    let mut text = String::new();
    if !stats_only {
        for o in &outcomes {
            let t_comb = symbols.render(&o.t_comb);
            if corpus_mode {
                text.push_str(&format!("{}\t{t_comb}\n", o.id));
            } else {
                text.push_str(&format!("{t_comb}\n"));
            }
            if args.details {
                text.push_str(&details(o, &symbols));
            }
        }
    }
    let wants_report = stats_only || args.report.is_some() || args.report_tsv.is_some();
    if wants_report {
        let Engine::Pipeline = engine else {
            return Err(Error::contract("corpus reports are only produced by combine and stats"));
        };
        let hiero: Vec<_> = pairs
            .iter()
            .map(|(_, _, h)| read_translation_lattice(h, Some(&symbols), LatticeKind::Hiero))
            .collect::<latcomb::Result<_>>()?;
        let results: Vec<_> = outcomes.into_iter().filter_map(|o| o.result).collect();
        let report = latcomb::pipeline::corpus_report(&results, &hiero, &args.nbest)?;
        if let Some(p) = &args.report {
            write_file(p, &report.to_key_value())?;
        }
        if let Some(p) = &args.report_tsv {
            write_file(p, &report.to_tsv())?;
        }
        if stats_only {
            text.push_str(&report.to_tsv());
        }
    }
    emit(&text)
}

fn write_file(path: &Path, text: &str) -> latcomb::Result<()> {
    std::fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn details(o: &CombineOutcome, symbols: &SymbolTable) -> String {
    let mut s = format!(
        "total_cost={}\nfeatures={}\nt_nmt={}\nt_hiero={}\n",
        o.cost,
        o.features,
        symbols.render(&o.t_nmt),
        symbols.render(&o.t_hiero)
    );
    if let Some(r) = &o.result {
        let st = r.stats;
        s.push_str(&format!(
            "unk_extensions={}\ntype1_fills={}\ntype2_subs={}\ntype3_edits={}\nexact_match={}\n",
            st.unk_extensions, st.type1_fills, st.type2_subs, st.type3_edits, st.exact_match
        ));
    }
    s
}
