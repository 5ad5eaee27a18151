use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use prodsep::certificate::{self, Certificate, FactorizationCertificate, HallCertificate, ProductCertificate, Verdict};
use prodsep::cover::{enumerate_expansions, expand_to_cover, expansion_count, transition_group, CoveringExpansion};
use prodsep::dot::{to_dot, to_dot_named};
use prodsep::extension::{cayley_graph_ext, check_star, ExtensionChain};
use prodsep::group::{materialize, FiniteGroup, XGroup, DEFAULT_CAP};
use prodsep::problem::{format_group_spec, parse_group_spec, parse_problem, ProblemFile};
use prodsep::random::{random_word, rng};
use prodsep::rational::member_product;
use prodsep::separate::{factorize, hall_separator, product_separator, FactorizeOptions, SeparationStatus};
use prodsep::stallings::{attach_word, stallings_graph, subgroup_basis, PointedImmersion};
use prodsep::word::{Alphabet, Word};
use rand::Rng;

#[derive(Parser)]
#[command(name = "prodsep", version, about = "Stallings graphs, finite quotients and product separation in free groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Stallings graphs of subgroups
    #[command(subcommand)]
    Stallings(StallingsCmd),
    /// Covering expansions and their transition groups
    #[command(subcommand)]
    Cover(CoverCmd),
    /// Permutation groups given as group specs
    #[command(subcommand)]
    Group(GroupCmd),
    /// Universal p-elementary extensions
    #[command(subcommand)]
    Ext(ExtCmd),
    /// Finite separating quotients
    #[command(subcommand)]
    Separate(SeparateCmd),
    /// Write a word as a product of subgroup elements
    Factorize {
        file: PathBuf,
        /// Defaults to the file's `word:` line
        word: Option<String>,
        /// Seeds h1,...,hn with [h1...hn] = [w] in the top extension
        #[arg(long, value_delimiter = ',')]
        seeds: Option<Vec<String>>,
        #[arg(long, value_delimiter = ',')]
        primes: Option<Vec<u32>>,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
    },
    /// Automaton-based membership oracle
    #[command(subcommand)]
    Oracle(OracleCmd),
    /// Re-check a certificate produced by `separate` or `factorize`
    Verify {
        certificate: PathBuf,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
    },
}

#[derive(Args)]
struct DotArg {
    /// Emit Graphviz DOT, to PATH or to stdout
    #[arg(long, num_args = 0..=1, value_name = "PATH")]
    dot: Option<Option<PathBuf>>,
}

#[derive(Subcommand)]
enum StallingsCmd {
    /// Fold the generators and print the graph's size and a free basis
    Build {
        file: PathBuf,
        #[command(flatten)]
        dot: DotArg,
    },
    /// Whether a word lies in the subgroup
    Member { file: PathBuf, word: Option<String> },
}

#[derive(Subcommand)]
enum CoverCmd {
    /// Complete S(H), or S(H)_w when a word is given, to a covering
    Expand {
        file: PathBuf,
        word: Option<String>,
        /// List every completion instead of the canonical one
        #[arg(long)]
        all: bool,
        #[arg(long, default_value_t = 1000)]
        cap: usize,
        #[command(flatten)]
        dot: DotArg,
    },
    /// Print the transition group of the canonical completion as a group spec
    Group {
        file: PathBuf,
        word: Option<String>,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
    },
}

#[derive(Subcommand)]
enum GroupCmd {
    /// Materialize the group and its Cayley graph
    Cayley {
        spec: PathBuf,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
        #[command(flatten)]
        dot: DotArg,
    },
}

#[derive(Subcommand)]
enum ExtCmd {
    /// Evaluate a word in the iterated extension
    Eval {
        spec: PathBuf,
        #[arg(long = "prime", alias = "primes", value_delimiter = ',', default_value = "2")]
        primes: Vec<u32>,
        word: String,
    },
    /// Compare generator products with traversal counts on random words
    CheckStar {
        spec: PathBuf,
        #[arg(long = "prime", alias = "primes", value_delimiter = ',', default_value = "2")]
        primes: Vec<u32>,
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 30)]
        length: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Materialize the top extension and print it as a group spec
    Build {
        spec: PathBuf,
        #[arg(long = "prime", alias = "primes", value_delimiter = ',', default_value = "2")]
        primes: Vec<u32>,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
        #[command(flatten)]
        dot: DotArg,
    },
}

#[derive(Subcommand)]
enum SeparateCmd {
    /// Separate a word from the file's first subgroup
    Hall {
        file: PathBuf,
        word: Option<String>,
        #[command(flatten)]
        dot: DotArg,
    },
    /// Separate a word from the product of the file's subgroups
    Product {
        file: PathBuf,
        word: Option<String>,
        #[arg(long, value_delimiter = ',')]
        primes: Option<Vec<u32>>,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
    },
}

#[derive(Subcommand)]
enum OracleCmd {
    /// Whether the word lies in the product of the file's subgroups
    Member { file: PathBuf, word: Option<String> },
}

enum Failure {
    Input(String),
    Cap(String),
}

impl From<prodsep::Error> for Failure {
    fn from(e: prodsep::Error) -> Self {
        if e.is_cap() {
            Failure::Cap(e.to_string())
        } else {
            Failure::Input(e.to_string())
        }
    }
}

type Outcome = Result<bool, Failure>;

fn input(msg: impl std::fmt::Display) -> Failure {
    Failure::Input(msg.to_string())
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn load_problem(path: &Path) -> Result<ProblemFile, Failure> {
    parse_problem(&read(path)?).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn load_group(path: &Path) -> Result<(Alphabet, XGroup), Failure> {
    parse_group_spec(&read(path)?).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn word_of(p: &ProblemFile, arg: Option<&str>) -> Result<Word, Failure> {
    match arg {
        Some(text) => p.alphabet.parse_word(text).map_err(|e| input(format!("word: {e}"))),
        None => p.word.clone().ok_or_else(|| input("no word given and the file has no `word:` line")),
    }
}

fn first_subgroup(p: &ProblemFile) -> Result<&[Word], Failure> {
    p.subgroups
        .first()
        .map(|(_, g)| g.as_slice())
        .ok_or_else(|| input("the file declares no subgroup"))
}

fn emit_dot(arg: &DotArg, text: &str) -> Result<(), Failure> {
    match &arg.dot {
        None => Ok(()),
        Some(None) => {
            print!("{text}");
            Ok(())
        }
        Some(Some(path)) => std::fs::write(path, text).map_err(|e| input(format!("{}: {e}", path.display()))),
    }
}

fn print_perms(a: &Alphabet, perms: &[prodsep::group::Perm]) {
    for (i, p) in perms.iter().enumerate() {
        println!("  {}: {}", a.symbol(i), p.cycles());
    }
}

/// `#`-prefixed summary lines followed by the certificate block, so the
/// whole output can be fed back to `verify`.
fn print_certificate(summary: &str, c: &Certificate) {
    for line in summary.lines() {
        println!("# {line}");
    }
    print!("{}", certificate::emit(c));
}

fn stallings(cmd: StallingsCmd) -> Outcome {
    match cmd {
        StallingsCmd::Build { file, dot } => {
            let p = load_problem(&file)?;
            let h = stallings_graph(p.alphabet.len(), first_subgroup(&p)?);
            println!("vertices: {}", h.graph.vertex_count());
            println!("edges: {}", h.graph.geometric_edge_count());
            println!("rank: {}", h.graph.rank());
            let basis: Vec<String> = subgroup_basis(&h).iter().map(|w| p.alphabet.format(w)).collect();
            println!("basis: {}", if basis.is_empty() { "1".into() } else { basis.join(", ") });
            emit_dot(&dot, &to_dot(&h.graph, &p.alphabet, Some(h.base)))?;
            Ok(true)
        }
        StallingsCmd::Member { file, word } => {
            let p = load_problem(&file)?;
            let h = stallings_graph(p.alphabet.len(), first_subgroup(&p)?);
            let member = h.contains(&word_of(&p, word.as_deref())?.reduce());
            println!("{member}");
            Ok(member)
        }
    }
}

fn source_graph(p: &ProblemFile, word: Option<&str>) -> Result<(prodsep::graph::LabeledGraph, usize), Failure> {
    let h = stallings_graph(p.alphabet.len(), first_subgroup(p)?);
    match word {
        Some(_) => {
            let a = attach_word(&h, &word_of(p, word)?.reduce());
            Ok((a.graph, a.omega))
        }
        None => Ok((h.graph, h.base)),
    }
}

fn cover(cmd: CoverCmd) -> Outcome {
    match cmd {
        CoverCmd::Expand {
            file,
            word,
            all,
            cap,
            dot,
        } => {
            let p = load_problem(&file)?;
            let (g, base) = source_graph(&p, word.as_deref())?;
            println!("completions: {}", expansion_count(&g)?);
            let covers: Vec<CoveringExpansion> = if all {
                enumerate_expansions(&g, cap)?
            } else {
                vec![expand_to_cover(&g)?]
            };
            let mut dots = String::new();
            for (i, c) in covers.iter().enumerate() {
                println!("cover {i}: {} vertices, {} added edges", c.graph.vertex_count(), c.graph.geometric_edge_count() - c.original_edges);
                print_perms(&p.alphabet, &c.transitions());
                dots.push_str(&to_dot_named(&c.graph, &p.alphabet, Some(base), &format!("cover{i}")));
            }
            emit_dot(&dot, &dots)?;
            Ok(true)
        }
        CoverCmd::Group { file, word, cap } => {
            let p = load_problem(&file)?;
            let (g, _) = source_graph(&p, word.as_deref())?;
            let k = transition_group(&expand_to_cover(&g)?);
            println!("# order: {}", k.order(cap)?);
            print!("{}", format_group_spec(&p.alphabet, &k));
            Ok(true)
        }
    }
}

fn group(cmd: GroupCmd) -> Outcome {
    let GroupCmd::Cayley { spec, cap, dot } = cmd;
    let (a, g) = load_group(&spec)?;
    let table = materialize(&g, cap)?;
    let graph = table.cayley_graph();
    println!("order: {}", table.len());
    println!("edges: {}", graph.geometric_edge_count());
    emit_dot(&dot, &to_dot(&graph, &a, Some(0)))?;
    Ok(true)
}

fn ext(cmd: ExtCmd) -> Outcome {
    match cmd {
        ExtCmd::Eval { spec, primes, word } => {
            let (a, g) = load_group(&spec)?;
            let chain = ExtensionChain::new(g, &primes)?;
            let w = a.parse_word(&word).map_err(|e| input(format!("word: {e}")))?;
            let e = chain.top().evaluate(&w);
            for (key, c) in e.vector() {
                let source = if chain.depth() == 1 {
                    chain.base_perm(&key.source).cycles()
                } else {
                    chain.format_element(chain.depth() - 1, &key.source, &a)
                };
                println!("{source} --{}--> : {c}", a.symbol(key.symbol));
            }
            let below = chain.depth().saturating_sub(1);
            println!("group: {}", chain.format_element(below, e.project(), &a));
            println!("element: {}", chain.format_element(chain.depth(), &e, &a));
            Ok(true)
        }
        ExtCmd::CheckStar {
            spec,
            primes,
            count,
            length,
            seed,
        } => {
            let (a, g) = load_group(&spec)?;
            let chain = ExtensionChain::new(g, &primes)?;
            let mut r = rng(seed);
            let (mut passed, mut failed) = (0, 0);
            for _ in 0..count {
                let len = r.gen_range(0..=length);
                let w = random_word(&mut r, a.len(), len);
                if (1..=chain.depth()).all(|d| check_star(&chain, d, &w)) {
                    passed += 1;
                } else {
                    failed += 1;
                    println!("failed on {}", a.format(&w));
                }
            }
            println!("passed: {passed}");
            println!("failed: {failed}");
            Ok(failed == 0)
        }
        ExtCmd::Build { spec, primes, cap, dot } => {
            let (a, g) = load_group(&spec)?;
            let chain = ExtensionChain::new(g, &primes)?;
            let (table, graph) = cayley_graph_ext(&chain, chain.depth(), cap)?;
            println!("# order: {}", table.len());
            print!("{}", format_group_spec(&a, &table.to_xgroup()));
            emit_dot(&dot, &to_dot(&graph, &a, Some(0)))?;
            Ok(true)
        }
    }
}

fn separate(cmd: SeparateCmd) -> Outcome {
    match cmd {
        SeparateCmd::Hall { file, word, dot } => {
            let p = load_problem(&file)?;
            let gens = first_subgroup(&p)?;
            let w = word_of(&p, word.as_deref())?;
            let h = stallings_graph(p.alphabet.len(), gens);
            if h.contains(&w.reduce()) {
                println!("not separable: the word lies in the subgroup");
                return Ok(false);
            }
            let wit = hall_separator(p.alphabet.len(), gens, &w)?;
            let mut summary = String::new();
            writeln!(summary, "K acts on {} points; base point {}", wit.group.degree(), wit.base()).unwrap();
            writeln!(summary, "every generator fixes the base point; [w]_K sends it to {}", wit.word_image().apply(wit.base())).unwrap();
            print_certificate(&summary, &Certificate::Hall(HallCertificate::from_witness(&wit, &p.alphabet)));
            emit_dot(&dot, &to_dot(&wit.cover.graph, &p.alphabet, Some(wit.base())))?;
            Ok(true)
        }
        SeparateCmd::Product {
            file,
            word,
            primes,
            cap,
        } => {
            let p = load_problem(&file)?;
            let hs = p.generator_lists();
            if hs.is_empty() {
                return Err(input("the file declares no subgroup"));
            }
            let w = word_of(&p, word.as_deref())?;
            let primes = primes.or(p.primes.clone()).unwrap_or_else(|| vec![2; hs.len() - 1]);
            let wit = product_separator(p.alphabet.len(), &hs, &w, &primes, cap)?;
            let mut summary = String::new();
            writeln!(summary, "G acts on {} points; primes {primes:?}", wit.setup.group.degree()).unwrap();
            let sizes: Vec<String> = wit
                .image_sizes
                .iter()
                .map(|s| s.map_or("?".into(), |s| s.to_string()))
                .collect();
            writeln!(summary, "image sizes: {}", sizes.join(", ")).unwrap();
            print_certificate(&summary, &Certificate::Product(ProductCertificate::from_witness(&wit, &p.alphabet)));
            match wit.status {
                SeparationStatus::Separated => Ok(true),
                SeparationStatus::NotSeparated => Ok(false),
                SeparationStatus::Partial => Err(Failure::Cap("product image not enumerated".into())),
            }
        }
    }
}

fn factorize_cmd(file: &Path, word: Option<&str>, seeds: Option<Vec<String>>, primes: Option<Vec<u32>>, cap: usize) -> Outcome {
    let p = load_problem(file)?;
    let hs = p.generator_lists();
    if hs.is_empty() {
        return Err(input("the file declares no subgroup"));
    }
    let w = word_of(&p, word)?;
    let seeds: Option<Vec<Word>> = seeds
        .map(|list| {
            list.iter()
                .map(|s| p.alphabet.parse_word(s.trim()))
                .collect::<Result<Vec<_>, _>>()
        })
        .transpose()
        .map_err(|e| input(format!("seeds: {e}")))?;
    let options = FactorizeOptions {
        primes: primes.or(p.primes.clone()),
        cap,
    };
    match factorize(p.alphabet.len(), &hs, &w, seeds.as_deref(), &options)? {
        None => {
            println!("none: the word is separated from the product in the top extension");
            Ok(false)
        }
        Some((f, report)) => {
            let summary = format!(
                "{} seeds; {} cuts, {} spines",
                format!("{:?}", report.seeds).to_lowercase(), report.cuts, report.spines
            );
            let c = FactorizationCertificate::new(&p.alphabet, &hs, &w, &f);
            print_certificate(&summary, &Certificate::Factorization(c));
            Ok(true)
        }
    }
}

fn oracle(cmd: OracleCmd) -> Outcome {
    let OracleCmd::Member { file, word } = cmd;
    let p = load_problem(&file)?;
    let subs: Vec<PointedImmersion> = p
        .generator_lists()
        .iter()
        .map(|g| stallings_graph(p.alphabet.len(), g))
        .collect();
    let member = member_product(&subs, &word_of(&p, word.as_deref())?);
    println!("{member}");
    Ok(member)
}

fn verify(path: &Path, cap: usize) -> Outcome {
    let text = read(path)?;
    let c = certificate::parse(&text).map_err(|e| input(format!("{}: {e}", path.display())))?;
    match certificate::verify(&c, cap) {
        Verdict::Valid => {
            println!("valid");
            Ok(true)
        }
        Verdict::Invalid(why) => {
            println!("invalid: {why}");
            Ok(false)
        }
        Verdict::Partial => Err(Failure::Cap("partial: product image not enumerated (cap)".into())),
    }
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Stallings(c) => stallings(c),
        Command::Cover(c) => cover(c),
        Command::Group(c) => group(c),
        Command::Ext(c) => ext(c),
        Command::Separate(c) => separate(c),
        Command::Factorize {
            file,
            word,
            seeds,
            primes,
            cap,
        } => factorize_cmd(&file, word.as_deref(), seeds, primes, cap),
        Command::Oracle(c) => oracle(c),
        Command::Verify { certificate, cap } => verify(&certificate, cap),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Cap(msg)) => {
            eprintln!("resource cap: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
