use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use knotineq_core::graph::{export_dot, load_graph};
use knotineq_core::ingest::{
    build_database, parse_knotinfo_csv, read_database_csv, read_events_csv, write_database_csv, write_events_csv,
};
use knotineq_core::mine::{basic_conjectures, enumerate_conjectures, write_conjectures_csv, MineError, Status};
use knotineq_core::propagate::{diff, propagate, write_diff_csv};
use knotineq_core::report::{check_golden, explain};
use knotineq_core::{
    validate_config, ColumnMapping, ExclusionList, GoldenList, InequalityGraph, KnotDatabase, MineOptions, ParityTable,
    PropagateError, PropagateOptions, Registry, SupplementTable,
};

const DATA_DIR_VAR: &str = "KNOTINEQ_DATA_DIR";

#[derive(Parser)]
#[command(
    name = "knotineq",
    version,
    about = "Bound propagation over the knot invariant inequality network"
)]
struct Cli {
    #[command(flatten)]
    config: Config,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Config {
    /// Graph file (defaults to the bundled graph)
    #[arg(long, global = true)]
    graph: Option<PathBuf>,
    /// Column mapping file (defaults to the bundled mapping)
    #[arg(long, global = true)]
    mapping: Option<PathBuf>,
    /// Parity table (defaults to the bundled table)
    #[arg(long, global = true)]
    parity: Option<PathBuf>,
    /// Worker threads; 0 picks automatically
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Build a database from a KnotInfo export and optional supplements
    Import {
        #[arg(long)]
        csv: PathBuf,
        #[arg(long)]
        supplement: Vec<PathBuf>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Propagate bounds to the fixed point and diff against the input
    Propagate {
        #[arg(long)]
        db: Option<PathBuf>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Fail on the first contradicting knot
        #[arg(long)]
        strict: bool,
        /// Also run with a shuffled edge order and check the result is identical
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Compare two databases cell by cell
    Diff {
        #[arg(long)]
        before: PathBuf,
        #[arg(long)]
        after: PathBuf,
        /// Comma-separated vertex ids to restrict the diff to
        #[arg(long, value_delimiter = ',')]
        vertices: Vec<String>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Enumerate conjectural inequalities on a propagated database
    Mine {
        #[arg(long)]
        db: Option<PathBuf>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Only knots where both cells are exact count
        #[arg(long)]
        exact_only: bool,
        /// Exclusion pairs file (defaults to the bundled list)
        #[arg(long)]
        exclusions: Option<PathBuf>,
    },
    /// Show the events behind one knot's bounds for one vertex
    Explain {
        #[arg(long)]
        db: Option<PathBuf>,
        #[arg(long)]
        knot: String,
        #[arg(long)]
        vertex: String,
    },
    /// Compare a database against published knot lists
    CheckGolden {
        #[arg(long)]
        db: Option<PathBuf>,
        /// Bundled list name or path to a list file; defaults to every bundled list
        #[arg(long)]
        list: Vec<String>,
    },
    /// Write the graph in DOT format
    ExportDot {
        /// Output file; stdout when absent
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check graph, parity table and column mapping for consistency
    Validate,
}

struct Setup {
    graph: InequalityGraph,
    registry: Registry,
    parity: ParityTable,
    mapping: ColumnMapping,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn out_dir(dir: &Path) -> Result<&Path> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    Ok(dir)
}

impl Config {
    fn load(&self) -> Result<Setup> {
        let graph = match &self.graph {
            Some(p) => load_graph(&read(p)?).with_context(|| format!("graph {}", p.display()))?,
            None => InequalityGraph::bundled(),
        };
        let parity = match &self.parity {
            Some(p) => ParityTable::parse(&read(p)?).with_context(|| format!("parity table {}", p.display()))?,
            None => ParityTable::bundled(),
        };
        let mapping = match &self.mapping {
            Some(p) => ColumnMapping::parse(&read(p)?).with_context(|| format!("mapping {}", p.display()))?,
            None => ColumnMapping::bundled(),
        };
        let mut registry = Registry::standard();
        registry.apply_parity_table(&parity)?;
        validate_config(&graph, &registry, &parity, &mapping)?;
        Ok(Setup {
            graph,
            registry,
            parity,
            mapping,
        })
    }
}

/// `--db`, or `$KNOTINEQ_DATA_DIR/<fallback>`.
fn db_path(db: &Option<PathBuf>, fallback: &str) -> Result<PathBuf> {
    if let Some(p) = db {
        return Ok(p.clone());
    }
    match std::env::var_os(DATA_DIR_VAR) {
        Some(dir) => Ok(PathBuf::from(dir).join(fallback)),
        None => bail!("no --db given and {DATA_DIR_VAR} is not set"),
    }
}

/// `x.csv` -> `x.events.csv`.
fn events_path(db: &Path) -> PathBuf {
    let stem = db.file_stem().unwrap_or_default().to_string_lossy();
    db.with_file_name(format!("{stem}.events.csv"))
}

fn load_db(path: &Path, registry: &Registry) -> Result<KnotDatabase> {
    let mut db = read_database_csv(&read(path)?, registry).with_context(|| format!("database {}", path.display()))?;
    let events = events_path(path);
    if events.exists() {
        db.provenance =
            read_events_csv(&read(&events)?, &db).with_context(|| format!("event log {}", events.display()))?;
    }
    Ok(db)
}

fn save_db(db: &KnotDatabase, dir: &Path, stem: &str) -> Result<()> {
    write(&dir.join(format!("{stem}.csv")), &write_database_csv(db))?;
    write(&dir.join(format!("{stem}.events.csv")), &write_events_csv(db))
}

fn run(cli: Cli) -> Result<ExitCode> {
    let s = cli.config.load()?;
    let jobs = cli.config.jobs;
    match cli.command {
        Command::Validate => {
            println!(
                "{} vertices, {} edges, {} parity entries",
                s.graph.vertices().len(),
                s.graph.edges().len(),
                s.parity.len()
            );
        }
        Command::ExportDot { out } => {
            let dot = export_dot(&s.graph);
            match out {
                Some(p) => {
                    write(&p, &dot)?;
                    println!("{} nodes, {} edges", s.graph.vertices().len(), s.graph.edges().len());
                }
                None => print!("{dot}"),
            }
        }
        Command::Import { csv, supplement, out } => {
            let raw =
                parse_knotinfo_csv(&read(&csv)?, &s.mapping).with_context(|| format!("export {}", csv.display()))?;
            let tables = supplement
                .iter()
                .map(|p| {
                    SupplementTable::parse(&read(p)?, &s.registry)
                        .with_context(|| format!("supplement {}", p.display()))
                })
                .collect::<Result<Vec<_>>>()?;
            let db = build_database(&raw, &tables, &s.registry)?;
            save_db(&db, out_dir(&out)?, "db")?;
            println!("knots {}, events {}", db.len(), db.provenance.len());
        }
        Command::Propagate { db, out, strict, seed } => {
            let input = load_db(&db_path(&db, "db.csv")?, &s.registry)?;
            let opts = PropagateOptions {
                strict,
                jobs,
                edge_order: None,
            };
            let p = match propagate(&input, &s.graph, &opts) {
                Err(PropagateError::Contradiction(c)) => {
                    eprintln!("error: {c}");
                    return Ok(ExitCode::FAILURE);
                }
                r => r?,
            };
            if let Some(seed) = seed {
                let mut labels: Vec<u32> = s.graph.edges().iter().map(|e| e.label).collect();
                labels.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
                let shuffled = propagate(
                    &input,
                    &s.graph,
                    &PropagateOptions {
                        edge_order: Some(labels),
                        ..opts
                    },
                )?;
                if !shuffled.db.same_values(&p.db) {
                    bail!("edge order {seed} reached a different fixed point");
                }
            }
            for c in &p.contradictions {
                eprintln!("warning: {c}");
            }
            let d = diff(&input, &p.db)?;
            let dir = out_dir(&out)?;
            save_db(&p.db, dir, "newdb")?;
            write(&dir.join("diff.csv"), &write_diff_csv(&d, &s.registry))?;
            write(&dir.join("summary.txt"), &d.summary().render(&s.registry))?;
            println!(
                "knots {}, events {}, diffs {}, contradictions {}",
                p.db.len(),
                p.db.provenance.len() - input.provenance.len(),
                d.rows.len(),
                p.contradictions.len()
            );
        }
        Command::Diff {
            before,
            after,
            vertices,
            out,
        } => {
            let before = load_db(&before, &s.registry)?;
            let after = load_db(&after, &s.registry)?;
            let mut d = diff(&before, &after)?;
            if !vertices.is_empty() {
                let keep = vertices
                    .iter()
                    .map(|v| s.registry.require(v))
                    .collect::<Result<Vec<_>, _>>()?;
                d = d.restrict(&keep);
            }
            let dir = out_dir(&out)?;
            let summary = d.summary();
            write(&dir.join("diff.csv"), &write_diff_csv(&d, &s.registry))?;
            write(&dir.join("summary.txt"), &summary.render(&s.registry))?;
            println!(
                "knots {}, diffs {}, new exact {}",
                after.len(),
                d.rows.len(),
                summary.count(knotineq_core::DiffCategory::NewExact)
            );
        }
        Command::Mine {
            db,
            out,
            exact_only,
            exclusions,
        } => {
            let db = load_db(&db_path(&db, "newdb.csv")?, &s.registry)?;
            let excl = match exclusions {
                Some(p) => ExclusionList::parse(&read(&p)?)?,
                None => ExclusionList::default(),
            };
            let opts = MineOptions { exact_only, jobs };
            let mut conj = match enumerate_conjectures(&db, &s.graph, &excl, &opts) {
                Err(MineError::NotAFixedPoint) => {
                    eprintln!("error: {}", MineError::NotAFixedPoint);
                    return Ok(ExitCode::FAILURE);
                }
                r => r?,
            };
            let basic = basic_conjectures(&s.graph, &conj, &s.registry)?;
            for c in &mut conj {
                if basic.iter().any(|b| (b.greater, b.lesser) == (c.greater, c.lesser)) {
                    c.status = Status::BasicConj;
                }
            }
            let dir = out_dir(&out)?;
            write(&dir.join("conjectures.csv"), &write_conjectures_csv(&conj, &s.registry))?;
            println!("knots {}, conjectures {}, basic {}", db.len(), conj.len(), basic.len());
            for b in &basic {
                println!("  {} >= {}", s.registry.get(b.greater).id, s.registry.get(b.lesser).id);
            }
        }
        Command::Explain { db, knot, vertex } => {
            let db = load_db(&db_path(&db, "newdb.csv")?, &s.registry)?;
            print!("{}", explain(&db, &s.graph, &knot, &vertex)?);
        }
        Command::CheckGolden { db, list } => {
            let db = load_db(&db_path(&db, "newdb.csv")?, &s.registry)?;
            let lists = if list.is_empty() {
                GoldenList::bundled()
            } else {
                list.iter()
                    .map(|l| match GoldenList::bundled_named(l) {
                        Some(g) => Ok(g),
                        None => Ok(GoldenList::parse(&read(Path::new(l))?)?),
                    })
                    .collect::<Result<Vec<_>>>()?
            };
            let mut all = true;
            for l in &lists {
                let r = check_golden(&db, l)?;
                all &= r.passed();
                print!("{r}");
            }
            if !all {
                return Ok(ExitCode::FAILURE);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
