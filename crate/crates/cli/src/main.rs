//! Command-line front end: materialize datasets, carve benchmark subsets,
//! run the benchmark ladder, differential-check against the naive oracle,
//! and print dataset censuses.

use clap::{Parser, Subcommand, ValueEnum};
use ontomat::abox::{load_abox_with, ABoxOptions};
use ontomat::bench::{BenchConfig, ReportFormat, EXIT_INPUT};
use ontomat::materialize::{
    check_consistency, count_stats, materialize, materialize_streaming, write_inference_result,
    AssertionSinks, MaterializeOptions, LITERALS_FILE, RELATIONS_FILE, STATS_FILE, TYPES_FILE,
};
use ontomat::oracle;
use ontomat::rdf;
use ontomat::tbox::build_tbox;
use ontomat::term::{Term, TermStore};
use std::path::PathBuf;
use std::time::{Duration, Instant};

#[derive(Parser)]
#[command(
    name = "ontomat",
    version,
    about = "Forward-chaining materialization over subclass hierarchies and hasValue restrictions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for ReportFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => ReportFormat::Csv,
            FormatArg::Json => ReportFormat::Json,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Materialize all inferable assertions into per-category N-Triples files
    Materialize {
        /// Input dataset (.ttl/.nt, optionally gzip-compressed)
        input: PathBuf,
        /// Output directory for the inferred files and stats.json
        #[arg(short, long)]
        output: PathBuf,
        /// Worker threads for the rule phase
        #[arg(long, default_value_t = 1)]
        threads: usize,
        /// Stream inferred triples to disk instead of holding them in memory
        #[arg(long)]
        streaming: bool,
        /// Subtract assertions already present in the input
        #[arg(long)]
        dedup_against_input: bool,
    },
    /// Extract a deterministic leaf-seeded subset of a dump
    Sample {
        /// Source dump
        dump: PathBuf,
        /// Root class IRI seeding the subtree (owl:Thing for the whole ontology)
        #[arg(long)]
        root: String,
        /// Number of leaf classes to keep
        #[arg(long)]
        leaves: usize,
        /// Keep owl:disjointWith triples in the subset
        #[arg(long)]
        keep_disjointness: bool,
        /// Output file (sorted N-Triples)
        #[arg(short = 'o', long)]
        output: PathBuf,
    },
    /// Run datasets through the full pipeline with timeouts and verification
    Bench {
        /// Dataset files, processed in ascending size order
        datasets: Vec<PathBuf>,
        /// Per-dataset timeout in seconds
        #[arg(long, default_value_t = 72 * 3600)]
        timeout: u64,
        /// Worker threads for the rule phase
        #[arg(long, default_value_t = 1)]
        threads: usize,
        /// Expected-counts manifest (JSON)
        #[arg(long)]
        manifest: Option<PathBuf>,
        /// Report output path (stdout when omitted)
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
        format: FormatArg,
        /// Stream inferred triples instead of holding them
        #[arg(long)]
        streaming: bool,
    },
    /// Consistency check; --oracle adds a differential run against naive saturation
    Check {
        input: PathBuf,
        /// Compare engine output with the naive fixpoint oracle
        #[arg(long)]
        oracle: bool,
    },
    /// Dataset census: triples, classes, restrictions, instances
    Stats {
        inputs: Vec<PathBuf>,
        #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
        format: FormatArg,
        /// Dump per-class closure sizes as CSV to this path
        #[arg(long)]
        closure_sizes: Option<PathBuf>,
    },
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INPUT
        }
    };
    std::process::exit(code);
}

fn run(cli: Cli) -> ontomat::Result<i32> {
    match cli.command {
        Command::Materialize {
            input,
            output,
            threads,
            streaming,
            dedup_against_input,
        } => cmd_materialize(input, output, threads, streaming, dedup_against_input),
        Command::Sample {
            dump,
            root,
            leaves,
            keep_disjointness,
            output,
        } => cmd_sample(dump, root, leaves, keep_disjointness, output),
        Command::Bench {
            datasets,
            timeout,
            threads,
            manifest,
            report,
            format,
            streaming,
        } => cmd_bench(datasets, timeout, threads, manifest, report, format, streaming),
        Command::Check { input, oracle } => cmd_check(input, oracle),
        Command::Stats {
            inputs,
            format,
            closure_sizes,
        } => cmd_stats(inputs, format, closure_sizes),
    }
}

fn cmd_materialize(
    input: PathBuf,
    output: PathBuf,
    threads: usize,
    streaming: bool,
    dedup_against_input: bool,
) -> ontomat::Result<i32> {
    let started = Instant::now();
    let mut store = TermStore::new();
    let (triples, _) = rdf::parse_path(&input, &mut store, 0)?;
    let t_parse = started.elapsed().as_secs_f64();

    let tbox_start = Instant::now();
    let index = build_tbox(&triples, &mut store)?;
    let t_closure = tbox_start.elapsed().as_secs_f64();

    let load_start = Instant::now();
    let abox = load_abox_with(
        &triples,
        &index,
        &store,
        ABoxOptions {
            track_input_assertions: dedup_against_input,
        },
    )?;
    let t_load = load_start.elapsed().as_secs_f64();

    let options = MaterializeOptions {
        dedup_against_input,
        ..Default::default()
    };
    let pool = rayon_pool(threads)?;
    std::fs::create_dir_all(&output)?;
    let mut stats = if streaming {
        let open = |name: &str| -> ontomat::Result<std::io::BufWriter<std::fs::File>> {
            let path = output.join(name);
            Ok(std::io::BufWriter::new(
                std::fs::File::create(&path).map_err(|e| ontomat::Error::from_io(&path, e))?,
            ))
        };
        let mut types = open(TYPES_FILE)?;
        let mut relations = open(RELATIONS_FILE)?;
        let mut literals = open(LITERALS_FILE)?;
        pool.install(|| {
            materialize_streaming(
                &abox,
                &index,
                &options,
                &store,
                AssertionSinks {
                    types: &mut types,
                    relations: &mut relations,
                    literals: &mut literals,
                },
            )
        })?
    } else {
        let result = pool.install(|| materialize(&abox, &index, &options));
        write_inference_result(&result, &index, &store, &output)?;
        count_stats(&result)
    };
    stats.t_load_s = t_load;
    stats.t_closure_s = t_closure;
    std::fs::write(
        output.join(STATS_FILE),
        serde_json::to_string_pretty(&stats).expect("stats serialize"),
    )?;
    println!(
        "{} triples in, {} + {} + {} assertions out (parse {:.2}s, tbox {:.2}s, load {:.2}s, rules {:.2}s)",
        triples.len(),
        stats.n_transitive_types,
        stats.n_individual_assertions,
        stats.n_literal_assertions,
        t_parse,
        t_closure,
        t_load,
        stats.t_materialize_s,
    );
    Ok(0)
}

fn cmd_sample(
    dump: PathBuf,
    root: String,
    leaves: usize,
    keep_disjointness: bool,
    output: PathBuf,
) -> ontomat::Result<i32> {
    let mut out = std::io::BufWriter::new(
        std::fs::File::create(&output).map_err(|e| ontomat::Error::from_io(&output, e))?,
    );
    let summary =
        ontomat::sampler::sample_file(&dump, &root, leaves, !keep_disjointness, &mut out)?;
    println!(
        "{} leaf classes, {} triples -> {}",
        summary.n_leaves,
        summary.n_triples,
        output.display()
    );
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn cmd_bench(
    datasets: Vec<PathBuf>,
    timeout: u64,
    threads: usize,
    manifest: Option<PathBuf>,
    report_path: Option<PathBuf>,
    format: FormatArg,
    streaming: bool,
) -> ontomat::Result<i32> {
    let config = BenchConfig {
        dataset_paths: datasets,
        timeout: Duration::from_secs(timeout),
        threads,
        manifest_path: manifest,
        streaming,
    };
    let report = ontomat::bench::run_benchmark(&config)?;
    let rendered = report.render(format.into());
    match &report_path {
        Some(p) => std::fs::write(p, &rendered).map_err(|e| ontomat::Error::from_io(p, e))?,
        None => print!("{rendered}"),
    }
    for m in &report.mismatches {
        eprintln!("mismatch: {m}");
    }
    Ok(report.exit_code())
}

fn cmd_check(input: PathBuf, with_oracle: bool) -> ontomat::Result<i32> {
    let mut store = TermStore::new();
    let (triples, _) = rdf::parse_path(&input, &mut store, 0)?;
    let index = build_tbox(&triples, &mut store)?;
    let abox = ontomat::abox::load_abox(&triples, &index, &store)?;
    let result = materialize(&abox, &index, &MaterializeOptions::default());
    let disjoint = index.propagate_disjointness();
    let violations = check_consistency(&abox, &result, &disjoint, &store);
    let mut failed = false;
    if violations.is_empty() {
        println!("consistent: no instance violates a disjointness axiom");
    } else {
        failed = true;
        println!("{} inconsistent instance(s):", violations.len());
        for v in &violations {
            println!(
                "  {} is both {} and {}",
                display(&store, v.instance),
                display(&store, v.class_a),
                display(&store, v.class_b)
            );
        }
    }
    if with_oracle {
        let diff = oracle::differential(&triples, &mut store)?;
        if diff.agrees() {
            println!(
                "oracle agreement: {} types, {} individual, {} literal assertions",
                result.inferred_types.len(),
                result.inferred_object_assertions.len(),
                result.inferred_data_assertions.len()
            );
        } else {
            failed = true;
            println!(
                "oracle DISAGREEMENT: -{}/+{} types, -{}/+{} individuals, -{}/+{} literals, {} closure mismatches",
                diff.missing_types.len(),
                diff.extra_types.len(),
                diff.missing_objects.len(),
                diff.extra_objects.len(),
                diff.missing_data.len(),
                diff.extra_data.len(),
                diff.closure_mismatches.len()
            );
        }
    }
    Ok(if failed { 1 } else { 0 })
}

fn cmd_stats(
    inputs: Vec<PathBuf>,
    format: FormatArg,
    closure_sizes: Option<PathBuf>,
) -> ontomat::Result<i32> {
    let mut rows = Vec::new();
    for input in &inputs {
        let mut store = TermStore::new();
        let (triples, _) = rdf::parse_path(input, &mut store, 0)?;
        let index = build_tbox(&triples, &mut store)?;
        let abox = ontomat::abox::load_abox(&triples, &index, &store)?;
        if let Some(csv_path) = &closure_sizes {
            let mut w = std::io::BufWriter::new(
                std::fs::File::create(csv_path)
                    .map_err(|e| ontomat::Error::from_io(csv_path, e))?,
            );
            index.write_closure_sizes_csv(&store, &mut w)?;
        }
        rows.push(serde_json::json!({
            "dataset": rdf::dataset_name(input),
            "triples": triples.len(),
            "classes": index.n_classes(),
            "restrictions": index.n_restrictions(),
            "instances": abox.n_instances(),
        }));
    }
    match format {
        FormatArg::Json => println!("{}", serde_json::to_string_pretty(&rows).expect("serialize")),
        FormatArg::Csv => {
            println!("dataset,triples,classes,restrictions,instances");
            for r in rows {
                println!(
                    "{},{},{},{},{}",
                    r["dataset"].as_str().expect("dataset name"),
                    r["triples"],
                    r["classes"],
                    r["restrictions"],
                    r["instances"]
                );
            }
        }
    }
    Ok(0)
}

fn rayon_pool(threads: usize) -> ontomat::Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| ontomat::Error::Io(std::io::Error::other(e)))
}

fn display(store: &TermStore, id: ontomat::TermId) -> String {
    match store.resolve(id) {
        Term::Iri(iri) => format!("<{iri}>"),
        Term::Blank(label) => format!("_:{label}"),
        Term::Literal { lexical, .. } => format!("{lexical:?}"),
    }
}
