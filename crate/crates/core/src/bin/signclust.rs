use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use signclust::emit;
use signclust::experiment::{self, ExperimentConfig, ExperimentRecord};
use signclust::graph::{read_graph, write_edge_list};
use signclust::operators::ZeroDegree;
use signclust::pipeline::{run_pipeline, Method, PipelineConfig};
use signclust::rng;
use signclust::ssbm::{sample, sizes_from_rho, Partition, SsbmParams};
use signclust::theory::{theory_check, BoundInputs};
use signclust::{Error, Result};

#[derive(Parser)]
#[command(name = "signclust", version, about = "Spectral clustering of signed graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a graph from the signed stochastic block model.
    Generate(GenerateArgs),
    /// Cluster a graph read from an edge list.
    Cluster(ClusterArgs),
    /// Mean ARI of SPONGE_sym over a (tau+, tau-) grid.
    GridTau(ExperimentArgs),
    /// Mean ARI of the regularized methods over a (gamma+, gamma-) grid.
    GridGamma(ExperimentArgs),
    /// Mean ARI against the cluster-size aspect ratio rho.
    RhoCurve(ExperimentArgs),
    /// All methods on the same sampled graphs.
    Compare(ExperimentArgs),
    /// Closed-form population quantities checked against dense computation.
    TheoryCheck(TheoryArgs),
}

#[derive(Args, Clone, Default)]
struct ModelArgs {
    /// JSON experiment config; flags given on the command line win.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    /// Edge probability.
    #[arg(long)]
    p: Option<f64>,
    /// Sign flip probability.
    #[arg(long)]
    eta: Option<f64>,
    /// Smallest to largest cluster size ratio (1 = equal sizes).
    #[arg(long)]
    rho: Option<f64>,
    /// Explicit cluster sizes, comma separated; overrides n, k and rho.
    #[arg(long, value_delimiter = ',')]
    sizes: Option<Vec<usize>>,
    #[arg(long)]
    seed: Option<u64>,
}

impl ModelArgs {
    fn load(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => serde_json::from_reader(BufReader::new(File::open(path)?))?,
            None => ExperimentConfig::default(),
        };
        if let Some(v) = self.n {
            cfg.n = v;
        }
        if let Some(v) = self.k {
            cfg.k = v;
        }
        if let Some(v) = self.p {
            cfg.p = v;
        }
        if let Some(v) = self.eta {
            cfg.eta = v;
        }
        if let Some(v) = self.rho {
            cfg.rho = v;
        }
        if let Some(v) = &self.sizes {
            cfg.n = v.iter().sum();
            cfg.k = v.len();
            cfg.sizes = Some(v.clone());
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        Ok(cfg)
    }
}

#[derive(Args)]
struct GenerateArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Edge list output (`j j' w` per line).
    #[arg(long, short)]
    output: PathBuf,
    /// Ground-truth labels as `node,label` CSV.
    #[arg(long)]
    labels: Option<PathBuf>,
}

#[derive(Args)]
struct ClusterArgs {
    /// Edge list input.
    #[arg(long, short)]
    input: PathBuf,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value = "SPONGE_sym")]
    method: Method,
    #[arg(long, default_value_t = 1.0)]
    tau_plus: f64,
    #[arg(long, default_value_t = 1.0)]
    tau_minus: f64,
    /// Positive-side regularization; the regularized methods pick a default from the graph.
    #[arg(long)]
    gamma_plus: Option<f64>,
    #[arg(long)]
    gamma_minus: Option<f64>,
    /// Assumed flip probability when choosing default regularization.
    #[arg(long, default_value_t = 0.0)]
    eta_hint: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Fail on zero-degree rows instead of treating them as identity rows.
    #[arg(long)]
    strict_degrees: bool,
    /// Ground-truth labels (`node,label` CSV) to score against.
    #[arg(long)]
    truth: Option<PathBuf>,
    /// Labels output as `node,label`; -1 marks nodes outside the largest component.
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Run summary as JSON.
    #[arg(long)]
    summary: Option<PathBuf>,
}

#[derive(Args)]
struct ExperimentArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long)]
    trials: Option<usize>,
    /// Methods to run, comma separated.
    #[arg(long, value_delimiter = ',')]
    methods: Option<Vec<Method>>,
    #[arg(long, value_delimiter = ',')]
    tau_plus_grid: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    tau_minus_grid: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    gamma_plus_grid: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    gamma_minus_grid: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    rhos: Option<Vec<f64>>,
    #[arg(long)]
    tau_plus: Option<f64>,
    #[arg(long)]
    tau_minus: Option<f64>,
    /// Store per-trial wall time in the JSON record (breaks byte-identical reruns).
    #[arg(long)]
    wall_time: bool,
    /// Output directory.
    #[arg(long, short, default_value = ".")]
    out: PathBuf,
    /// Skip SVG rendering.
    #[arg(long)]
    no_svg: bool,
}

impl ExperimentArgs {
    fn config(&self) -> Result<ExperimentConfig> {
        let mut cfg = self.model.load()?;
        if let Some(v) = self.trials {
            cfg.trials = v;
        }
        if let Some(v) = &self.methods {
            cfg.methods = v.clone();
        }
        if let Some(v) = &self.tau_plus_grid {
            cfg.tau_plus_grid = v.clone();
        }
        if let Some(v) = &self.tau_minus_grid {
            cfg.tau_minus_grid = v.clone();
        }
        if let Some(v) = &self.gamma_plus_grid {
            cfg.gamma_plus_grid = v.clone();
        }
        if let Some(v) = &self.gamma_minus_grid {
            cfg.gamma_minus_grid = v.clone();
        }
        if let Some(v) = &self.rhos {
            cfg.rhos = v.clone();
        }
        if let Some(v) = self.tau_plus {
            cfg.tau_plus = v;
        }
        if let Some(v) = self.tau_minus {
            cfg.tau_minus = v;
        }
        if self.wall_time {
            cfg.record_wall_time = true;
        }
        Ok(cfg)
    }
}

#[derive(Args)]
struct TheoryArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long)]
    tau_plus: Option<f64>,
    #[arg(long)]
    tau_minus: Option<f64>,
    /// Failure probability used in the bounds.
    #[arg(long, default_value_t = 0.1)]
    delta: f64,
    #[arg(long, default_value_t = 1.0)]
    xi: f64,
    #[arg(long, default_value_t = 1.0)]
    r: f64,
    /// Report output; stdout when absent.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

fn params_for(cfg: &ExperimentConfig) -> Result<SsbmParams> {
    match &cfg.sizes {
        Some(s) => SsbmParams::new(s.clone(), cfg.p, cfg.eta),
        None if cfg.rho == 1.0 => SsbmParams::equal(cfg.n, cfg.k, cfg.p, cfg.eta),
        None => {
            let sizes = sizes_from_rho(cfg.n, cfg.k, cfg.rho, rng::derive(cfg.seed, &[rng::tag::SIZES]))?;
            SsbmParams::new(sizes, cfg.p, cfg.eta)
        }
    }
}

fn write_labels(labels: &[Option<usize>], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_writer(BufWriter::new(File::create(path)?));
    w.write_record(["node", "label"])?;
    for (i, l) in labels.iter().enumerate() {
        let label = l.map_or(-1, |x| x as i64);
        w.write_record([i.to_string(), label.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

fn read_labels(path: &Path, n: usize) -> Result<Partition> {
    let mut rdr = csv::Reader::from_reader(BufReader::new(File::open(path)?));
    let mut labels = vec![None; n];
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let parse = |i: usize| -> Result<i64> {
            rec.get(i)
                .and_then(|s| s.trim().parse().ok())
                .ok_or(Error::Parse {
                    line: line + 2,
                    msg: "expected `node,label`".into(),
                })
        };
        let (node, label) = (parse(0)?, parse(1)?);
        if node < 0 || node as usize >= n || label < 0 {
            return Err(Error::Parse {
                line: line + 2,
                msg: format!("bad entry {node},{label}"),
            });
        }
        labels[node as usize] = Some(label as usize);
    }
    let labels: Option<Vec<usize>> = labels.into_iter().collect();
    let labels = labels.ok_or_else(|| Error::InvalidParams("truth file does not label every node".into()))?;
    let k = labels.iter().max().map_or(0, |&m| m + 1);
    Partition::new(labels, k)
}

fn generate(a: &GenerateArgs) -> Result<()> {
    let cfg = a.model.load()?;
    let params = params_for(&cfg)?;
    let (g, truth) = sample(&params, rng::derive(cfg.seed, &[rng::tag::GRAPH]))?;
    let mut w = BufWriter::new(File::create(&a.output)?);
    write_edge_list(&g, &mut w)?;
    w.flush()?;
    if let Some(path) = &a.labels {
        let labels: Vec<Option<usize>> = truth.labels.iter().map(|&l| Some(l)).collect();
        write_labels(&labels, path)?;
    }
    eprintln!("{} nodes, {} edges", g.n(), g.edge_count());
    Ok(())
}

fn cluster(a: &ClusterArgs) -> Result<()> {
    let g = read_graph(BufReader::new(File::open(&a.input)?))?;
    let truth = match &a.truth {
        Some(p) => Some(read_labels(p, g.n())?),
        None => None,
    };
    let cfg = PipelineConfig {
        method: a.method,
        k: a.k,
        tau_plus: a.tau_plus,
        tau_minus: a.tau_minus,
        gamma_plus: a.gamma_plus,
        gamma_minus: a.gamma_minus,
        eta_hint: a.eta_hint,
        seed: a.seed,
        zero_degree: if a.strict_degrees {
            ZeroDegree::Reject
        } else {
            ZeroDegree::UnitRow
        },
        ..PipelineConfig::default()
    };
    let res = run_pipeline(&g, truth.as_ref(), &cfg)?;
    match &a.output {
        Some(path) => write_labels(&res.labels, path)?,
        None => {
            let out = io::stdout();
            let mut w = csv::Writer::from_writer(out.lock());
            w.write_record(["node", "label"])?;
            for (i, l) in res.labels.iter().enumerate() {
                w.write_record([i.to_string(), l.map_or(-1, |x| x as i64).to_string()])?;
            }
            w.flush()?;
        }
    }
    if let Some(path) = &a.summary {
        emit::write_json(&res, path)?;
    }
    if let Some(ari) = res.ari {
        eprintln!("ARI {ari:.4}");
    }
    Ok(())
}

fn write_record(rec: &ExperimentRecord, stem: &str, a: &ExperimentArgs) -> Result<()> {
    let dir = &a.out;
    emit::write_json(rec, &dir.join(format!("{stem}.json")))?;
    let single = rec.heatmaps.len() == 1;
    for h in &rec.heatmaps {
        let name = if single {
            stem.to_string()
        } else {
            format!("{stem}_{}", h.method.name())
        };
        emit::write_heatmap_csv(h, &dir.join(format!("{name}.csv")))?;
        if !a.no_svg {
            emit::write_text(&emit::heatmap_svg(h), &dir.join(format!("{name}.svg")))?;
        }
    }
    if let Some(c) = &rec.curve {
        emit::write_curve_csv(c, &dir.join(format!("{stem}.csv")))?;
        if !a.no_svg {
            emit::write_text(&emit::curve_svg(c), &dir.join(format!("{stem}.svg")))?;
        }
    }
    for h in &rec.heatmaps {
        let best = h
            .cells
            .iter()
            .filter(|c| !c.stats.mean_ari.is_nan())
            .max_by(|a, b| a.stats.mean_ari.total_cmp(&b.stats.mean_ari));
        if let Some(c) = best {
            eprintln!(
                "{}: best mean ARI {:.3} at {}={}, {}={}",
                h.method, c.stats.mean_ari, h.x_name, c.x, h.y_name, c.y
            );
        }
    }
    if let Some(c) = &rec.curve {
        for r in &c.rows {
            eprintln!("{:>15} rho={:<5} mean ARI {:.3}", r.method.name(), r.rho, r.stats.mean_ari);
        }
    }
    Ok(())
}

fn theory(a: &TheoryArgs) -> Result<()> {
    let cfg = a.model.load()?;
    let params = params_for(&cfg)?;
    let report = theory_check(
        &params,
        a.tau_plus.unwrap_or(cfg.tau_plus),
        a.tau_minus.unwrap_or(cfg.tau_minus),
        BoundInputs {
            delta: a.delta,
            xi: a.xi,
            r: a.r,
        },
    )?;
    match &a.output {
        Some(path) => emit::write_json(&report, path),
        None => {
            let out = io::stdout();
            let mut w = out.lock();
            serde_json::to_writer_pretty(&mut w, &report)?;
            writeln!(w)?;
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate(a) => generate(&a),
        Command::Cluster(a) => cluster(&a),
        Command::GridTau(a) => write_record(&experiment::grid_tau(&a.config()?)?, "grid_tau", &a),
        Command::GridGamma(a) => write_record(&experiment::grid_gamma(&a.config()?)?, "grid_gamma", &a),
        Command::RhoCurve(a) => write_record(&experiment::rho_curve(&a.config()?)?, "rho_curve", &a),
        Command::Compare(a) => write_record(&experiment::compare(&a.config()?)?, "compare", &a),
        Command::TheoryCheck(a) => theory(&a),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
