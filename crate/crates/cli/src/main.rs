//! `tempered`: train boosted trees, convert them to MDTs, lay them out in the
//! Poincaré disk and render SVG figures.

mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use tempered::artifact::{self, FoldModel, LayoutFile, MdtFile, ModelFile, TrainConfig};
use tempered::boosting::{boost, ensemble_predict, error_rate, BoostedEnsemble};
use tempered::data::{load_csv, load_csv_with_schema, stratified_folds, Sample};
use tempered::layout::{apply_t_self, sarkar_layout, LayoutParams};
use tempered::mdt::{create_mdt, mdt_ensemble_predict, MonotonicDecisionTree};
use tempered::render::{render_svg, svg_file_name};
use tempered::selftest::{self, Suite};
use tempered::stats::{mean_std, paired_t_test};
use tempered::Temper;

use config::Config;

#[derive(Parser, Debug)]
#[command(
    name = "tempered",
    version,
    about = "Hyperbolic embedding of boosted decision trees"
)]
struct Cli {
    /// Worker threads (default: logical cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// TOML file of default option values; command-line flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Cross-validate boosting on a CSV file and write the models.
    Train(TrainArgs),
    /// Convert every tree of a model to a monotonic decision tree.
    Mdt {
        /// Model file written by `train`.
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Lay out one MDT in the Poincaré disk.
    Embed(EmbedArgs),
    /// Rescale a layout to its t-self.
    LayoutTself {
        #[arg(long)]
        layout: PathBuf,
        /// Target temper.
        #[arg(long)]
        t: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Draw a layout as SVG.
    Render(RenderArgs),
    /// Test error of a model's full-data ensemble on a CSV file.
    Eval {
        /// CSV file with the training schema.
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        model: PathBuf,
        /// Replace every tree by its MDT, keeping the leveraging coefficients.
        #[arg(long)]
        as_mdt: bool,
    },
    /// Run the built-in invariant suites.
    Selftest {
        /// core, geometry, mdt, boost or all.
        #[arg(long, default_value = "all")]
        suite: String,
    },
}

#[derive(Args, Debug)]
struct TrainArgs {
    /// Headered CSV file.
    #[arg(long)]
    data: Option<PathBuf>,
    /// Name of the class column.
    #[arg(long)]
    label: Option<String>,
    /// Value of the class column that is the positive class.
    #[arg(long)]
    positive: Option<String>,
    /// Boosting iterations [default: 20].
    #[arg(long)]
    trees: Option<usize>,
    /// Maximum number of nodes per tree [default: 31].
    #[arg(long)]
    tree_size: Option<usize>,
    /// Cross-validation folds [default: 10].
    #[arg(long)]
    folds: Option<usize>,
    /// Seed for fold assignment [default: 0].
    #[arg(long)]
    seed: Option<u64>,
    /// Model file to write.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct EmbedArgs {
    #[arg(long)]
    mdt: PathBuf,
    /// Index of the tree in the MDT file.
    #[arg(long)]
    tree: usize,
    #[arg(long)]
    out: PathBuf,
    /// Fan angle at the root, radians [default: 2π].
    #[arg(long)]
    root_fan: Option<f64>,
    /// Fan angle at internal nodes, radians [default: π].
    #[arg(long)]
    fan: Option<f64>,
    /// Minimum angular gap between siblings, radians [default: 0.05].
    #[arg(long)]
    min_gap: Option<f64>,
}

#[derive(Args, Debug)]
struct RenderArgs {
    #[arg(long)]
    layout: PathBuf,
    #[arg(long)]
    mdt: PathBuf,
    /// Comma-separated posteriors whose isolines are drawn.
    #[arg(long, value_delimiter = ',')]
    isolines: Option<Vec<f64>>,
    /// Render the t-self of a t = 1 layout [default: the layout's own t].
    #[arg(long)]
    t: Option<f64>,
    /// Also draw the tree's leverage circles.
    #[arg(long)]
    leverage: bool,
    /// An `.svg` file, or a directory receiving `<stem>_tree<j>_t<t>.svg`.
    #[arg(long)]
    out: PathBuf,
}

/// Failure classes, each with its own exit code.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Data(String),
    Selftest,
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Data(_) => 2,
            Failure::Selftest => 3,
        }
    }
}

fn data_err(e: impl std::fmt::Display) -> Failure {
    Failure::Data(e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Usage(m) => eprintln!("error: {m}\n\nFor more information, try '--help'."),
                Failure::Data(m) => eprintln!("error: {m}"),
                Failure::Selftest => eprintln!("error: selftest failed"),
            }
            ExitCode::from(f.code())
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let cfg = match &cli.config {
        Some(p) => Config::load(p).map_err(Failure::Usage)?,
        None => Config::default(),
    };
    let jobs = cfg
        .pick(cli.jobs, "jobs")
        .map_err(Failure::Usage)?
        .unwrap_or(0);
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build_global()
        .map_err(|e| Failure::Usage(format!("cannot start {jobs} worker threads: {e}")))?;

    match cli.command {
        Command::Train(a) => train(a, &cfg),
        Command::Mdt { model, out } => mdt(&model, &out),
        Command::Embed(a) => embed(a, &cfg),
        Command::LayoutTself { layout, t, out } => layout_tself(&layout, t, &out),
        Command::Render(a) => render(a, &cfg),
        Command::Eval {
            data,
            model,
            as_mdt,
        } => eval(&data, &model, as_mdt),
        Command::Selftest { suite } => run_selftest(&suite),
    }
}

fn required<T>(v: Option<T>, name: &str) -> Result<T, Failure> {
    v.ok_or_else(|| {
        Failure::Usage(format!(
            "missing --{name} (pass it as a flag or set `{name}` in --config)"
        ))
    })
}

fn temper(t: f64) -> Result<Temper, Failure> {
    Temper::new(t).map_err(|e| Failure::Usage(format!("invalid --t: {e}")))
}

fn fit_fold(
    sample: &Sample,
    train_idx: &[usize],
    test_idx: &[usize],
    trees: usize,
    size: usize,
) -> Result<(BoostedEnsemble, f64, f64), Failure> {
    let train = sample.subset(train_idx);
    let test = sample.subset(test_idx);
    let ens = boost(&train, trees, size).map_err(data_err)?;
    let mdts: Vec<MonotonicDecisionTree> = ens.trees.iter().map(create_mdt).collect();
    let err = error_rate(&test, |x| ensemble_predict(&ens, x)).map_err(data_err)?;
    let mdt_err = error_rate(&test, |x| {
        mdt_ensemble_predict(&mdts, &ens.leverages, x).map_err(Into::into)
    })
    .map_err(data_err)?;
    Ok((ens, err, mdt_err))
}

fn train(a: TrainArgs, cfg: &Config) -> Result<(), Failure> {
    let u = Failure::Usage;
    let data: PathBuf = required(cfg.pick(a.data, "data").map_err(u)?, "data")?;
    let label: String = required(cfg.pick(a.label, "label").map_err(u)?, "label")?;
    let positive: String = required(cfg.pick(a.positive, "positive").map_err(u)?, "positive")?;
    let out: PathBuf = required(cfg.pick(a.out, "out").map_err(u)?, "out")?;
    let trees = cfg.pick(a.trees, "trees").map_err(u)?.unwrap_or(20);
    let size = cfg.pick(a.tree_size, "tree-size").map_err(u)?.unwrap_or(31);
    let k = cfg.pick(a.folds, "folds").map_err(u)?.unwrap_or(10);
    let seed = cfg.pick(a.seed, "seed").map_err(u)?.unwrap_or(0);
    if trees == 0 || size == 0 {
        return Err(Failure::Usage(
            "--trees and --tree-size must be positive".into(),
        ));
    }

    let sample = load_csv(&data, &label, &positive).map_err(data_err)?;
    let plan = stratified_folds(&sample, k, seed).map_err(data_err)?;
    let folds = (0..k)
        .into_par_iter()
        .map(|f| {
            let (ens, e, me) = fit_fold(
                &sample,
                &plan.train_indices(f),
                &plan.test_indices(f),
                trees,
                size,
            )?;
            Ok(FoldModel {
                fold: f,
                test_error: e,
                mdt_test_error: me,
                ensemble: ens,
            })
        })
        .collect::<Result<Vec<_>, Failure>>()?;
    let ensemble = boost(&sample, trees, size).map_err(data_err)?;

    println!(
        "{} rows, {} features, {k} folds, T = {trees}, {size}-node trees, seed {seed}",
        sample.len(),
        sample.n_features()
    );
    for f in &folds {
        println!(
            "fold {:>2}: DT {:6.2}%  MDT {:6.2}%",
            f.fold,
            100.0 * f.test_error,
            100.0 * f.mdt_test_error
        );
    }
    let dt: Vec<f64> = folds.iter().map(|f| 100.0 * f.test_error).collect();
    let md: Vec<f64> = folds.iter().map(|f| 100.0 * f.mdt_test_error).collect();
    let ((dm, ds), (mm, ms)) = (mean_std(&dt), mean_std(&md));
    println!("DT  test error: {dm:.2}±{ds:.2}");
    println!("MDT test error: {mm:.2}±{ms:.2}");
    match paired_t_test(&dt, &md) {
        Some(t) => println!(
            "paired t-test DT vs MDT: p = {:.4} ({} H0 at 0.05)",
            t.p_value,
            if t.rejects(0.05) { "rejects" } else { "keeps" }
        ),
        None => println!("paired t-test DT vs MDT: needs at least two folds"),
    }

    let model = ModelFile {
        config: TrainConfig {
            label,
            positive,
            trees,
            tree_size: size,
            folds: k,
            seed,
        },
        schema: sample.schema().clone(),
        folds,
        ensemble,
    };
    artifact::write(&model, &out).map_err(data_err)?;
    println!("wrote {}", out.display());
    Ok(())
}

fn mdt(model: &Path, out: &Path) -> Result<(), Failure> {
    let m: ModelFile = artifact::read(model).map_err(data_err)?;
    let trees: Vec<MonotonicDecisionTree> = m.ensemble.trees.iter().map(create_mdt).collect();
    for (j, (dt, t)) in m.ensemble.trees.iter().zip(&trees).enumerate() {
        println!(
            "tree {j:>3}: DT {:>3} nodes depth {:>2} -> MDT {:>3} nodes depth {:>2}",
            dt.len(),
            dt.depth(),
            t.len(),
            t.depth()
        );
    }
    let file = MdtFile {
        schema: m.schema,
        leverages: m.ensemble.leverages,
        trees,
    };
    artifact::write(&file, out).map_err(data_err)?;
    println!("wrote {}", out.display());
    Ok(())
}

fn embed(a: EmbedArgs, cfg: &Config) -> Result<(), Failure> {
    let u = Failure::Usage;
    let d = LayoutParams::default();
    let params = LayoutParams {
        root_fan: cfg
            .pick(a.root_fan, "root-fan")
            .map_err(u)?
            .unwrap_or(d.root_fan),
        fan: cfg.pick(a.fan, "fan").map_err(u)?.unwrap_or(d.fan),
        min_gap: cfg
            .pick(a.min_gap, "min-gap")
            .map_err(u)?
            .unwrap_or(d.min_gap),
    };
    params
        .validate()
        .map_err(|e| Failure::Usage(e.to_string()))?;
    let file: MdtFile = artifact::read(&a.mdt).map_err(data_err)?;
    let mdt = file.trees.get(a.tree).cloned().ok_or_else(|| {
        Failure::Usage(format!(
            "--tree {} out of range: {} has {} trees",
            a.tree,
            a.mdt.display(),
            file.trees.len()
        ))
    })?;
    let layout = sarkar_layout(&mdt, &params).map_err(data_err)?;
    for u in &layout.underflows {
        eprintln!(
            "warning: node {} cannot fit {} children at gap {}; used gap {:.4}",
            u.node, u.children, params.min_gap, u.used_gap
        );
    }
    println!(
        "tree {}: {} nodes, rho = {:.6}",
        a.tree,
        mdt.len(),
        layout.rho
    );
    artifact::write(
        &LayoutFile {
            tree: a.tree,
            mdt,
            layout,
        },
        &a.out,
    )
    .map_err(data_err)?;
    println!("wrote {}", a.out.display());
    Ok(())
}

fn layout_tself(path: &Path, t: f64, out: &Path) -> Result<(), Failure> {
    let t = temper(t)?;
    let file: LayoutFile = artifact::read(path).map_err(data_err)?;
    let layout = apply_t_self(&file.mdt, &file.layout, t).map_err(data_err)?;
    if !layout.saturated.is_empty() {
        eprintln!(
            "warning: {} nodes saturated at the largest encodable radius",
            layout.saturated.len()
        );
    }
    println!(
        "t = {t}: rho = {:.6} (was {:.6})",
        layout.rho, file.layout.rho
    );
    artifact::write(&LayoutFile { layout, ..file }, out).map_err(data_err)?;
    println!("wrote {}", out.display());
    Ok(())
}

fn render(a: RenderArgs, cfg: &Config) -> Result<(), Failure> {
    let u = Failure::Usage;
    let isolines: Vec<f64> = cfg
        .pick(a.isolines, "isolines")
        .map_err(u)?
        .unwrap_or_default();
    let lf: LayoutFile = artifact::read(&a.layout).map_err(data_err)?;
    let mf: MdtFile = artifact::read(&a.mdt).map_err(data_err)?;
    let mdt = mf.trees.get(lf.tree).ok_or_else(|| {
        Failure::Data(format!(
            "{} refers to tree {}, but {} has {} trees",
            a.layout.display(),
            lf.tree,
            a.mdt.display(),
            mf.trees.len()
        ))
    })?;
    if *mdt != lf.mdt {
        return Err(Failure::Data(format!(
            "{} was not computed from tree {} of {}",
            a.layout.display(),
            lf.tree,
            a.mdt.display()
        )));
    }
    let t = match a.t {
        Some(t) => temper(t)?,
        None => lf.layout.t,
    };
    let layout = if t == lf.layout.t {
        lf.layout
    } else {
        apply_t_self(mdt, &lf.layout, t).map_err(data_err)?
    };
    let path = if a.out.extension().is_some_and(|e| e == "svg") {
        a.out.clone()
    } else {
        let stem = a.mdt.file_stem().and_then(|s| s.to_str()).unwrap_or("mdt");
        a.out.join(svg_file_name(stem, lf.tree, t))
    };
    let leverage = if a.leverage {
        mf.leverages.get(lf.tree)
    } else {
        None
    };
    let report = render_svg(&layout, mdt, leverage, &isolines, t, &path).map_err(data_err)?;
    for p in report.omitted_isolines {
        eprintln!("warning: isoline p = {p} has radius 0 and is not drawn");
    }
    println!("wrote {}", path.display());
    Ok(())
}

fn eval(data: &Path, model: &Path, as_mdt: bool) -> Result<(), Failure> {
    let m: ModelFile = artifact::read(model).map_err(data_err)?;
    let sample = load_csv_with_schema(data, &m.schema).map_err(data_err)?;
    let err = if as_mdt {
        let mdts: Vec<MonotonicDecisionTree> = m.ensemble.trees.iter().map(create_mdt).collect();
        error_rate(&sample, |x| {
            mdt_ensemble_predict(&mdts, &m.ensemble.leverages, x).map_err(Into::into)
        })
    } else {
        error_rate(&sample, |x| ensemble_predict(&m.ensemble, x))
    }
    .map_err(data_err)?;
    let what = if as_mdt { "MDT ensemble" } else { "ensemble" };
    println!(
        "{what} test error: {:.2}% on {} rows",
        100.0 * err,
        sample.len()
    );
    Ok(())
}

fn run_selftest(suite: &str) -> Result<(), Failure> {
    let suite: Suite = suite.parse().map_err(Failure::Usage)?;
    let checks = selftest::run(suite);
    for c in &checks {
        println!("{c}");
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    println!("{} checks, {failed} failed", checks.len());
    if failed > 0 {
        Err(Failure::Selftest)
    } else {
        Ok(())
    }
}
