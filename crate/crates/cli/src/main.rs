use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use placement_core::config::RunConfig;
use placement_core::eval::{
    gen_benchmark_corpus, run_eval, BenchmarkSpec, DiffusionPlacer, FixedCornerPlacer,
    OraclePlacer, Placer, Split,
};
use placement_core::geometry::ply;
use placement_core::planner::{plan_placement, PlannerConfig};
use placement_core::scene_factory::{
    generate_corpus, read_corpus, read_sample, write_corpus, ShapeLibrary,
};
use placement_core::scene_graph::{
    abstract_scene, augment_corpus, SceneGraph, SimilarityTable, UniformMatchingPairs,
};
use placement_core::scene_model::{load_plans, load_scene};
use placement_core::{demos, Error, PointCloud};

#[derive(Parser, Debug)]
#[command(
    name = "placer",
    version,
    about = "Tabletop object-placement planner and synthetic arrangement factory"
)]
struct Cli {
    /// Run configuration JSON; command-line flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (default: available cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[arg(short, long, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Turn every scene JSON in a directory into a scene-graph JSON.
    Abstract {
        #[arg(long)]
        scenes: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Produce new graphs by crossover and mutation.
    Augment {
        /// Input graphs; the bundled demonstrations when omitted.
        #[arg(long)]
        graphs: Option<PathBuf>,
        #[arg(long)]
        n_out: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Instantiate graphs into a labeled corpus, or build a benchmark split.
    Generate {
        /// Graphs to instantiate one-to-one, or the demonstration pool when `--split` is given.
        #[arg(long)]
        graphs: Option<PathBuf>,
        #[arg(long, value_enum)]
        split: Option<SplitArg>,
        #[arg(long, default_value_t = 100)]
        n_scenes: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Plan placements for one object in one scene.
    Plan {
        #[arg(long)]
        scene: PathBuf,
        #[arg(long)]
        plans: PathBuf,
        /// Object points in the object frame (ASCII PLY).
        #[arg(long)]
        object: PathBuf,
        #[arg(long)]
        candidates: Option<usize>,
        #[arg(long, allow_negative_numbers = true)]
        lambda_a: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        lambda_c: Option<f64>,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Score a placer on a generated corpus.
    Eval {
        #[arg(long)]
        benchmark: PathBuf,
        #[arg(long, value_enum, default_value_t = PlacerArg::Diffusion)]
        placer: PlacerArg,
        /// Planner configuration JSON, replacing the one in `--config`.
        #[arg(long)]
        planner_config: Option<PathBuf>,
        #[arg(long)]
        candidates: Option<usize>,
        #[arg(long, allow_negative_numbers = true)]
        lambda_a: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        lambda_c: Option<f64>,
        /// Report JSON; a CSV with the same stem is written next to it.
        #[arg(long)]
        out: PathBuf,
    },
    /// Write a scene cloud, or a sample's cloud with its affordance activations, as PLY.
    ExportPly {
        #[arg(long, conflicts_with = "sample", required_unless_present = "sample")]
        scene: Option<PathBuf>,
        #[arg(long)]
        sample: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SplitArg {
    Easy,
    Hard,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PlacerArg {
    Diffusion,
    Oracle,
    Fixed,
}

#[derive(Debug)]
struct CliError {
    kind: String,
    message: String,
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        Self {
            kind: e.kind().into(),
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Error::from(e).into()
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        Error::from(e).into()
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn invalid(msg: impl Into<String>) -> CliError {
    Error::InvalidArgument(msg.into()).into()
}

struct Ctx {
    config: RunConfig,
    seed: u64,
    verbose: bool,
}

impl Ctx {
    fn log(&self, msg: impl AsRef<str>) {
        if self.verbose {
            eprintln!("{}", msg.as_ref());
        }
    }

    fn library(&self) -> CliResult<ShapeLibrary> {
        Ok(match &self.config.paths.library {
            Some(p) => ShapeLibrary::load(p)?,
            None => ShapeLibrary::default(),
        })
    }

    fn similarity(&self) -> CliResult<SimilarityTable> {
        Ok(match &self.config.paths.similarity {
            Some(p) => SimilarityTable::load(p)?,
            None => SimilarityTable::function_groups(),
        })
    }

    /// Graphs from `dir`, else the demonstration graphs.
    fn graphs_or_demos(&self, dir: Option<&Path>) -> CliResult<Vec<SceneGraph>> {
        if let Some(d) = dir {
            return load_graphs(d);
        }
        match &self.config.paths.demos {
            Some(d) => abstract_dir(d).map(|v| v.into_iter().map(|(_, g)| g).collect()),
            None => Ok(demos::demo_graphs()?),
        }
    }

    fn planner_config(
        &self,
        file: Option<&Path>,
        lambda_a: Option<f64>,
        lambda_c: Option<f64>,
    ) -> CliResult<PlannerConfig> {
        let mut c = match file {
            Some(p) => serde_json::from_str(&std::fs::read_to_string(p)?)?,
            None => self.config.planner.clone(),
        };
        if let Some(l) = lambda_a {
            c.guidance.lambda_a = l;
        }
        if let Some(l) = lambda_c {
            c.guidance.lambda_c = l;
        }
        c.guidance.validate()?;
        Ok(c)
    }
}

/// `*.json` files of a directory, sorted by name.
fn json_files(dir: &Path) -> CliResult<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)?
        .map(|e| e.map(|e| e.path()))
        .collect::<std::io::Result<Vec<_>>>()?
        .into_iter()
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    Ok(files)
}

fn load_graphs(dir: &Path) -> CliResult<Vec<SceneGraph>> {
    json_files(dir)?
        .iter()
        .map(|p| SceneGraph::load(p).map_err(CliError::from))
        .collect()
}

/// Abstracts every scene of `dir`, keyed by file name.
fn abstract_dir(dir: &Path) -> CliResult<Vec<(String, SceneGraph)>> {
    let files = json_files(dir)?;
    if files.is_empty() {
        return Err(invalid(format!("no scene files in {}", dir.display())));
    }
    files
        .par_iter()
        .map(|p| {
            let name = p.file_name().expect("file").to_string_lossy().into_owned();
            let g = abstract_scene(&load_scene(p)?)?;
            Ok((name, g))
        })
        .collect()
}

fn write_text(path: &Path, text: &str) -> CliResult<()> {
    if let Some(d) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(d)?;
    }
    std::fs::write(path, text)?;
    Ok(())
}

fn run(cli: Cli) -> CliResult<()> {
    let config = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let ctx = Ctx {
        seed: cli.seed.unwrap_or(config.seed),
        config,
        verbose: cli.verbose,
    };
    if let Some(n) = cli.workers {
        if n == 0 {
            return Err(invalid("--workers must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| invalid(e.to_string()))?;
    }
    match cli.command {
        Command::Abstract { scenes, out } => {
            let graphs = abstract_dir(&scenes)?;
            std::fs::create_dir_all(&out)?;
            for (name, g) in &graphs {
                g.save(&out.join(name))?;
            }
            ctx.log(format!(
                "abstracted {} scenes into {}",
                graphs.len(),
                out.display()
            ));
        }
        Command::Augment { graphs, n_out, out } => {
            let input = ctx.graphs_or_demos(graphs.as_deref())?;
            let categories = ctx.library()?.categories();
            let table = ctx.similarity()?;
            let produced = augment_corpus(
                &input,
                n_out,
                &ctx.config.augment,
                &table,
                &categories,
                &UniformMatchingPairs,
                ctx.seed,
            )?;
            std::fs::create_dir_all(&out)?;
            for (i, g) in produced.iter().enumerate() {
                g.save(&out.join(format!("graph_{i:05}.json")))?;
            }
            ctx.log(format!(
                "wrote {} graphs to {}",
                produced.len(),
                out.display()
            ));
        }
        Command::Generate {
            graphs,
            split,
            n_scenes,
            out,
        } => {
            let library = ctx.library()?;
            let (manifest, samples) = match split {
                Some(s) => {
                    let split = match s {
                        SplitArg::Easy => Split::Easy,
                        SplitArg::Hard => Split::Hard,
                    };
                    let mut spec = BenchmarkSpec::named(split, n_scenes, ctx.seed)?;
                    spec.generate = ctx.config.generate.clone();
                    spec.augment = ctx.config.augment.clone();
                    spec.n_plans = spec.generate.n_plans;
                    let pool = ctx.graphs_or_demos(graphs.as_deref())?;
                    gen_benchmark_corpus(&spec, &pool, &library)?
                }
                None => {
                    let dir =
                        graphs.ok_or_else(|| invalid("generate needs --graphs or --split"))?;
                    let input = load_graphs(&dir)?;
                    if input.is_empty() {
                        return Err(invalid(format!("no graph files in {}", dir.display())));
                    }
                    generate_corpus(&input, &library, &ctx.config.generate, ctx.seed)?
                }
            };
            write_corpus(&out, &manifest, &samples)?;
            ctx.log(format!(
                "wrote {} samples ({} skipped) to {}",
                samples.len(),
                manifest.skipped.len(),
                out.display()
            ));
        }
        Command::Plan {
            scene,
            plans,
            object,
            candidates,
            lambda_a,
            lambda_c,
            out,
        } => {
            let scene = load_scene(&scene)?;
            let plans = load_plans(&plans)?;
            let object: PointCloud = ply::parse_ply(&std::fs::read_to_string(&object)?)?;
            let config = ctx.planner_config(None, lambda_a, lambda_c)?;
            let n = candidates.unwrap_or(ctx.config.n_candidates);
            let result = plan_placement(&scene, &plans, &object, n, &config, ctx.seed)?;
            for w in &result.warnings {
                ctx.log(format!("warning: {w}"));
            }
            let text = result.to_json()?;
            match out {
                Some(p) => write_text(&p, &text)?,
                None => print!("{text}"),
            }
        }
        Command::Eval {
            benchmark,
            placer,
            planner_config,
            candidates,
            lambda_a,
            lambda_c,
            out,
        } => {
            let (_, samples) = read_corpus(&benchmark)?;
            let diffusion;
            let placer: &dyn Placer = match placer {
                PlacerArg::Diffusion => {
                    diffusion = DiffusionPlacer {
                        config: ctx.planner_config(
                            planner_config.as_deref(),
                            lambda_a,
                            lambda_c,
                        )?,
                        n_candidates: candidates.unwrap_or(ctx.config.n_candidates),
                    };
                    &diffusion
                }
                PlacerArg::Oracle => &OraclePlacer,
                PlacerArg::Fixed => &FixedCornerPlacer,
            };
            let report = run_eval(placer, &samples, ctx.seed)?;
            if let Some(d) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(d)?;
            }
            report.save(&out)?;
            println!(
                "{} on {} cases: PA {:.2}% PP {:.2}% SR {:.2}%",
                report.placer,
                report.cases.len(),
                report.pa,
                report.pp,
                report.sr
            );
        }
        Command::ExportPly { scene, sample, out } => {
            let cloud = match (scene, sample) {
                (Some(p), _) => PointCloud::new(load_scene(&p)?.cloud().points().to_vec())?,
                (None, Some(d)) => {
                    let s = read_sample(&d)?;
                    PointCloud::with_activations(
                        s.scene.cloud().points().to_vec(),
                        s.gt_affordance.activations().to_vec(),
                    )?
                }
                (None, None) => return Err(invalid("export-ply needs --scene or --sample")),
            };
            write_text(&out, &ply::to_ply_string(&cloud))?;
            ctx.log(format!("wrote {} points to {}", cloud.len(), out.display()));
        }
    }
    Ok(())
}

fn report(e: &CliError) {
    let doc = serde_json::json!({ "error": e.kind, "message": e.message });
    eprintln!("{doc}");
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            report(&CliError {
                kind: "usage".into(),
                message: e.render().to_string().trim().to_string(),
            });
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            report(&e);
            ExitCode::FAILURE
        }
    }
}
