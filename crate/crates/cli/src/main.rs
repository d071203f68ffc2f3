use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use lexsyn::pipeline::{run_pipeline, PipelineConfig, PipelineError, Runner, Stage};
use lexsyn::report::ReportBundle;

#[derive(Debug, Parser)]
#[command(name = "lexsyn", version, about = "Word-deletion robustness of lexical and syntactic text features")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Experiment configuration (TOML).
    #[arg(long, global = true, default_value = "lexsyn.toml")]
    config: PathBuf,
    /// Replaces the configured master seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads. Results do not depend on it.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Replaces the configured output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Alteration levels, e.g. 20,40,60,80.
    #[arg(long, global = true, value_delimiter = ',')]
    levels: Option<Vec<u8>>,
    /// Model kinds, e.g. gnb,rf,svm,mlp.
    #[arg(long, global = true, value_delimiter = ',')]
    models: Option<Vec<String>>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run every stage.
    Run,
    /// Load and profile the corpus, assign folds, start a manifest.
    Ingest,
    /// Write the altered corpora.
    Perturb,
    /// Extract feature tables for every level.
    Extract,
    /// Cross-validate every model at every level.
    Evaluate,
    /// Z-scores, F1 deltas, importance fits and rank tables.
    Analyze,
    /// Write the bundle, tables and plots.
    Report,
    /// Write the synthetic demo corpus, word list and config.
    Demo {
        /// Target directory.
        #[arg(long, default_value = "demo")]
        dir: PathBuf,
        /// Subjects per class.
        #[arg(long, default_value_t = 10)]
        subjects: usize,
    },
}

fn load_config(cli: &Cli) -> Result<PipelineConfig, PipelineError> {
    let mut c = PipelineConfig::load(&cli.config)?;
    if let Some(s) = cli.seed {
        c.seed = s;
    }
    if let Some(o) = &cli.out {
        // Relative to the working directory, not the config file.
        c.out = Some(std::path::absolute(o).map_err(|e| PipelineError::Config(format!("--out: {e}")))?);
    }
    if let Some(l) = &cli.levels {
        c.perturb.levels = l.clone();
    }
    if let Some(m) = &cli.models {
        c.models.kinds = m.clone();
    }
    Ok(c)
}

fn summary(bundle: &ReportBundle, out: &std::path::Path) {
    println!("corpus {} ({} documents)", bundle.corpus, bundle.profile.n_documents);
    println!("level  z_lexical  z_syntactic");
    for g in &bundle.zscores {
        println!("{:>5}  {:>9.3}  {:>11.3}", g.alteration_level, g.z_lexical, g.z_syntactic);
    }
    for r in &bundle.importance {
        match (&r.fit, &r.error) {
            (Some(f), _) => println!(
                "{:<4} alpha {:+.4}  beta {:+.4}  ratio {}",
                r.model,
                f.alpha,
                f.beta,
                f.ratio.map_or("-".into(), |x| format!("{x:.2}"))
            ),
            (None, e) => println!("{:<4} no importance fit: {}", r.model, e.as_deref().unwrap_or("")),
        }
    }
    println!("bundle {} sha256 {}", out.join("bundle.json").display(), bundle.hash());
}

fn run(cli: &Cli) -> Result<()> {
    if let Command::Demo { dir, subjects } = &cli.command {
        let files = lexsyn::synth::write_demo(dir, cli.seed.unwrap_or(0), *subjects)
            .with_context(|| format!("writing demo files to {}", dir.display()))?;
        println!("wrote {}", files.corpus.display());
        println!("wrote {}", files.wordlist.display());
        println!("wrote {}", files.config.display());
        println!("next: lexsyn run --config {}", files.config.display());
        return Ok(());
    }
    let config = load_config(cli)?;
    let runner = Runner::new(config.clone());
    let stage = match cli.command {
        Command::Run => {
            let bundle = run_pipeline(&config)?;
            summary(&bundle, &runner.out);
            return Ok(());
        }
        Command::Report => {
            let bundle = runner.report()?;
            summary(&bundle, &runner.out);
            return Ok(());
        }
        Command::Ingest => Stage::Ingest,
        Command::Perturb => Stage::Perturb,
        Command::Extract => Stage::Extract,
        Command::Evaluate => Stage::Evaluate,
        Command::Analyze => Stage::Analyze,
        Command::Demo { .. } => unreachable!(),
    };
    runner.run_stage(stage)?;
    println!("{stage} done, artifacts in {}", runner.out.display());
    Ok(())
}

fn exit_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<PipelineError>() {
        Some(PipelineError::Config(_)) => 1,
        Some(PipelineError::Stale { .. }) => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(j) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(j).build_global() {
            eprintln!("error: --jobs {j}: {e}");
            return ExitCode::from(1);
        }
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
