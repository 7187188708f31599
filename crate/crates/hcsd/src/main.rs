use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use hcs_store::{replay_journal, SeriesStore, StoreConfig};
use hcsd::{preload_journal, HcsdConfig};

#[derive(Parser)]
#[command(name = "hcsd", about = "Health check system daemon")]
struct Args {
    /// Daemon config file (JSON). Omit to just inspect a journal.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Replay a JSONL journal into the store before serving; without
    /// --config, print a summary of the journal and exit.
    #[arg(long)]
    replay: Option<PathBuf>,
}

#[tokio::main]
async fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env()
                .unwrap_or_else(|_| "info".into()),
        )
        .init();

    let args = Args::parse();
    match (args.config, args.replay) {
        (None, None) => {
            eprintln!("hcsd: nothing to do; pass --config and/or --replay");
            ExitCode::from(2)
        }
        (None, Some(journal)) => summarize_journal(&journal),
        (Some(config_path), replay) => serve(&config_path, replay.as_deref()).await,
    }
}

fn summarize_journal(path: &std::path::Path) -> ExitCode {
    let replayed = match replay_journal(path) {
        Ok(replayed) => replayed,
        Err(err) => {
            eprintln!("hcsd: cannot replay {}: {err}", path.display());
            return ExitCode::FAILURE;
        }
    };
    let store = SeriesStore::new(StoreConfig::default());
    let mut per_series: BTreeMap<(String, String), usize> = BTreeMap::new();
    for sample in &replayed.samples {
        *per_series
            .entry((sample.source.clone(), sample.name.clone()))
            .or_default() += 1;
        store.record_sample(sample.clone());
    }
    println!(
        "replayed {} samples, {} events, {} bad lines from {}",
        replayed.samples.len(),
        replayed.events.len(),
        replayed.bad_lines,
        path.display()
    );
    for ((source, name), count) in per_series {
        println!("  {source}/{name}: {count} points");
    }
    if replayed.bad_lines > 0 {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}

async fn serve(config_path: &std::path::Path, replay: Option<&std::path::Path>) -> ExitCode {
    let config = match HcsdConfig::load(config_path) {
        Ok(config) => config,
        Err(err) => {
            eprintln!("hcsd: {err}");
            return ExitCode::FAILURE;
        }
    };

    let handle = match hcsd::start(config).await {
        Ok(handle) => handle,
        Err(err) => {
            eprintln!("hcsd: {err}");
            return ExitCode::FAILURE;
        }
    };

    if let Some(journal) = replay {
        match preload_journal(&handle.store, journal) {
            Ok((samples, events, bad)) => {
                tracing::info!(samples, events, bad, "journal replayed into store");
            }
            Err(err) => {
                eprintln!("hcsd: cannot replay {}: {err}", journal.display());
                handle.shutdown().await;
                return ExitCode::FAILURE;
            }
        }
    }

    tracing::info!("listening on {}; ctrl-c to stop", handle.addr);
    let _ = tokio::signal::ctrl_c().await;
    handle.shutdown().await;
    ExitCode::SUCCESS
}
