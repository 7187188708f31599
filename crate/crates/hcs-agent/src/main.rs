use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use hcs_agent::{build_provider, run_agent, AgentConfig};

#[derive(Parser)]
#[command(name = "hcs-agent", about = "Health check system metrics agent")]
struct Args {
    /// Agent config file (JSON).
    #[arg(long)]
    config: PathBuf,
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
    let config = match AgentConfig::load(&args.config) {
        Ok(config) => config,
        Err(err) => {
            eprintln!("hcs-agent: {err}");
            return ExitCode::FAILURE;
        }
    };
    let provider = match build_provider(&config) {
        Ok(provider) => provider,
        Err(err) => {
            eprintln!("hcs-agent: {err}");
            return ExitCode::FAILURE;
        }
    };

    tracing::info!(
        source_id = %config.source_id,
        receiver = %config.receiver_url,
        interval_ms = config.interval_ms,
        "agent starting"
    );

    let (shutdown_tx, shutdown_rx) = tokio::sync::watch::channel(false);
    tokio::spawn(async move {
        let _ = tokio::signal::ctrl_c().await;
        let _ = shutdown_tx.send(true);
    });

    match run_agent(config, provider, shutdown_rx).await {
        Ok(stats) => {
            tracing::info!(?stats, "agent stopped");
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("hcs-agent: {err}");
            ExitCode::FAILURE
        }
    }
}
