use clap::Parser;
use std::process::ExitCode;
use supnorm_cli::{run, Cli, RunConfig, Status};

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let code = match RunConfig::from_cli(cli).and_then(|cfg| run(&cfg)) {
        Ok(Status::Passed) => 0,
        Ok(Status::Failed(msgs)) => {
            for m in &msgs {
                eprintln!("FAILED: {m}");
            }
            1
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
