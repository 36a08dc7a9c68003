use std::io;
use std::panic;
use std::process::ExitCode;

use tracing_subscriber::EnvFilter;

fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .with_env_filter(EnvFilter::try_from_env("CONCORDIA_LOG").unwrap_or_else(|_| EnvFilter::new("warn")))
        .with_writer(io::stderr)
        .init();

    let code = panic::catch_unwind(|| {
        let mut out = io::stdout().lock();
        let mut err = io::stderr().lock();
        concordia_cli::run(std::env::args_os(), &mut out, &mut err)
    })
    .unwrap_or(2);
    ExitCode::from(code as u8)
}
