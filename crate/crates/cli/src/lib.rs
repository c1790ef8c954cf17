//! Sweeps, figure pipelines and structured output for the `opens` binary.

pub mod args;
pub mod checks;
pub mod commands;
pub mod figures;
pub mod grid;
pub mod output;

use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::Parser;

use crate::args::{merge_config, Cli, FormatArg};
use crate::output::Format;

/// Exit code for unusable arguments.
pub const EXIT_USAGE: i32 = 2;
/// Exit code when a row failed numerically or a check did not pass.
pub const EXIT_FAILURE: i32 = 1;

/// What the binary prints or writes.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub code: i32,
    /// Rendered table, or help text.
    pub stdout: String,
    pub stderr: String,
    /// Where the table goes instead of stdout.
    pub output: Option<PathBuf>,
}

impl Outcome {
    fn message(code: i32, stdout: String, stderr: String) -> Self {
        Self { code, stdout, stderr, output: None }
    }
}

/// Parse `argv` (program name first), run the command and render its table.
pub fn execute<I, S>(argv: I) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let argv: Vec<String> = argv.into_iter().map(Into::into).collect();
    let argv = match merge_config(argv) {
        Ok(a) => a,
        Err(e) => return Outcome::message(EXIT_USAGE, String::new(), format!("error: {e}\n")),
    };
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Outcome::message(0, text, String::new()),
                _ => Outcome::message(EXIT_USAGE, String::new(), text),
            };
        }
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(j) = cli.common.jobs {
        if j == 0 {
            return Outcome::message(EXIT_USAGE, String::new(), "error: --jobs must be positive\n".into());
        }
        pool = pool.num_threads(j);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => return Outcome::message(EXIT_FAILURE, String::new(), format!("error: thread pool: {e}\n")),
    };
    log::info!("running {}", cli.command.name());
    let table = match pool.install(|| commands::run_command(&cli.command)) {
        Ok(t) => t,
        Err(e) => return Outcome::message(EXIT_USAGE, String::new(), format!("error: {e}\n")),
    };
    let format = match cli.common.format {
        FormatArg::Csv => Format::Csv,
        FormatArg::Json => Format::Json,
    };
    let (code, stderr) = if table.failed() {
        (EXIT_FAILURE, format!("error: {} rows did not complete or failed their check; see the status column\n", cli.command.name()))
    } else {
        (0, String::new())
    };
    Outcome { code, stdout: table.render(format), stderr, output: cli.common.output }
}
