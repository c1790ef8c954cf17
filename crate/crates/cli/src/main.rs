use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let out = opens_cli::execute(std::env::args());
    if !out.stderr.is_empty() {
        eprint!("{}", out.stderr);
    }
    match &out.output {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &out.stdout) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(opens_cli::EXIT_FAILURE as u8);
            }
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(out.stdout.as_bytes()).and_then(|_| stdout.flush()).is_err() {
                return ExitCode::from(opens_cli::EXIT_FAILURE as u8);
            }
        }
    }
    ExitCode::from(out.code as u8)
}
