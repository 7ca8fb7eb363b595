use std::io::{stderr, stdout};
use std::process::ExitCode;

use krein_shift::cli::{init_threads, run, EXIT_USAGE};

fn main() -> ExitCode {
    if let Err(e) = init_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_USAGE as u8);
    }
    let code = run(
        std::env::args_os(),
        &mut stdout().lock(),
        &mut stderr().lock(),
    );
    ExitCode::from(code as u8)
}
