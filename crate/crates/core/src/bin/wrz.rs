use std::process::ExitCode;

fn main() -> ExitCode {
    if let Err(e) = wrz::cli::configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(wrz::cli::EXIT_USAGE as u8);
    }
    let code = wrz::cli::run(std::env::args_os(), &mut std::io::stdout(), &mut std::io::stderr());
    ExitCode::from(code as u8)
}
