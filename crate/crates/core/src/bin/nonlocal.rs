use std::process::ExitCode;

fn main() -> ExitCode {
    nonlocal::cli::run(std::env::args_os())
}
