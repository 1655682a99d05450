use std::process::ExitCode;

fn main() -> ExitCode {
    mpra::cli::main_with_args(std::env::args_os())
}
