use std::process::ExitCode;

fn main() -> ExitCode {
    nlheat_cli::main_with_args(std::env::args_os())
}
