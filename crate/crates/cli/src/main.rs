use std::process::ExitCode;

fn main() -> ExitCode {
    campus_ar::run(std::env::args_os())
}
