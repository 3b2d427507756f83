use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(roi_overlay::cli::run(std::env::args_os()))
}
