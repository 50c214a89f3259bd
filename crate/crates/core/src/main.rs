use std::process::ExitCode;

fn main() -> ExitCode {
    cv2x::cli::main_with_args(std::env::args_os())
}
