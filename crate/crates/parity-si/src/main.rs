use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(parity_si::cli::run() as u8)
}
