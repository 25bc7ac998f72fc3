use std::process::ExitCode;

fn main() -> ExitCode {
    flexgrid::cli::main()
}
