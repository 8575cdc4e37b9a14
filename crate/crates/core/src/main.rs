use std::process::ExitCode;

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let result = nilext::cli::run(&argv);
    if result.exit_code == 2 {
        eprint!("{}", result.report);
    } else {
        print!("{}", result.report);
    }
    ExitCode::from(result.exit_code as u8)
}
