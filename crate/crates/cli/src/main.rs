use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let (code, text) = classreal_cli::run(std::env::args_os());
    let written = if code == classreal_cli::EXIT_ERROR {
        std::io::stderr().write_all(text.as_bytes())
    } else {
        std::io::stdout().write_all(text.as_bytes())
    };
    if written.is_err() {
        return ExitCode::from(classreal_cli::EXIT_ERROR as u8);
    }
    ExitCode::from(code as u8)
}
