use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = mhs::app::Cli::parse();
    let stdout = std::io::stdout();
    match mhs::app::run(&cli, &mut stdout.lock()) {
        Ok(code) => code.into(),
        Err(e) => {
            eprintln!("error: {e:#}");
            mhs::app::Outcome::Error.into()
        }
    }
}
