use clap::error::ErrorKind;
use clap::Parser;

use shiftdeconv_cli::args::Cli;
use shiftdeconv_cli::commands;

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                std::process::exit(0);
            }
            let _ = e.print();
            eprintln!("ERROR Usage: invalid arguments");
            std::process::exit(1);
        }
    };
    if let Err(e) = commands::run(cli) {
        eprintln!("ERROR {}: {e}", e.name());
        std::process::exit(e.exit_code());
    }
}
