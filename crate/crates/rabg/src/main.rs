use clap::Parser;

use rabg::{deliver, execute, Cli};

fn main() {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(output) => std::process::exit(deliver(output)),
        Err(e) => {
            eprintln!("rabg: {}", e.message());
            std::process::exit(e.exit_code());
        }
    }
}
