use clap::Parser;

use karp_cli::{run, Cli};

fn main() {
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    if let Err(e) = run(&cli, &mut out) {
        if e.code == 0 {
            return;
        }
        eprintln!("karp: {e}");
        std::process::exit(e.code);
    }
}
