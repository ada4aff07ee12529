use clap::Parser;

use puncteval::cli::{run, Cli};
use puncteval::parallel::{init_workers, workers_from_env};

fn main() {
    let cli = Cli::parse();
    if let Some(n) = workers_from_env() {
        init_workers(n);
    }
    if let Err(e) = run(&cli) {
        eprintln!("puncteval: {e}");
        std::process::exit(e.exit_code());
    }
}
