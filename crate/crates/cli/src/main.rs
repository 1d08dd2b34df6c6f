use clap::Parser;

use skyrme_kink_cli::{run, Cli, RunConfig};

fn main() {
    let cfg = RunConfig::from(Cli::parse());
    std::process::exit(run(&cfg));
}
