use clap::Parser;

use ypq_cli::config::Cli;

fn main() {
    let cli = Cli::parse();
    std::process::exit(ypq_cli::run(cli, &mut std::io::stderr()));
}
