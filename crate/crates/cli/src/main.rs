use clap::Parser;

fn main() {
    std::process::exit(qmap_cli::run(qmap_cli::Cli::parse()));
}
