use clap::Parser;
use symsq_cli::{main_with, Cli, ENV_CACHE_DIR};

fn main() {
    let cli = Cli::parse();
    let (code, summary) = main_with(cli, std::env::var(ENV_CACHE_DIR).ok());
    let line = serde_json::to_string(&summary).expect("summary serializes");
    if code == 0 {
        println!("{line}");
    } else {
        eprintln!("{line}");
    }
    std::process::exit(code);
}
