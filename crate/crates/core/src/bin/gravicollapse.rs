use clap::Parser;
use gravicollapse::cli::{run, workers_from_env, RunConfig};

fn main() {
    let cfg = RunConfig::parse();
    let result = workers_from_env().and_then(|w| run(&cfg, w));
    match result {
        Ok(text) => print!("{text}"),
        Err(e) => {
            eprintln!("gravicollapse: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
