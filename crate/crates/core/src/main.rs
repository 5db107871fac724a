use clap::Parser;

use butterfly_lab::cli::{self, Cli};

fn main() {
    // BUTTERFLY_LAB_THREADS caps rayon parallelism; unset or 0 = default.
    if let Ok(v) = std::env::var("BUTTERFLY_LAB_THREADS") {
        if let Ok(n) = v.parse::<usize>() {
            if n > 0 {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global();
            }
        }
    }
    let cli = Cli::parse();
    std::process::exit(cli::run(cli));
}
