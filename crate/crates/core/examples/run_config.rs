//! Runs a JSON configuration exactly like the `multispec` binary.
//!
//! ```text
//! cargo run --release --example run_config -- crates/core/configs/spectrum.json
//! ```

use std::path::PathBuf;

fn main() {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/configs/spectrum.json")));
    match multispec::cli::run(&path) {
        Ok(dir) => {
            for entry in std::fs::read_dir(&dir).expect("output directory") {
                println!("{}", entry.expect("entry").path().display());
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(multispec::cli::exit_code(&e));
        }
    }
}
