use clap::Parser;

fn main() {
    std::process::exit(multispec::cli::main_with(multispec::cli::Args::parse()));
}
