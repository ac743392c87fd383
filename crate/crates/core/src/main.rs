use clap::Parser;

fn main() {
    let args = tractorlab::cli::Args::parse();
    std::process::exit(tractorlab::cli::main_with(args));
}
