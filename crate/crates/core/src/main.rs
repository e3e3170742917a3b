use clap::Parser;

fn main() {
    let args = nonauto::cli::CliArgs::parse();
    std::process::exit(nonauto::cli::run(args));
}
