use clap::Parser;

fn main() {
    let spec = vortexlab::cli::RunSpec::parse();
    std::process::exit(vortexlab::cli::run(spec));
}
