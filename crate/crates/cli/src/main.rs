use clap::Parser;

fn main() {
    let cli = bpv_cli::Cli::parse();
    std::process::exit(bpv_cli::run(&cli));
}
