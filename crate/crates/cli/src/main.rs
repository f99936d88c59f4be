use clap::Parser;

fn main() {
    let cli = caseflow_cli::Cli::parse();
    std::process::exit(caseflow_cli::run(cli));
}
