use clap::Parser;

fn main() {
    let cli = gcx::cli::Cli::parse();
    std::process::exit(gcx::cli::main_with(cli));
}
