use clap::Parser;

fn main() {
    let cli = ifreg_cli::Cli::parse();
    if let Err(e) = ifreg_cli::run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
