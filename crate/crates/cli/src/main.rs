use clap::Parser;

fn main() {
    let cli = erws_cli::Cli::parse();
    if let Err(failure) = erws_cli::run(cli) {
        eprintln!("{failure}");
        std::process::exit(failure.exit_code());
    }
}
