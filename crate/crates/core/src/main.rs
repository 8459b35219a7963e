use clap::Parser;

fn main() {
    let cli = waterwave::cli::Cli::parse();
    match waterwave::cli::run(&cli) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::exit(1);
        }
    }
}
