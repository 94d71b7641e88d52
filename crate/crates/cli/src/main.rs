use clap::Parser;

fn main() {
    let cli = occuforge::Cli::parse();
    if let Err(err) = occuforge::run(cli) {
        eprintln!("error: {err:#}");
        std::process::exit(1);
    }
}
