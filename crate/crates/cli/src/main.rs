use clap::Parser;

fn main() {
    let cli = vpseval::Cli::parse();
    if let Err(e) = vpseval::run(cli) {
        eprintln!("vpseval: {e}");
        std::process::exit(e.exit_code());
    }
}
