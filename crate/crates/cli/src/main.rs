use clap::Parser;
use ncyclic_cli::{run, Cli, Output, EXIT_USAGE};

fn main() {
    let argv: Vec<String> = std::env::args().collect();
    let cli = Cli::parse_from(&argv);
    match run(&cli, &argv) {
        Ok(out) => {
            match &out {
                Output::Report(r) => println!("{}", r.to_json()),
                Output::Text(t) => print!("{t}"),
            }
            std::process::exit(out.exit_code());
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(EXIT_USAGE);
        }
    }
}
