use clap::Parser;
use regressive_cli::{emit, run, Cli};

fn main() {
    let cli = Cli::parse();
    let code = match run(&cli).and_then(|out| emit(&cli, &out)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    };
    std::process::exit(code);
}
