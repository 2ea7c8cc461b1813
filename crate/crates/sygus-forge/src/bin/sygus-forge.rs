use clap::Parser;

fn main() {
    let args = sygus_forge::cli::Args::parse();
    let code = sygus_forge::cli::run(&args, &mut std::io::stdout(), &mut std::io::stderr());
    std::process::exit(code);
}
