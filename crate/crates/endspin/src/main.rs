use clap::Parser;

fn main() {
    let cli = endspin::cli::Cli::parse();
    match endspin::cli::run(cli) {
        Ok(code) => std::process::exit(code),
        Err(error) => {
            eprintln!("error: {error}");
            std::process::exit(endspin::cli::exit_code(&error));
        }
    }
}
