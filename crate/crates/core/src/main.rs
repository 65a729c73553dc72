use clap::Parser;

fn main() {
    let cli = match sgl::cli::Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                sgl::cli::EXIT_USAGE
            } else {
                sgl::cli::EXIT_OK
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    std::process::exit(sgl::cli::execute(&cli));
}
