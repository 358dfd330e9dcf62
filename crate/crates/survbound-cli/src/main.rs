use clap::Parser;

use survbound_cli::{run, Cli};

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help/version are successful exits; anything else is usage
            if e.use_stderr() {
                let _ = e.print();
                std::process::exit(1);
            }
            let _ = e.print();
            std::process::exit(0);
        }
    };
    if let Err((code, message)) = run(cli) {
        eprintln!("error: {message}");
        std::process::exit(code);
    }
}
