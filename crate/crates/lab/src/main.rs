use clap::Parser;
use kpz_lab::config::Cli;

fn main() {
    let cli = Cli::parse();
    if let Err(e) = kpz_lab::run(cli.command, &cli.flags) {
        let record = serde_json::json!({
            "error": e.kind(),
            "exit_code": e.exit_code(),
            "message": e.to_string(),
        });
        eprintln!("{record}");
        std::process::exit(e.exit_code());
    }
}
