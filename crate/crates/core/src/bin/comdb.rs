//! Command-line shell for the comdb engine.

use std::io::{BufRead, IsTerminal, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use comdb::shell::{Format, Shell};

#[derive(Parser)]
#[command(
    name = "comdb",
    about = "In-memory concept-oriented database engine",
    version
)]
struct Args {
    /// Schema file to load on startup.
    #[arg(long)]
    schema: Option<PathBuf>,

    /// Data file to load with the schema.
    #[arg(long, requires = "schema")]
    data: Option<PathBuf>,

    /// Run a batch script and exit; exit code is nonzero on any error.
    #[arg(long, conflicts_with = "query")]
    batch: Option<PathBuf>,

    /// Evaluate one query and exit.
    #[arg(long)]
    query: Option<String>,

    /// Output format for query results.
    #[arg(long, value_parser = parse_format, default_value = "aligned")]
    format: Format,
}

fn parse_format(s: &str) -> Result<Format, String> {
    match s {
        "aligned" => Ok(Format::Aligned),
        "tsv" => Ok(Format::Tsv),
        "json" => Ok(Format::Json),
        other => Err(format!("unknown format `{other}` (aligned, tsv, json)")),
    }
}

fn color_enabled() -> bool {
    if let Ok(v) = std::env::var("COMDB_COLOR") {
        return v != "0";
    }
    std::io::stderr().is_terminal()
}

fn report_error(message: &str) {
    if color_enabled() {
        eprintln!("\x1b[31merror:\x1b[0m {message}");
    } else {
        eprintln!("error: {message}");
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    let mut shell = Shell::new();
    shell.format = args.format;

    if let Some(schema_path) = &args.schema {
        match comdb::io::load(schema_path, args.data.as_deref()) {
            Ok(schema) => shell.schema = schema,
            Err(e) => {
                report_error(&e.to_string());
                return ExitCode::FAILURE;
            }
        }
    }

    let mut stdout = std::io::stdout();

    if let Some(query) = &args.query {
        return match shell.run_query_text(query, &mut stdout) {
            Ok(()) => ExitCode::SUCCESS,
            Err(message) => {
                report_error(&message);
                ExitCode::FAILURE
            }
        };
    }

    if let Some(batch_path) = &args.batch {
        let script = match std::fs::read_to_string(batch_path) {
            Ok(s) => s,
            Err(e) => {
                report_error(&format!("cannot read `{}`: {e}", batch_path.display()));
                return ExitCode::FAILURE;
            }
        };
        let mut err = std::io::stderr();
        let failures = shell.run_script(&script, &mut stdout, &mut err);
        return if failures == 0 {
            ExitCode::SUCCESS
        } else {
            ExitCode::FAILURE
        };
    }

    // Interactive REPL; command errors are reported and the session
    // continues.
    let interactive = std::io::stdin().is_terminal();
    let stdin = std::io::stdin();
    loop {
        if interactive {
            print!("comdb> ");
            let _ = stdout.flush();
        }
        let mut line = String::new();
        match stdin.lock().read_line(&mut line) {
            Ok(0) => break,
            Ok(_) => {}
            Err(e) => {
                report_error(&e.to_string());
                break;
            }
        }
        match shell.execute(&line, &mut stdout) {
            Ok(true) => {}
            Ok(false) => break,
            Err(message) => report_error(&message),
        }
    }
    ExitCode::SUCCESS
}
