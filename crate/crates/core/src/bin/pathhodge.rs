use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use pathhodge::cli::{execute, RunConfig};

fn main() -> ExitCode {
    let cfg = match RunConfig::try_parse() {
        Ok(cfg) => cfg,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(&cfg) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            if let Some(table) = &out.table {
                let _ = stdout.write_all(table.as_bytes());
            }
            let _ = stdout.write_all(out.document.as_bytes());
            ExitCode::from(out.exit_code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
