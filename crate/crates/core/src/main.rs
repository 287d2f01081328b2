use clap::error::ErrorKind;
use clap::Parser;
use sector_algebra::cli::{run, Cli};
use sector_algebra::io::Format;
use std::io::IsTerminal;
use std::path::Path;
use std::process::ExitCode;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => e.exit(),
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(2);
        }
    };
    let echo: Vec<String> = std::env::args().skip(1).collect();
    match run(&cli, &echo.join(" "), Path::new("."), 0) {
        Ok(report) => {
            let color = cli.format == Format::Text && std::io::stdout().is_terminal() && std::env::var_os("NO_COLOR").is_none();
            print!("{}", report.render(cli.format, color));
            ExitCode::from(report.verdict.exit_code())
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
