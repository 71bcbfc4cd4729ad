//! Command-line front end for `probjss`: instance and result files and the
//! `generate`, `solve`, `bound` and `report` commands.

pub mod args;
pub mod commands;
pub mod error;
pub mod instance_file;
pub mod results;

pub use args::{Cli, Command};
pub use error::{CliError, CliResult};
pub use instance_file::InstanceFile;
pub use results::{BoundRow, RowSink};

/// Runs one parsed command line.
pub fn run(cli: &Cli) -> CliResult<()> {
    let mut stdout = std::io::stdout().lock();
    match &cli.command {
        Command::Generate(a) => commands::generate_cmd(a, &mut stdout),
        Command::Solve(a) => commands::solve_cmd(a),
        Command::Bound(a) => commands::bound_cmd(a),
        Command::Report(a) => commands::report_cmd(a, &mut stdout),
    }
}
