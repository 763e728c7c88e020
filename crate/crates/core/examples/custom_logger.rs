//! Write a logger of your own and make it available to scripts.

use std::io;

use datatrace::loggers::{DumpContext, DumpReport, LogMeta, Logger, LoggerError};
use datatrace::runner::{RunOptions, Runner};
use datatrace::table::Frame;

/// Prints the row count after every step that changed it.
struct RowCount {
    history: Vec<(u64, usize)>,
}

impl Logger for RowCount {
    fn kind(&self) -> &str {
        "rowcount"
    }

    fn add(&mut self, meta: &LogMeta, input: &Frame, output: &Frame) -> Result<(), LoggerError> {
        if meta.step == 1 || input.nrow() != output.nrow() {
            self.history.push((meta.step, output.nrow()));
        }
        Ok(())
    }

    fn dump(&mut self, ctx: &mut DumpContext<'_>) -> Result<DumpReport, LoggerError> {
        for (step, n) in &self.history {
            writeln!(ctx.console, "step {step}: {n} rows")
                .map_err(|e| LoggerError::Custom(e.to_string()))?;
        }
        Ok(DumpReport::default())
    }

    fn stop(&mut self) {
        println!("rowcount logger stopped");
    }
}

fn main() {
    let mut options = RunOptions::default();
    options.catalog.register(
        "rowcount",
        "",
        "print the row count whenever it changes",
        |args| {
            if let Some((name, _)) = args.iter().next() {
                return Err(LoggerError::Custom(format!("rowcount takes no `{name}`")));
            }
            Ok(Box::new(RowCount {
                history: Vec::new(),
            }))
        },
    );

    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("a.csv"), "id,x\n1,1\n2,NA\n3,3\n").unwrap();
    std::fs::write(dir.path().join("b.csv"), "id,x\n1,1\n").unwrap();
    let script = "d <- read_csv(\"a.csv\")\n\
start_log(d, rowcount())\n\
d <- transform(d, x = ifelse(is_na(x), 0, x))\n\
d <- read_csv(\"b.csv\")\n\
stop_log(d)\n";

    let report = Runner::new(options)
        .run_source(script, "custom.ljk", dir.path(), &mut io::stdout())
        .unwrap();
    assert!(report.is_ok());
}
