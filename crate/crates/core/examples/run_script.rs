//! Run the supermarket script with a cellwise and an expression logger and
//! print both logs.
//!
//!     cargo run --example run_script

use std::path::Path;

use datatrace::clock::FixedClock;
use datatrace::runner::{RunOptions, Runner};

fn main() {
    let fixtures = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let work = tempfile::tempdir().unwrap();
    for name in ["supermarkets.csv", "supermarkets_logged_2.ljk"] {
        std::fs::copy(fixtures.join(name), work.path().join(name)).unwrap();
    }

    let options =
        RunOptions::default().with_clock(FixedClock("2020-05-08T15:24:36+02:00".parse().unwrap()));
    let report = Runner::new(options)
        .run_file(
            work.path().join("supermarkets_logged_2.ljk"),
            &mut std::io::stdout(),
        )
        .unwrap();
    if let Some(e) = &report.error {
        eprintln!("error: {e}");
        std::process::exit(1);
    }

    for dump in &report.dumps {
        let path = dump.destination.as_ref().unwrap();
        println!("\n== {} logger on {} ==", dump.kind, dump.variable);
        print!("{}", std::fs::read_to_string(path).unwrap());
    }
}
