//! Keep a full copy of the data after every statement.

use std::io;

use datatrace::runner::{RunOptions, Runner};

fn main() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("spm.csv"), "id,staff\nSPM01,75\nSPM02,NA\n").unwrap();
    let script = "spm <- read_csv(\"spm.csv\")\n\
start_log(spm, filedump())\n\
spm <- transform(spm, staff = ifelse(is_na(staff), 0, staff))\n\
spm <- transform(spm, fte = staff / 40)\n";

    let report = Runner::new(RunOptions::default())
        .run_source(script, "snapshots.ljk", dir.path(), &mut io::stdout())
        .unwrap();
    assert!(report.is_ok());

    let snapshots = dir.path().join("spm_filedump");
    let mut files: Vec<_> = std::fs::read_dir(&snapshots)
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    files.sort();
    for f in files {
        println!("\n{}:", f.file_name().unwrap().to_string_lossy());
        print!("{}", std::fs::read_to_string(&f).unwrap());
    }
}
