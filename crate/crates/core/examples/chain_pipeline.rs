//! Track a frame through steps written in Rust, mixing parsed transforms and
//! plain functions.

use std::io;

use datatrace::chain::{Step, Tracked};
use datatrace::dsl::Args;
use datatrace::loggers::{Cellwise, Trivial};
use datatrace::table::{parse_csv, read_csv, to_csv_string, Frame};

fn main() {
    let spm = parse_csv(
        "id,staff,turnover,other.rev,total.rev\n\
SPM01,75,NA,NA,1130\n\
SPM02,9,1607,NA,1607\n\
SPM03,NA,6886,-33,6919\n",
    )
    .unwrap();
    let dir = tempfile::tempdir().unwrap();

    let tracked = Tracked::new(spm)
        .with_dump_dir(dir.path())
        .track(Cellwise::new("id"))
        .unwrap()
        .track(Trivial::new())
        .unwrap()
        .then(
            Step::transform("transform(other.rev = ifelse(is_na(other.rev), 0, other.rev))")
                .unwrap(),
        )
        .unwrap()
        .then(Step::function("drop rows without turnover", |f: &Frame| {
            let keep: Vec<usize> = (0..f.nrow())
                .filter(|&r| !f.cell(r, "turnover").unwrap().is_missing())
                .collect();
            Ok(f.select_rows(keep))
        }))
        .unwrap()
        .then(Step::transform("transform(ratio = turnover / total.rev)").unwrap())
        .unwrap();

    let (frame, _) = tracked.stop_with(&Args::new(), &mut io::stdout()).unwrap();
    println!("\nresult:\n{}", to_csv_string(&frame));
    let log = read_csv(dir.path().join("cellwise.csv")).unwrap();
    println!("cellwise log:\n{}", to_csv_string(&log));
}
