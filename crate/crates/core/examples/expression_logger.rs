//! Follow summary statistics of a table while it is being cleaned.

use std::io;

use datatrace::chain::{Step, Tracked};
use datatrace::dsl::Args;
use datatrace::loggers::ExpressionLogger;
use datatrace::table::{parse_csv, to_csv_string};

fn main() {
    let spm = parse_csv(
        "id,staff,turnover,other.rev,total.rev\n\
SPM01,75,NA,NA,1130\n\
SPM02,9,1607,NA,1607\n\
SPM03,NA,6886,-33,6919\n",
    )
    .unwrap();
    let dir = tempfile::tempdir().unwrap();

    let logger = ExpressionLogger::new([
        ("mean_other.rev", "mean(other.rev, na_rm = TRUE)"),
        ("missing_staff", "sum(is_na(staff))"),
        ("total", "sum(total.rev)"),
    ])
    .unwrap();

    let tracked = Tracked::new(spm)
        .with_dump_dir(dir.path())
        .track(logger)
        .unwrap()
        .then(
            Step::transform("transform(other.rev = ifelse(is_na(other.rev), 0, other.rev))")
                .unwrap(),
        )
        .unwrap()
        .then(Step::transform("transform(other.rev = abs(other.rev))").unwrap())
        .unwrap()
        .then(Step::transform("transform(staff = ifelse(is_na(staff), 0, staff))").unwrap())
        .unwrap();

    let (_, reports) = tracked.stop_with(&Args::new(), &mut io::stdout()).unwrap();
    let path = reports[0].destination.as_ref().unwrap();
    let log = datatrace::table::read_csv(path).unwrap();
    print!("{}", to_csv_string(&log));
}
