//! Compare two versions of a table cell by cell, then replay the changes.

use datatrace::table::{apply_changes, cell_diff, frames_identical, parse_csv, KeySpec};

fn main() {
    let before = parse_csv(
        "id,staff,other.rev\n\
SPM01,75,NA\n\
SPM02,9,NA\n\
SPM03,NA,-33\n",
    )
    .unwrap();
    let after = parse_csv(
        "id,staff,other.rev,ratio\n\
SPM01,75,0,NA\n\
SPM02,9,0,1\n\
SPM03,68.1,33,0.9952305\n",
    )
    .unwrap();

    let key = KeySpec::new("id");
    let changes = cell_diff(&before, &after, &key).unwrap();
    println!("{:<6} {:<10} {:>6} {:>10}", "key", "variable", "old", "new");
    for c in &changes {
        let (key, old, new) = (c.key.to_string(), c.old.to_string(), c.new.to_string());
        println!("{key:<6} {:<10} {old:>6} {new:>10}", c.variable);
    }

    let replayed = apply_changes(&before, &changes, &key).unwrap();
    println!(
        "replay reproduces the new table: {}",
        frames_identical(&replayed, &after)
    );
}
