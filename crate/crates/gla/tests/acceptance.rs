//! Acceptance battery: runs the full regression suite and prints one
//! pass/fail line per criterion. Run with `--nocapture` to see the table.

use gla::regress;

#[test]
fn acceptance_battery() {
    let rows = regress::run_all();
    assert!(rows.len() >= 14, "battery shrank to {} rows", rows.len());
    for r in &rows {
        println!(
            "[{}] {:2}  {:<44} {:>6.2}s  {}",
            if r.pass { "PASS" } else { "FAIL" },
            r.id,
            r.name,
            r.seconds,
            r.detail
        );
    }
    let failed: Vec<&str> = rows.iter().filter(|r| !r.pass).map(|r| r.name).collect();
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
