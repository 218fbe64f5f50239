use std::process::ExitCode;

use idta::acceptance::{run_criterion, CRITERIA};
use idta::Config;

fn main() -> ExitCode {
    let cfg = Config::default();
    let mut failed = Vec::new();
    for (id, _, _) in CRITERIA {
        let report = run_criterion(id, 0, &cfg).expect("known criterion");
        println!("{report}");
        for f in &report.failures {
            println!("    {f}");
        }
        if !report.ok() {
            failed.push(id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all {} criteria passed", CRITERIA.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failed criteria {failed:?}");
        ExitCode::FAILURE
    }
}
