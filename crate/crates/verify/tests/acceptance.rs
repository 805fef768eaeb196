use std::process::ExitCode;

fn main() -> ExitCode {
    let dir = std::env::temp_dir().join("tvmdp-acceptance");
    let results = tvmdp_verify::run_all(&dir);
    for r in &results {
        println!("{}", r.line());
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    println!("{} of {} criteria passed; sweep.csv in {}", results.len() - failed, results.len(), dir.display());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
