//! Update-period sweep on the default drifting instance; prints `sweep.csv`.

use tvmdp::experiment::{sweep, sweep_table, ExperimentConfig};

fn main() -> tvmdp::Result<()> {
    let config = ExperimentConfig::default_drifting();
    let rows = sweep(&config, &[1, 2, 3, 4, 6, 8])?;
    print!("{}", sweep_table(&rows));
    Ok(())
}
