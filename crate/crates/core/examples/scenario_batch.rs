// Loads the bundled scenario files and runs them as one parallel batch.

use std::error::Error;
use std::path::Path;

use fj_perception::scenario::{load_scenario, scenario_files};
use fj_perception::simkit::run_batch;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples");
    let scenarios = scenario_files(&dir)?
        .iter()
        .map(|p| load_scenario(p))
        .collect::<Result<Vec<_>, _>>()?;
    for s in run_batch(&scenarios, 0) {
        println!("{s}");
    }
    Ok(())
}

fn main() {
    run_example().unwrap();
}
