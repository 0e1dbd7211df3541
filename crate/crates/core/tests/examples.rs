#[allow(dead_code)]
mod no_ra_perception {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/no_ra_perception.rs"));
}

#[allow(dead_code)]
mod reflected_appraisal {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/reflected_appraisal.rs"));
}

#[allow(dead_code)]
mod star_topologies {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/star_topologies.rs"));
}

#[allow(dead_code)]
mod pagerank {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/pagerank.rs"));
}

#[allow(dead_code)]
mod distributed_rounds {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/distributed_rounds.rs"));
}

#[allow(dead_code)]
mod stubborn_cycles {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/stubborn_cycles.rs"));
}

#[allow(dead_code)]
mod uniqueness_sweep {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/uniqueness_sweep.rs"));
}

#[allow(dead_code)]
mod scenario_batch {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/scenario_batch.rs"));
}

#[test]
fn no_ra_perception_example_runs() {
    no_ra_perception::run_example().expect("no ra perception example should run");
}

#[test]
fn reflected_appraisal_example_runs() {
    reflected_appraisal::run_example().expect("reflected appraisal example should run");
}

#[test]
fn star_topologies_example_runs() {
    star_topologies::run_example().expect("star topologies example should run");
}

#[test]
fn pagerank_example_runs() {
    pagerank::run_example().expect("pagerank example should run");
}

#[test]
fn distributed_rounds_example_runs() {
    distributed_rounds::run_example().expect("distributed rounds example should run");
}

#[test]
fn stubborn_cycles_example_runs() {
    stubborn_cycles::run_example().expect("stubborn cycles example should run");
}

#[test]
fn uniqueness_sweep_example_runs() {
    uniqueness_sweep::run_example().expect("uniqueness sweep example should run");
}

#[test]
fn scenario_batch_example_runs() {
    scenario_batch::run_example().expect("scenario batch example should run");
}
