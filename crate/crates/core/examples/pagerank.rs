// Homogeneous susceptibility: the update becomes a PageRank iteration whose
// link matrix depends on the current ranks.

use std::error::Error;

use fj_perception::analysis::{check_condition, ConditionId};
use fj_perception::perception::{step_pagerank_ra, try_run_to_convergence, RunOptions};
use fj_perception::InfluenceNetwork;
use nalgebra::DVector;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let a = 0.5;
    let net = InfluenceNetwork::from_rows(
        &[
            vec![0.0, 0.5, 0.25, 0.25],
            vec![0.25, 0.0, 0.5, 0.25],
            vec![0.25, 0.25, 0.0, 0.5],
            vec![0.5, 0.25, 0.25, 0.0],
        ],
        &[a; 4],
    )?;
    print!("{}", check_condition(&net, ConditionId::Eq19)?);

    // the total mass follows xi' = a xi + 1 - a from any start
    let mut p = DVector::from_vec(vec![3.0, -1.0, 0.5, 2.0]);
    let mut xi = p.sum();
    for s in 0..5 {
        p = step_pagerank_ra(&net, &p)?;
        xi = a * xi + 1.0 - a;
        println!("s={} sum={:.15} predicted={xi:.15}", s + 1, p.sum());
    }

    let t = try_run_to_convergence(
        |p| step_pagerank_ra(&net, p),
        DVector::from_vec(vec![0.4, 0.3, 0.2, 0.1]),
        RunOptions::default(),
    )?;
    println!("{} after {} steps: {:.12?}", t.status, t.iterations(), t.last().as_slice());
    if (t.last() - DVector::from_element(4, 0.25)).amax() > 1e-10 {
        return Err("expected the uniform ranking".into());
    }
    Ok(())
}

fn main() {
    run_example().unwrap();
}
