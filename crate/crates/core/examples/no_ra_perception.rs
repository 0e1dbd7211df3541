// Perceived social power with fixed self-appraisals converges to the
// actual social power from any starting point.

use std::error::Error;

use fj_perception::fj::compute_social_power;
use fj_perception::perception::{run_to_convergence, step_perception_no_ra, RunOptions};
use fj_perception::InfluenceNetwork;
use nalgebra::DVector;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let net = InfluenceNetwork::from_rows(
        &[vec![0.0, 1.0, 0.0], vec![1.0, 0.0, 0.0], vec![1.0, 0.0, 0.0]],
        &[0.7, 0.9, 0.9],
    )?;
    let gamma = DVector::from_vec(vec![0.2, 0.5, 0.0]);
    let x = compute_social_power(&net, &gamma)?;
    println!("social power {:.6?}", x.as_slice());

    for p0 in [[0.2, 0.3, 0.5], [0.9, 0.8, 0.7], [2.0, -3.0, 5.0]] {
        let t = run_to_convergence(
            |p| step_perception_no_ra(&net, &gamma, p),
            DVector::from_row_slice(&p0),
            RunOptions::default().with_tol(1e-13),
        );
        let gap = (t.last() - &x).amax();
        println!("p(0) = {p0:?}: {} after {} steps, gap {gap:.2e}", t.status, t.iterations());
        if gap > 1e-8 {
            return Err(format!("start {p0:?} ended {gap:e} away from the social power").into());
        }
    }
    Ok(())
}

fn main() {
    run_example().unwrap();
}
