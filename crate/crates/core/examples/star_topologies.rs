// Stars: closed-form equilibria, invariant boxes and monotone leaves.

use std::error::Error;

use fj_perception::analysis::{
    check_condition, monotonicity_test_star, star_equilibrium_closed_form, star_full_center_box,
    star_partial_center_box, ConditionId,
};
use fj_perception::perception::{run_to_convergence, step_perception_ra, RunOptions};
use fj_perception::InfluenceNetwork;
use nalgebra::DVector;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let full = InfluenceNetwork::from_rows(
        &[vec![0.0, 0.4, 0.6], vec![1.0, 0.0, 0.0], vec![1.0, 0.0, 0.0]],
        &[0.0, 0.4, 0.8],
    )?;
    println!("{}", full.classify_topology());
    let p = star_equilibrium_closed_form(&full)?;
    println!("closed form {:.10?}", p.as_slice());
    let (bx, alpha) = star_full_center_box(&full)?;
    println!("alpha = {alpha}, center bound {}", bx.nu[0]);
    for p0 in [[0.3, 0.4, 0.5], [0.9, 0.8, 0.6]] {
        let r = monotonicity_test_star(&full, &DVector::from_row_slice(&p0), RunOptions::default())?;
        println!(
            "p(0) = {p0:?}: leaves {:?}, monotone {}, center {:?} from step {}",
            r.leaf_directions.iter().map(|(j, d)| (j + 1, *d)).collect::<Vec<_>>(),
            r.leaves_monotone(),
            r.center_observed,
            r.center_monotone_from
        );
    }

    let mut rows = vec![vec![0.0, 1.0, 0.0, 0.0]];
    rows.extend((0..3).map(|_| vec![1.0, 0.0, 0.0, 0.0]));
    let partial = InfluenceNetwork::from_rows(&rows, &[0.2, 0.0, 0.7, 0.8])?;
    println!("\n{}", partial.classify_topology());
    let closed = star_equilibrium_closed_form(&partial)?;
    let iterated = run_to_convergence(
        |p| step_perception_ra(&partial, p),
        DVector::from_vec(vec![0.9, 0.6, 0.9, 0.9]),
        RunOptions::default(),
    );
    println!("closed form {:.10?}", closed.as_slice());
    println!("iterated    {:.10?}", iterated.last().as_slice());
    let boxes = star_partial_center_box(&partial)?;
    println!(
        "fully stubborn leaf lower bound: derived {:.4}, statement {:.4} (upper {:.4})",
        boxes.operational.mu[1], boxes.statement_mu[1], boxes.operational.nu[1]
    );
    print!("{}", check_condition(&partial, ConditionId::Eq17)?);
    if (closed - iterated.last()).amax() > 1e-9 {
        return Err("closed form and iteration disagree".into());
    }
    Ok(())
}

fn main() {
    run_example().unwrap();
}
