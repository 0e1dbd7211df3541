// Reflected appraisals: the perception dynamics, the issue-indexed power
// evolution and the single-timescale evolution share one equilibrium.

use std::error::Error;

use fj_perception::analysis::{build_invariant_set_m, check_condition, one_step_invariance_test, ConditionId};
use fj_perception::fj::{step_power_evolution_issue, step_power_evolution_single};
use fj_perception::perception::{run_to_convergence, step_perception_ra, try_run_to_convergence, RunOptions};
use fj_perception::InfluenceNetwork;
use nalgebra::{DMatrix, DVector};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let net = InfluenceNetwork::from_rows(
        &[vec![0.0, 0.6, 0.4], vec![0.0, 0.0, 1.0], vec![0.5, 0.5, 0.0]],
        &[0.0, 0.4, 0.6],
    )?;
    let opts = RunOptions::default();

    let perceived = run_to_convergence(|p| step_perception_ra(&net, p), DVector::from_vec(vec![-0.5, -0.3, 0.5]), opts);
    let issue = try_run_to_convergence(|x| step_power_evolution_issue(&net, x), DVector::from_vec(vec![0.3, 0.5, 0.2]), opts)?;
    let mut v = DMatrix::identity(3, 3);
    let single = run_to_convergence(
        |x| {
            let (next, x_next) = step_power_evolution_single(&net, &v, x);
            v = next;
            x_next
        },
        DVector::from_vec(vec![0.1, 0.2, 0.7]),
        opts,
    );
    for (label, t) in [("perception", &perceived), ("issue", &issue), ("single", &single)] {
        println!("{label:>10}: {} in {:>3} steps -> {:.8?}", t.status, t.iterations(), t.last().as_slice());
    }
    let spread = (perceived.last() - issue.last()).amax().max((perceived.last() - single.last()).amax());
    println!("largest disagreement {spread:.2e}");

    let m = build_invariant_set_m(&net);
    print!("invariant box\n{m}");
    for id in [ConditionId::Eq15, ConditionId::Eq16] {
        let r = check_condition(&net, id)?;
        println!("{}: holds={} margin={:.4}", id.name(), r.holds, r.margin);
    }
    let inv = one_step_invariance_test(&net, &m, 10_000, 1)?;
    let inflated = one_step_invariance_test(&net, &m.scale_upper(2.0), 10_000, 1)?;
    println!("one-step exits: box {} / inflated box {}", inv.exits, inflated.exits);
    if spread > 1e-8 || inv.exits > 0 {
        return Err("systems disagree or the box is not invariant".into());
    }
    Ok(())
}

fn main() {
    run_example().unwrap();
}
