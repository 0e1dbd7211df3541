// Multistart evidence for a unique interior equilibrium on random networks,
// plus the necessary condition for a dominant individual.

use std::error::Error;

use fj_perception::analysis::{check_dominance_necessary, solve_equilibrium};
use fj_perception::perception::RunOptions;
use fj_perception::random::{random_network, rng, NetworkSpec};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let mut r = rng(2024);
    let mut agreeing = 0;
    let mut dominant = 0;
    let trials = 25;
    for k in 0..trials {
        let net = random_network(&mut r, NetworkSpec::dense(3 + k % 5).with_fully_stubborn(0.2));
        let rep = solve_equilibrium(&net, 10, k as u64, RunOptions::default())?;
        agreeing += usize::from(rep.unique_evidence() && rep.interior);
        for i in 0..net.n() {
            let d = check_dominance_necessary(&net, &rep.p_star, i, 0.5)?;
            if d.dominant {
                dominant += 1;
                println!("network {k}: node {} holds {:.3} (condition holds: {})", i + 1, d.p_i, d.condition.holds);
            }
            if !d.consistent() {
                return Err(format!("network {k}: dominance without the necessary condition").into());
            }
        }
    }
    println!("{agreeing}/{trials} networks: all starts agree on an interior point; {dominant} dominant node(s)");
    Ok(())
}

fn main() {
    run_example().unwrap();
}
