// Agents that only see their in-neighbors exchange messages in synchronous
// rounds and reproduce the centralized update.

use std::error::Error;

use fj_perception::perception::step_perception_ra;
use fj_perception::simkit::{Mode, Simulation};
use fj_perception::InfluenceNetwork;
use nalgebra::DVector;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let net = InfluenceNetwork::from_rows(
        &[vec![0.0, 0.6, 0.4], vec![0.0, 0.0, 1.0], vec![0.5, 0.5, 0.0]],
        &[0.0, 0.4, 0.6],
    )?;
    let mut sim = Simulation::new(&net, Mode::Ra, &DVector::from_vec(vec![-0.5, -0.3, 0.5]))?;
    for agent in sim.agents() {
        let ids: Vec<usize> = agent.view.neighbor_ids().map(|j| j + 1).collect();
        println!("agent {} hears from {:?}", agent.id + 1, ids);
    }
    let mut worst: f64 = 0.0;
    for _ in 0..40 {
        let before = sim.state();
        let round = sim.step_round()?;
        worst = worst.max((step_perception_ra(&net, &before) - &round.post_state).amax());
        if round.index % 10 == 0 {
            println!(
                "round {:>2}: {} messages, state {:.8?}",
                round.index,
                round.messages_delivered,
                round.post_state.as_slice()
            );
        }
    }
    println!("largest gap to the centralized stepper: {worst:.1e}");

    sim.inject(1, 0, 0.3);
    match sim.step_round() {
        Err(e) => println!("foreign message refused: {e}"),
        Ok(_) => return Err("foreign message was accepted".into()),
    }
    Ok(())
}

fn main() {
    run_example().unwrap();
}
