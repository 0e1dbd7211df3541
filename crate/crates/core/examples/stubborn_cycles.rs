// Partially stubborn cycles and the matrix `Phi(x) = (I - A W(x))^{-1}`.

use std::error::Error;

use fj_perception::fj::{compute_phi, phi_diag_via_pscs};
use fj_perception::InfluenceNetwork;
use nalgebra::DVector;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let net = InfluenceNetwork::from_rows(
        &[
            vec![0.0, 0.5, 0.5, 0.0],
            vec![0.0, 0.0, 0.5, 0.5],
            vec![1.0, 0.0, 0.0, 0.0],
            vec![0.0, 0.5, 0.5, 0.0],
        ],
        &[0.3, 0.6, 0.0, 0.8],
    )?;
    let x = DVector::from_vec(vec![0.4, 0.3, 0.2, 0.1]);
    let phi = compute_phi(&net, &x)?;
    for i in 0..net.n() {
        let cycles = net.enumerate_pscs(i)?;
        println!("node {}: {} stubborn cycle(s)", i + 1, cycles.len());
        for q in &cycles {
            println!("  {q}");
        }
        let via = phi_diag_via_pscs(&net, i, &x)?;
        println!("  Phi_ii solve {:.12} cycles {:.12}", phi[(i, i)], via);
    }
    println!("path 3 -> 4 through stubborn nodes: {}", net.has_psp(2, 3));
    Ok(())
}

fn main() {
    run_example().unwrap();
}
