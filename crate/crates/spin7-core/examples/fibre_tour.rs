//! A short tour: trace one fibre of each topology in both charts and
//! print the quantities that characterize them.
//!
//! Run with: cargo run --release -p spin7-core --example fibre_tour

use spin7_core::fibration::so3::{
    asymptotic_cone_so3, h_total, trace_level_set, ConeEnd, SO3FibreParams,
};
use spin7_core::fibration::sp1::{trace_fibre, verify_cayley_sp1, IntegrateOptions, Sp1PhaseState};

fn main() -> spin7_core::Result<()> {
    let c = 1.0;
    let threshold = 5.0 * c * h_total();
    println!("SO(3) chart, c = {c}: singular level F = {threshold:.6}");
    for (label, f0) in [
        ("below", 0.5 * threshold),
        ("at   ", threshold),
        ("above", 2.0 * threshold),
    ] {
        let params = SO3FibreParams::new(0.0, 0.0, 1.0, f0, c)?;
        let curve = trace_level_set(&params, 200)?;
        print!(
            "  F {label} threshold -> {:?}, {} samples, F-drift {:.2e}",
            curve.topology,
            curve.samples.len(),
            curve.conserved_drift
        );
        match curve.alpha0 {
            Some(a0) => println!(", u = 0 at alpha = {a0:.9}"),
            None => {
                let cone = asymptotic_cone_so3(&curve, ConeEnd::AlphaToZero)?;
                println!(
                    ", cone 4C/r^2 = {:.5} squashing {:.4}",
                    cone.radial_coeff, cone.squashing
                );
            }
        }
    }

    println!("Sp(1) chart, c = {c}:");
    let opts = IntegrateOptions {
        r_max: 100.0,
        stop_at_critical: false,
        ..Default::default()
    };
    for (alpha, r) in [(-1.0, 0.8), (0.4, 0.6)] {
        let curve = trace_fibre(&Sp1PhaseState::new(alpha, r, c)?, &opts)?;
        let eta = verify_cayley_sp1(&curve, None, 1e-6)?;
        println!(
            "  launch ({alpha}, {r}) -> {:?}, {} samples, max |eta| = {eta:.2e}",
            curve.topology.unwrap(),
            curve.samples.len()
        );
    }
    Ok(())
}
