//! Step-size sweep for the Gibbs sampler defaults: acceptance rate and
//! posterior-mean fidelity on a desk-scale GHZ4 run, full-state and
//! per-pair.

use std::time::Instant;

use tomo_core::bayes::{estimate_full, estimate_pairs, ParamVector, SamplerConfig};
use tomo_core::exact::full_schedule;
use tomo_core::qot::qot_schedule;
use tomo_core::source::{ghz_state, simulate_dataset, NoiseSpec};
use tomo_core::state::{fidelity, partial_trace, stokes_from_density};
use tomo_core::state::fidelity_to_pure;

fn main() {
    let ghz = ghz_state(4, 0.0).unwrap();
    let rho = ghz.density();
    let truth_ref = ParamVector::from_stokes(&stokes_from_density(&rho));

    println!("full-state chains (5000 sweeps, 81 settings x 2000 counts):");
    let schedule = full_schedule(4);
    for beta in [0.01f64, 0.015, 0.02, 0.05] {
        let t0 = Instant::now();
        let mut accs = Vec::new();
        let mut fids = Vec::new();
        for seed in 0..4u64 {
            let noise = NoiseSpec::new(2000, 0.005, 1000 + seed).unwrap();
            let ds = simulate_dataset(&rho, &schedule, &noise).unwrap();
            let cfg = SamplerConfig {
                beta,
                ..SamplerConfig::full_default(seed * 7 + 1)
            };
            let est = estimate_full(&ds, Some(&truth_ref), &cfg).unwrap();
            accs.push(est.samples.acceptance_rate);
            fids.push(fidelity_to_pure(&ghz, &est.mean).unwrap());
        }
        println!(
            "  beta={beta:<6} acc={:?} fid={:?} ({:.1}s / 4 seeds)",
            accs.iter().map(|a| (a * 1e3).round() / 1e3).collect::<Vec<_>>(),
            fids.iter().map(|a| (a * 1e4).round() / 1e4).collect::<Vec<_>>(),
            t0.elapsed().as_secs_f64()
        );
    }

    println!("per-pair chains (2000 sweeps, 15 settings x 10800 counts):");
    let settings = qot_schedule(4).unwrap().all_settings();
    for beta in [0.015f64, 0.05, 0.1] {
        let t0 = Instant::now();
        let mut worst = f64::INFINITY;
        let mut acc_lo = f64::INFINITY;
        let mut acc_hi = 0.0f64;
        for seed in 0..3u64 {
            let noise = NoiseSpec::new(10800, 0.005, 2000 + seed).unwrap();
            let ds = simulate_dataset(&rho, &settings, &noise).unwrap();
            let cfg = SamplerConfig {
                beta,
                ..SamplerConfig::pair_default(seed + 5)
            };
            for ((a, b), est) in estimate_pairs(&ds, &cfg).unwrap() {
                let ideal = partial_trace(&rho, &[a, b]).unwrap();
                worst = worst.min(fidelity(&est.mean, &ideal).unwrap());
                acc_lo = acc_lo.min(est.samples.acceptance_rate);
                acc_hi = acc_hi.max(est.samples.acceptance_rate);
            }
        }
        println!(
            "  beta={beta:<6} worst_fid={worst:.4} acc=[{acc_lo:.3},{acc_hi:.3}] ({:.1}s / 3 seeds)",
            t0.elapsed().as_secs_f64()
        );
    }
}
