mod oracles;

use ctrwkit_core::cadlag::{GridPath, Interpolation, StepPath};
use ctrwkit_core::integral::{
    adversarial_experiment, discretize_integrand, func, grid_integral, ito_integral, upsilon_estimate, Integrand,
};
use ctrwkit_core::processes::{gen_ctrw, gen_levy, ProcessConfig};
use ctrwkit_core::rng::{InnovationLaw, SeedSpec, StableParams, WaitingLaw};
use ctrwkit_core::runner::Sequential;
use ctrwkit_core::stats::wasserstein1;
use oracles::{random_steps, Steps};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn to_path(s: &Steps) -> StepPath {
    StepPath::new(s.t.clone(), s.v.clone(), s.horizon).unwrap()
}

fn close(a: f64, b: f64, scale: f64) -> bool {
    (a - b).abs() <= 1e-12 * scale.max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn ito_integral_is_linear(seed in any::<u64>(), a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (h1, h2, x) = (to_path(&random_steps(&mut rng, 8)), to_path(&random_steps(&mut rng, 8)), to_path(&random_steps(&mut rng, 8)));
        let comb = h1.zip_with(&h2, |p, q| a * p + b * q).unwrap();
        let lhs = ito_integral(&Integrand::PureJump(comb), &x, 1.0, None).unwrap();
        let i1 = ito_integral(&Integrand::PureJump(h1), &x, 1.0, None).unwrap();
        let i2 = ito_integral(&Integrand::PureJump(h2), &x, 1.0, None).unwrap();
        for &t in lhs.times().iter().chain(x.times()) {
            prop_assert!(close(lhs.value_at(t), a * i1.value_at(t) + b * i2.value_at(t), 100.0));
        }
    }

    #[test]
    fn integration_by_parts(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (hs, xs) = (random_steps(&mut rng, 10), random_steps(&mut rng, 10));
        let (h, x) = (to_path(&hs), to_path(&xs));
        let hdx = ito_integral(&Integrand::PureJump(h.clone()), &x, 1.0, None).unwrap().final_value();
        let xdh = ito_integral(&Integrand::PureJump(x.clone()), &h, 1.0, None).unwrap().final_value();
        // Σ ΔH ΔX over common jump times, from the oracle's evaluation
        let mut cov = 0.0;
        for &g in hs.t.iter().filter(|&&g| g > 0.0 && xs.t.contains(&g)) {
            cov += (hs.eval(g) - hs.eval(g - 1e-9)) * (xs.eval(g) - xs.eval(g - 1e-9));
        }
        let rhs = hs.eval(1.0) * xs.eval(1.0) - hs.eval(0.0) * xs.eval(0.0);
        prop_assert!(close(hdx + xdh + cov, rhs, 100.0), "{} vs {}", hdx + xdh + cov, rhs);
    }
}

#[test]
fn discretisation_sup_error() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for i in 0..10_000 {
        let hs = random_steps(&mut rng, 12);
        let xs = random_steps(&mut rng, 4);
        let eps = [0.25, 0.5, 0.75, 1.5][i % 4];
        let m = 1 + i % 5;
        let disc = discretize_integrand(&Integrand::PureJump(to_path(&hs)), eps, m, &to_path(&xs), 1.0, None).unwrap();
        let mut pts: Vec<f64> = hs.t.clone();
        pts.extend_from_slice(disc.times());
        pts.push(1.0);
        for &s in &pts {
            let err = (hs.eval(s) - disc.value_at(s)).abs();
            assert!(err < eps, "case {i}: error {err} at {s} with eps {eps}");
        }
        for j in 0..=m {
            let g = j as f64 / m as f64;
            assert!(disc.times().contains(&g), "grid point {g} missing");
        }
    }
}

fn ctrw_ensemble(
    law: InnovationLaw,
    c: Vec<f64>,
    n: u64,
    reps: u64,
    seed: u64,
) -> Vec<ctrwkit_core::processes::SimulationBundle> {
    let cfg = ProcessConfig::ctrw(law, WaitingLaw::new(0.8, 1.0).unwrap(), c, n).unwrap();
    (0..reps).map(|r| gen_ctrw(&cfg, 1.0, SeedSpec::new(seed, r)).unwrap()).collect()
}

#[test]
fn upsilon_examples() {
    let ens = vec![(1000u64, ctrw_ensemble(InnovationLaw::centered(1.5).unwrap(), vec![1.0], 1000, 1000, 1))];
    let constant = Integrand::Deterministic(func(|_| 0.7));
    let rep = upsilon_estimate(&ens, &constant, &[0.1], 4, 1.0, 1).unwrap();
    assert_eq!(rep.get("n=1000.eps=0.1").unwrap().value, 0.0);

    let lip = Integrand::lipschitz_tanh(20.0, 0.3);
    let eps = [0.2, 0.1, 0.05];
    let rep = upsilon_estimate(&ens, &lip, &eps, 4, 1.0, 1).unwrap();
    let ups: Vec<_> = eps.iter().map(|e| rep.get(&format!("n=1000.eps={e}")).unwrap()).collect();
    for w in ups.windows(2) {
        assert!(w[1].value < w[0].value, "{} then {}", w[0].value, w[1].value);
        assert!(w[1].value <= w[0].value + w[0].half_width());
    }
    assert!(ups[2].ci_high < ups[0].ci_low);

    // adversarial integrand against a correlated CTRW: ε above the jump size 2
    // of sgn θ, so only the grid refines the partition
    let law = InnovationLaw::symmetric(1.5).unwrap();
    let ens: Vec<_> =
        [100u64, 1000, 10_000].iter().map(|&n| (n, ctrw_ensemble(law, vec![1.0, 1.0], n, 300, 2))).collect();
    let rep = upsilon_estimate(&ens, &Integrand::adversarial(), &[2.5], 4, 1.0, 2).unwrap();
    let ups: Vec<f64> =
        [100u64, 1000, 10_000].iter().map(|n| rep.get(&format!("n={n}.eps=2.5")).unwrap().value).collect();
    assert!(ups[1] >= 0.9 * ups[0] && ups[2] >= 0.9 * ups[1], "{ups:?}");
}

#[test]
fn grid_integral_mesh_halving() {
    let z = StableParams::new(2.0, 0.0, std::f64::consts::FRAC_1_SQRT_2, 0.0).unwrap();
    let h = Integrand::Deterministic(func(|t| t));
    let fine_step = 1.0 / 2048.0;
    let (mut coarse, mut fine) = (Vec::new(), Vec::new());
    for r in 0..2000u64 {
        let zf = gen_levy(&z, 1.0, fine_step, SeedSpec::new(3, r)).unwrap();
        let zc = GridPath::new(2.0 * fine_step, zf.values().iter().step_by(2).copied().collect(), Interpolation::Step)
            .unwrap();
        fine.push(grid_integral(&h, &zf, 1.0).unwrap().final_value());
        coarse.push(grid_integral(&h, &zc, 1.0).unwrap().final_value());
    }
    let w = wasserstein1(&coarse, &fine).unwrap();
    assert!(w <= 0.02, "W1 {w}");
    // ∫ t dZ_t ~ N(0, 1/3)
    let var = fine.iter().map(|v| v * v).sum::<f64>() / fine.len() as f64;
    assert!((var - 1.0 / 3.0).abs() < 0.04, "variance {var}");
}

#[test]
fn adversarial_small_alpha_bounded() {
    let law = InnovationLaw::symmetric(0.7).unwrap();
    let cfg = ProcessConfig::ctrw(law, WaitingLaw::new(0.8, 1.0).unwrap(), vec![1.0, 1.0], 100).unwrap();
    let ns = [100u64, 1000, 10_000];
    let rep = adversarial_experiment(&cfg, &ns, 400, 4, &Sequential).unwrap();
    let med: Vec<f64> = ns.iter().map(|n| rep.get(&format!("n={n}.median")).unwrap().value).collect();
    let (lo, hi) = med.iter().fold((f64::INFINITY, 0.0f64), |(l, h), &v| (l.min(v), h.max(v)));
    assert!(hi <= 1.5 * lo, "{med:?}");
    assert!(rep.get("growth_exponent").unwrap().value.abs() < 0.1);
}
