mod oracles;

use ctrwkit_core::cadlag::{avci_functional, jump_stats, m1_modulus, max_eps_increments, total_variation, StepPath};
use ctrwkit_core::rng::SeedSpec;
use oracles::{random_steps, Steps};
use proptest::prelude::*;

fn to_path(s: &Steps) -> StepPath {
    StepPath::new(s.t.clone(), s.v.clone(), s.horizon).unwrap()
}

fn arb_steps() -> impl Strategy<Value = Steps> {
    (0u64..u64::MAX).prop_map(|seed| random_steps(&mut SeedSpec::new(seed, 7).rng(), 8))
}

fn arb_pair() -> impl Strategy<Value = (Steps, Steps)> {
    (0u64..u64::MAX).prop_map(|seed| {
        let mut rng = SeedSpec::new(seed, 8).rng();
        (random_steps(&mut rng, 5), random_steps(&mut rng, 5))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn functionals_match_oracles(s in arb_steps(), t in 0.05f64..=1.0, delta in 0.01f64..0.6, eps in 0.1f64..2.5, a in 0.1f64..2.0) {
        let p = to_path(&s);
        prop_assert!((total_variation(&p, t).unwrap() - oracles::total_variation(&s, t)).abs() < 1e-12);
        let js = jump_stats(&p, t, a).unwrap();
        let (mj, cnt, sup) = oracles::jump_stats(&s, t, a);
        prop_assert_eq!((js.max_jump, js.count_above, js.running_sup), (mj, cnt, sup));
        prop_assert_eq!(m1_modulus(&p, delta, t), oracles::m1_modulus(&s, delta, t));
        prop_assert_eq!(max_eps_increments(&p, eps, t), oracles::max_eps_increments(&s, eps, t));
    }

    #[test]
    fn avci_matches_oracle((x, y) in arb_pair(), t in 0.05f64..=1.0, delta in 0.01f64..0.6) {
        let v = avci_functional(&to_path(&x), &to_path(&y), delta, t).unwrap();
        prop_assert_eq!(v, oracles::avci(&x, &y, delta, t));
    }

    #[test]
    fn tv_is_additive(s in arb_steps(), t in 0.05f64..=1.0) {
        let p = to_path(&s);
        let total = total_variation(&p, t).unwrap();
        for &g in p.times().iter().filter(|&&g| g <= t) {
            let head = total_variation(&p, g).unwrap();
            let k = p.index_at(g);
            let tail: f64 = p.values()[k..=p.index_at(t)].windows(2).map(|w| (w[1] - w[0]).abs()).sum();
            prop_assert!((total - head - tail).abs() < 1e-12);
        }
    }

    #[test]
    fn avci_bounds_and_monotonicity((x, y) in arb_pair(), d1 in 0.01f64..0.5, d2 in 0.01f64..0.5) {
        let (px, py) = (to_path(&x), to_path(&y));
        let (lo, hi) = if d1 <= d2 { (d1, d2) } else { (d2, d1) };
        let a = avci_functional(&px, &py, lo, 1.0).unwrap();
        let b = avci_functional(&px, &py, hi, 1.0).unwrap();
        prop_assert!(a <= b);
        let range = |p: &StepPath| {
            let v = p.values();
            v.iter().cloned().fold(f64::MIN, f64::max) - v.iter().cloned().fold(f64::MAX, f64::min)
        };
        prop_assert!(b <= range(&px).min(range(&py)));
        // with jumps more than delta apart each factor sees a single jump
        let gap = |p: &StepPath| p.compressed().times().windows(2).skip(1).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
        if gap(&px) > hi && gap(&py) > hi {
            let mx = jump_stats(&px, 1.0, 1.0).unwrap().max_jump;
            let my = jump_stats(&py, 1.0, 1.0).unwrap().max_jump;
            prop_assert!(b <= mx.min(my));
        }
    }

    #[test]
    fn m1_modulus_properties(s in arb_steps(), d1 in 0.01f64..0.6, d2 in 0.01f64..0.6) {
        let p = to_path(&s);
        let (lo, hi) = if d1 <= d2 { (d1, d2) } else { (d2, d1) };
        prop_assert!(m1_modulus(&p, lo, 1.0) <= m1_modulus(&p, hi, 1.0));
        let mut sorted = s.v.clone();
        sorted.sort_by(f64::total_cmp);
        let mono = StepPath::new(s.t.clone(), sorted, 1.0).unwrap();
        prop_assert_eq!(m1_modulus(&mono, hi, 1.0), 0.0);
    }

    #[test]
    fn eps_increments_bounded_by_tv(s in arb_steps(), eps in 0.05f64..3.0) {
        let p = to_path(&s);
        let n = max_eps_increments(&p, eps, 1.0);
        prop_assert!(n as f64 * eps <= total_variation(&p, 1.0).unwrap() + 1e-12);
    }
}

#[test]
fn documented_examples() {
    let p = StepPath::from_jumps(0.0, &[(0.3, 1.0), (0.7, -2.0)], 1.0).unwrap();
    assert_eq!(total_variation(&p, 1.0).unwrap(), 3.0);
    let q = StepPath::new(vec![0.0, 0.2, 0.4, 0.6], vec![0.0, 1.0, 0.5, 2.0], 1.0).unwrap();
    assert_eq!(total_variation(&q, 1.0).unwrap(), 3.0);
    let r = StepPath::from_jumps(0.0, &[(0.2, 1.0), (0.5, -2.0), (0.8, 0.5)], 1.0).unwrap();
    let js = jump_stats(&r, 1.0, 0.8).unwrap();
    assert_eq!((js.max_jump, js.count_above), (2.0, 2));
    let up = StepPath::from_jumps(0.0, &[(0.2, 1.0), (0.4, 1.0), (0.6, 1.0)], 1.0).unwrap();
    assert_eq!(max_eps_increments(&up, 0.9, 1.0), 3);
    assert_eq!(m1_modulus(&up, 0.5, 1.0), 0.0);
    let bump = StepPath::new(vec![0.0, 0.4, 0.5], vec![0.0, 1.0, 0.0], 1.0).unwrap();
    assert_eq!(m1_modulus(&bump, 0.3, 1.0), 1.0);
    assert_eq!(m1_modulus(&bump, 0.05, 1.0), 0.0);
    let x = StepPath::from_jumps(0.0, &[(0.5, 1.0)], 1.0).unwrap();
    let y = StepPath::from_jumps(0.0, &[(0.6, 1.0)], 1.0).unwrap();
    assert_eq!(avci_functional(&x, &y, 0.2, 1.0).unwrap(), 1.0);
    assert_eq!(avci_functional(&x, &y, 0.05, 1.0).unwrap(), 0.0);
    assert_eq!(avci_functional(&StepPath::constant(1.0, 1.0), &y, 0.5, 1.0).unwrap(), 0.0);
}
