use holo_openbook::indices::*;
use holo_openbook::profiles::{build_profile, kappa::catalogue, ProfileParams};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn params() -> ProfileParams {
    ProfileParams { c: 0.1, kappa: -std::f64::consts::SQRT_2 / 100.0, delta: 0.05, delta_prime: 0.1, rho1: 0.25, rho2: 0.5 }
}

/// Brute-force crossing-form count for `Psi(t) = exp(t J S)` with constant
/// symmetric `S`: scan `det(Psi - 1)` on a fine grid, add `sign S` on the
/// kernel at every interior crossing and half of it at `t = 0`.
fn crossing_form_oracle(s: [[f64; 2]; 2], n: usize) -> i64 {
    let tr_s = s[0][0] + s[1][1];
    let det_s = s[0][0] * s[1][1] - s[0][1] * s[0][1];
    assert!(det_s > 0.0, "oracle handles elliptic paths only");
    let sign = if tr_s > 0.0 { 1 } else { -1 };
    let freq = det_s.sqrt() / std::f64::consts::TAU; // turns per unit time
    let f = |t: f64| 2.0 - 2.0 * (std::f64::consts::TAU * freq * t).cos(); // det(Psi - 1)
    let mut count = sign; // half of signature 2 sign at t = 0
    for j in 1..n {
        let (a, b, c) = (f((j - 1) as f64 / n as f64), f(j as f64 / n as f64), f((j + 1) as f64 / n as f64));
        if b < a && b <= c && b < 1e-3 {
            count += 2 * sign;
        }
    }
    count
}

#[test]
fn rotation_index_matches_crossing_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut done = 0;
    while done < 200 {
        let th: f64 = rng.gen_range(0.0..5.0);
        if (th - th.round()).abs() < 1e-3 {
            continue;
        }
        let w = std::f64::consts::TAU * th;
        let mu = conley_zehnder(&SymplecticPath::rotation(th, 1.0, 10_000)).unwrap();
        assert_eq!(mu, 2 * th.floor() as i64 + 1, "theta {th}");
        assert_eq!(mu, crossing_form_oracle([[w, 0.0], [0.0, w]], 10_000), "theta {th}");
        done += 1;
    }
}

#[test]
fn variational_path_matches_closed_form() {
    let p = build_profile(params()).unwrap();
    for k in 1..=100 {
        let c = cover_index(&p, k).unwrap();
        assert!(c.path_error <= 1e-8, "k {k}: {}", c.path_error);
    }
}

#[test]
fn covers_up_to_one_turn_have_index_one() {
    let p = build_profile(params()).unwrap();
    let kmax = (1.0 / params().kappa.abs()).floor() as u32;
    for k in 1..=kmax {
        assert_eq!(cover_index(&p, k).unwrap().mu, 1, "k {k}");
    }
    let c = cover_index(&p, 71).unwrap();
    assert!((c.turns - 1.00409).abs() < 1e-5);
    assert_eq!(c.mu, 3);
}

#[test]
fn endpoint_is_not_the_identity() {
    let p = build_profile(params()).unwrap();
    let end = linearized_return_path(&p, 1).unwrap().end();
    assert!((2.0 - end[0][0] - end[1][1]).abs() > 1e-6);
}

#[test]
fn catalogue_is_nondegenerate_up_to_ten_thousand_covers() {
    for entry in catalogue() {
        let (dist, k) = nondegeneracy_audit(entry, 10_000);
        assert!(dist > 1e-6, "{entry}: k = {k}, distance {dist}");
    }
}

#[test]
fn index_is_two_minus_two_g() {
    for g in 0..=3u32 {
        for n in 1..=3 {
            let top = CurveTopology::new(g, &vec![1; n], 0);
            assert_eq!(fredholm_index(&top), 2 - 2 * g as i64);
        }
    }
    assert_eq!(normal_chern(2, 0, 0), Ok(0));
}

proptest! {
    #[test]
    fn chern_round_trip(g in 0u32..5, mus in proptest::collection::vec(0i64..2, 1..6), c1 in -4i64..5) {
        // mu in {0, 1}: the data the 2 c1 relation is stated for
        let top = CurveTopology::new(g, &mus, c1);
        prop_assert_eq!(top.gamma0(), mus.iter().filter(|m| **m == 0).count() as i64);
        let ind = fredholm_index(&top);
        prop_assert_eq!(normal_chern(ind, g as i64, top.gamma0()), Ok(c1));
    }

    #[test]
    fn chern_shift_for_higher_indices(g in 0u32..5, mus in proptest::collection::vec(-5i64..8, 1..6), c1 in -4i64..5) {
        let top = CurveTopology::new(g, &mus, c1);
        let n = mus.len() as i64;
        let shift = (mus.iter().sum::<i64>() + top.gamma0() - n) / 2;
        prop_assert_eq!(normal_chern(fredholm_index(&top), g as i64, top.gamma0()), Ok(c1 + shift));
    }
}
