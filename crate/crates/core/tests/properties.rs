mod common;

use common::*;
use convex_order::linalg::{positive_part, shared_correlation_transform, spd_inv_sqrt, spd_sqrt, sym_eigen};
use convex_order::one_dim::{convex_order_leq_1d, default_cx_tol, project_1d_detailed, w2_squared_1d};
use convex_order::pgd::{frobenius_project_above, pgd_solve_j};
use convex_order::*;
use proptest::prelude::*;
use rand::Rng;

/// Smallest eigenvalue by nalgebra's own solver, independent of the crate's Jacobi.
fn min_eig(m: &Matrix) -> f64 {
    symmetric(m.clone()).symmetric_eigen().eigenvalues.min()
}

fn conj(o: &Matrix, s: &Matrix) -> SpdMatrix {
    SpdMatrix::new(symmetric(o * s * o.transpose())).unwrap()
}

fn scale(m: &Matrix) -> f64 {
    1.0 + m.amax()
}

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn eigen_reconstructs(seed in any::<u64>(), d in 1usize..=6) {
        let m = random_symmetric(&mut rng(seed), d);
        let e = sym_eigen(&SymMatrix::new(m.clone()).unwrap()).unwrap();
        let back = &e.vectors * Matrix::from_diagonal(&e.values) * e.vectors.transpose();
        prop_assert!((back - &m).amax() < 1e-12);
        prop_assert!((e.vectors.transpose() * &e.vectors - Matrix::identity(d, d)).amax() < 1e-12);
        prop_assert!(e.values.as_slice().windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn positive_part_is_nearest_psd(seed in any::<u64>(), d in 1usize..=5) {
        let mut r = rng(seed);
        let m = random_symmetric(&mut r, d);
        let p = positive_part(&m).unwrap();
        let excess = &*p - &m;
        prop_assert!(min_eig(&p) > -1e-12);
        prop_assert!(min_eig(&excess) > -1e-12);
        prop_assert!((&*p * &excess).amax() < 1e-12);
        for _ in 0..20 {
            let k = r.random_range(0..=d);
            let f = random_psd_rank(&mut r, d, k);
            prop_assert!((&m - &*p).norm() <= (&m - &*f).norm() + 1e-12);
        }
    }

    #[test]
    fn inverse_root_pairs_with_root_to_a_projector(seed in any::<u64>(), d in 1usize..=5, deficit in 0usize..=2) {
        let mut r = rng(seed);
        let s = random_psd_rank(&mut r, d, d.saturating_sub(deficit));
        let p = &*spd_sqrt(&s).unwrap() * &*spd_inv_sqrt(&s).unwrap();
        prop_assert!((&p * &p - &p).amax() < 1e-8);
        prop_assert!((&p - p.transpose()).amax() < 1e-8);
        prop_assert!((&p * &*s - &*s).amax() < 1e-8 * scale(&s));
    }

    #[test]
    fn shared_correlation_is_common(seed in any::<u64>(), d in 1usize..=5) {
        let mut r = rng(seed);
        let (a, b) = (random_spd(&mut r, d), random_spd(&mut r, d));
        let sc = shared_correlation_transform(&a, &b).unwrap();
        let o = &*sc.basis;
        prop_assert!((o.transpose() * o - Matrix::identity(d, d)).amax() < 1e-10);
        prop_assert!((o.transpose() * &*a * o - &sc.first).amax() < 1e-9 * scale(&a));
        prop_assert!((o.transpose() * &*b * o - &sc.second).amax() < 1e-9 * scale(&b));
        for m in [&sc.first, &sc.second] {
            let c = Matrix::from_fn(d, d, |i, j| m[(i, j)] / (m[(i, i)] * m[(j, j)]).sqrt());
            prop_assert!((c - &*sc.correlation).amax() < 1e-8);
        }
    }

    #[test]
    fn bures_is_symmetric_and_rotation_invariant(seed in any::<u64>(), d in 1usize..=5, deficit in 0usize..=2) {
        let mut r = rng(seed);
        let (a, b) = (random_spd(&mut r, d), random_psd_rank(&mut r, d, d.saturating_sub(deficit)));
        let o = random_orthogonal(&mut r, d);
        // the square root is only ½-Hölder at a kernel, so round-off there costs √ε
        let tol = if deficit == 0 { 1e-9 } else { 1e-6 };
        let ab = bw2(&a, &b).unwrap();
        prop_assert!((ab - bw2(&b, &a).unwrap()).abs() < tol * (1.0 + ab));
        let rot = bw2(&conj(&o, &a), &conj(&o, &b)).unwrap();
        prop_assert!((ab - rot).abs() < tol * (1.0 + ab), "{ab} vs {rot}");
        prop_assert!(ab >= -1e-12);
    }

    #[test]
    fn gaussian_projections_are_equivariant(seed in any::<u64>(), d in 1usize..=4) {
        let mut r = rng(seed);
        let (mu, nu) = (random_spd(&mut r, d), random_spd(&mut r, d));
        let o = random_orthogonal(&mut r, d);
        let i = project_i(&mu, &nu).unwrap();
        let ir = project_i(&conj(&o, &mu), &conj(&o, &nu)).unwrap();
        let rotated = &o * &*i.covariance * o.transpose();
        prop_assert!((&*ir.covariance - rotated).amax() < 1e-6 * scale(&nu));
        let j = project_j(&nu, &mu).unwrap();
        let jr = project_j(&conj(&o, &nu), &conj(&o, &mu)).unwrap();
        let rotated = &o * &*j.covariance * o.transpose();
        prop_assert!((&*jr.covariance - rotated).amax() < 1e-6 * (scale(&nu) + scale(&mu)));
    }

    #[test]
    fn gaussian_projections_respect_order_and_moments(seed in any::<u64>(), d in 1usize..=4) {
        let mut r = rng(seed);
        let (mu, nu) = (random_spd(&mut r, d), random_spd(&mut r, d));
        let i = project_i(&mu, &nu).unwrap();
        let j = project_j(&nu, &mu).unwrap();
        let tol = 1e-8 * (scale(&mu) + scale(&nu));
        prop_assert!(min_eig(&(&*nu - &*i.covariance)) > -tol);
        prop_assert!(min_eig(&(&*j.covariance - &*mu)) > -tol);
        prop_assert!((i.distance2 - j.distance2).abs() < tol);
        let traces = i.covariance.trace() + j.covariance.trace() - mu.trace() - nu.trace();
        prop_assert!(traces.abs() < tol);
        prop_assert!((i.distance2 - bw2(&mu, &i.covariance).unwrap()).abs() < tol);
    }

    #[test]
    fn projecting_a_projection_is_idle(seed in any::<u64>(), d in 1usize..=4) {
        let mut r = rng(seed);
        let (mu, nu) = (random_spd(&mut r, d), random_spd(&mut r, d));
        let i = project_i(&mu, &nu).unwrap().covariance;
        let again = project_i(&i, &nu).unwrap();
        prop_assert!((&*again.covariance - &*i).amax() < 1e-8 * scale(&nu));
        prop_assert!(again.distance2 < 1e-8 * scale(&nu));
    }

    #[test]
    fn above_cone_projection_is_nearest(seed in any::<u64>(), d in 1usize..=4) {
        let mut r = rng(seed);
        let sigma = random_symmetric(&mut r, d) * 4.0;
        let lower = random_psd_rank(&mut r, d, d);
        let p = frobenius_project_above(&sigma, &lower).unwrap();
        prop_assert!(min_eig(&(&*p - &*lower)) > -1e-10);
        for _ in 0..50 {
            let k = r.random_range(0..=d);
            let f = &*lower + &*random_psd_rank(&mut r, d, k);
            prop_assert!((&sigma - &*p).norm() <= (&sigma - f).norm() + 1e-9);
        }
    }

    #[test]
    fn pgd_stays_above_lower_bound(seed in any::<u64>(), d in 1usize..=4) {
        let mut r = rng(seed);
        let (nu, mu) = (random_spd(&mut r, d), random_spd(&mut r, d));
        let run = pgd_solve_j(&nu, &mu, &PgdConfig::default()).unwrap();
        prop_assert!(min_eig(&(&*run.sigma - &*mu)) > -1e-10 * scale(&mu));
        let closed = project_j(&nu, &mu).unwrap();
        let gap = bw2(&nu, &run.sigma).unwrap() - closed.distance2;
        prop_assert!(gap.abs() <= 1e-5 * (1.0 + closed.distance2), "gap {gap}");
    }
}

proptest! {
    #![proptest_config(config(128))]

    #[test]
    fn quantile_projections_are_valid(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (mu, nu) = (random_measure_1d(&mut r, 8), random_measure_1d(&mut r, 8));
        let p = project_1d_detailed(&mu, &nu).unwrap();
        prop_assert!(p.quantile_i.is_monotone() && p.quantile_j.is_monotone());
        let tol = default_cx_tol(&mu, &nu);
        prop_assert!(convex_order_leq_1d(&p.i, &nu, tol).unwrap());
        prop_assert!(convex_order_leq_1d(&mu, &p.j, tol).unwrap());
        prop_assert!((p.i.barycenter()[0] - nu.barycenter()[0]).abs() < 1e-12);
        prop_assert!((p.j.barycenter()[0] - mu.barycenter()[0]).abs() < 1e-12);
        let moments = p.i.second_moment() + p.j.second_moment() - mu.second_moment() - nu.second_moment();
        prop_assert!(moments.abs() < 1e-12 * (1.0 + mu.second_moment() + nu.second_moment()));
        let (di, dj) = (w2_squared_1d(&mu, &p.i).unwrap(), w2_squared_1d(&nu, &p.j).unwrap());
        prop_assert!((di - dj).abs() < 1e-12);
        let (cross_i, cross_j) = (w2_squared_1d(&nu, &p.i).unwrap(), w2_squared_1d(&mu, &p.j).unwrap());
        prop_assert!((cross_i - p.hull_gap).abs() < 1e-12, "{cross_i} vs {}", p.hull_gap);
        prop_assert!((cross_j - p.hull_gap).abs() < 1e-12, "{cross_j} vs {}", p.hull_gap);
    }

    #[test]
    fn hull_is_convex_minorant(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (mu, nu) = (random_measure_1d(&mut r, 10), random_measure_1d(&mut r, 10));
        let g = g_function(&mu, &nu).unwrap();
        let last = *g.nodes().last().unwrap();
        prop_assert!((last - (mu.barycenter()[0] - nu.barycenter()[0])).abs() < 1e-14);
        let h = lower_convex_hull(&g);
        prop_assert!(h.is_convex(1e-12));
        for k in 0..=200 {
            let u = k as f64 / 200.0;
            prop_assert!(h.eval(u) <= g.eval(u) + 1e-14);
        }
        for &u in h.breakpoints() {
            prop_assert!(h.eval(u) <= g.eval(u) + 1e-14);
        }
    }
}

fn random_plan(r: &mut rand_chacha::ChaCha8Rng, mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Coupling {
    let cost = random_matrix(r, mu.len(), nu.len());
    let vertex = lp_oracle(&cost, mu, nu).unwrap().into_matrix();
    let t = r.random_range(0.0..1.0);
    let mixed = vertex * t + Coupling::product(mu, nu).into_matrix() * (1.0 - t);
    Coupling::new(mixed, mu, nu, 1e-9).unwrap()
}

proptest! {
    #![proptest_config(config(24))]

    #[test]
    fn objective_is_midpoint_convex(seed in any::<u64>(), d in 1usize..=3) {
        let mut r = rng(seed);
        let (mu, nu) = (random_measure(&mut r, 6, d), random_measure(&mut r, 6, d));
        let (a, b) = (random_plan(&mut r, &mu, &nu), random_plan(&mut r, &mu, &nu));
        let mid = Coupling::new((a.matrix() + b.matrix()) * 0.5, &mu, &nu, 1e-9).unwrap();
        let lhs = wot_objective(&mid, &mu, &nu);
        let rhs = 0.5 * (wot_objective(&a, &mu, &nu) + wot_objective(&b, &mu, &nu));
        prop_assert!(lhs <= rhs + 1e-12);
    }

    #[test]
    fn weak_transport_value_is_a_distance(seed in any::<u64>(), d in 1usize..=3) {
        let mut r = rng(seed);
        let (mu, nu) = (random_measure(&mut r, 6, d), random_measure(&mut r, 6, d));
        let cfg = WotConfig::default();
        let sol = solve_wot(&mu, &nu, &cfg).unwrap();
        let push = sol.pushforward(&mu, &nu).unwrap();
        prop_assert!((push.barycenter() - nu.barycenter()).amax() < 1e-10);
        let w2 = wasserstein2_discrete(&mu, &push).unwrap();
        prop_assert!((sol.value - w2).abs() <= cfg.fw_tol * (1.0 + sol.value) + 1e-8, "{} vs {w2}", sol.value);
    }

    #[test]
    fn weak_transport_dominates_gaussian_bound(seed in any::<u64>(), d in 1usize..=3) {
        let mut r = rng(seed);
        let (mu, nu) = (random_measure(&mut r, 7, d), random_measure(&mut r, 7, d));
        let sol = solve_wot(&mu, &nu, &WotConfig::default()).unwrap();
        let cov = |m: &DiscreteMeasure| SpdMatrix::new(symmetric(m.covariance())).unwrap();
        let shift = (mu.barycenter() - nu.barycenter()).norm_squared();
        let bound = shift + project_i(&cov(&mu), &cov(&nu)).unwrap().distance2;
        prop_assert!(sol.value >= bound - sol.gap - 1e-9, "{} < {bound}", sol.value);
    }

    #[test]
    fn weak_transport_matches_quantiles(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (mu, nu) = (random_measure_1d(&mut r, 8), random_measure_1d(&mut r, 8));
        let cfg = WotConfig { fw_tol: 1e-12, ..WotConfig::default() };
        let sol = match solve_wot(&mu, &nu, &cfg) {
            Ok(s) => s,
            Err(Error::GapNotReached { best, .. }) => *best,
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        };
        let (i, _) = project_1d(&mu, &nu).unwrap();
        let w2 = wasserstein2_discrete(&sol.pushforward(&mu, &nu).unwrap(), &i).unwrap().max(0.0).sqrt();
        prop_assert!(w2 < 1e-6, "W2 {w2}");
    }
}
