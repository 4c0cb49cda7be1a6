//! Worked examples for quantile projections and weak optimal transport.

use convex_order::one_dim::{project_1d_detailed, w2_squared_1d};
use convex_order::*;
use nalgebra::dmatrix;

fn m1(points: &[f64], weights: &[f64]) -> DiscreteMeasure {
    DiscreteMeasure::from_1d(points, weights).unwrap()
}

fn two_point() -> DiscreteMeasure {
    m1(&[-1.0, 1.0], &[0.5, 0.5])
}

fn zero() -> DiscreteMeasure {
    DiscreteMeasure::dirac(&[0.0])
}

#[track_caller]
fn same_measure(a: &DiscreteMeasure, b: &DiscreteMeasure) {
    assert_eq!(a.len(), b.len(), "{a:?} vs {b:?}");
    assert!((a.points() - b.points()).amax() < 1e-12, "{a:?} vs {b:?}");
    assert!((a.weights() - b.weights()).amax() < 1e-12, "{a:?} vs {b:?}");
}

#[test]
fn quantile_examples() {
    let q = quantile_of(&zero()).unwrap();
    assert_eq!(q.breakpoints(), &[0.0, 1.0]);
    assert_eq!(q.values(), &[0.0]);

    let q = quantile_of(&two_point()).unwrap();
    assert_eq!(q.breakpoints(), &[0.0, 0.5, 1.0]);
    assert_eq!(q.values(), &[-1.0, 1.0]);
    assert_eq!(q.eval(0.5), -1.0);
    assert_eq!(q.eval(0.5000001), 1.0);

    let q = quantile_of(&m1(&[2.0, 0.0], &[0.75, 0.25])).unwrap();
    assert_eq!(q.breakpoints(), &[0.0, 0.25, 1.0]);
    assert_eq!(q.values(), &[0.0, 2.0]);
}

#[test]
fn g_function_examples() {
    let mu = m1(&[0.3, -2.0, 1.5], &[0.2, 0.5, 0.3]);
    let g = g_function(&mu, &mu).unwrap();
    assert!(g.nodes().iter().all(|&x| x == 0.0));

    // ∫₀ᵘ (−1 − 0) on [0, ½], then +1 on [½, 1]
    let g = g_function(&two_point(), &zero()).unwrap();
    for (u, expected) in [(0.0, 0.0), (0.25, -0.25), (0.5, -0.5), (0.75, -0.25), (1.0, 0.0)] {
        assert!((g.eval(u) - expected).abs() < 1e-15, "G({u})");
    }

    let g = g_function(&zero(), &two_point()).unwrap();
    for (u, expected) in [(0.25, 0.25), (0.5, 0.5), (0.75, 0.25), (1.0, 0.0)] {
        assert!((g.eval(u) - expected).abs() < 1e-15, "G({u})");
    }
}

#[test]
fn hull_examples() {
    let v = g_function(&two_point(), &zero()).unwrap();
    let h = lower_convex_hull(&v);
    assert_eq!(h.breakpoints(), v.breakpoints());
    assert_eq!(h.nodes(), v.nodes());

    let tent = g_function(&zero(), &two_point()).unwrap();
    let h = lower_convex_hull(&tent);
    for u in [0.0, 0.3, 0.5, 0.9, 1.0] {
        assert!(h.eval(u).abs() < 1e-15);
    }
}

#[test]
fn projection_examples() {
    let (i, j) = project_1d(&two_point(), &zero()).unwrap();
    same_measure(&i, &zero());
    same_measure(&j, &two_point());

    let (i, j) = project_1d(&zero(), &two_point()).unwrap();
    same_measure(&i, &zero());
    same_measure(&j, &two_point());

    let mu = m1(&[0.0, 2.0], &[0.5, 0.5]);
    let p = project_1d_detailed(&mu, &zero()).unwrap();
    same_measure(&p.i, &zero());
    same_measure(&p.j, &mu);
    assert!((w2_squared_1d(&mu, &p.i).unwrap() - 2.0).abs() < 1e-14);
    assert!((w2_squared_1d(&zero(), &p.j).unwrap() - 2.0).abs() < 1e-14);
}

/// The `(0, 2)` vs `δ₀` instance by brute force: `ν` is a Dirac so the WOT value is
/// forced, and it must equal the quantile-formula distance.
#[test]
fn projection_matches_weak_transport_brute_force() {
    let mu = m1(&[0.0, 2.0], &[0.5, 0.5]);
    let sol = solve_wot(&mu, &zero(), &WotConfig::default()).unwrap();
    let (i, _) = project_1d(&mu, &zero()).unwrap();
    assert!((sol.value - w2_squared_1d(&mu, &i).unwrap()).abs() < 1e-12);
    same_measure(&sol.pushforward(&mu, &zero()).unwrap(), &i);
}

#[test]
fn objective_examples() {
    let mu = DiscreteMeasure::from_rows(&[vec![1.0, 0.0], vec![0.0, 2.0], vec![-1.0, 1.0]], vec![0.2, 0.3, 0.5]).unwrap();
    let c = DiscreteMeasure::dirac(&[0.5, 0.5]);
    let pi = Coupling::product(&mu, &c);
    let expected: f64 = (0..3).map(|k| mu.weights()[k] * (mu.point(k) - c.point(0)).norm_squared()).sum();
    assert!((wot_objective(&pi, &mu, &c) - expected).abs() < 1e-15);

    let nu = DiscreteMeasure::from_rows(&[vec![3.0, 1.0], vec![-2.0, 0.0]], vec![0.4, 0.6]).unwrap();
    let pi = Coupling::product(&mu, &nu);
    let m = nu.barycenter();
    let expected: f64 = (0..3).map(|k| mu.weights()[k] * (mu.point(k) - &m).norm_squared()).sum();
    assert!((wot_objective(&pi, &mu, &nu) - expected).abs() < 1e-14);

    let pi = Coupling::product(&two_point(), &zero());
    assert_eq!(wot_objective(&pi, &two_point(), &zero()), 1.0);
}

#[test]
fn solve_examples() {
    let cfg = WotConfig::default();
    let sol = solve_wot(&zero(), &two_point(), &cfg).unwrap();
    assert!(sol.value.abs() < 1e-15);

    let sol = solve_wot(&two_point(), &zero(), &cfg).unwrap();
    assert!((sol.value - 1.0).abs() < 1e-15);

    // Π((½,½),(½,½)) is the segment p ↦ [[p, ½−p], [½−p, p]]; minimize over a fine grid
    let mu = m1(&[0.0, 2.0], &[0.5, 0.5]);
    let nu = m1(&[-1.0, 1.0], &[0.5, 0.5]);
    let grid_min = (0..=10_000)
        .map(|k| {
            let p = 0.5 * k as f64 / 10_000.0;
            let pi = Coupling::new(dmatrix![p, 0.5 - p; 0.5 - p, p], &mu, &nu, 1e-12).unwrap();
            wot_objective(&pi, &mu, &nu)
        })
        .fold(f64::INFINITY, f64::min);
    let sol = solve_wot(&mu, &nu, &cfg).unwrap();
    assert!((sol.value - grid_min).abs() < 1e-7);
    let (i, _) = project_1d(&mu, &nu).unwrap();
    assert!((sol.value - w2_squared_1d(&mu, &i).unwrap()).abs() < 1e-7);
}

#[test]
fn lp_oracle_examples() {
    let mu = m1(&[0.0, 1.0], &[0.5, 0.5]);
    let nu = m1(&[0.0, 1.0, 2.0], &[0.25, 0.5, 0.25]);
    let pi = lp_oracle(&Matrix::zeros(2, 3), &mu, &nu).unwrap();
    assert_eq!(pi.matrix(), &dmatrix![0.25, 0.25, 0.0; 0.0, 0.25, 0.25]);

    // Π((0.4, 0.6), (0.4, 0.6)) has two vertices, π₁₁ = 0.4 and π₁₁ = 0
    let a = m1(&[0.0, 1.0], &[0.4, 0.6]);
    let cost = dmatrix![-1.0, 0.0; 0.0, -1.0];
    let pi = lp_oracle(&cost, &a, &a).unwrap();
    let cost_of = |m: &Matrix| m.component_mul(&cost).sum();
    let other = dmatrix![0.0, 0.4; 0.4, 0.2];
    assert!(cost_of(pi.matrix()) < cost_of(&other));
    assert_eq!(pi.matrix(), &dmatrix![0.4, 0.0; 0.0, 0.6]);

    let xs = [0.0, 1.0, 2.5, 4.0];
    let ys = [-1.0, 0.5, 3.0, 3.5];
    let u = DiscreteMeasure::uniform_1d(&xs).unwrap();
    let v = DiscreteMeasure::uniform_1d(&ys).unwrap();
    let cost = Matrix::from_fn(4, 4, |i, j| (u.points()[(i, 0)] - v.points()[(j, 0)]).powi(2));
    let pi = lp_oracle(&cost, &u, &v).unwrap();
    let mut rank_u: Vec<usize> = (0..4).collect();
    rank_u.sort_by(|&p, &q| u.points()[(p, 0)].total_cmp(&u.points()[(q, 0)]));
    let mut rank_v: Vec<usize> = (0..4).collect();
    rank_v.sort_by(|&p, &q| v.points()[(p, 0)].total_cmp(&v.points()[(q, 0)]));
    for (p, q) in rank_u.into_iter().zip(rank_v) {
        assert!((pi.matrix()[(p, q)] - 0.25).abs() < 1e-15);
    }
}

#[test]
fn pushforward_examples() {
    let mu = DiscreteMeasure::from_rows(&[vec![1.0, 0.0], vec![0.0, 2.0]], vec![0.3, 0.7]).unwrap();
    let nu = DiscreteMeasure::from_rows(&[vec![3.0, 1.0], vec![-2.0, 0.0], vec![0.0, 4.0]], vec![0.2, 0.5, 0.3]).unwrap();
    let push = barycentric_pushforward(&Coupling::product(&mu, &nu), &mu, &nu).unwrap();
    assert_eq!(push.len(), 1);
    assert!((push.point(0) - nu.barycenter()).amax() < 1e-14);

    let diag = Matrix::from_diagonal(nu.weights());
    let push = barycentric_pushforward(&Coupling::new(diag, &nu, &nu, 1e-12).unwrap(), &nu, &nu).unwrap();
    same_measure(&push, &nu);
}

/// The kernel sending `y` to `½(δ_{(y₁−y₂, y₂)} + δ_{(y₁+y₂, y₂)})`, applied to a
/// four-atom discretization of the standard Gaussian, has mean map `y ↦ y`.
#[test]
fn splitting_kernel_has_identity_mean_map() {
    let signs = [(-1.0, -1.0), (-1.0, 1.0), (1.0, -1.0), (1.0, 1.0)];
    let mu_rows: Vec<Vec<f64>> = signs.iter().map(|&(a, b)| vec![a, b]).collect();
    let mu = DiscreteMeasure::from_rows(&mu_rows, vec![0.25; 4]).unwrap();
    let mu_rows = mu.rows();

    let mut eta_rows = Vec::new();
    let mut plan_cols = Vec::new();
    for (k, y) in mu_rows.iter().enumerate() {
        for s in [-1.0, 1.0] {
            eta_rows.push(vec![y[0] + s * y[1], y[1]]);
            plan_cols.push(k);
        }
    }
    // atoms of η may coincide, so the plan is assembled against η's merged support
    let eta = DiscreteMeasure::from_rows(&eta_rows, vec![0.125; 8]).unwrap();
    let mut plan = Matrix::zeros(mu.len(), eta.len());
    for (row, &k) in eta_rows.iter().zip(&plan_cols) {
        let target = (0..eta.len())
            .find(|&t| (eta.point(t) - nalgebra::DVector::from_column_slice(row)).amax() < 1e-12)
            .unwrap();
        plan[(k, target)] += 0.125;
    }
    let pi = Coupling::new(plan, &mu, &eta, 1e-12).unwrap();
    assert!((pi.conditional_barycenters(&mu, &eta) - mu.points()).amax() < 1e-15);
    assert_eq!(wot_objective(&pi, &mu, &eta), 0.0);
    same_measure(&barycentric_pushforward(&pi, &mu, &eta).unwrap(), &mu);
    assert!((eta.covariance() - dmatrix![2.0, 0.0; 0.0, 1.0]).amax() < 1e-14);

    // the solver also finds μ ≤cx η
    let sol = solve_wot(&mu, &eta, &WotConfig::default()).unwrap();
    assert!(sol.value < 1e-9);
}

#[test]
fn convex_order_examples() {
    assert!(check_convex_order_1d(&zero(), &two_point()).unwrap());
    assert!(!check_convex_order_1d(&two_point(), &zero()).unwrap());
    let eta = m1(&[0.3, -2.0, 1.5], &[0.2, 0.5, 0.3]);
    assert!(check_convex_order_1d(&eta, &eta).unwrap());
}

#[test]
fn budget_error_reports_size() {
    let cfg = WotConfig { budget: 3, ..WotConfig::default() };
    let err = solve_wot(&two_point(), &two_point(), &cfg).unwrap_err();
    assert!(matches!(err, Error::BudgetExceeded { size: 4, .. }), "{err:?}");
}

#[test]
fn variants_agree_on_a_planar_pair() {
    let pts = |s: &[f64]| DiscreteMeasure::new(nalgebra::DMatrix::from_row_slice(s.len() / 2, 2, s), vec![2.0 / s.len() as f64; s.len() / 2]).unwrap();
    let mu = pts(&[0.0, 0.0, 1.0, 0.5, -0.5, 1.0, 0.3, -0.8, 1.2, 1.1]);
    let nu = pts(&[2.0, 0.0, -1.5, 0.4, 0.1, 2.2, 0.0, -1.9, 0.6, 0.3]);
    let values: Vec<f64> = [FwVariant::FullyCorrective, FwVariant::AwaySteps, FwVariant::Classic]
        .into_iter()
        .map(|variant| {
            let cfg = WotConfig { variant, fw_tol: 1e-9, ..WotConfig::default() };
            match solve_wot(&mu, &nu, &cfg) {
                Ok(sol) => sol.value,
                Err(Error::GapNotReached { best, .. }) => best.value,
                Err(e) => panic!("{e}"),
            }
        })
        .collect();
    for v in &values[1..] {
        assert!((v - values[0]).abs() < 1e-6 * (1.0 + values[0]), "{values:?}");
    }
}
