//! Property tests for algebraic and discrete invariants.

use std::sync::OnceLock;

use proptest::prelude::*;
use stokesfem::assembly::{Derivative, Discretization};
use stokesfem::elements::{dof_counts, exactness_table, ElementConfig, SpaceKind};
use stokesfem::mesh::Mesh;
use stokesfem::polyalg::{monomials_upto, poincare1, poincare2, poincare3, q, q_to_f64, Poly, VecPoly, Q};
use stokesfem::problems::{rate, sci};

fn poly_from(coeffs: &[i8], deg: usize) -> Poly {
    let mut p = Poly::zero();
    for (e, &c) in monomials_upto(deg).into_iter().zip(coeffs) {
        p.add_term(e, q(c as i64, 1));
    }
    p
}

fn poly_strategy(deg: usize) -> impl Strategy<Value = Poly> {
    let n = monomials_upto(deg).len();
    prop::collection::vec(-4i8..=4, n).prop_map(move |c| poly_from(&c, deg))
}

fn vec_strategy(deg: usize) -> impl Strategy<Value = VecPoly> {
    (poly_strategy(deg), poly_strategy(deg), poly_strategy(deg)).prop_map(|(a, b, c)| VecPoly::new(a, b, c))
}

fn point_strategy() -> impl Strategy<Value = [Q; 3]> {
    prop::array::uniform3((-6i64..=6, 1i64..=4)).prop_map(|p| p.map(|(n, d)| q(n, d)))
}

fn to_f64(w: &[Q; 3]) -> [f64; 3] {
    std::array::from_fn(|i| q_to_f64(&w[i]))
}

/// Five-point Gauss-Legendre rule on [0, 1]; exact through degree 9.
fn ray_integral(f: impl Fn(f64) -> f64) -> f64 {
    const X: [f64; 5] = [
        0.046_910_077_030_668_0,
        0.230_765_344_947_158_5,
        0.5,
        0.769_234_655_052_841_5,
        0.953_089_922_969_332_0,
    ];
    const W: [f64; 5] = [
        0.118_463_442_528_094_5,
        0.239_314_335_249_683_2,
        0.284_444_444_444_444_4,
        0.239_314_335_249_683_2,
        0.118_463_442_528_094_5,
    ];
    X.iter().zip(W).map(|(&t, w)| w * f(t)).sum()
}

fn along(w: &[f64; 3], x: &[f64; 3], t: f64) -> [f64; 3] {
    std::array::from_fn(|i| w[i] + t * (x[i] - w[i]))
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * (1.0 + a.abs().max(b.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn poincare_operators_match_ray_integrals(
        u in vec_strategy(3), p in poly_strategy(3), w in point_strategy(), x in point_strategy()
    ) {
        let (wf, xf) = (to_f64(&w), to_f64(&x));
        let d: [f64; 3] = std::array::from_fn(|i| xf[i] - wf[i]);
        let p1 = ray_integral(|t| {
            let v = u.eval_f64(&along(&wf, &xf, t));
            v[0] * d[0] + v[1] * d[1] + v[2] * d[2]
        });
        prop_assert!(close(poincare1(&u, &w).eval_f64(&xf), p1));
        let p2 = poincare2(&u, &w).eval_f64(&xf);
        for i in 0..3 {
            let exact = ray_integral(|t| t * cross(u.eval_f64(&along(&wf, &xf, t)), d)[i]);
            prop_assert!(close(p2[i], exact));
        }
        let p3 = poincare3(&p, &w).eval_f64(&xf);
        for i in 0..3 {
            let exact = ray_integral(|t| t * t * p.eval_f64(&along(&wf, &xf, t)) * d[i]);
            prop_assert!(close(p3[i], exact));
        }
    }

    #[test]
    fn poincare_null_homotopy(u in vec_strategy(4), p in poly_strategy(4), w in point_strategy()) {
        prop_assert_eq!(&poincare1(&u, &w).grad() + &poincare2(&u.curl(), &w), u.clone());
        prop_assert_eq!(&poincare2(&u, &w).curl() + &poincare3(&u.div(), &w), u.clone());
        prop_assert_eq!(poincare3(&p, &w).div(), p.clone());
        prop_assert!(poincare1(&poincare2(&u, &w), &w).is_zero());
        prop_assert!(poincare2(&poincare3(&p, &w), &w).is_zero());
    }

    #[test]
    fn poincare_outputs_vanish_at_base_point(u in vec_strategy(3), w in point_strategy()) {
        prop_assert_eq!(poincare1(&u, &w).eval(&w), Q::from_integer(0.into()));
    }

    #[test]
    fn family_constraint(r in 0usize..8, k in 0usize..6) {
        prop_assert_eq!(ElementConfig::new(r, k).is_ok(), k >= 1 && r >= k && r <= k + 2);
    }

    #[test]
    fn rate_recovers_power_law(c in 0.1f64..10.0, order in 0.5f64..5.0, n1 in 1usize..20, m in 2usize..4) {
        let n2 = n1 * m;
        let e = |n: usize| c * (n as f64).powf(-order);
        prop_assert!((rate(e(n1), e(n2), n1, n2) - order).abs() < 1e-10);
    }

    #[test]
    fn sci_keeps_six_significant_digits(x in 1e-99f64..1e99) {
        let s = sci(x);
        let back: f64 = s.parse().unwrap();
        prop_assert!(((back - x) / x).abs() <= 5e-7, "{} -> {}", x, s);
        let (m, e) = s.split_once('e').unwrap();
        prop_assert_eq!(m.len(), 8);
        prop_assert_eq!(e.len(), 3);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(4))]

    #[test]
    fn structured_mesh_counts(n in 1usize..5) {
        let c = Mesh::structured_cube(n).unwrap().counts();
        prop_assert_eq!(c.vertices, (n + 1).pow(3));
        prop_assert_eq!(c.cells, 6 * n.pow(3));
        prop_assert_eq!(c.euler, 1);
        prop_assert_eq!(c.boundary_euler, 2);
        prop_assert_eq!(c.boundary_faces, 12 * n * n);
    }
}

fn lowest_order() -> &'static Discretization {
    static D: OnceLock<Discretization> = OnceLock::new();
    D.get_or_init(|| Discretization::structured(2, ElementConfig::new(2, 1).unwrap()).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn discrete_derivatives_compose_to_zero(seed in prop::collection::vec(-1.0f64..1.0, 1..8)) {
        let d = lowest_order();
        let n = d.n_dofs(SpaceKind::Sigma);
        let x: Vec<f64> = (0..n).map(|i| seed[i % seed.len()] * (1.0 + i as f64).sin()).collect();
        let g = d.discrete_d(Derivative::Grad).matrix.mul_vec(&x);
        let cg = d.discrete_d(Derivative::Curl).matrix.mul_vec(&g);
        let scale = g.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        prop_assert!(cg.iter().all(|v| v.abs() <= 1e-10 * scale));

        let nv = d.n_dofs(SpaceKind::V);
        let y: Vec<f64> = (0..nv).map(|i| seed[i % seed.len()] * (0.5 + i as f64).cos()).collect();
        let c = d.discrete_d(Derivative::Curl).matrix.mul_vec(&y);
        let dc = d.discrete_d(Derivative::Div).matrix.mul_vec(&c);
        let scale = c.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        prop_assert!(dc.iter().all(|v| v.abs() <= 1e-10 * scale));
    }
}

#[test]
fn dof_counts_sum_to_local_dimensions() {
    for c in ElementConfig::standard() {
        let t = exactness_table(c).unwrap();
        let dims = [t.dim_sigma, t.dim_v, t.dim_sigma_plus, t.dim_w];
        for (kind, dim) in SpaceKind::ALL.into_iter().zip(dims) {
            assert_eq!(dof_counts(kind, c).local_total(), dim, "{c} {}", kind.name());
        }
    }
}
