use iospectra::bounds::{kreiss_constant, lower_bound, upper_bound_semicircle, AChoice, SearchConfig};
use iospectra::linalg::{
    induced_norm, largest_eigenvalue_lanczos, matrix_exponential, singular_values, solve_banded, solve_dense,
    BandedMatrix, CMatrix,
};
use iospectra::oracle::{transient_sup, HorizonConfig};
use iospectra::pseudospectra::{evaluate_grid, extract_level_curves, GridSpec};
use iospectra::quadrature::QuadratureConfig;
use iospectra::system::{
    build_platoon, companion_embed, IoSystem, MatrixPolynomial, NetworkInput, NetworkSystem, PlatoonSpec, StateSpace,
    Symmetry,
};
use iospectra::{Complex, NormKind};
use proptest::prelude::*;

const NORMS: [NormKind; 3] = [NormKind::P1, NormKind::P2, NormKind::PInf];

fn complex_matrix(rows: usize, cols: usize) -> impl Strategy<Value = CMatrix<f64>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), rows * cols).prop_map(move |v| {
        CMatrix::new(rows, cols, v.into_iter().map(|(re, im)| Complex::new(re, im)).collect()).unwrap()
    })
}

fn real_matrix(rows: usize, cols: usize) -> impl Strategy<Value = CMatrix<f64>> {
    prop::collection::vec(-1.0..1.0f64, rows * cols).prop_map(move |v| CMatrix::from_real(rows, cols, &v).unwrap())
}

fn max_entry_diff(a: &CMatrix<f64>, b: &CMatrix<f64>) -> f64 {
    a.sub(b).max_abs()
}

/// Real system with `A = -shift I + M`, stable once `shift` exceeds `||M||`.
fn stable_system(n: usize) -> impl Strategy<Value = StateSpace<f64>> {
    (real_matrix(n, n), real_matrix(n, 1), real_matrix(1, n)).prop_map(move |(m, b, c)| {
        let shift = induced_norm(&m, NormKind::P2) + 0.2;
        let a = m.sub(&CMatrix::identity(n).scale_real(shift));
        StateSpace::new(a, b, c).unwrap()
    })
}

fn platoon_spec() -> impl Strategy<Value = PlatoonSpec<f64>> {
    let symmetry = prop_oneof![
        Just(Symmetry::Directed),
        Just(Symmetry::Bidirectional),
        (0.0..1.0f64, 0.0..1.0f64).prop_map(|(beta_p, beta_d)| Symmetry::Custom { beta_p, beta_d }),
    ];
    (2usize..40, symmetry, 0.0..1.0f64).prop_map(|(n, s, alpha)| PlatoonSpec::new(n, s, alpha))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn induced_norms_are_submultiplicative(
        (a, b) in (1usize..=8, 1usize..=8, 1usize..=8)
            .prop_flat_map(|(r, k, c)| (complex_matrix(r, k), complex_matrix(k, c)))
    ) {
        let ab = a.matmul(&b);
        for kind in NORMS {
            prop_assert!(induced_norm(&ab, kind) <= induced_norm(&a, kind) * induced_norm(&b, kind) + 1e-12);
        }
    }

    #[test]
    fn banded_and_dense_solves_agree(
        (n, kl, ku, entries, rhs) in (1usize..=200, 0usize..4, 0usize..4).prop_flat_map(|(n, kl, ku)| {
            let (kl, ku) = (kl.min(n - 1), ku.min(n - 1));
            (
                Just(n),
                Just(kl),
                Just(ku),
                prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), n * (kl + ku + 1)),
                complex_matrix(n, 2),
            )
        })
    ) {
        let mut dense = CMatrix::zeros(n, n);
        let mut k = 0;
        for i in 0..n {
            for j in i.saturating_sub(kl)..(i + ku + 1).min(n) {
                let (re, im) = entries[k];
                k += 1;
                // A diagonal of size about the bandwidth keeps the systems well conditioned.
                let boost = if i == j { (kl + ku + 1) as f64 } else { 0.0 };
                dense[(i, j)] = Complex::new(re + boost, im);
            }
        }
        let banded = BandedMatrix::from_dense(&dense).unwrap();
        let x = solve_banded(&banded, &rhs).unwrap();
        let y = solve_dense(&dense, &rhs).unwrap();
        prop_assert!(max_entry_diff(&x, &y) <= 1e-10 * y.max_abs());
        prop_assert!(max_entry_diff(&banded.transpose_matmul(&rhs), &dense.transpose().matmul(&rhs)) <= 1e-12 * n as f64);
    }

    #[test]
    fn exponential_semigroup(m in (1usize..=8).prop_flat_map(|n| complex_matrix(n, n)), scale in 0.0..5.0f64) {
        let norm = induced_norm(&m, NormKind::P2);
        let m = if norm > 0.0 { m.scale_real(scale / norm) } else { m };
        let e = matrix_exponential(&m).unwrap();
        let e2 = matrix_exponential(&m.scale_real(2.0)).unwrap();
        let diff = induced_norm(&e.matmul(&e).sub(&e2), NormKind::P2);
        prop_assert!(diff <= 1e-9 * induced_norm(&e2, NormKind::P2));
    }

    #[test]
    fn lanczos_matches_the_largest_singular_value(m in (1usize..=10, 1usize..=10).prop_flat_map(|(r, c)| complex_matrix(r, c))) {
        let gram = m.adjoint().matmul(&m);
        let top = largest_eigenvalue_lanczos(m.cols(), |x, y| y.copy_from_slice(&gram.matvec(x)), 1e-14);
        let sigma = singular_values(&m).into_iter().fold(0.0, f64::max);
        prop_assert!((top.max(0.0).sqrt() - sigma).abs() <= 1e-9 * sigma.max(1e-300));
    }

    #[test]
    fn platoon_laplacian_rows_sum_to_zero(spec in platoon_spec()) {
        let net = build_platoon(&spec).unwrap();
        for m in [net.lp(), net.ld()] {
            let ones = vec![Complex::new(1.0, 0.0); spec.n];
            for v in m.matvec(&ones) {
                prop_assert!(v.norm() < 1e-14);
            }
        }
    }

    #[test]
    fn companion_embedding_preserves_the_transfer(
        (a0, a1, b, c) in (1usize..=4).prop_flat_map(|n| {
            (real_matrix(n, n), real_matrix(n, n), real_matrix(n, 2), real_matrix(2, 2 * n))
        }),
        points in prop::collection::vec((-2.0..2.0f64, -2.0..2.0f64), 10),
    ) {
        let poly = MatrixPolynomial::new(vec![a0, a1], b, c).unwrap();
        let embedded = companion_embed(&poly);
        for (re, im) in points {
            let s = Complex::new(re, im);
            let (Ok(g), Ok(h)) = (poly.transfer(s), embedded.transfer(s)) else { continue };
            prop_assert!(max_entry_diff(&g, &h) <= 1e-10 * g.max_abs().max(1.0));
        }
    }

    #[test]
    fn resolvent_is_conjugate_symmetric(spec in platoon_spec(), re in -1.0..1.0f64, im in 0.1..3.0f64) {
        let net = build_platoon(&spec).unwrap();
        let n = spec.n;
        let rhs = CMatrix::from_fn(2 * n, 2, |i, j| Complex::new(((i * 5 + j * 3) % 7) as f64 - 3.0, 0.0));
        let s = Complex::new(re, im);
        let (Ok(x), Ok(y)) = (net.resolvent_apply(s, &rhs), net.resolvent_apply(s.conj(), &rhs)) else {
            return Ok(());
        };
        prop_assert!(max_entry_diff(&x.conj(), &y) <= 1e-12 * x.max_abs().max(1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn grid_is_conjugate_symmetric_and_nested(sys in (1usize..=5).prop_flat_map(stable_system)) {
        let spec = GridSpec::new((-3.0, 1.0), (-2.0, 2.0), (17, 21), NormKind::P2).unwrap();
        let grid = evaluate_grid(&sys, &spec).unwrap();
        let (nr, ni) = spec.resolution;
        for i in 0..nr {
            for j in 0..ni {
                let (v, w) = (grid.value(i, j), grid.value(i, ni - 1 - j));
                prop_assert!((v - w).abs() <= 1e-12 * v.max(w).max(1.0));
                for (e1, e2) in [(0.1, 0.5), (0.5, 2.0)] {
                    // Membership in the smaller-level set implies membership in the larger.
                    if v > 1.0 / e1 {
                        prop_assert!(v > 1.0 / e2);
                    }
                }
            }
        }
    }

    #[test]
    fn lower_bound_is_the_kreiss_constant_and_brackets_the_peak(sys in (1usize..=4).prop_flat_map(stable_system)) {
        let cfg = SearchConfig::default();
        let lower = lower_bound(&sys, &cfg).unwrap();
        let kreiss = kreiss_constant(&sys, &cfg).unwrap();
        prop_assert_eq!(lower.value, kreiss.value);
        let trace = transient_sup(&sys, NormKind::P2, &HorizonConfig::default()).unwrap();
        let cb = sys.c().matmul(sys.b()).max_abs();
        prop_assert!(trace.sup_value >= cb - 1e-12);
        prop_assert!(lower.value <= trace.sup_value + 1e-9);
        let upper = upper_bound_semicircle(&sys, AChoice::Optimize, NormKind::P2, &QuadratureConfig::default()).unwrap();
        prop_assert!(trace.sup_value <= upper.value * (1.0 + 1e-9));
    }

    #[test]
    fn looser_quadrature_never_drops_the_semicircle_bound_by_more_than_its_tolerance(
        sys in (1usize..=4).prop_flat_map(stable_system)
    ) {
        let tight = QuadratureConfig::default();
        let base = upper_bound_semicircle(&sys, AChoice::Fixed(2.0), NormKind::P2, &tight).unwrap().value;
        for tol in [1e-5, 1e-4, 1e-3] {
            let loose = QuadratureConfig { abs_tol: tol, rel_tol: tol, ..tight };
            let v = upper_bound_semicircle(&sys, AChoice::Fixed(2.0), NormKind::P2, &loose).unwrap().value;
            prop_assert!(v >= base - tol * base.max(1.0), "tol {}: {} vs {}", tol, v, base);
        }
    }

    #[test]
    fn level_curves_are_closed_polylines(sys in (1usize..=4).prop_flat_map(stable_system), eps in 0.05..2.0f64) {
        let spec = GridSpec::new((-4.0, 2.0), (-3.0, 3.0), (60, 60), NormKind::P2).unwrap();
        let grid = evaluate_grid(&sys, &spec).unwrap();
        let Ok(curves) = extract_level_curves(&grid, eps) else { return Ok(()) };
        for c in curves {
            let v = c.vertices();
            let mut length: f64 = v.windows(2).map(|w| (w[1] - w[0]).norm()).sum();
            if c.is_closed() {
                prop_assert!(v.len() >= 3);
                length += (v[0] - v[v.len() - 1]).norm();
            }
            prop_assert!((c.arc_length() - length).abs() <= 1e-12 * length.max(1.0));
        }
    }
}

#[test]
fn normal_matrices_have_no_transient_growth() {
    let a = CMatrix::<f64>::from_diagonal(&[
        Complex::new(-1.0, 0.0),
        Complex::new(-0.5, 2.0),
        Complex::new(-0.5, -2.0),
    ]);
    let sys = StateSpace::new(a, CMatrix::identity(3), CMatrix::identity(3)).unwrap();
    let trace = transient_sup(&sys, NormKind::P2, &HorizonConfig::default()).unwrap();
    assert!((trace.sup_value - 1.0).abs() < 1e-9);
    assert!(trace.converged);
}

#[test]
fn network_transfer_matches_its_dense_realization() {
    let net = build_platoon(&PlatoonSpec::new(12, Symmetry::Directed, 0.1)).unwrap();
    let sys = NetworkSystem::new(net, NetworkInput::Identity).unwrap();
    let dense = sys.dense().unwrap();
    for s in [Complex::new(0.3, 0.7), Complex::new(-0.2, 1.5), Complex::new(2.0, 0.0)] {
        let (g, h) = (sys.transfer(s).unwrap(), dense.transfer(s).unwrap());
        assert!(max_entry_diff(&g, &h) <= 1e-10 * h.max_abs());
    }
}

#[test]
fn single_precision_tracks_double_precision() {
    let a = [0.0, 1.0, -1.0, -2.0];
    let sys64 = StateSpace::<f64>::from_real(2, 1, 1, &a, &[0.0, 1.0], &[1.0, 0.0]).unwrap();
    let sys32 = StateSpace::<f32>::from_real(2, 1, 1, &a.map(|v| v as f32), &[0.0, 1.0], &[1.0, 0.0]).unwrap();
    for w in [0.0, 0.5, 1.0, 3.0] {
        let g64 = sys64.transfer_norm(Complex::new(0.0, w), NormKind::P2).unwrap();
        let g32 = sys32.transfer_norm(Complex::new(0.0, w as f32), NormKind::P2).unwrap();
        assert!((g64 - g32 as f64).abs() < 1e-6 * g64);
    }
}
