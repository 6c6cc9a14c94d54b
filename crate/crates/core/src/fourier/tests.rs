use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;

use super::*;
use crate::forward::{circle_points, delta_phi, phi, radiate, QuadratureRule, SourceField};
use crate::harness::{rel_l2_error, test_source, test_source_field};
use crate::specfun::{bessel_j, bessel_k, bessel_y};

const A: f64 = 3.0;
const R: f64 = 18.0;
const RHO: f64 = 20.0;
const K0: f64 = PI / 90.0;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `(2a)^{-2} ∫_{V0} S e^{-iπ ξ·x/a}` by tensor Gauss-Legendre.
fn source_side(s: &SourceField, xi: [f64; 2], q: &QuadratureRule) -> Complex64 {
    let re = q.integrate(|p| s.eval(p) * (PI * (xi[0] * p.x1 + xi[1] * p.x2) / A).cos());
    let im = q.integrate(|p| -s.eval(p) * (PI * (xi[0] * p.x1 + xi[1] * p.x2) / A).sin());
    c(re, im) / (4.0 * A * A)
}

fn traces(s: &SourceField, set: &AdmissibleSet, resolution: usize) -> Vec<FieldTrace> {
    let q = QuadratureRule::gauss_legendre(A, resolution).unwrap();
    let pts = circle_points(R, 400);
    set.wavenumbers()
        .into_iter()
        .map(|k| radiate(s, k, &pts, &q).unwrap())
        .collect()
}

#[test]
fn admissible_set_counts() {
    let s10 = AdmissibleSet::new(10, A, K0, R).unwrap();
    assert_eq!(s10.shells.len(), 60);
    assert_eq!(s10.len(), 61);
    assert_eq!(AdmissibleSet::new(20, A, K0, R).unwrap().shells.len(), 197);
    let members: usize = s10.shells.iter().map(|s| s.members.len()).sum();
    assert_eq!(members, 21 * 21 - 1);
    for s in &s10.shells {
        assert!(s
            .members
            .iter()
            .all(|l| (l[0] * l[0] + l[1] * l[1]) as u32 == s.q));
        assert_eq!(s.k, PI * f64::from(s.q).sqrt() / A);
    }
    let ks = s10.wavenumbers();
    assert_eq!(ks[0], K0);
    assert!(ks[1..].windows(2).all(|w| w[0] < w[1]));
    assert!((s10.lambda() - 1.0 / 30.0).abs() < 1e-16);
    assert!(AdmissibleSet::new(10, A, 1.0 / R, R).is_err());
    assert!(AdmissibleSet::new(10, A, 0.0, R).is_err());
    assert!(AdmissibleSet::new(0, A, K0, R).is_err());
}

#[test]
fn truncation_rule() {
    assert_eq!(truncation_from_noise(0.01).unwrap(), 20);
    assert_eq!(truncation_from_noise(0.05).unwrap(), 15);
    assert_eq!(truncation_from_noise(0.1).unwrap(), 10);
    assert_eq!(truncation_from_noise(0.2).unwrap(), 10);
    assert!(truncation_from_noise(0.0).is_err());
    assert!(truncation_from_noise(1.0).is_err());
}

proptest! {
    #[test]
    fn truncation_is_monotone(e1 in 1e-6f64..0.999, e2 in 1e-6f64..0.999) {
        let (lo, hi) = if e1 < e2 { (e1, e2) } else { (e2, e1) };
        prop_assert!(truncation_from_noise(lo).unwrap() >= truncation_from_noise(hi).unwrap());
    }

    #[test]
    fn splitting_identities(ur in -1e3f64..1e3, ui in -1e3f64..1e3,
                            lr in -1e3f64..1e3, li in -1e3f64..1e3, k in 0.01f64..40.0) {
        let (u, lap) = (c(ur, ui), c(lr, li));
        let (uh, um) = split_fields(u, lap, k);
        let scale = u.norm() + lap.norm() / (k * k);
        prop_assert!((uh + um - u).norm() <= 4.0 * f64::EPSILON * scale);
        prop_assert!((k * k * (um - uh) - lap).norm() <= 4.0 * f64::EPSILON * k * k * scale);
    }
}

#[test]
fn splitting_examples() {
    let k = 1.7;
    assert_eq!(
        split_fields(c(1.0, 0.0), c(k * k, 0.0), k),
        (c(0.0, 0.0), c(1.0, 0.0))
    );
    let (uh, um) = split_fields(c(1.0, 0.0), c(-k * k, 0.0), k);
    assert!((uh - 1.0).norm() < 1e-15 && um.norm() < 1e-15);
}

#[test]
fn circle_series_examples() {
    let pts = circle_points(R, 64);
    let three = circle_series(&vec![c(3.0, 0.0); 64], &pts, 20).unwrap();
    for (i, v) in three.iter().enumerate() {
        let want = if i == 20 { 3.0 } else { 0.0 };
        assert!((v - want).norm() < 1e-13);
    }
    let wave: Vec<_> = circle_angles_of(&pts)
        .map(|t| Complex64::from_polar(1.0, 5.0 * t))
        .collect();
    for (i, v) in circle_series(&wave, &pts, 20).unwrap().iter().enumerate() {
        let want = if i == 25 { 1.0 } else { 0.0 };
        assert!((v - want).norm() < 1e-13);
    }
    // a rotated but equiangular sampling gives the same coefficients
    let rotated: Vec<Point2> = (0..64)
        .map(|i| Point2::polar(R, 0.3 + 2.0 * PI * f64::from(i) / 64.0))
        .collect();
    let wave_r: Vec<_> = circle_angles_of(&rotated)
        .map(|t| Complex64::from_polar(1.0, -3.0 * t))
        .collect();
    assert!((circle_series(&wave_r, &rotated, 20).unwrap()[17] - 1.0).norm() < 1e-13);

    let mut bent = pts.clone();
    bent[7] = Point2::polar(R, 0.7);
    assert!(matches!(
        circle_series(&three, &bent[..41], 20),
        Err(FourierError::NotEquiangular(_))
    ));
    assert!(matches!(
        circle_series(&vec![c(1.0, 0.0); 64], &pts, 32),
        Err(FourierError::Nyquist { .. })
    ));
}

fn circle_angles_of(pts: &[Point2]) -> impl Iterator<Item = f64> + '_ {
    pts.iter().map(|p| p.x2.atan2(p.x1))
}

#[test]
fn helmholtz_series_decays_at_low_k() {
    let k = PI / 3.0;
    let q = QuadratureRule::gauss_legendre(A, 60).unwrap();
    let t = radiate(&test_source_field(A), k, &circle_points(R, 400), &q).unwrap();
    let cc = circle_fourier_coeffs(&t, 199).unwrap();
    let peak = cc.helmholtz.iter().map(|v| v.norm()).fold(0.0, f64::max);
    for n in 45..=199 {
        assert!(
            cc.helmholtz_at(n).norm() < 1e-12 * peak && cc.helmholtz_at(-n).norm() < 1e-12 * peak,
            "n = {n}"
        );
    }
    let adaptive = circle_fourier_coeffs(&t, series_order(k, A, 400)).unwrap();
    assert!(!adaptive.is_truncated(), "tail {}", adaptive.tail);
}

#[test]
fn series_order_and_rho_points() {
    assert_eq!(series_order(K0, A, 400), 26);
    assert_eq!(series_order(PI / 3.0, A, 400), 30);
    assert_eq!(series_order(100.0, A, 400), 199);
    assert_eq!(rho_points_for(K0, RHO, 26), 400);
    let k = PI * 800f64.sqrt() / A;
    let n = rho_points_for(k, RHO, series_order(k, A, 400));
    assert!(n as f64 > k * RHO + 151.0);
}

/// `(Φ, ∂_r Φ, ΔΦ, ∂_r ΔΦ)` at `x` for a source at `y`, derivative along `x/|x|`.
fn point_source_cauchy(k: f64, x: Point2, y: Point2) -> [Complex64; 4] {
    let d = Point2::new(x.x1 - y.x1, x.x2 - y.x2);
    let r = d.norm();
    let kr = k * r;
    let (j1, y1, k1) = (
        bessel_j(1, kr).unwrap(),
        bessel_y(1, kr).unwrap(),
        bessel_k(1, kr).unwrap(),
    );
    let h1 = 2.0 / PI * k1;
    let dphi = c(y1 + h1, -j1) / (8.0 * k);
    let dlap = c(h1 - y1, j1) * k / 8.0;
    let cos = d.dot(x) / (r * x.norm());
    [
        phi(k, x, y).unwrap(),
        dphi * cos,
        delta_phi(k, x, y).unwrap(),
        dlap * cos,
    ]
}

fn point_source_trace(k: f64, y: Point2) -> FieldTrace {
    let pts = circle_points(R, 400);
    let u = pts.iter().map(|&x| phi(k, x, y).unwrap()).collect();
    let laplacian_u = pts.iter().map(|&x| delta_phi(k, x, y).unwrap()).collect();
    FieldTrace {
        k,
        points: pts,
        u,
        laplacian_u,
    }
}

fn max_rel(got: &[Complex64], want: &[Complex64]) -> f64 {
    let peak = want.iter().map(|v| v.norm()).fold(0.0, f64::max);
    got.iter()
        .zip(want)
        .map(|(g, w)| (g - w).norm())
        .fold(0.0, f64::max)
        / peak
}

#[test]
fn propagation_to_same_radius_is_identity() {
    for k in [K0, PI / 3.0, 10.0 * PI / 3.0] {
        let t = point_source_trace(k, Point2::new(1.2, -0.4));
        let cc = circle_fourier_coeffs(&t, series_order(k, A, 400)).unwrap();
        let d = propagate(&cc, R, 400).unwrap();
        assert!(max_rel(&d.w, &t.u) < 1e-10, "k = {k}");
        assert!(max_rel(&d.lap_w, &t.laplacian_u) < 1e-10, "k = {k}");
    }
}

#[test]
fn point_source_continuation() {
    let y = Point2::new(0.7, -1.1);
    for k in [K0, PI / 3.0, 5.0 * PI / 3.0, 10.0 * PI / 3.0] {
        let t = point_source_trace(k, y);
        let n_max = series_order(k, A, 400);
        let cc = circle_fourier_coeffs(&t, n_max).unwrap();
        let d = propagate(&cc, RHO, rho_points_for(k, RHO, n_max)).unwrap();
        let want: Vec<[Complex64; 4]> = d
            .points()
            .iter()
            .map(|&x| point_source_cauchy(k, x, y))
            .collect();
        let got = [&d.w, &d.dw, &d.lap_w, &d.dlap_w];
        for (q, g) in got.iter().enumerate() {
            let w: Vec<_> = want.iter().map(|v| v[q]).collect();
            let e = max_rel(g, &w);
            assert!(e < 1e-8, "k = {k}, quantity {q}: {e}");
        }
    }
}

#[test]
fn normal_derivative_matches_finite_difference() {
    let (k, y, h) = (PI / 3.0, Point2::new(-2.0, 0.5), 1e-5);
    let t = point_source_trace(k, y);
    let cc = circle_fourier_coeffs(&t, series_order(k, A, 400)).unwrap();
    let d = propagate(&cc, RHO, rho_points_for(k, RHO, cc.n_max)).unwrap();
    let fd: Vec<Complex64> = d
        .points()
        .iter()
        .map(|&x| {
            let (out, inn) = (x.scale(1.0 + h / RHO), x.scale(1.0 - h / RHO));
            (phi(k, out, y).unwrap() - phi(k, inn, y).unwrap()) / (2.0 * h)
        })
        .collect();
    assert!(max_rel(&d.dw, &fd) < 1e-6);
}

#[test]
fn propagation_errors() {
    let t = point_source_trace(1.0, Point2::default());
    let cc = circle_fourier_coeffs(&t, 30).unwrap();
    assert!(matches!(
        propagate(&cc, R - 1.0, 400),
        Err(FourierError::Radius { .. })
    ));
    assert!(matches!(
        propagate(&cc, RHO, 40),
        Err(FourierError::Nyquist { .. })
    ));
}

#[test]
fn zero_data_gives_zero_coefficients() {
    let k = PI * 2f64.sqrt() / A;
    let d = PropagatedCauchyData::zeros(k, RHO, 400);
    assert_eq!(fourier_coefficient([1, 1], &d, A).unwrap(), c(0.0, 0.0));
    assert!(matches!(
        fourier_coefficient([1, 0], &d, A),
        Err(FourierError::Wavenumber { .. })
    ));
    let mut map = FourierCoefficientMap::new(2, A, 1.0 / 30.0);
    for l in map.indices().collect::<Vec<_>>() {
        map.set(l, c(0.0, 0.0)).unwrap();
    }
    let d0 = PropagatedCauchyData::zeros(K0, RHO, 400);
    assert_eq!(zeroth_coefficient(&d0, &map).unwrap(), c(0.0, 0.0));
    let bad = FourierCoefficientMap::new(2, A, 0.6);
    assert!(matches!(
        zeroth_coefficient(&d0, &bad),
        Err(FourierError::Lambda(_))
    ));
}

#[test]
fn overlap_closed_form_matches_quadrature() {
    let lambda = 1.0 / 30.0;
    let q = QuadratureRule::gauss_legendre(A, 40).unwrap();
    for l in [[1, 0], [2, 0], [1, 1], [-3, 0]] {
        let f = |p: Point2| PI * ((f64::from(l[0]) - lambda) * p.x1 + f64::from(l[1]) * p.x2) / A;
        let re = q.integrate(|p| f(p).cos());
        let im = q.integrate(|p| f(p).sin());
        let closed = overlap(l, lambda, A);
        assert!(
            (re - closed).abs() < 1e-10 && im.abs() < 1e-10,
            "{l:?}: {re} {im} vs {closed}"
        );
    }
}

fn mode_source(l: [i32; 2], cosine: bool) -> SourceField {
    SourceField::new(A, move |p| {
        let t = PI * (f64::from(l[0]) * p.x1 + f64::from(l[1]) * p.x2) / A;
        if cosine {
            t.cos()
        } else {
            t.sin()
        }
    })
}

#[test]
fn single_modes_are_recovered() {
    let set = AdmissibleSet::new(2, A, K0, R).unwrap();
    for (l, cosine) in [
        ([1, 0], true),
        ([1, 1], true),
        ([0, 2], false),
        ([2, -1], false),
    ] {
        let (map, _) =
            coefficients_from_traces(&set, &traces(&mode_source(l, cosine), &set, 60), RHO)
                .unwrap();
        let half = if cosine { c(0.5, 0.0) } else { c(0.0, -0.5) };
        for m in map.indices() {
            let want = if m == l {
                half
            } else if m == [-l[0], -l[1]] {
                half.conj()
            } else {
                c(0.0, 0.0)
            };
            let got = map.get(m).unwrap();
            assert!((got - want).norm() < 1e-3, "{l:?} at {m:?}: {got}");
        }
        assert!(map.zeroth().unwrap().norm() < 1e-3);
    }
}

#[test]
fn test_source_coefficients_match_source_side_quadrature() {
    let s = test_source_field(A);
    let set = AdmissibleSet::new(2, A, K0, R).unwrap();
    let (map, reports) = coefficients_from_traces(&set, &traces(&s, &set, 120), RHO).unwrap();
    assert_eq!(reports.len(), set.len());
    let q = QuadratureRule::gauss_legendre(A, 200).unwrap();
    for l in map.indices() {
        let want = source_side(&s, [f64::from(l[0]), f64::from(l[1])], &q);
        assert!((map.get(l).unwrap() - want).norm() < 2e-3, "{l:?}");
    }
    let want = source_side(&s, [0.0, 0.0], &q);
    assert!((map.zeroth().unwrap() - want).norm() < 2e-3);
    assert!(map.conjugate_symmetry_defect() < 1e-6);

    // the l0 functional itself against its source-side value
    let lambda = set.lambda();
    let mut l0_side = source_side(&s, [lambda, 0.0], &q) * 4.0 * A * A;
    for l1 in [-2, -1, 1, 2] {
        l0_side -= map.get([l1, 0]).unwrap() * overlap([l1, 0], lambda, A);
    }
    let l0_side = l0_side / (4.0 * A * A * (lambda * PI).sin() / (lambda * PI));
    assert!((map.zeroth().unwrap() - l0_side).norm() < 2e-3);
}

#[test]
fn missing_wavenumber_is_reported() {
    let set = AdmissibleSet::new(1, A, K0, R).unwrap();
    let mut ts = traces(&SourceField::zero(A), &set, 4);
    ts.remove(1);
    assert!(matches!(
        coefficients_from_traces(&set, &ts, RHO),
        Err(FourierError::MissingData(_))
    ));
}

fn full_map(n: usize, f: impl Fn([i32; 2]) -> Complex64, s0: Complex64) -> FourierCoefficientMap {
    let mut map = FourierCoefficientMap::new(n, A, 1.0 / 30.0);
    for l in map.indices().collect::<Vec<_>>() {
        map.set(l, f(l)).unwrap();
    }
    map.set_zeroth(s0);
    map
}

#[test]
fn reconstruct_single_mode_and_zero() {
    let grid = Grid::cell_centered(A, 24);
    let map = full_map(
        2,
        |l| {
            if l == [0, 1] {
                c(1.0, 0.0)
            } else {
                c(0.0, 0.0)
            }
        },
        c(0.0, 0.0),
    );
    let r = reconstruct(&map, &grid, ZerothMode::Constant).unwrap();
    for (p, v) in grid.points().zip(&r.values) {
        assert!((v - (PI * p.x2 / A).cos()).abs() < 1e-15);
    }
    let zero = reconstruct(
        &full_map(2, |_| c(0.0, 0.0), c(0.0, 0.0)),
        &grid,
        ZerothMode::Constant,
    )
    .unwrap();
    assert!(zero.values.iter().all(|&v| v == 0.0));
    assert!(matches!(
        reconstruct(
            &FourierCoefficientMap::new(2, A, 0.1),
            &grid,
            ZerothMode::Constant
        ),
        Err(FourierError::MissingCoefficient(_))
    ));
    let shifted = reconstruct(
        &full_map(1, |_| c(0.0, 0.0), c(2.0, 0.0)),
        &grid,
        ZerothMode::Shifted,
    )
    .unwrap();
    for (p, v) in grid.points().zip(&shifted.values) {
        assert!((v - 2.0 * (PI * p.x1 / 90.0).cos()).abs() < 1e-14);
    }
}

#[test]
fn grid_is_cell_centered() {
    let g = Grid::cell_centered(A, 600);
    assert_eq!(g.len(), 360_000);
    assert!((g.x1[0] + A - 0.005).abs() < 1e-14);
    assert!((g.x1[599] - A + 0.005).abs() < 1e-14);
    let first_rows: Vec<Point2> = g.points().take(601).collect();
    assert_eq!(first_rows[1].x2, first_rows[0].x2);
    assert_eq!(first_rows[600].x1, g.x1[0]);
}

fn source_side_map(n: usize, q: &QuadratureRule) -> FourierCoefficientMap {
    let s = test_source_field(A);
    full_map(
        n,
        |l| source_side(&s, [f64::from(l[0]), f64::from(l[1])], q),
        source_side(&s, [0.0, 0.0], q),
    )
}

#[test]
fn projection_error_is_grid_stable() {
    let q = QuadratureRule::gauss_legendre(A, 120).unwrap();
    let map = source_side_map(10, &q);
    let err = |n: usize| {
        let g = Grid::cell_centered(A, n);
        let r = reconstruct(&map, &g, ZerothMode::Constant).unwrap();
        rel_l2_error(&r.values, &g.sample(test_source)).unwrap()
    };
    let (coarse, fine) = (err(150), err(300));
    assert!((coarse - fine).abs() < 1e-3, "{coarse} vs {fine}");
    assert!(fine < 0.02);
    let r = reconstruct(&map, &Grid::cell_centered(A, 50), ZerothMode::Constant).unwrap();
    assert!(r.imag_residue < 1e-8);
}

#[test]
fn coefficient_csv_round_trip() {
    let map = full_map(
        2,
        |l| c(f64::from(l[0]) * 0.1, f64::from(l[1]) / 3.0),
        c(0.25, -1e-3),
    );
    let mut buf = Vec::new();
    write_coefficients_csv(&mut buf, &map).unwrap();
    let text = String::from_utf8(buf.clone()).unwrap();
    assert!(text.starts_with("l1,l2,re,im,flag\n-2,-2,"));
    assert!(text.trim_end().ends_with(",l0"));
    assert_eq!(read_coefficients_csv(&buf[..], A).unwrap(), map);
}

#[test]
fn grid_io_round_trip() {
    let grid = Grid::cell_centered(A, 3);
    let r = Reconstruction {
        grid: grid.clone(),
        values: (0..9).map(f64::from).collect(),
        imag_residue: 0.0,
    };
    let mut bin = Vec::new();
    write_grid_bin(&mut bin, &r).unwrap();
    assert_eq!(bin.len(), 12 + 72);
    assert_eq!(&bin[..12], &[3, 0, 0, 0, 3, 0, 0, 0, 1, 0, 0, 0]);
    assert_eq!(read_grid_bin(&bin[..]).unwrap(), (3, 3, r.values.clone()));
    assert!(read_grid_bin(&bin[..80]).is_err());
    let mut csv_buf = Vec::new();
    write_grid_csv(&mut csv_buf, &r).unwrap();
    let text = String::from_utf8(csv_buf).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "x1,x2,value");
    assert_eq!(lines.len(), 10);
    assert_eq!(lines[2], "0.0,-2.0,1.0");
}
