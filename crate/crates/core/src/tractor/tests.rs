use super::*;
use crate::affine::{Curve, OneFormField};
use crate::catalog;
use crate::expr::parse;
use crate::linalg::max_abs;

fn curve(xs: &[&str], t1: f64) -> Path {
    let t = vec!["t".to_string()];
    Path::curve(Curve::new(
        xs.iter().map(|s| parse(s, &t).unwrap()).collect(),
        0.0,
        t1,
    ))
}

fn square_loop(center: &[f64], i: usize, j: usize, eps: f64) -> Path {
    let mut pts = Vec::new();
    for (a, b) in [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0), (0.0, 0.0)] {
        let mut p = center.to_vec();
        p[i] += a * eps;
        p[j] += b * eps;
        pts.push(p);
    }
    Path::polyline(&pts)
}

fn co(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("x{i}")).collect()
}

#[test]
fn connection_matrix_is_trace_free() {
    let c = catalog::random_polynomial(3, 1, 2).build().unwrap();
    for p in c.domain().sample(5, 10, 3) {
        let m = connection_matrix(&c, &p, &[0.3, -1.2, 0.7]).unwrap();
        assert!(m.trace().abs() <= 1e-12);
    }
}

#[test]
fn flat_connection_is_nilpotent_soldering() {
    let c = catalog::flat(3).build().unwrap();
    let m = connection_matrix(&c, &[0.2, 0.1, 0.0], &[1.0, 0.0, 0.0]).unwrap();
    let mut expect = DMatrix::zeros(4, 4);
    expect[(0, 3)] = 1.0;
    assert_eq!(m, expect);
    assert_eq!(max_abs(&(&m * &m)), 0.0);
}

#[test]
fn sphere_bottom_row_is_minus_metric() {
    let c = catalog::sphere(3).build().unwrap();
    let p = [0.1, 0.2, -0.3];
    let x = [0.5, -0.2, 1.0];
    let m = connection_matrix(&c, &p, &x).unwrap();
    let g = c.metric_at(&p).unwrap().unwrap();
    for k in 0..3 {
        let gx: f64 = (0..3).map(|a| g[a * 3 + k] * x[a]).sum();
        assert!((m[(3, k)] + gx).abs() < 1e-12);
    }
}

#[test]
fn dual_is_minus_transpose_and_pairing_is_conserved() {
    let c = catalog::random_polynomial(3, 2, 2).build().unwrap();
    let p = [0.1, 0.2, 0.3];
    let x = [1.0, 0.5, -0.5];
    let m = connection_matrix(&c, &p, &x).unwrap();
    assert_eq!(dual_connection_matrix(&c, &p, &x).unwrap(), -m.transpose());

    let path = curve(&["0.1 + 0.3*t", "0.2*t^2 - 0.1", "sin(t)*0.4"], 1.0);
    let cfg = TransportConfig::default();
    let u = transport_frame(&c, &path, cfg).unwrap().matrix;
    let d = transport_dual_frame(&c, &path, cfg).unwrap().matrix;
    // ⟨v(t), Y(t)⟩ = v0ᵀ Dᵀ U Y0 for all v0, Y0
    assert!(max_abs(&(d.transpose() * u - DMatrix::identity(4, 4))) <= 1e-8);
}

#[test]
fn change_splitting_instances() {
    let v = TractorVec::new(vec![1.0, 2.0], 0.5, "g");
    assert_eq!(change_splitting(&v, &[0.0, 0.0], "g"), v);
    let y = TractorVec::new(vec![1.0, 0.0], 0.0, "g");
    let w = change_splitting(&y, &[1.0, 3.0], "g'");
    assert_eq!(w.top, y.top);
    assert_eq!(w.bottom, -1.0);
    let back = change_splitting(&change_splitting(&v, &[0.3, -0.7], "g'"), &[-0.3, 0.7], "g");
    assert_eq!(back, v);
}

#[test]
fn assembled_and_jet_curvature_agree() {
    for (spec, tol) in [
        (catalog::random_polynomial(3, 3, 2), 1e-8),
        (catalog::random_polynomial(2, 4, 2), 1e-8),
        (catalog::sphere(3), 1e-9),
        (catalog::flat(3), 0.0),
    ] {
        let c = spec.build().unwrap();
        let n = c.dim();
        for p in c.domain().sample(3, 3, 5) {
            let inv = Invariants::at(&c, &p).unwrap();
            let jc = JetConnection::new(&c, &p, 1).unwrap();
            for ((a, b), omega) in jc.curvature() {
                let assembled = assembled_curvature(&inv, a, b);
                let scale = 1.0 + max_abs(&assembled);
                assert!(max_abs(&(&omega - &assembled)) <= tol * scale, "{}", c.name());
                let t_part = omega.view((0, n), (n, 1)).amax();
                assert!(t_part <= 1e-9 * scale);
                assert!(omega.trace().abs() <= 1e-12 * scale);
            }
        }
    }
}

#[test]
fn flat_segment_transport_closed_form() {
    let c = catalog::flat(2).build().unwrap();
    let path = Path::polyline(&[vec![0.0, 0.0], vec![1.0, 0.0]]);
    let v = parallel_transport(&c, &path, &TractorVec::new(vec![0.0, 0.0], 1.0, "flat"), Default::default())
        .unwrap();
    // ẏ = −ẋ a, ȧ = 0
    assert!((v.top[0] + 1.0).abs() < 1e-14);
    assert!(v.top[1].abs() < 1e-14);
    assert!((v.bottom - 1.0).abs() < 1e-14);
}

#[test]
fn zero_length_and_reverse_transport() {
    let c = catalog::random_polynomial(3, 6, 2).build().unwrap();
    let p = vec![0.1, 0.1, 0.1];
    let zero = Path::polyline(&[p.clone(), p.clone()]);
    let t = transport_frame(&c, &zero, Default::default()).unwrap();
    assert!(max_abs(&(t.matrix - DMatrix::identity(4, 4))) < 1e-15);

    let path = curve(&["0.1 + 0.5*t", "0.1 - 0.3*t^2", "0.1 + 0.2*sin(3*t)"], 1.0);
    let fwd = transport_frame(&c, &path, Default::default()).unwrap().matrix;
    let bwd = transport_frame(&c, &path.reversed(), Default::default()).unwrap().matrix;
    assert!(max_abs(&(bwd * fwd - DMatrix::identity(4, 4))) <= 1e-7);
}

#[test]
fn transport_commutes_with_change_of_splitting() {
    let n = 3;
    let c = catalog::random_polynomial(n, 7, 2).build().unwrap();
    let ups = OneFormField {
        components: ["0.3*x2 - x1*x3", "0.2 + x1^2", "-0.4*x2*x3"]
            .iter()
            .map(|s| parse(s, &co(n)).unwrap())
            .collect(),
    };
    let cp = c.project_change(&ups);
    let path = curve(&["-0.2 + 0.6*t", "0.3*t^2", "0.1 - 0.4*t"], 1.0);
    let a = path.start().unwrap().unwrap();
    let b = path.end().unwrap().unwrap();
    let u = transport_frame(&c, &path, Default::default()).unwrap().matrix;
    let up = transport_frame(&cp, &path, Default::default()).unwrap().matrix;
    let ga = splitting_gauge(&ups.eval(&a).unwrap());
    let gb = splitting_gauge(&ups.eval(&b).unwrap());
    let lhs = up * &ga;
    let rhs = gb * u;
    assert!(max_abs(&(lhs - rhs)) <= 1e-6);
}

#[test]
fn opposite_gauge_sign_breaks_invariance() {
    let n = 2;
    let c = catalog::random_polynomial(n, 8, 1).build().unwrap();
    let ups = OneFormField {
        components: vec![parse("0.5", &co(n)).unwrap(), parse("x1", &co(n)).unwrap()],
    };
    let cp = c.project_change(&ups);
    let path = curve(&["0.6*t", "0.2 - 0.5*t"], 1.0);
    let a = path.start().unwrap().unwrap();
    let b = path.end().unwrap().unwrap();
    let u = transport_frame(&c, &path, Default::default()).unwrap().matrix;
    let up = transport_frame(&cp, &path, Default::default()).unwrap().matrix;
    let flip = |u: Vec<f64>| splitting_gauge(&u.iter().map(|x| -x).collect::<Vec<_>>());
    let lhs = up * flip(ups.eval(&a).unwrap());
    let rhs = flip(ups.eval(&b).unwrap()) * u;
    assert!(max_abs(&(lhs - rhs)) > 1e-3);
}

#[test]
fn loop_holonomy_flat_sphere_and_random() {
    let cfg = TransportConfig::default();
    let flat = catalog::flat(3).build().unwrap();
    let sq = square_loop(&[0.1, 0.2, 0.0], 0, 2, 0.3);
    let h = loop_holonomy(&flat, &sq, cfg).unwrap().matrix;
    assert!(max_abs(&(h - DMatrix::identity(4, 4))) <= 1e-6);

    let sphere = catalog::sphere(2).build().unwrap();
    let h = loop_holonomy(&sphere, &square_loop(&[0.1, -0.1], 0, 1, 0.2), cfg)
        .unwrap()
        .matrix;
    assert!(max_abs(&(h - DMatrix::identity(3, 3))) <= 1e-6);

    let r = catalog::random_polynomial(3, 9, 2).build().unwrap();
    let h = loop_holonomy(&r, &square_loop(&[0.0, 0.0, 0.0], 1, 2, 0.4), cfg)
        .unwrap()
        .matrix;
    assert!((h.determinant() - 1.0).abs() <= 1e-6);
    assert!(max_abs(&(h - DMatrix::identity(4, 4))) > 1e-4);
}

#[test]
fn open_loop_rejected() {
    let flat = catalog::flat(2).build().unwrap();
    let path = Path::polyline(&[vec![0.0, 0.0], vec![0.1, 0.0]]);
    assert!(matches!(
        loop_holonomy(&flat, &path, Default::default()),
        Err(Error::NotClosed { .. })
    ));
}

#[test]
fn small_loop_log_scales_with_area() {
    let c = catalog::random_polynomial(2, 10, 2).build().unwrap();
    let p = [0.1, -0.2];
    let omega = JetConnection::new(&c, &p, 1).unwrap().curvature()[0].1.clone();
    let mut errs = Vec::new();
    for eps in [0.02, 0.01] {
        // centred square, traversed e1 then e2: H ≈ I − ε² Ω_{12}
        let center = [p[0] - eps / 2.0, p[1] - eps / 2.0];
        let h = loop_holonomy(&c, &square_loop(&center, 0, 1, eps), TransportConfig::default())
            .unwrap()
            .matrix;
        let log = crate::linalg::logm_near_identity(&h).unwrap();
        let err = max_abs(&(log / (eps * eps) + &omega));
        errs.push(err);
    }
    // log H = −ε² Ω + O(ε³): the scaled error shrinks linearly with ε
    assert!(errs[0] < 0.02 && errs[1] < 0.01, "{errs:?}");
    assert!(errs[1] < errs[0] * 0.6, "{errs:?}");
}

#[test]
fn leaving_the_domain_is_reported() {
    let flat = catalog::flat(2).build().unwrap();
    let path = Path::polyline(&[vec![0.0, 0.0], vec![3.0, 0.0]]);
    assert!(matches!(
        transport_frame(&flat, &path, Default::default()),
        Err(Error::LeftDomain { .. })
    ));
}
