use super::*;
use crate::catalog;

#[test]
fn sphere_and_hyperbolic_einstein_chain() {
    let opts = Options::default();
    for (spec, sig) in [
        (catalog::sphere(2), (3, 0)),
        (catalog::sphere(3), (4, 0)),
        (catalog::hyperbolic(3), (1, 3)),
    ] {
        let c = spec.build().unwrap();
        let e = einstein_check(&c, &opts).unwrap();
        assert!(e.accepted, "{e:?}");
        let m = einstein_to_tractor_metric(&c, &opts).unwrap();
        println!("{m:?}");
        assert!(m.accepted, "{m:?}");
        assert_eq!(m.signature, sig);
        let h = nalgebra::DMatrix::from_row_slice(c.dim() + 1, c.dim() + 1, &m.h_base);
        let v = tractor_metric_to_einstein_verify(&c, &h, true, &opts).unwrap();
        println!("{v:?}");
        assert!(v.accepted, "{v:?}");
    }
}

fn standard_omega(n: usize) -> nalgebra::DMatrix<f64> {
    let mut w = nalgebra::DMatrix::zeros(n, n);
    for i in 0..n / 2 {
        w[(2 * i, 2 * i + 1)] = 1.0;
        w[(2 * i + 1, 2 * i)] = -1.0;
    }
    w
}

#[test]
fn flat_contact_closed_form() {
    let c = catalog::flat(3).build().unwrap();
    let r = contact_from_symplectic(&c, &standard_omega(4), &Options::default()).unwrap();
    println!("{:?} {:?} {:?} {:?}", r.dtheta_vs_omega, r.dtheta_reeb, r.vtheta_ratio, r.path_residual);
    assert!(r.accepted);
    for (p, th) in r.points.iter().zip(&r.theta) {
        let expect = [-p[1], p[0], -1.0];
        for k in 0..3 {
            assert!((th[k] - expect[k]).abs() < 1e-9, "{th:?} vs {expect:?}");
        }
    }
}

#[test]
fn sphere_contact() {
    let c = catalog::sphere(3).build().unwrap();
    let r = contact_from_symplectic(&c, &standard_omega(4), &Options::default()).unwrap();
    println!("{:?} {:?} {:?} {:?} {:?}", r.dtheta_vs_omega, r.dtheta_reeb, r.vtheta_ratio, r.path_residual, r.weyl_in_h);
    assert!(r.accepted);
}

fn standard_j(n: usize) -> nalgebra::DMatrix<f64> {
    -standard_omega(n)
}

#[test]
fn flat_complex_closed_form() {
    let c = catalog::flat(3).build().unwrap();
    let r = complex_reduction(&c, &standard_j(4), &Options::default()).unwrap();
    println!("{:?} {:?} {:?} {:?} {:?}", r.square_residual, r.lie_invariance_residual, r.nijenhuis_residual, r.path_residual, r.preserves_h);
    assert!(r.accepted);
    for (p, rf) in r.points.iter().zip(&r.r_field) {
        let (x1, x2, x3) = (p[0], p[1], p[2]);
        let expect = [-x2 - x1 * x3, x1 - x2 * x3, -1.0 - x3 * x3];
        for k in 0..3 {
            assert!((rf[k] - expect[k]).abs() < 1e-9, "{rf:?} vs {expect:?}");
        }
    }
}

#[test]
fn sphere_complex() {
    let c = catalog::sphere(3).build().unwrap();
    let r = complex_reduction(&c, &standard_j(4), &Options::default()).unwrap();
    println!("{:?} {:?} {:?} {:?}", r.square_residual, r.lie_invariance_residual, r.nijenhuis_residual, r.path_residual);
    assert!(r.accepted);
}

fn lift(n: usize, cols: &[usize]) -> nalgebra::DMatrix<f64> {
    let mut k = nalgebra::DMatrix::zeros(n + 1, cols.len());
    for (j, &c) in cols.iter().enumerate() {
        k[(c, j)] = 1.0;
    }
    k
}

#[test]
fn ricci_flat_foliation() {
    let c = catalog::ricci_flat3().build().unwrap();
    let r = foliation_analysis(&c, &lift(3, &[1, 2]), &Options::default()).unwrap();
    println!("{r:?}");
    assert!(r.accepted);
}

#[test]
fn flat_full_foliation() {
    let c = catalog::flat(3).build().unwrap();
    let r = foliation_analysis(&c, &lift(3, &[0, 1, 2]), &Options::default()).unwrap();
    assert!(r.accepted);
    assert!(r.covolume.preserved);
    // a tilted K̃ needs a nonzero splitting change
    let mut k = lift(3, &[0, 1]);
    k[(3, 0)] = 0.5;
    let r = foliation_analysis(&c, &k, &Options::default()).unwrap();
    println!("{r:?}");
    assert!(r.adapting_change > 0.1);
    assert!(r.accepted);
}

#[test]
fn ricci_flat_decomposition() {
    let c = catalog::ricci_flat3().build().unwrap();
    let p = [0.2, -0.1, 0.3];
    let alg = base_algebra(&c, &p).unwrap();
    let r = holonomy_decomposition_check(&c, &p, &alg, 1.0).unwrap();
    println!("{r:?}");
    assert!(r.t_star_row.pass);
    assert_eq!(r.gl_rank, r.affine_rank);
    assert!(r.gl_in_affine.pass && r.affine_in_gl.pass);
    assert!(!r.cone_case);
}

#[test]
fn flat_decomposition_is_empty() {
    let c = catalog::flat(3).build().unwrap();
    let p = [0.0; 3];
    let alg = base_algebra(&c, &p).unwrap();
    let r = holonomy_decomposition_check(&c, &p, &alg, 1.0).unwrap();
    assert_eq!((r.tractor_rank, r.gl_rank, r.affine_rank), (0, 0, 0));
    assert!(r.t_star_row.pass);
}

#[test]
fn einstein_rejections() {
    let opts = Options::default();
    let flat = catalog::flat(3).build().unwrap();
    let r = einstein_check(&flat, &opts).unwrap();
    assert!(!r.accepted);
    assert!(!r.ric_conditioning.pass);
    let random = catalog::random_polynomial(3, 21, 2).build().unwrap();
    assert!(!einstein_check(&random, &opts).unwrap().accepted);
    assert!(matches!(
        einstein_to_tractor_metric(&random, &opts),
        Err(crate::Error::Precondition(_))
    ));
}

#[test]
fn converse_on_flat_with_synthetic_metric() {
    let flat = catalog::flat(3).build().unwrap();
    let h = nalgebra::DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 1.0, 1.0, -1.0]));
    let r = tractor_metric_to_einstein_verify(&flat, &h, false, &Options::default()).unwrap();
    assert!(r.accepted, "{r:?}");
    assert!(r.degenerate_fraction <= DEGENERATE_BUDGET);

    let random = catalog::random_polynomial(3, 22, 2).build().unwrap();
    assert!(matches!(
        tractor_metric_to_einstein_verify(&random, &h, false, &Options::default()),
        Err(crate::Error::Precondition(_))
    ));
}

#[test]
fn structure_preconditions() {
    let opts = Options::default();
    let flat2 = catalog::flat(2).build().unwrap();
    let w = standard_omega(3);
    assert!(matches!(
        contact_from_symplectic(&flat2, &w, &opts),
        Err(crate::Error::Precondition(_))
    ));
    let random = catalog::random_polynomial(3, 23, 2).build().unwrap();
    assert!(matches!(
        complex_reduction(&random, &standard_j(4), &opts),
        Err(crate::Error::Precondition(_))
    ));
    assert!(matches!(
        foliation_analysis(&random, &lift(3, &[1, 2]), &opts),
        Err(crate::Error::Precondition(_))
    ));
    let mut degenerate = standard_omega(4);
    degenerate[(2, 3)] = 0.0;
    degenerate[(3, 2)] = 0.0;
    let flat3 = catalog::flat(3).build().unwrap();
    assert!(contact_from_symplectic(&flat3, &degenerate, &opts).is_err());
}

fn close_within_ten(a: f64, b: f64) -> bool {
    let floor = 1e-12;
    a.max(floor) <= 10.0 * b.max(floor) && b.max(floor) <= 10.0 * a.max(floor)
}

#[test]
fn detections_survive_projective_change() {
    use crate::affine::OneFormField;
    use crate::expr::parse;
    let opts = Options::default();
    let co: Vec<String> = (1..=3).map(|i| format!("x{i}")).collect();
    let ups = OneFormField {
        components: ["0.1*x2", "0.2 - 0.1*x1*x3", "0.05*x1^2"]
            .iter()
            .map(|s| parse(s, &co).unwrap())
            .collect(),
    };
    let base = vec![0.0; 3];
    let at_base = ups.eval(&base).unwrap();

    let sphere = catalog::sphere(3).build().unwrap();
    let changed = sphere.project_change(&ups);
    let w = FiberStructure::Symplectic(standard_omega(4));
    let a = contact_from_symplectic(&sphere, w.matrix(), &opts).unwrap();
    let b = contact_from_symplectic(&changed, w.change_splitting(&at_base).matrix(), &opts).unwrap();
    assert_eq!(a.accepted, b.accepted);
    assert!(close_within_ten(a.dtheta_vs_omega.value, b.dtheta_vs_omega.value) || b.dtheta_vs_omega.value < 1e-12);

    let j = FiberStructure::Complex(standard_j(4));
    let a = complex_reduction(&sphere, j.matrix(), &opts).unwrap();
    let b = complex_reduction(&changed, j.change_splitting(&at_base).matrix(), &opts).unwrap();
    assert_eq!(a.accepted, b.accepted);

    let rf = catalog::ricci_flat3().build().unwrap();
    let changed = rf.project_change(&ups);
    let k = FiberStructure::Subspace(lift(3, &[1, 2]));
    let a = foliation_analysis(&rf, k.matrix(), &opts).unwrap();
    let b = foliation_analysis(&changed, k.change_splitting(&at_base).matrix(), &opts).unwrap();
    assert_eq!(a.accepted, b.accepted, "{b:?}");
    assert!(b.adapting_change > 0.0);
}

