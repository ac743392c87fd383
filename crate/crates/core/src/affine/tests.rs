use super::*;
use crate::catalog;
use crate::expr::parse;

fn names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("x{i}")).collect()
}

fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
}

// Frozen from tests/oracle/curvature_oracle.py (Christoffels derived from the metric).
const SPHERE2_POINT: [f64; 2] = [0.3, -0.2];
const SPHERE2_GAMMA: [f64; 8] = [
    -0.5309734513274337, 0.35398230088495575, 0.35398230088495575, 0.5309734513274337,
    -0.35398230088495575, -0.5309734513274337, -0.5309734513274337, 0.35398230088495575,
];
const SPHERE2_G: f64 = 3.1325867334951836;
const HYP3_POINT: [f64; 3] = [0.2, -0.1, 0.3];
const HYP3_RICCI_DIAG: f64 = -10.81665765278529;
const HYP3_G: f64 = 5.408328826392645;

#[test]
fn sphere_christoffels_match_metric_oracle() {
    let c = catalog::sphere(2).build().unwrap();
    assert!(close(&c.gamma_at(&SPHERE2_POINT).unwrap(), &SPHERE2_GAMMA, 1e-14));
}

#[test]
fn sphere2_curvature_matches_oracle() {
    let c = catalog::sphere(2).build().unwrap();
    let r = c.curvature(&SPHERE2_POINT).unwrap();
    let n = 2;
    for h in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let d = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
                    // δ^k_h g_{jl} − δ^k_j g_{hl}
                    let expect = SPHERE2_G * (d(k, h) * d(j, l) - d(k, j) * d(h, l));
                    assert!((r.get(&[h, j, k, l]) - expect).abs() < 1e-12);
                }
            }
        }
    }
    let ric = c.ricci(&SPHERE2_POINT).unwrap();
    assert!(close(&ric.data, &[SPHERE2_G, 0.0, 0.0, SPHERE2_G], 1e-12));
}

#[test]
fn hyperbolic_ricci_is_minus_two_g() {
    let c = catalog::hyperbolic(3).build().unwrap();
    let ric = c.ricci(&HYP3_POINT).unwrap();
    let g = c.metric_at(&HYP3_POINT).unwrap().unwrap();
    assert!((g[0] - HYP3_G).abs() < 1e-12);
    for i in 0..3 {
        for j in 0..3 {
            let expect = if i == j { HYP3_RICCI_DIAG } else { 0.0 };
            assert!((ric.get(&[i, j]) - expect).abs() < 1e-11);
            assert!((ric.get(&[i, j]) + 2.0 * g[i * 3 + j]).abs() < 1e-11);
        }
    }
}

#[test]
fn flat_curvature_vanishes() {
    let c = catalog::flat(3).build().unwrap();
    assert_eq!(c.curvature(&[0.1, 0.2, 0.3]).unwrap().max_abs(), 0.0);
    assert_eq!(c.ricci(&[0.1, 0.2, 0.3]).unwrap().max_abs(), 0.0);
}

#[test]
fn first_bianchi_and_antisymmetry_on_random_chart() {
    let c = catalog::random_polynomial(3, 11, 2).build().unwrap();
    for p in c.domain().sample(10, 10, 3) {
        let r = c.curvature(&p).unwrap();
        let scale = 1.0 + r.max_abs();
        for h in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    for l in 0..3 {
                        assert_eq!(r.get(&[h, j, k, l]), -r.get(&[j, h, k, l]));
                        let cyc = r.get(&[h, j, k, l]) + r.get(&[j, l, k, h]) + r.get(&[l, h, k, j]);
                        assert!(cyc.abs() <= 1e-9 * scale, "bianchi {cyc}");
                    }
                }
            }
        }
    }
}

#[test]
fn torsion_rejected_and_symmetrized() {
    let co = names(2);
    let mut g = vec![Expr::zero(); 8];
    g[1] = parse("x1", &co).unwrap(); // Γ^1_{12}
    g[2] = parse("-x1", &co).unwrap(); // Γ^1_{21}
    let dom = Domain::cube(2, 1.0);
    assert!(matches!(
        ChartModel::new("t", co.clone(), g.clone(), dom.clone(), None),
        Err(Error::Torsion(_))
    ));
    let c = ChartModel::symmetrize("t", co, g, dom, None).unwrap();
    let v = c.gamma_at(&[0.4, 0.1]).unwrap();
    assert!(v.iter().all(|x| x.abs() < 1e-15));
}

#[test]
fn symmetrize_removes_half_torsion() {
    let co = names(2);
    let spec = catalog::random_polynomial(2, 5, 1);
    let mut raw = spec.gamma_exprs().unwrap();
    raw[1] = raw[1].add(&parse("x2 - 0.5", &co).unwrap());
    let c = ChartModel::symmetrize("s", co, raw.clone(), Domain::cube(2, 1.0), None).unwrap();
    let p = [0.3, 0.7];
    let sym = c.gamma_at(&p).unwrap();
    for k in 0..2 {
        for i in 0..2 {
            for j in 0..2 {
                let a = raw[(k * 2 + i) * 2 + j].eval(&p).unwrap();
                let b = raw[(k * 2 + j) * 2 + i].eval(&p).unwrap();
                let tau = a - b;
                assert!((sym[(k * 2 + i) * 2 + j] - (a - 0.5 * tau)).abs() < 1e-15);
            }
        }
    }
}

#[test]
fn project_change_formula_and_group_action() {
    let flat = catalog::flat(3).build().unwrap();
    let co = names(3);
    let dx1 = OneFormField {
        components: vec![Expr::one(), Expr::zero(), Expr::zero()],
    };
    let g = flat.project_change(&dx1).gamma_at(&[0.0; 3]).unwrap();
    assert_eq!(g[0], 2.0);
    for k in 0..3 {
        for j in 1..3 {
            let expect = if k == j { 1.0 } else { 0.0 };
            assert_eq!(g[(k * 3) * 3 + j], expect);
        }
    }
    let c = catalog::random_polynomial(3, 2, 2).build().unwrap();
    let u1 = OneFormField {
        components: ["x1*x2", "0.3", "sin(x3)"].iter().map(|s| parse(s, &co).unwrap()).collect(),
    };
    let u2 = OneFormField {
        components: ["x3^2", "-x1", "exp(x2)"].iter().map(|s| parse(s, &co).unwrap()).collect(),
    };
    let p = [0.2, -0.4, 0.5];
    let back = c.project_change(&u1).project_change(&u1.neg());
    assert!(close(&back.gamma_at(&p).unwrap(), &c.gamma_at(&p).unwrap(), 1e-14));
    let two = c.project_change(&u1).project_change(&u2);
    let sum = c.project_change(&u1.add(&u2));
    assert!(close(&two.gamma_at(&p).unwrap(), &sum.gamma_at(&p).unwrap(), 1e-14));
}

#[test]
fn normalize_volume_kills_trace() {
    let c = catalog::random_polynomial(3, 4, 2).build().unwrap();
    let (cn, _) = c.normalize_volume();
    for p in c.domain().sample(0, 50, 9) {
        let t = cn.local(&p).unwrap().trace();
        assert!(t.iter().all(|x| x.abs() <= 1e-12), "{t:?}");
    }
    let (cnn, ups) = cn.normalize_volume();
    let p = [0.1, 0.2, 0.3];
    assert!(close(&cnn.gamma_at(&p).unwrap(), &cn.gamma_at(&p).unwrap(), 1e-14));
    assert!(ups.eval(&p).unwrap().iter().all(|x| x.abs() < 1e-14));
    let flat = catalog::flat(3).build().unwrap();
    let (_, ups) = flat.normalize_volume();
    assert!(ups.components.iter().all(Expr::is_zero));
}

#[test]
fn covariant_derivative_of_sphere_metric_vanishes() {
    let spec = catalog::sphere(3);
    let c = spec.build().unwrap();
    let field = TensorField {
        variance: vec![Slot::Down, Slot::Down],
        components: spec.metric_exprs().unwrap().unwrap(),
    };
    for p in c.domain().sample(5, 5, 1) {
        let d = c.covariant_derivative(&field, &p).unwrap();
        assert!(d.max_abs() < 1e-10);
    }
}

#[test]
fn covariant_derivative_is_partial_when_flat_and_obeys_leibniz() {
    let co = names(2);
    let flat = catalog::flat(2).build().unwrap();
    let v = TensorField {
        variance: vec![Slot::Up],
        components: vec![parse("x1*x2", &co).unwrap(), parse("sin(x1)", &co).unwrap()],
    };
    let p = [0.3, 0.4];
    let d = flat.covariant_derivative(&v, &p).unwrap();
    assert!(close(&d.data, &[0.4, 0.3f64.cos(), 0.3, 0.0], 1e-15));

    let c = catalog::random_polynomial(2, 8, 2).build().unwrap();
    let f = parse("exp(x1 - x2)", &co).unwrap();
    let t = TensorField {
        variance: vec![Slot::Up, Slot::Down],
        components: ["x1", "x2^2", "1 + x1*x2", "cos(x2)"]
            .iter()
            .map(|s| parse(s, &co).unwrap())
            .collect(),
    };
    let ft = TensorField {
        variance: t.variance.clone(),
        components: t.components.iter().map(|e| f.mul(e)).collect(),
    };
    let lhs = c.covariant_derivative(&ft, &p).unwrap();
    let rhs = c.covariant_derivative(&t, &p).unwrap();
    let fv = f.eval(&p).unwrap();
    for a in 0..2 {
        let dfa = f.diff(a).eval(&p).unwrap();
        for idx in 0..4 {
            let tv = t.components[idx].eval(&p).unwrap();
            let expect = dfa * tv + fv * rhs.data[a * 4 + idx];
            assert!((lhs.data[a * 4 + idx] - expect).abs() < 1e-9);
        }
    }
}

#[test]
fn flat_geodesic_is_a_line() {
    let c = catalog::flat(3).build().unwrap();
    let g = integrate_geodesic(&c, &[0.0, 0.1, 0.2], &[0.3, -0.2, 0.1], 0.1, 10).unwrap();
    assert!(g.left_domain.is_none());
    let last = g.x.last().unwrap();
    assert!(close(last, &[0.3, -0.1, 0.3], 1e-14));
}

#[test]
fn sphere_geodesic_through_origin_is_a_ray() {
    let c = catalog::sphere(2).build().unwrap();
    let v0 = [0.6, 0.8];
    let g = integrate_geodesic(&c, &[0.0, 0.0], &v0, 0.01, 60).unwrap();
    for x in &g.x {
        let cross = x[0] * v0[1] - x[1] * v0[0];
        assert!(cross.abs() < 1e-12);
    }
}

#[test]
fn geodesic_stops_at_domain_edge() {
    let c = catalog::flat(2).build().unwrap();
    let g = integrate_geodesic(&c, &[0.0, 0.0], &[1.0, 0.0], 0.1, 100).unwrap();
    assert!(g.left_domain.is_some());
    assert!(g.x.iter().all(|x| c.domain().contains(x)));
}

/// Γ-geodesics stay pregeodesics of Γ' = Γ + Υ: ∇'_ψ̇ ψ̇ ∥ ψ̇.
#[test]
fn projective_change_preserves_unparametrised_geodesics() {
    let c = catalog::random_polynomial(3, 21, 2).build().unwrap();
    let co = names(3);
    let ups = OneFormField {
        components: ["x2 - 0.2*x1^2", "0.5*x3", "cos(x1)"]
            .iter()
            .map(|s| parse(s, &co).unwrap())
            .collect(),
    };
    let cp = c.project_change(&ups);
    let g = integrate_geodesic(&c, &[0.0, 0.1, -0.1], &[0.4, 0.2, -0.3], 0.01, 80).unwrap();
    for (x, v) in g.x.iter().zip(&g.v) {
        let acc = geodesic_acceleration(&c, x, v).unwrap();
        let accp = geodesic_acceleration(&cp, x, v).unwrap();
        let a: Vec<f64> = acc.iter().zip(&accp).map(|(a, b)| a - b).collect();
        let vv: f64 = v.iter().map(|x| x * x).sum();
        let av: f64 = a.iter().zip(v).map(|(x, y)| x * y).sum();
        let perp = a.iter().zip(v).fold(0.0f64, |m, (ai, vi)| m.max((ai - av / vv * vi).abs()));
        assert!(perp < 1e-7, "{perp}");
    }
}

/// For ∇'_ψ̇ψ̇ = f ψ̇ the rescaled tangent exp(−∫f) ψ̇ is ∇'-parallel.
#[test]
fn rescaled_pregeodesic_tangent_is_parallel() {
    let c = catalog::random_polynomial(2, 3, 2).build().unwrap();
    let co = names(2);
    let ups = OneFormField {
        components: vec![parse("0.4 + x2", &co).unwrap(), parse("-0.3*x1", &co).unwrap()],
    };
    let cp = c.project_change(&ups);
    let h = 0.005;
    let steps = 100;
    let g = integrate_geodesic(&c, &[0.1, 0.0], &[0.5, 0.3], h, steps).unwrap();
    // f = 2 Υ(ψ̇); trapezoid integral along the samples
    let f: Vec<f64> = g
        .x
        .iter()
        .zip(&g.v)
        .map(|(x, v)| {
            let u = ups.eval(x).unwrap();
            2.0 * (u[0] * v[0] + u[1] * v[1])
        })
        .collect();
    let mut integral = 0.0;
    // transport w along ψ with ∇': ẇ^k = −Γ'^k_{ij} ψ̇^i w^j, RK4 on samples at half steps
    let mut w = g.v[0].clone();
    for s in 0..steps {
        integral += 0.5 * h * (f[s] + f[s + 1]);
        let gm0 = cp.gamma_dir(&g.x[s], &g.v[s]).unwrap();
        let gm1 = cp.gamma_dir(&g.x[s + 1], &g.v[s + 1]).unwrap();
        let gmh: Vec<f64> = gm0.iter().zip(&gm1).map(|(a, b)| 0.5 * (a + b)).collect();
        let rhs = |m: &[f64], w: &[f64]| vec![-(m[0] * w[0] + m[1] * w[1]), -(m[2] * w[0] + m[3] * w[1])];
        let k1 = rhs(&gm0, &w);
        let w2: Vec<f64> = (0..2).map(|i| w[i] + 0.5 * h * k1[i]).collect();
        let k2 = rhs(&gmh, &w2);
        let w3: Vec<f64> = (0..2).map(|i| w[i] + 0.5 * h * k2[i]).collect();
        let k3 = rhs(&gmh, &w3);
        let w4: Vec<f64> = (0..2).map(|i| w[i] + h * k3[i]).collect();
        let k4 = rhs(&gm1, &w4);
        w = (0..2).map(|i| w[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])).collect();
    }
    let scale = (-integral).exp();
    let expect: Vec<f64> = g.v[steps].iter().map(|x| x * scale).collect();
    assert!(close(&w, &expect, 1e-6), "{w:?} vs {expect:?}");
}

#[test]
fn sampling_is_deterministic_and_inside() {
    let d = Domain::new(vec![-1.0, 0.0], vec![1.0, 2.0]).unwrap();
    let a = d.sample(20, 50, 42);
    assert_eq!(a, d.sample(20, 50, 42));
    assert_eq!(a.len(), 70);
    assert!(a.iter().all(|p| d.contains(p)));
    assert_ne!(a, d.sample(20, 50, 43));
}
