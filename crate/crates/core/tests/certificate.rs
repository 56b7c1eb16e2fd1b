use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use uaf_core::problems::{make_quadratic, synthetic_logistic, LogisticObjective, QuadraticSpec};
use uaf_core::taylor::logistic_smoothness_constant;
use uaf_core::uaf::{run, ProxyFunction, UafConfig};
use uaf_core::{Objective, Vector};

fn newton_reference(obj: &dyn Objective, x0: &Vector) -> Vector {
    let mut x = x0.clone();
    for _ in 0..100 {
        let g = obj.gradient(&x);
        if g.norm() < 1e-14 {
            break;
        }
        let h = obj.dense_hessian(&x).unwrap();
        let d = h.cholesky().unwrap().solve(&g);
        let f0 = obj.value(&x);
        let mut t = 1.0;
        while obj.value(&(&x - &d * t)) > f0 && t > 1e-10 {
            t *= 0.5;
        }
        x -= d * t;
    }
    x
}

#[test]
fn cubic_certificate_logistic() {
    let data = synthetic_logistic(500, 20, 7, 0.05);
    let l = logistic_smoothness_constant(&data, 2.0, 1.0).unwrap();
    let obj = LogisticObjective::new(data);
    let x0 = Vector::zeros(20);
    let x_ref = newton_reference(&obj, &x0);
    let f_ref = obj.value(&x_ref);
    let mut cfg = UafConfig::new(2, 1.0, l, 3.0);
    cfg.max_iter = 200;
    let out = run(&obj, &cfg, &x0).unwrap();
    let h = ProxyFunction::new(x0.clone(), 3.0).value(&x_ref);
    for r in &out.trace {
        assert!(r.f_value - f_ref <= h / r.a_total + 1e-9, "{r:?} bound {}", h / r.a_total);
    }
    eprintln!("L={l} final gap {}", out.trace.last().unwrap().f_value - f_ref);
}

#[test]
fn cubic_certificate_quadratic() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let d = 20;
    let b = DMatrix::from_fn(d, d, |_, _| rng.random_range(-1.0..1.0));
    let a = &b * b.transpose() + DMatrix::identity(d, d);
    let rhs = Vector::from_fn(d, |_, _| rng.random_range(-1.0..1.0));
    let q = make_quadratic(QuadraticSpec::Dense(a), rhs, true).unwrap();
    let x_ref = q.minimizer().unwrap().clone();
    let f_ref = q.optimal_value().unwrap();
    let x0 = Vector::zeros(d);
    let mut cfg = UafConfig::new(2, 1.0, 1e-3, 3.0);
    cfg.max_iter = 200;
    let out = run(&q, &cfg, &x0).unwrap();
    let h = ProxyFunction::new(x0.clone(), 3.0).value(&x_ref);
    for r in &out.trace {
        assert!(r.f_value - f_ref <= h / r.a_total + 1e-9, "{r:?} bound {}", h / r.a_total);
    }
    eprintln!("final gap {}", out.trace.last().unwrap().f_value - f_ref);
}
