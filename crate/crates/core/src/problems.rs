//! Shipped objectives and LIBSVM-format data ingestion.

use std::fmt::Write as _;
use std::io::BufRead;

use log::warn;
use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::oracle::{L1Norm, Objective, SimpleConvexTerm};
use crate::Vector;

/// One labelled sparse sample. Feature indices are 1-based and strictly
/// increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseRow {
    pub label: f64,
    pub features: Vec<(usize, f64)>,
}

impl SparseRow {
    pub fn dot(&self, x: &Vector) -> f64 {
        self.features.iter().map(|&(i, v)| v * x[i - 1]).sum()
    }

    fn axpy_into(&self, alpha: f64, out: &mut Vector) {
        for &(i, v) in &self.features {
            out[i - 1] += alpha * v;
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SparseDataset {
    /// Number of features (largest index seen when parsed).
    pub dim: usize,
    pub rows: Vec<SparseRow>,
}

impl SparseDataset {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// `(1/n) Σ a_j (a_jᵀ v)`.
    pub fn gram_apply(&self, v: &Vector) -> Vector {
        let mut out = Vector::zeros(self.dim);
        for row in &self.rows {
            row.axpy_into(row.dot(v), &mut out);
        }
        out / self.rows.len().max(1) as f64
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Parses `label idx:val idx:val ...` lines. Blank lines and `#` comments are
/// skipped. Labels in `{0, 1}` are remapped to `{-1, +1}`; anything other
/// than two classes is rejected.
pub fn parse_libsvm<R: BufRead>(reader: R) -> Result<SparseDataset> {
    let mut rows = Vec::new();
    let mut line_numbers = Vec::new();
    let mut dim = 0usize;
    for (lineno, line) in reader.lines().enumerate() {
        let lineno = lineno + 1;
        let line = line.map_err(|e| parse_err(lineno, e.to_string()))?;
        let content = match line.find('#') {
            Some(pos) => &line[..pos],
            None => &line[..],
        };
        let mut tokens = content.split_whitespace();
        let Some(label_tok) = tokens.next() else {
            continue;
        };
        let label: f64 = label_tok
            .parse()
            .map_err(|_| parse_err(lineno, format!("non-numeric label '{label_tok}'")))?;
        let mut features = Vec::new();
        let mut last = 0usize;
        for tok in tokens {
            let (idx, val) = tok
                .split_once(':')
                .ok_or_else(|| parse_err(lineno, format!("missing colon in '{tok}'")))?;
            let idx: usize = idx
                .parse()
                .map_err(|_| parse_err(lineno, format!("non-numeric index '{idx}'")))?;
            let val: f64 = val
                .parse()
                .map_err(|_| parse_err(lineno, format!("non-numeric value '{val}'")))?;
            if idx == 0 {
                return Err(parse_err(lineno, "feature index must be >= 1"));
            }
            if idx <= last {
                return Err(parse_err(lineno, "non-increasing index"));
            }
            last = idx;
            features.push((idx, val));
        }
        dim = dim.max(last);
        rows.push(SparseRow { label, features });
        line_numbers.push(lineno);
    }
    normalize_labels(&mut rows, &line_numbers)?;
    Ok(SparseDataset { dim, rows })
}

pub fn parse_libsvm_str(text: &str) -> Result<SparseDataset> {
    parse_libsvm(text.as_bytes())
}

fn normalize_labels(rows: &mut [SparseRow], line_numbers: &[usize]) -> Result<()> {
    let pm_one = rows.iter().all(|r| r.label == 1.0 || r.label == -1.0);
    if pm_one {
        return Ok(());
    }
    let zero_one = rows.iter().all(|r| r.label == 0.0 || r.label == 1.0);
    if zero_one {
        warn!("remapping 0/1 labels to -1/+1");
        for r in rows.iter_mut() {
            if r.label == 0.0 {
                r.label = -1.0;
            }
        }
        return Ok(());
    }
    let bad = rows
        .iter()
        .position(|r| r.label != 1.0 && r.label != -1.0 && r.label != 0.0)
        .unwrap_or(0);
    Err(parse_err(
        line_numbers[bad],
        format!("label {} is not binary (expected +1/-1 or 0/1)", rows[bad].label),
    ))
}

/// Writes the dataset back in LIBSVM text form.
pub fn serialize_libsvm(data: &SparseDataset) -> String {
    let mut out = String::new();
    for row in &data.rows {
        write!(out, "{}", row.label).unwrap();
        for &(i, v) in &row.features {
            write!(out, " {i}:{v}").unwrap();
        }
        out.push('\n');
    }
    out
}

fn sigmoid(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

/// `log(1 + e^t)` without overflow.
fn softplus(t: f64) -> f64 {
    if t > 0.0 {
        t + (-t).exp().ln_1p()
    } else {
        t.exp().ln_1p()
    }
}

/// `f(x) = (1/n) Σ log(1 + exp(-b_j a_jᵀ x))`.
#[derive(Debug, Clone)]
pub struct LogisticObjective {
    data: SparseDataset,
}

impl LogisticObjective {
    pub fn new(data: SparseDataset) -> Self {
        LogisticObjective { data }
    }

    pub fn dataset(&self) -> &SparseDataset {
        &self.data
    }

    /// Gradient of the `j`-th summand (not divided by `n`).
    pub fn row_gradient(&self, j: usize, x: &Vector) -> Vector {
        let row = &self.data.rows[j];
        let mut g = Vector::zeros(self.data.dim);
        let t = -row.label * row.dot(x);
        row.axpy_into(-row.label * sigmoid(t), &mut g);
        g
    }

    /// Adds `alpha * ∇f_j(x)` into `out` without allocating.
    pub fn add_row_gradient(&self, j: usize, x: &Vector, alpha: f64, out: &mut Vector) {
        let row = &self.data.rows[j];
        let t = -row.label * row.dot(x);
        row.axpy_into(-alpha * row.label * sigmoid(t), out);
    }
}

/// Value, gradient and a Hessian-vector closure of the logistic loss.
pub fn logistic_eval<'a>(
    data: &'a SparseDataset,
    x: &Vector,
) -> Result<(f64, Vector, impl Fn(&Vector) -> Vector + 'a)> {
    if x.len() != data.dim {
        return Err(Error::DimensionMismatch {
            expected: data.dim,
            got: x.len(),
        });
    }
    let obj = LogisticObjective { data: data.clone() };
    let value = obj.smooth_value(x);
    let grad = obj.gradient(x);
    let weights: Vec<f64> = data
        .rows
        .iter()
        .map(|r| {
            let s = sigmoid(r.label * r.dot(x));
            s * (1.0 - s)
        })
        .collect();
    let hv = move |v: &Vector| {
        let mut out = Vector::zeros(data.dim);
        for (row, w) in data.rows.iter().zip(&weights) {
            row.axpy_into(w * row.dot(v), &mut out);
        }
        out / data.rows.len() as f64
    };
    Ok((value, grad, hv))
}

impl Objective for LogisticObjective {
    fn dim(&self) -> usize {
        self.data.dim
    }

    fn smooth_order(&self) -> usize {
        2
    }

    fn smooth_value(&self, x: &Vector) -> f64 {
        let n = self.data.rows.len() as f64;
        self.data
            .rows
            .iter()
            .map(|r| softplus(-r.label * r.dot(x)))
            .sum::<f64>()
            / n
    }

    fn gradient(&self, x: &Vector) -> Vector {
        let mut g = Vector::zeros(self.data.dim);
        for r in &self.data.rows {
            let t = -r.label * r.dot(x);
            r.axpy_into(-r.label * sigmoid(t), &mut g);
        }
        g / self.data.rows.len() as f64
    }

    fn hess_vec(&self, x: &Vector, v: &Vector) -> Result<Vector> {
        let mut out = Vector::zeros(self.data.dim);
        for r in &self.data.rows {
            let s = sigmoid(r.label * r.dot(x));
            r.axpy_into(s * (1.0 - s) * r.dot(v), &mut out);
        }
        Ok(out / self.data.rows.len() as f64)
    }

    fn dense_hessian(&self, x: &Vector) -> Option<DMatrix<f64>> {
        let d = self.data.dim;
        if d > 256 {
            return None;
        }
        let mut h = DMatrix::zeros(d, d);
        for r in &self.data.rows {
            let s = sigmoid(r.label * r.dot(x));
            let w = s * (1.0 - s);
            for &(i, vi) in &r.features {
                for &(j, vj) in &r.features {
                    h[(i - 1, j - 1)] += w * vi * vj;
                }
            }
        }
        Some(h / self.data.rows.len() as f64)
    }
}

/// Seeded synthetic logistic data: Gaussian features with variance `1/d`, a
/// Gaussian ground-truth separator, and labels flipped with probability
/// `flip_prob`.
pub fn synthetic_logistic(n: usize, d: usize, seed: u64, flip_prob: f64) -> SparseDataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let truth: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
    let scale = 1.0 / (d as f64).sqrt();
    let rows = (0..n)
        .map(|_| {
            let features: Vec<(usize, f64)> = (0..d)
                .map(|i| {
                    let v: f64 = rng.sample(StandardNormal);
                    (i + 1, v * scale)
                })
                .collect();
            let margin: f64 = features.iter().map(|&(i, v)| v * truth[i - 1]).sum();
            let mut label = if margin >= 0.0 { 1.0 } else { -1.0 };
            if rng.random::<f64>() < flip_prob {
                label = -label;
            }
            SparseRow { label, features }
        })
        .collect();
    SparseDataset { dim: d, rows }
}

/// Hessian description for [`make_quadratic`].
#[derive(Debug, Clone)]
pub enum QuadraticSpec {
    Diagonal(Vec<f64>),
    Dense(DMatrix<f64>),
}

/// `f(x) = ½ xᵀQx - bᵀx` with `Q ⪰ 0`.
#[derive(Debug, Clone)]
pub struct Quadratic {
    q: DMatrix<f64>,
    b: Vector,
    eigen_min: f64,
    eigen_max: f64,
    minimizer: Option<Vector>,
    holder_constant: f64,
}

/// Default Hölder constant reported for the (zero) third derivative.
pub const QUADRATIC_DEFAULT_HOLDER: f64 = 1e-3;

impl Quadratic {
    /// Gradient Lipschitz constant `λ_max(Q)`.
    pub fn gradient_lipschitz(&self) -> f64 {
        self.eigen_max
    }

    pub fn smallest_eigenvalue(&self) -> f64 {
        self.eigen_min
    }

    /// Any positive number is a valid Hölder constant for the constant
    /// Hessian; this returns the configured one.
    pub fn hessian_holder_constant(&self) -> f64 {
        self.holder_constant
    }

    pub fn with_holder_constant(mut self, l: f64) -> Self {
        self.holder_constant = l;
        self
    }

    pub fn minimizer(&self) -> Option<&Vector> {
        self.minimizer.as_ref()
    }

    pub fn optimal_value(&self) -> Option<f64> {
        self.minimizer.as_ref().map(|x| self.smooth_value(x))
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.q
    }
}

/// Builds `½ xᵀQx - bᵀx`; indefinite `Q` is rejected. When `Q ≻ 0` the
/// minimizer is solved for directly (and always when `x_star_known`).
pub fn make_quadratic(spec: QuadraticSpec, b: Vector, x_star_known: bool) -> Result<Quadratic> {
    let q = match spec {
        QuadraticSpec::Diagonal(diag) => DMatrix::from_diagonal(&Vector::from_vec(diag)),
        QuadraticSpec::Dense(m) => {
            if !m.is_square() {
                return Err(Error::InvalidConfig("Q must be square".into()));
            }
            let asym = (&m - m.transpose()).amax();
            if asym > 1e-12 * m.amax().max(1.0) {
                return Err(Error::InvalidConfig("Q must be symmetric".into()));
            }
            m
        }
    };
    if q.nrows() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: q.nrows(),
            got: b.len(),
        });
    }
    let eig = SymmetricEigen::new(q.clone());
    let eigen_min = eig.eigenvalues.min();
    let eigen_max = eig.eigenvalues.max();
    if eigen_min < -1e-12 * eigen_max.abs().max(1.0) {
        return Err(Error::Indefinite(eigen_min));
    }
    let minimizer = if eigen_min > 0.0 || x_star_known {
        q.clone().cholesky().map(|c| c.solve(&b))
    } else {
        None
    };
    if x_star_known && minimizer.is_none() {
        return Err(Error::InvalidConfig(
            "minimizer requested but Q is singular".into(),
        ));
    }
    Ok(Quadratic {
        q,
        b,
        eigen_min,
        eigen_max,
        minimizer,
        holder_constant: QUADRATIC_DEFAULT_HOLDER,
    })
}

/// `½ xᵀQx - bᵀx` with `Q = U diag(λ) Uᵀ`: eigenvalues evenly spaced in
/// `[1, cond]`, `U` the orthogonal factor of a Gaussian matrix, Gaussian `b`.
pub fn random_spd_quadratic(dim: usize, cond: f64, seed: u64) -> Result<Quadratic> {
    if dim == 0 || !(cond >= 1.0) {
        return Err(Error::InvalidConfig(format!("need dim >= 1 and cond >= 1, got {dim}, {cond}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = DMatrix::from_fn(dim, dim, |_, _| rng.sample::<f64, _>(StandardNormal));
    let u = g.qr().q();
    let eig = Vector::from_fn(dim, |i, _| {
        if dim == 1 {
            1.0
        } else {
            1.0 + (cond - 1.0) * i as f64 / (dim - 1) as f64
        }
    });
    let q = &u * DMatrix::from_diagonal(&eig) * u.transpose();
    let q = (&q + q.transpose()) * 0.5;
    let b = Vector::from_fn(dim, |_, _| rng.sample(StandardNormal));
    make_quadratic(QuadraticSpec::Dense(q), b, true)
}

impl Objective for Quadratic {
    fn dim(&self) -> usize {
        self.b.len()
    }

    fn smooth_order(&self) -> usize {
        2
    }

    fn smooth_value(&self, x: &Vector) -> f64 {
        0.5 * x.dot(&(&self.q * x)) - self.b.dot(x)
    }

    fn gradient(&self, x: &Vector) -> Vector {
        &self.q * x - &self.b
    }

    fn hess_vec(&self, _x: &Vector, v: &Vector) -> Result<Vector> {
        Ok(&self.q * v)
    }

    fn dense_hessian(&self, _x: &Vector) -> Option<DMatrix<f64>> {
        Some(self.q.clone())
    }
}

/// `g(x) = ½||Ax - b||²`, `l(x) = reg ||x||_1`.
#[derive(Debug, Clone)]
pub struct L1LeastSquares {
    a: DMatrix<f64>,
    b: Vector,
    l1: L1Norm,
}

impl L1LeastSquares {
    pub fn gradient_lipschitz(&self) -> f64 {
        let ata = self.a.transpose() * &self.a;
        SymmetricEigen::new(ata).eigenvalues.max()
    }

    pub fn reg(&self) -> f64 {
        self.l1.weight
    }
}

pub fn make_l1_least_squares(a: DMatrix<f64>, b: Vector, reg: f64) -> Result<L1LeastSquares> {
    if !(reg >= 0.0) {
        return Err(Error::InvalidConfig("reg must be >= 0".into()));
    }
    if a.nrows() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            got: b.len(),
        });
    }
    Ok(L1LeastSquares {
        a,
        b,
        l1: L1Norm::new(reg),
    })
}

/// Gaussian design scaled by `1/√samples`, a ground truth with a quarter of
/// its entries nonzero, and observations with noise of standard deviation
/// 0.1.
pub fn synthetic_l1_least_squares(samples: usize, dim: usize, reg: f64, seed: u64) -> Result<L1LeastSquares> {
    if samples == 0 || dim == 0 {
        return Err(Error::EmptyDataset);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = 1.0 / (samples as f64).sqrt();
    let a = DMatrix::from_fn(samples, dim, |_, _| scale * rng.sample::<f64, _>(StandardNormal));
    let truth = Vector::from_fn(dim, |i, _| if i % 4 == 0 { rng.sample(StandardNormal) } else { 0.0 });
    let noise = Vector::from_fn(samples, |_, _| 0.1 * rng.sample::<f64, _>(StandardNormal));
    let b = &a * truth + noise;
    make_l1_least_squares(a, b, reg)
}

impl Objective for L1LeastSquares {
    fn dim(&self) -> usize {
        self.a.ncols()
    }

    fn smooth_order(&self) -> usize {
        2
    }

    fn smooth_value(&self, x: &Vector) -> f64 {
        0.5 * (&self.a * x - &self.b).norm_squared()
    }

    fn gradient(&self, x: &Vector) -> Vector {
        self.a.transpose() * (&self.a * x - &self.b)
    }

    fn hess_vec(&self, _x: &Vector, v: &Vector) -> Result<Vector> {
        Ok(self.a.transpose() * (&self.a * v))
    }

    fn dense_hessian(&self, _x: &Vector) -> Option<DMatrix<f64>> {
        Some(self.a.transpose() * &self.a)
    }

    fn composite(&self) -> Option<&dyn SimpleConvexTerm> {
        Some(&self.l1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{check_gradient, check_hess_vec};

    #[test]
    fn parses_documented_example() {
        let d = parse_libsvm_str("1 1:0.5 3:-2\n-1 2:1").unwrap();
        assert_eq!(d.dim, 3);
        assert_eq!(
            d.rows,
            vec![
                SparseRow { label: 1.0, features: vec![(1, 0.5), (3, -2.0)] },
                SparseRow { label: -1.0, features: vec![(2, 1.0)] },
            ]
        );
    }

    #[test]
    fn rejects_non_increasing_index() {
        match parse_libsvm_str("+1 2:1 1:3") {
            Err(Error::Parse { line, message }) => {
                assert_eq!(line, 1);
                assert!(message.contains("non-increasing index"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_missing_colon_and_bad_numbers_with_line() {
        let cases = [
            ("1 1:1\n\n-1 2 3:1\n", 3, "missing colon"),
            ("# header\n1 1:x\n", 2, "non-numeric value"),
            ("1 a:1\n", 1, "non-numeric index"),
            ("1 1:1\nfoo 1:1\n", 2, "non-numeric label"),
            ("1 0:1\n", 1, ">= 1"),
            ("1 1:1\n-1 2:1\n3 1:1\n", 3, "not binary"),
        ];
        for (text, line_no, needle) in cases {
            match parse_libsvm_str(text) {
                Err(Error::Parse { line, message }) => {
                    assert_eq!(line, line_no, "{text:?}");
                    assert!(message.contains(needle), "{message}");
                }
                other => panic!("{text:?}: unexpected {other:?}"),
            }
        }
    }

    #[test]
    fn zero_one_labels_are_remapped() {
        let d = parse_libsvm_str("0 1:1\n1 1:2 # trailing comment\n").unwrap();
        assert_eq!(d.rows[0].label, -1.0);
        assert_eq!(d.rows[1].label, 1.0);
    }

    #[test]
    fn logistic_single_row_at_zero() {
        let data = parse_libsvm_str("1 1:1\n").unwrap();
        let data = SparseDataset { dim: 2, ..data };
        let (v, g, _) = logistic_eval(&data, &Vector::zeros(2)).unwrap();
        assert_eq!(v, std::f64::consts::LN_2);
        assert_eq!(g, Vector::from_vec(vec![-0.5, 0.0]));
        assert!(check_gradient(&LogisticObjective::new(data), &Vector::zeros(2), 1e-5).unwrap());
    }

    #[test]
    fn logistic_saturation_is_stable() {
        let data = parse_libsvm_str("1 1:1\n").unwrap();
        let obj = LogisticObjective::new(data);
        let v = obj.value(&Vector::from_element(1, 40.0));
        assert!((v - (-40.0f64).exp()).abs() < 1e-30);
        let v = obj.value(&Vector::from_element(1, -800.0));
        assert_eq!(v, 800.0);
    }

    #[test]
    fn logistic_hess_vec_matches_fd() {
        let data = synthetic_logistic(30, 5, 7, 0.1);
        let obj = LogisticObjective::new(data.clone());
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let x = Vector::from_fn(5, |_, _| rng.random_range(-2.0..2.0));
            let v = Vector::from_fn(5, |_, _| rng.random_range(-1.0..1.0));
            assert!(check_hess_vec(&obj, &x, &v, 1e-4).unwrap());
            let (_, _, hv) = logistic_eval(&data, &x).unwrap();
            assert!((hv(&v) - obj.hess_vec(&x, &v).unwrap()).norm() < 1e-14);
            let dense = obj.dense_hessian(&x).unwrap();
            assert!((dense * &v - obj.hess_vec(&x, &v).unwrap()).norm() < 1e-13);
        }
    }

    #[test]
    fn logistic_value_at_origin_is_ln2() {
        let obj = LogisticObjective::new(synthetic_logistic(50, 4, 1, 0.1));
        assert!((obj.value(&Vector::zeros(4)) - std::f64::consts::LN_2).abs() < 1e-15);
    }

    #[test]
    fn identity_quadratic() {
        let q = make_quadratic(QuadraticSpec::Diagonal(vec![1.0; 3]), Vector::zeros(3), true).unwrap();
        assert_eq!(q.minimizer().unwrap(), &Vector::zeros(3));
        assert_eq!(q.optimal_value().unwrap(), 0.0);
    }

    #[test]
    fn diagonal_quadratic_minimizer() {
        let q = make_quadratic(
            QuadraticSpec::Diagonal(vec![1.0, 10.0]),
            Vector::from_vec(vec![1.0, 1.0]),
            true,
        )
        .unwrap();
        let x = q.minimizer().unwrap();
        assert!((x[0] - 1.0).abs() < 1e-15 && (x[1] - 0.1).abs() < 1e-15);
        assert!((q.optimal_value().unwrap() + 0.55).abs() < 1e-15);
        assert_eq!(q.gradient_lipschitz(), 10.0);
    }

    #[test]
    fn indefinite_quadratic_rejected() {
        assert!(matches!(
            make_quadratic(QuadraticSpec::Diagonal(vec![1.0, -1.0]), Vector::zeros(2), false),
            Err(Error::Indefinite(_))
        ));
    }

    #[test]
    fn l1_least_squares_prox() {
        let p = make_l1_least_squares(DMatrix::identity(2, 2), Vector::from_vec(vec![2.0, 0.0]), 1.0).unwrap();
        let l = p.composite().unwrap();
        assert_eq!(l.prox(&Vector::from_vec(vec![2.0, 0.0]), 1.0), Vector::from_vec(vec![1.0, 0.0]));
        let p0 = make_l1_least_squares(DMatrix::identity(2, 2), Vector::from_vec(vec![2.0, 0.0]), 0.0).unwrap();
        let y = Vector::from_vec(vec![0.3, -4.0]);
        assert_eq!(p0.composite().unwrap().prox(&y, 7.0), y);
    }

    #[test]
    fn random_spd_quadratic_spectrum() {
        let q = random_spd_quadratic(8, 50.0, 4).unwrap();
        assert!((q.smallest_eigenvalue() - 1.0).abs() < 1e-10);
        assert!((q.gradient_lipschitz() - 50.0).abs() < 1e-9);
        let again = random_spd_quadratic(8, 50.0, 4).unwrap();
        assert_eq!(q.matrix(), again.matrix());
        let x = q.minimizer().unwrap();
        assert!(q.gradient(x).norm() < 1e-10);
    }

    #[test]
    fn synthetic_lasso_is_seeded() {
        let a = synthetic_l1_least_squares(30, 12, 0.1, 2).unwrap();
        let b = synthetic_l1_least_squares(30, 12, 0.1, 2).unwrap();
        let x = Vector::from_element(12, 0.3);
        assert_eq!(a.value(&x), b.value(&x));
        assert_eq!(a.reg(), 0.1);
    }
}
