//! Numeric checkers for the auxiliary inequalities behind the rate
//! analysis, plus generators of random cases that satisfy each hypothesis
//! by construction.

use rand::Rng;

/// Outcome of checking one implication on one case.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Violated,
    /// The hypothesis does not hold, so the case says nothing.
    Inapplicable,
}

impl Verdict {
    fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Holds
        } else {
            Verdict::Violated
        }
    }
}

/// Relative slack for conclusions, absorbing round-off in the powers.
const CONCLUSION_SLACK: f64 = 1e-9;

fn geq(lhs: f64, rhs: f64) -> bool {
    lhs >= rhs - CONCLUSION_SLACK * rhs.abs().max(lhs.abs())
}

/// `b_0 = 0, b_1, …, b_n` with exponent `ρ`, constant `C` and (second
/// sequence lemma only) `δ`.
#[derive(Debug, Clone)]
pub struct SequenceCase {
    pub b: Vec<f64>,
    pub rho: f64,
    pub c: f64,
    pub delta: f64,
}

fn sequence_shape_ok(case: &SequenceCase) -> bool {
    case.b.first() == Some(&0.0)
        && case.b.len() >= 2
        && case.b[1..].iter().all(|&x| x > 0.0 && x.is_finite())
        && case.rho >= 1.0
        && case.c > 0.0
}

/// `(b_k - b_{k-1})^ρ >= C b_k^{ρ-1}` for all `k` implies
/// `b_k >= C (k/ρ)^ρ`.
pub fn check_seq_lemma_1(case: &SequenceCase) -> Verdict {
    if !sequence_shape_ok(case) {
        return Verdict::Inapplicable;
    }
    let (rho, c) = (case.rho, case.c);
    for k in 1..case.b.len() {
        let step = case.b[k] - case.b[k - 1];
        if !(step > 0.0) || step.powf(rho) < c * case.b[k].powf(rho - 1.0) {
            return Verdict::Inapplicable;
        }
    }
    Verdict::from_bool((1..case.b.len()).all(|k| geq(case.b[k], c * (k as f64 / rho).powf(rho))))
}

/// `Σ_{i<=k} (b_i^{ρ-1} / (b_i - b_{i-1})^ρ)^δ <= C` for all `k` implies
/// `b_k >= C^{-1/δ} (k/ρ)^{ρ+1/δ}`.
pub fn check_seq_lemma_2(case: &SequenceCase) -> Verdict {
    if !sequence_shape_ok(case) || !(case.delta > 0.0) {
        return Verdict::Inapplicable;
    }
    let (rho, c, delta) = (case.rho, case.c, case.delta);
    let mut sum = 0.0;
    for k in 1..case.b.len() {
        let step = case.b[k] - case.b[k - 1];
        if !(step > 0.0) {
            return Verdict::Inapplicable;
        }
        sum += (case.b[k].powf(rho - 1.0) / step.powf(rho)).powf(delta);
        if sum > c {
            return Verdict::Inapplicable;
        }
    }
    let ok = (1..case.b.len()).all(|k| {
        geq(case.b[k], c.powf(-1.0 / delta) * (k as f64 / rho).powf(rho + 1.0 / delta))
    });
    Verdict::from_bool(ok)
}

/// `|st| <= (σ/q) t^q + ((q-1)/q) (1/σ)^{1/(q-1)} s^{q/(q-1)}` for
/// `s, t >= 0`, `q >= 2`, `σ > 0`.
pub fn check_young_type(s: f64, t: f64, q: f64, sigma: f64) -> Verdict {
    if !(s >= 0.0 && t >= 0.0 && q >= 2.0 && sigma > 0.0) {
        return Verdict::Inapplicable;
    }
    let rhs = sigma / q * t.powf(q) + (q - 1.0) / q * (1.0 / sigma).powf(1.0 / (q - 1.0)) * s.powf(q / (q - 1.0));
    Verdict::from_bool(geq(rhs, (s * t).abs()))
}

/// For positive `B_1, …, B_n`: `B_k^υ >= c Σ_{i<=k} B_i` for all `k`
/// implies `B_k >= ((υ-1)/υ c k)^{1/(υ-1)}`.
pub fn check_bjl(b: &[f64], c: f64, upsilon: f64) -> Verdict {
    if b.is_empty() || !(c > 0.0) || !(upsilon > 1.0) || b.iter().any(|&x| !(x > 0.0) || !x.is_finite()) {
        return Verdict::Inapplicable;
    }
    let mut sum = 0.0;
    for &bk in b {
        sum += bk;
        if bk.powf(upsilon) < c * sum {
            return Verdict::Inapplicable;
        }
    }
    let ok = b.iter().enumerate().all(|(i, &bk)| {
        let k = (i + 1) as f64;
        geq(bk, ((upsilon - 1.0) / upsilon * c * k).powf(1.0 / (upsilon - 1.0)))
    });
    Verdict::from_bool(ok)
}

/// Smallest `x >= lo` with `pred(x)` for a monotone predicate, returned as
/// the upper end of the final bracket so `pred` holds exactly.
fn least_satisfying(mut lo: f64, pred: impl Fn(f64) -> bool) -> f64 {
    let mut hi = lo.max(1e-12) * 2.0;
    while !pred(hi) {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

fn log_uniform<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    (rng.random_range(lo.ln()..hi.ln())).exp()
}

/// A sequence satisfying the first lemma's hypothesis: each increment is
/// the least admissible one times a random factor in `[1, 1.5)`, with a
/// quarter of the cases kept tight.
pub fn random_seq_case_1<R: Rng>(rng: &mut R, len: usize) -> SequenceCase {
    let rho = rng.random_range(1.0..4.0);
    let c = log_uniform(rng, 1e-2, 1e2);
    let tight = rng.random_bool(0.25);
    let mut b = vec![0.0];
    for _ in 0..len {
        let prev = *b.last().expect("non-empty");
        let least = least_satisfying(0.0, |d| d.powf(rho) >= c * (prev + d).powf(rho - 1.0));
        let factor = if tight { 1.0 } else { rng.random_range(1.0..1.5) };
        let mut next = prev + least * factor;
        // re-check with the increment as the checker will see it
        while (next - prev).powf(rho) < c * next.powf(rho - 1.0) {
            next = next.next_up();
        }
        b.push(next);
    }
    SequenceCase { b, rho, c, delta: 1.0 }
}

/// An increasing positive sequence with `C` set to (a random multiple of)
/// the largest partial sum, so the second lemma's hypothesis holds.
pub fn random_seq_case_2<R: Rng>(rng: &mut R, len: usize) -> SequenceCase {
    let rho = rng.random_range(1.0..4.0);
    let delta = log_uniform(rng, 0.1, 5.0);
    let mut b = vec![0.0];
    for _ in 0..len {
        let prev = *b.last().expect("non-empty");
        b.push(prev + log_uniform(rng, 1e-2, 1e2));
    }
    let mut sum = 0.0;
    for k in 1..b.len() {
        let step: f64 = b[k] - b[k - 1];
        let term: f64 = b[k].powf(rho - 1.0) / step.powf(rho);
        sum += term.powf(delta);
    }
    let c = sum * rng.random_range(1.0..2.0);
    SequenceCase { b, rho, c, delta }
}

/// Random `(s, t, q, σ)` in the inequality's domain.
pub fn random_young_case<R: Rng>(rng: &mut R) -> (f64, f64, f64, f64) {
    let s = if rng.random_bool(0.05) { 0.0 } else { log_uniform(rng, 1e-3, 1e2) };
    let t = if rng.random_bool(0.05) { 0.0 } else { log_uniform(rng, 1e-3, 1e2) };
    (s, t, rng.random_range(2.0..6.0), log_uniform(rng, 1e-2, 1e2))
}

/// A positive sequence built forward with each `B_k` at least the root of
/// `B^υ = c (S_{k-1} + B)`.
pub fn random_bjl_case<R: Rng>(rng: &mut R, len: usize) -> (Vec<f64>, f64, f64) {
    let upsilon = rng.random_range(1.2..4.0);
    let c = log_uniform(rng, 1e-2, 1e2);
    let tight = rng.random_bool(0.25);
    let mut b = Vec::with_capacity(len);
    let mut sum = 0.0;
    for _ in 0..len.max(1) {
        let least = least_satisfying(0.0, |x| x.powf(upsilon) >= c * (sum + x));
        let factor = if tight { 1.0 } else { rng.random_range(1.0..1.5) };
        let mut bk = least * factor;
        while bk.powf(upsilon) < c * (sum + bk) {
            bk = bk.next_up();
        }
        sum += bk;
        b.push(bk);
    }
    (b, c, upsilon)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn seq_lemma_1_power_sequence() {
        let b: Vec<f64> = (0..=1000).map(|k| (k as f64).powi(2)).collect();
        let case = SequenceCase { b, rho: 2.0, c: 1.0, delta: 1.0 };
        assert_eq!(check_seq_lemma_1(&case), Verdict::Holds);
    }

    #[test]
    fn seq_lemma_1_gate() {
        let case = SequenceCase { b: vec![0.0, 1.0, 1.01], rho: 2.0, c: 1.0, delta: 1.0 };
        assert_eq!(check_seq_lemma_1(&case), Verdict::Inapplicable);
    }

    #[test]
    fn seq_lemma_2_power_sequence() {
        let b: Vec<f64> = (0..=1000).map(|k| (k as f64).powi(3)).collect();
        let mut sum: f64 = 0.0;
        let mut sup: f64 = 0.0;
        for k in 1..b.len() {
            sum += b[k] / (b[k] - b[k - 1]).powi(2);
            sup = sup.max(sum);
        }
        let case = SequenceCase { b, rho: 2.0, c: sup, delta: 1.0 };
        assert_eq!(check_seq_lemma_2(&case), Verdict::Holds);
    }

    #[test]
    fn seq_lemma_2_gate() {
        let b: Vec<f64> = (0..=10).map(|k| k as f64).collect();
        let case = SequenceCase { b, rho: 2.0, c: 1e-3, delta: 1.0 };
        assert_eq!(check_seq_lemma_2(&case), Verdict::Inapplicable);
    }

    #[test]
    fn young_cases() {
        assert_eq!(check_young_type(1.0, 1.0, 2.0, 1.0), Verdict::Holds);
        assert_eq!(check_young_type(3.0, 0.0, 2.5, 0.1), Verdict::Holds);
        assert_eq!(check_young_type(-1.0, 1.0, 2.0, 1.0), Verdict::Inapplicable);
    }

    #[test]
    fn bjl_cases() {
        // B_k = k with c = 1/2... hypothesis k^2 >= c k(k+1)/2 needs c <= 2k/(k+1), so c = 1 works
        let b: Vec<f64> = (1..=100).map(|k| k as f64).collect();
        assert_eq!(check_bjl(&b, 1.0, 2.0), Verdict::Holds);
        assert_eq!(check_bjl(&[0.1, 0.1], 1.0, 2.0), Verdict::Inapplicable);
    }

    #[test]
    fn generators_are_admissible() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..200 {
            assert_eq!(check_seq_lemma_1(&random_seq_case_1(&mut rng, 20)), Verdict::Holds);
            assert_eq!(check_seq_lemma_2(&random_seq_case_2(&mut rng, 20)), Verdict::Holds);
            let (b, c, u) = random_bjl_case(&mut rng, 20);
            assert_eq!(check_bjl(&b, c, u), Verdict::Holds);
        }
    }
}
