//! Composite Gauss-Legendre quadrature in binary floating point.
//!
//! Estimates are formed with 16, 32 and 64 nodes on one panel and then with
//! 64-node rules on 2, 4, 8, ... panels; iteration stops once two successive
//! estimates agree to the tolerance. Integrable power singularities at an
//! endpoint are removed by the substitution `x = lo + (mid - lo) t^d`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::scalar::{Float, Scalar};

/// Largest number of nodes spent on one integral.
pub const MAX_NODES: usize = 1 << 16;

/// Extra bits carried by nodes and integrand evaluations.
const GUARD_BITS: usize = 32;

#[derive(Debug)]
struct Rule {
    nodes: Vec<Float>,
    weights: Vec<Float>,
}

fn rule_cache() -> &'static Mutex<HashMap<(usize, usize), Arc<Rule>>> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, usize), Arc<Rule>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn rule(n: usize, precision: usize) -> Arc<Rule> {
    if let Some(r) = rule_cache().lock().unwrap().get(&(n, precision)) {
        return r.clone();
    }
    let r = Arc::new(legendre_rule(n, precision));
    rule_cache()
        .lock()
        .unwrap()
        .entry((n, precision))
        .or_insert(r)
        .clone()
}

// P_n(x) and P_{n-1}(x) by the three-term recurrence.
fn legendre_pair(n: usize, x: &Float, p: usize) -> (Float, Float) {
    let mut prev = Float::from_i64(1, p);
    let mut cur = x.clone();
    for k in 1..n {
        let k = k as i64;
        let next = (Float::from_i64(2 * k + 1, p) * x.clone() * cur.clone()
            - Float::from_i64(k, p) * prev)
            / Float::from_i64(k + 1, p);
        prev = cur;
        cur = next;
    }
    (cur, prev)
}

fn legendre_rule(n: usize, p: usize) -> Rule {
    assert!(n >= 2 && n.is_multiple_of(2), "even node counts only");
    let one = Float::from_i64(1, p);
    let eps = Float::pow2(-(p as isize) + 4, p);
    let nf = Float::from_i64(n as i64, p);
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for i in 0..n / 2 {
        let guess = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut x = Float::from_f64(guess, p);
        let mut dp = one.clone();
        for _ in 0..12 {
            let (pn, pm) = legendre_pair(n, &x, p);
            dp = nf.clone() * (x.clone() * pn.clone() - pm) / (x.clone() * x.clone() - one.clone());
            let dx = pn / dp.clone();
            x = x - dx.clone();
            if dx.magnitude() < eps {
                let (pn, pm) = legendre_pair(n, &x, p);
                dp = nf.clone() * (x.clone() * pn - pm) / (x.clone() * x.clone() - one.clone());
                break;
            }
        }
        let w = Float::from_i64(2, p) / ((one.clone() - x.clone() * x.clone()) * dp.clone() * dp);
        nodes.push(x.clone());
        weights.push(w.clone());
        nodes.push(-x);
        weights.push(w);
    }
    Rule { nodes, weights }
}

/// Outcome of one adaptive integration.
#[derive(Clone, Debug)]
pub struct QuadResult {
    pub value: Float,
    /// Difference of the last two estimates.
    pub error_estimate: f64,
    pub nodes: usize,
}

#[derive(Clone, Copy, Debug)]
pub struct QuadOptions {
    pub precision: usize,
    /// Relative tolerance; defaults to `2^-(precision - 28)`.
    pub tolerance: Option<f64>,
    pub max_nodes: usize,
    /// Grading exponent at the lower endpoint (1 = none).
    pub grade_lo: usize,
    pub grade_hi: usize,
}

impl QuadOptions {
    pub fn new(precision: usize) -> Self {
        QuadOptions {
            precision,
            tolerance: None,
            max_nodes: MAX_NODES,
            grade_lo: 1,
            grade_hi: 1,
        }
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tolerance = Some(tol);
        self
    }

    pub fn with_grading(mut self, lo: usize, hi: usize) -> Self {
        self.grade_lo = lo.max(1);
        self.grade_hi = hi.max(1);
        self
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
            .unwrap_or_else(|| 2f64.powi(-(self.precision as i32 - 28)))
    }
}

/// Integrate `f` over `[lo, hi]`.
pub fn integrate(
    lo: &Float,
    hi: &Float,
    f: &(dyn Fn(&Float) -> Result<Float> + Sync),
    opts: &QuadOptions,
) -> Result<QuadResult> {
    let p = opts.precision + GUARD_BITS;
    let lo = lo.with_precision(p);
    let hi = hi.with_precision(p);
    if opts.grade_lo <= 1 && opts.grade_hi <= 1 {
        let mut r = adaptive(&lo, &hi, f, opts, p)?;
        r.value = r.value.with_precision(opts.precision);
        return Ok(r);
    }
    let mid = (lo.clone() + hi.clone()) / Float::from_i64(2, p);
    // x = lo + (mid - lo) t^d on [0,1], and mirrored at hi
    let left = graded(lo.clone(), mid.clone() - lo.clone(), opts.grade_lo, f, p);
    let right = graded(hi.clone(), mid.clone() - hi.clone(), opts.grade_hi, f, p);
    let zero = Float::from_i64(0, p);
    let one = Float::from_i64(1, p);
    let a = adaptive(&zero, &one, &left, opts, p)?;
    let b = adaptive(&zero, &one, &right, opts, p)?;
    // the right-hand map runs from hi down to mid
    let value = (a.value - b.value).with_precision(opts.precision);
    Ok(QuadResult {
        value,
        error_estimate: a.error_estimate + b.error_estimate,
        nodes: a.nodes + b.nodes,
    })
}

fn graded<'a>(
    base: Float,
    span: Float,
    d: usize,
    f: &'a (dyn Fn(&Float) -> Result<Float> + Sync),
    p: usize,
) -> impl Fn(&Float) -> Result<Float> + Sync + 'a {
    let d = d.max(1);
    let scale = span.clone() * Float::from_i64(d as i64, p);
    move |t: &Float| {
        let td1 = Scalar::pow_u32(t, (d - 1) as u32);
        let x = base.clone() + span.clone() * td1.clone() * t.clone();
        Ok(f(&x)? * scale.clone() * td1)
    }
}

fn panel_sum(
    lo: &Float,
    hi: &Float,
    panels: usize,
    rule: &Rule,
    f: &(dyn Fn(&Float) -> Result<Float> + Sync),
    p: usize,
) -> Result<Float> {
    let two = Float::from_i64(2, p);
    let h = (hi.clone() - lo.clone()) / Float::from_i64(panels as i64, p);
    let half = h.clone() / two;
    let mut total = Float::from_i64(0, p);
    for k in 0..panels {
        let centre = lo.clone() + h.clone() * Float::from_i64(k as i64, p) + half.clone();
        let mut acc = Float::from_i64(0, p);
        for (t, w) in rule.nodes.iter().zip(&rule.weights) {
            let x = centre.clone() + half.clone() * t.clone();
            acc = acc + w.clone() * f(&x)?;
        }
        total = total + acc * half.clone();
    }
    Ok(total)
}

fn adaptive(
    lo: &Float,
    hi: &Float,
    f: &(dyn Fn(&Float) -> Result<Float> + Sync),
    opts: &QuadOptions,
    p: usize,
) -> Result<QuadResult> {
    let tol = opts.tolerance();
    let mut schedule: Vec<(usize, usize)> = vec![(16, 1), (32, 1), (64, 1)];
    let mut panels = 2;
    while 64 * panels <= opts.max_nodes {
        schedule.push((64, panels));
        panels *= 2;
    }
    let mut prev: Option<Float> = None;
    let mut last_diff = f64::INFINITY;
    let mut used = 0;
    for (n, m) in schedule {
        if n * m > opts.max_nodes {
            break;
        }
        let r = rule(n, p);
        let est = panel_sum(lo, hi, m, &r, f, p)?;
        used = n * m;
        if let Some(prev) = prev {
            let diff = (est.clone() - prev).magnitude().approx_f64();
            let scale = est.magnitude().approx_f64().max(1.0);
            last_diff = diff;
            if diff <= tol * scale {
                return Ok(QuadResult {
                    value: est,
                    error_estimate: diff,
                    nodes: used,
                });
            }
        }
        prev = Some(est);
    }
    Err(Error::QuadratureFailed {
        estimate: last_diff,
        tolerance: tol,
        nodes: used,
    })
}
