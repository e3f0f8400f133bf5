//! Reference problems used by tests, benches and the CLI.

use crate::combinatorics::Composition;
use crate::measures::{MeasureSpec, ProblemSetup, Weight};
use crate::scalar::{ratio, Rational};

#[derive(Clone, Debug)]
pub struct Fixture {
    pub name: &'static str,
    pub setup: ProblemSetup,
    /// Whether every moment is available in closed form over the rationals.
    pub exact: bool,
    pub size: usize,
}

fn comp(p: &[usize]) -> Composition {
    Composition::new(p.to_vec()).expect("fixture compositions are valid")
}

fn unit() -> MeasureSpec {
    MeasureSpec::lebesgue(ratio(0, 1), ratio(1, 1)).expect("unit interval")
}

fn power(n: i64, d: i64) -> Weight {
    Weight::Power(ratio(n, d))
}

fn build(name: &'static str, w1: Vec<Weight>, n1: &[usize], w2: Vec<Weight>, n2: &[usize], exact: bool, size: usize) -> Fixture {
    let setup = ProblemSetup::new(unit(), w1, w2, comp(n1), comp(n2)).expect("fixture setup is valid");
    Fixture {
        name,
        setup,
        exact,
        size,
    }
}

/// Lebesgue measure on `[0,1]`, one weight per side: the Hilbert matrix.
pub fn hilbert() -> Fixture {
    build("hilbert", vec![Weight::one()], &[1], vec![Weight::one()], &[1], true, 16)
}

/// Weights `(1, x^{1/2})` against `(1)`.
pub fn sqrt_pair() -> Fixture {
    build(
        "sqrt-pair",
        vec![Weight::one(), power(1, 2)],
        &[1, 1],
        vec![Weight::one()],
        &[1],
        true,
        16,
    )
}

/// Weights `(1, e^x)` against `(1)`; moments by quadrature.
pub fn exp_pair() -> Fixture {
    build(
        "exp-pair",
        vec![Weight::one(), Weight::Exponential(ratio(1, 1))],
        &[1, 1],
        vec![Weight::one()],
        &[1],
        false,
        16,
    )
}

/// `n1 = (4,3,2)` with `(1, x^{1/3}, x^{2/3})` against `n2 = (3,2)` with `(1, x^{1/2})`.
pub fn staircase_rational() -> Fixture {
    build(
        "staircase-rational",
        vec![Weight::one(), power(1, 3), power(2, 3)],
        &[4, 3, 2],
        vec![Weight::one(), power(1, 2)],
        &[3, 2],
        true,
        30,
    )
}

/// `n1 = (4,3,2)` with `(1, e^x, e^{2x})` against `n2 = (3,2)` with `(1, e^{-x})`.
pub fn staircase_exponential() -> Fixture {
    build(
        "staircase-exp",
        vec![
            Weight::one(),
            Weight::Exponential(ratio(1, 1)),
            Weight::Exponential(ratio(2, 1)),
        ],
        &[4, 3, 2],
        vec![Weight::one(), Weight::Exponential(ratio(-1, 1))],
        &[3, 2],
        false,
        30,
    )
}

/// Weights `(1, x)` on side 1 make the moment rows linearly dependent.
pub fn duplicate() -> Fixture {
    build(
        "duplicate",
        vec![Weight::one(), power(1, 1)],
        &[1, 1],
        vec![Weight::one()],
        &[1],
        true,
        6,
    )
}

/// The fixtures whose moments are exact rationals.
pub fn rational_fixtures() -> Vec<Fixture> {
    vec![hilbert(), sqrt_pair(), staircase_rational()]
}

/// Evaluation points `lo + (hi - lo) t^d` for `t = 1/6, ..., 5/6`, where `d` makes
/// every fractional weight exponent rational at the points when `lo = 0`.
pub fn grid_points(setup: &ProblemSetup) -> Vec<Rational> {
    let (d, _) = setup.grading(&setup.all_weights());
    let lo = setup.measure.lo.clone();
    let span = setup.measure.hi.clone() - lo.clone();
    (1..=5)
        .map(|k| {
            let t = ratio(k, 6);
            let mut td = ratio(1, 1);
            for _ in 0..d {
                td *= t.clone();
            }
            lo.clone() + span.clone() * td
        })
        .collect()
}

/// All ordered pairs `(x, y)` of distinct grid points.
pub fn grid_pairs(setup: &ProblemSetup) -> Vec<(Rational, Rational)> {
    let pts = grid_points(setup);
    let mut out = Vec::new();
    for x in &pts {
        for y in &pts {
            if x != y {
                out.push((x.clone(), y.clone()));
            }
        }
    }
    out
}

/// Three scales `l` spread over `[lo, hi]`.
pub fn grid_scales(lo: usize, hi: usize) -> Vec<usize> {
    if hi <= lo {
        return vec![lo];
    }
    let mut v = vec![lo, lo + (hi - lo) / 2, hi];
    v.dedup();
    v
}

/// Points off the support where second-kind functions are compared.
pub fn second_kind_points(setup: &ProblemSetup) -> Vec<Rational> {
    vec![ratio(10, 1), ratio(-10, 1), setup.measure.lo.clone() - ratio(5, 1)]
}
