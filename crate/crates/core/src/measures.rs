//! Weights, measures and weighted moments.

use std::fmt;
use std::sync::Arc;

use num::{BigInt, Integer, One, Signed, Zero};

use crate::combinatorics::{exponent, family, Composition};
use crate::error::{Error, Result};
use crate::quadrature::{self, QuadOptions, QuadResult};
use crate::scalar::{Float, Rational, Scalar};

pub type FloatFn = Arc<dyn Fn(&Float) -> Float + Send + Sync>;

#[derive(Clone)]
pub enum Weight {
    /// `x^q`.
    Power(Rational),
    /// `e^{γ x}`.
    Exponential(Rational),
    /// `(1 - x)^α`.
    Binomial(Rational),
    /// Arbitrary function, float backend only.
    Custom { label: String, f: FloatFn },
}

impl fmt::Debug for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Weight::Power(q) if q.is_zero() => write!(f, "1"),
            Weight::Power(q) => write!(f, "x^({q})"),
            Weight::Exponential(g) => write!(f, "exp({g} x)"),
            Weight::Binomial(a) => write!(f, "(1-x)^({a})"),
            Weight::Custom { label, .. } => write!(f, "{label}"),
        }
    }
}

impl Weight {
    pub fn one() -> Self {
        Weight::Power(Rational::zero())
    }

    // Monomial expansion sum c_k x^{q_k}, when the weight has one with rational data.
    fn expansion(&self) -> Option<Vec<(Rational, Rational)>> {
        match self {
            Weight::Power(q) => Some(vec![(Rational::one(), q.clone())]),
            Weight::Exponential(g) if g.is_zero() => Some(vec![(Rational::one(), Rational::zero())]),
            Weight::Binomial(a) if a.is_integer() && !a.is_negative() => {
                let n = a.to_integer();
                let mut out = Vec::new();
                let mut c = BigInt::one();
                let mut k = BigInt::zero();
                while k <= n {
                    let sign = if k.is_odd() { -BigInt::one() } else { BigInt::one() };
                    out.push((Rational::from_integer(sign * &c), Rational::from_integer(k.clone())));
                    c = c * (&n - &k) / (&k + 1);
                    k += 1;
                }
                Some(out)
            }
            _ => None,
        }
    }

    // Fractional exponent singular at 0 (power) or at 1 (binomial).
    fn singular_denominators(&self) -> (usize, usize) {
        let den = |q: &Rational| q.denom().to_string().parse::<usize>().unwrap_or(1);
        match self {
            Weight::Power(q) if !q.is_integer() => (den(q), 1),
            Weight::Binomial(a) if !a.is_integer() => (1, den(a)),
            _ => (1, 1),
        }
    }
}

#[derive(Clone)]
pub enum Density {
    Lebesgue,
    Custom { label: String, f: FloatFn },
}

impl fmt::Debug for Density {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Density::Lebesgue => write!(f, "Lebesgue"),
            Density::Custom { label, .. } => write!(f, "Custom({label})"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct MeasureSpec {
    pub lo: Rational,
    pub hi: Rational,
    pub density: Density,
}

impl MeasureSpec {
    pub fn lebesgue(lo: Rational, hi: Rational) -> Result<Self> {
        Self::new(lo, hi, Density::Lebesgue)
    }

    pub fn new(lo: Rational, hi: Rational, density: Density) -> Result<Self> {
        if lo >= hi {
            return Err(Error::InvalidSetup(format!("empty support [{lo}, {hi}]")));
        }
        let m = MeasureSpec { lo, hi, density };
        if let Density::Custom { label, f } = &m.density {
            for x in m.sample_points() {
                if f(&x) < Float::from_i64(0, x.precision()) {
                    return Err(Error::InvalidSetup(format!(
                        "density {label} is negative at {}",
                        x.approx_f64()
                    )));
                }
            }
        }
        Ok(m)
    }

    pub fn contains<T: Scalar>(&self, x: &T) -> bool {
        let ctx = x.context();
        *x >= T::from_rational(&self.lo, ctx) && *x <= T::from_rational(&self.hi, ctx)
    }

    /// `max |x|` over the support.
    pub fn radius(&self) -> Rational {
        let a = self.lo.abs();
        let b = self.hi.abs();
        if a > b {
            a
        } else {
            b
        }
    }

    fn sample_points(&self) -> Vec<Float> {
        let p = 64;
        (1..=15)
            .map(|k| {
                let t = Rational::new(k.into(), 16.into());
                Float::from_rational(&(self.lo.clone() + (self.hi.clone() - self.lo.clone()) * t), p)
            })
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct ProblemSetup {
    pub measure: MeasureSpec,
    pub weights1: Vec<Weight>,
    pub weights2: Vec<Weight>,
    pub comp1: Composition,
    pub comp2: Composition,
}

/// Which weighted string: side 1 (rows of `g`) or side 2 (columns).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    One,
    Two,
}

impl ProblemSetup {
    pub fn new(
        measure: MeasureSpec,
        weights1: Vec<Weight>,
        weights2: Vec<Weight>,
        comp1: Composition,
        comp2: Composition,
    ) -> Result<Self> {
        if weights1.len() != comp1.families() {
            return Err(Error::InvalidSetup(format!(
                "{} weights in system 1 but composition {} has {} parts",
                weights1.len(),
                comp1,
                comp1.families()
            )));
        }
        if weights2.len() != comp2.families() {
            return Err(Error::InvalidSetup(format!(
                "{} weights in system 2 but composition {} has {} parts",
                weights2.len(),
                comp2,
                comp2.families()
            )));
        }
        let setup = ProblemSetup {
            measure,
            weights1,
            weights2,
            comp1,
            comp2,
        };
        for (side, ws) in [(1, &setup.weights1), (2, &setup.weights2)] {
            let rates: Vec<&Rational> = ws
                .iter()
                .filter_map(|w| match w {
                    Weight::Exponential(g) => Some(g),
                    _ => None,
                })
                .collect();
            for (i, g) in rates.iter().enumerate() {
                if rates[..i].contains(g) {
                    return Err(Error::InvalidSetup(format!(
                        "exponential rate {g} repeated in system {side}"
                    )));
                }
            }
            for w in ws.iter() {
                setup.check_sign(w)?;
            }
        }
        Ok(setup)
    }

    fn check_sign(&self, w: &Weight) -> Result<()> {
        let mut sign = 0i8;
        for x in self.measure.sample_points() {
            let v = eval_weight(w, &x)
                .map_err(|e| Error::InvalidSetup(format!("weight {w} on the support: {e}")))?;
            let s = if Scalar::is_exact_zero(&v) {
                0
            } else if v.is_neg() {
                -1
            } else {
                1
            };
            if s != 0 && sign != 0 && s != sign {
                return Err(Error::InvalidSetup(format!("weight {w} changes sign")));
            }
            if s != 0 {
                sign = s;
            }
        }
        Ok(())
    }

    pub fn composition(&self, side: Side) -> &Composition {
        match side {
            Side::One => &self.comp1,
            Side::Two => &self.comp2,
        }
    }

    pub fn weights(&self, side: Side) -> &[Weight] {
        match side {
            Side::One => &self.weights1,
            Side::Two => &self.weights2,
        }
    }

    /// Grading exponents for quadrature of integrands built from the given weights.
    pub fn grading(&self, weights: &[&Weight]) -> (usize, usize) {
        let (mut lo, mut hi) = (1usize, 1usize);
        for w in weights {
            let (a, b) = w.singular_denominators();
            lo = lo.lcm(&a);
            hi = hi.lcm(&b);
        }
        // only endpoints that actually sit on the singularity need grading
        if !self.measure.lo.is_zero() {
            lo = 1;
        }
        if !self.measure.hi.is_one() {
            hi = 1;
        }
        (lo, hi)
    }

    pub fn all_weights(&self) -> Vec<&Weight> {
        self.weights1.iter().chain(&self.weights2).collect()
    }
}

pub fn eval_weight<T: Scalar>(w: &Weight, x: &T) -> Result<T> {
    let ctx = x.context();
    match w {
        Weight::Power(q) => x.pow_rational(q),
        Weight::Exponential(g) => (T::from_rational(g, ctx) * x.clone()).exp(),
        Weight::Binomial(a) => (T::one_in(ctx) - x.clone()).pow_rational(a),
        Weight::Custom { label, f } => {
            let p = T::quadrature_precision(ctx)
                .ok_or_else(|| Error::NotExact(format!("custom weight {label}")))?;
            T::from_float(&f(&x.to_float(p)), ctx)
                .ok_or_else(|| Error::NotExact(format!("custom weight {label}")))
        }
    }
}

/// `ξ^(l)(x) = w_{a(l)}(x) x^{exponent(l)}` on the given side.
pub fn eval_weighted_entry<T: Scalar>(setup: &ProblemSetup, side: Side, l: usize, x: &T) -> Result<T> {
    let n = setup.composition(side);
    let w = &setup.weights(side)[family(n, l) - 1];
    Ok(eval_weight(w, x)? * Scalar::pow_u32(x, exponent(n, l) as u32))
}

/// `∫ x^m w1 w2 dμ` by the closed form when both weights expand into powers
/// against Lebesgue measure; `None` when that path does not apply.
pub fn exact_moment<T: Scalar>(
    measure: &MeasureSpec,
    w1: &Weight,
    w2: &Weight,
    m: usize,
    ctx: T::Context,
) -> Option<Result<T>> {
    if !matches!(measure.density, Density::Lebesgue) {
        return None;
    }
    let e1 = w1.expansion()?;
    let e2 = w2.expansion()?;
    let shift = Rational::from_integer(m.into());
    let mut total = T::zero_in(ctx);
    for (c1, q1) in &e1 {
        for (c2, q2) in &e2 {
            let q = q1 + q2 + &shift;
            match power_integral::<T>(measure, &q, ctx) {
                Ok(v) => total = total + T::from_rational(&(c1 * c2), ctx) * v,
                Err(e) => return Some(Err(e)),
            }
        }
    }
    Some(Ok(total))
}

/// `∫_lo^hi x^q dx`.
pub fn power_integral<T: Scalar>(measure: &MeasureSpec, q: &Rational, ctx: T::Context) -> Result<T> {
    let q1 = q + Rational::one();
    if q1.is_zero() {
        return Err(Error::NotExact(format!("∫ x^({q}) dx is logarithmic")));
    }
    let touches_zero = measure.lo <= Rational::zero() && measure.hi >= Rational::zero();
    if touches_zero && !q1.is_positive() {
        return Err(Error::NonIntegrable(format!("x^({q}) near 0")));
    }
    if touches_zero && !q.is_integer() && measure.lo.is_negative() {
        return Err(Error::NonIntegrable(format!("x^({q}) on a support containing negatives")));
    }
    let hi = T::from_rational(&measure.hi, ctx).pow_rational(&q1)?;
    let lo = T::from_rational(&measure.lo, ctx).pow_rational(&q1)?;
    Ok((hi - lo) / T::from_rational(&q1, ctx))
}

/// Quadrature for `∫ f dμ`, including a custom density if present.
pub fn integrate(
    setup: &ProblemSetup,
    f: &(dyn Fn(&Float) -> Result<Float> + Sync),
    opts: &QuadOptions,
) -> Result<QuadResult> {
    let p = opts.precision;
    let lo = Float::from_rational(&setup.measure.lo, p);
    let hi = Float::from_rational(&setup.measure.hi, p);
    match &setup.measure.density {
        Density::Lebesgue => quadrature::integrate(&lo, &hi, f, opts),
        Density::Custom { f: d, .. } => {
            let g = |x: &Float| Ok(f(x)? * d(x));
            quadrature::integrate(&lo, &hi, &g, opts)
        }
    }
}

/// `∫ x^m w_{1,a} w_{2,b} dμ` by quadrature.
pub fn moment_by_quadrature(setup: &ProblemSetup, a: usize, b: usize, m: usize, precision: usize) -> Result<Float> {
    let w1 = &setup.weights1[a - 1];
    let w2 = &setup.weights2[b - 1];
    let (glo, ghi) = setup.grading(&[w1, w2]);
    let opts = QuadOptions::new(precision).with_grading(glo, ghi);
    let f = |x: &Float| Ok(eval_weight(w1, x)? * eval_weight(w2, x)? * Scalar::pow_u32(x, m as u32));
    Ok(integrate(setup, &f, &opts)?.value)
}

/// `∫ x^m w_{1,a} w_{2,b} dμ`: closed form when available, otherwise quadrature
/// (float backend only).
pub fn family_moment<T: Scalar>(setup: &ProblemSetup, a: usize, b: usize, m: usize, ctx: T::Context) -> Result<T> {
    let w1 = &setup.weights1[a - 1];
    let w2 = &setup.weights2[b - 1];
    if let Some(v) = exact_moment::<T>(&setup.measure, w1, w2, m, ctx) {
        match v {
            Ok(v) => return Ok(v),
            Err(e @ Error::NonIntegrable(_)) => return Err(e),
            Err(e) if T::EXACT => return Err(e),
            Err(_) => {}
        }
    }
    let p = T::quadrature_precision(ctx).ok_or_else(|| {
        Error::NotExact(format!("moment of x^{m} {w1} {w2} needs quadrature"))
    })?;
    let v = moment_by_quadrature(setup, a, b, m, p)?;
    Ok(T::from_float(&v, ctx).expect("float backend"))
}

/// Moment-matrix entry `g_ij = ∫ ξ1^(i) ξ2^(j) dμ`.
pub fn moment<T: Scalar>(setup: &ProblemSetup, i: usize, j: usize, ctx: T::Context) -> Result<T> {
    let (a, b, m) = moment_key(setup, i, j);
    family_moment(setup, a, b, m, ctx)
}

/// `(a1(i), a2(j), e1(i) + e2(j))`: `g_ij` depends only on this triple.
pub fn moment_key(setup: &ProblemSetup, i: usize, j: usize) -> (usize, usize, usize) {
    (
        family(&setup.comp1, i),
        family(&setup.comp2, j),
        exponent(&setup.comp1, i) + exponent(&setup.comp2, j),
    )
}
