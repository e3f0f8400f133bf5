//! Problem description files.
//!
//! ```toml
//! [measure]
//! lo = "0"
//! hi = "1"
//!
//! [weights1]
//! weights = [{ kind = "one" }, { kind = "power", param = "1/2" }]
//!
//! [weights2]
//! weights = [{ kind = "one" }]
//!
//! [compositions]
//! n1 = [1, 1]
//! n2 = [1]
//!
//! [run]
//! name = "sqrt-pair"
//! N = 16
//! backend = "rational"
//! checks = ["hankel", "biorth"]
//! ```

use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use mixed_mops::combinatorics::Composition;
use mixed_mops::measures::{MeasureSpec, ProblemSetup, Weight};
use mixed_mops::verify::Check;
use mixed_mops::Rational;
use num::{BigInt, Zero};
use serde::Deserialize;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct File {
    measure: MeasureSection,
    weights1: WeightsSection,
    weights2: WeightsSection,
    compositions: CompositionsSection,
    #[serde(default)]
    run: RunSection,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum Number {
    Int(i64),
    Text(String),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MeasureSection {
    lo: Number,
    hi: Number,
    #[serde(default)]
    density: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct WeightsSection {
    weights: Vec<WeightEntry>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct WeightEntry {
    kind: String,
    #[serde(default)]
    param: Option<Number>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CompositionsSection {
    n1: Vec<usize>,
    n2: Vec<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RunSection {
    name: Option<String>,
    #[serde(rename = "N")]
    n: Option<usize>,
    backend: Option<String>,
    precision: Option<usize>,
    checks: Option<Vec<String>>,
    out: Option<PathBuf>,
    tol: Option<f64>,
    digits: Option<usize>,
    scales: Option<Vec<usize>>,
    x: Option<Vec<Number>>,
    z: Option<Vec<Number>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Backend {
    Rational,
    Float(usize),
}

impl Backend {
    pub fn label(self) -> String {
        match self {
            Backend::Rational => "rational".into(),
            Backend::Float(p) => format!("float({p})"),
        }
    }
}

/// Command-line overrides of the `[run]` section.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub backend: Option<String>,
    pub precision: Option<usize>,
    pub n: Option<usize>,
    pub out: Option<PathBuf>,
    pub tol: Option<f64>,
    /// Ignore `run.checks`; used by commands that only build matrices.
    pub no_checks: bool,
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub name: String,
    pub setup: ProblemSetup,
    pub n: usize,
    pub backend: Backend,
    pub checks: Vec<Check>,
    pub out: PathBuf,
    pub tol: Option<f64>,
    pub digits: usize,
    pub scales: Option<Vec<usize>>,
    pub x: Option<Vec<Rational>>,
    pub z: Option<Vec<Rational>>,
}

pub const DEFAULT_DIGITS: usize = 20;
pub const DEFAULT_SIZE: usize = 16;

/// Smallest truncation at which the kernel checks are run.
pub fn kernel_margin(setup: &ProblemSetup) -> usize {
    let (a, b) = (setup.comp1.total(), setup.comp2.total());
    a.max(b) + a + b + 2
}

/// Exact rational from `"3"`, `"-1/2"` or `"0.25"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().with_context(|| format!("bad numerator in {s:?}"))?;
        let d: BigInt = d.trim().parse().with_context(|| format!("bad denominator in {s:?}"))?;
        if d.is_zero() {
            bail!("zero denominator in {s:?}");
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((i, f)) = s.split_once('.') {
        let neg = i.starts_with('-');
        let digits = format!("{}{}", i.trim_start_matches(['-', '+']), f);
        let n: BigInt = digits.parse().with_context(|| format!("bad decimal {s:?}"))?;
        let d = num::pow(BigInt::from(10), f.len());
        let q = Rational::new(n, d);
        return Ok(if neg { -q } else { q });
    }
    let n: BigInt = s.parse().with_context(|| format!("bad number {s:?}"))?;
    Ok(Rational::from_integer(n))
}

fn number(n: &Number, field: &str) -> Result<Rational> {
    match n {
        Number::Int(i) => Ok(Rational::from_integer((*i).into())),
        Number::Text(s) => parse_rational(s).with_context(|| format!("field `{field}`")),
    }
}

fn weight(e: &WeightEntry, field: &str) -> Result<Weight> {
    let param = || -> Result<Rational> {
        let p = e
            .param
            .as_ref()
            .ok_or_else(|| anyhow!("field `{field}`: weight kind `{}` needs `param`", e.kind))?;
        number(p, field)
    };
    Ok(match e.kind.as_str() {
        "one" => Weight::one(),
        "power" => Weight::Power(param()?),
        "exp" => Weight::Exponential(param()?),
        "binomial" => Weight::Binomial(param()?),
        other => bail!("field `{field}`: unknown weight kind `{other}` (expected one, power, exp, binomial)"),
    })
}

pub fn load(path: &Path, ov: &Overrides) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read config {}", path.display()))?;
    parse(&text, ov).with_context(|| format!("in config {}", path.display()))
}

pub fn parse(text: &str, ov: &Overrides) -> Result<RunConfig> {
    let file: File = toml::from_str(text)?;
    if let Some(d) = &file.measure.density {
        if d != "lebesgue" {
            bail!("field `measure.density`: only \"lebesgue\" is supported, got {d:?}");
        }
    }
    let measure = MeasureSpec::lebesgue(number(&file.measure.lo, "measure.lo")?, number(&file.measure.hi, "measure.hi")?)
        .context("section [measure]")?;
    let w1 = file
        .weights1
        .weights
        .iter()
        .enumerate()
        .map(|(i, e)| weight(e, &format!("weights1.weights[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    let w2 = file
        .weights2
        .weights
        .iter()
        .enumerate()
        .map(|(i, e)| weight(e, &format!("weights2.weights[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    let n1 = Composition::new(file.compositions.n1.clone()).context("field `compositions.n1`")?;
    let n2 = Composition::new(file.compositions.n2.clone()).context("field `compositions.n2`")?;
    let setup = ProblemSetup::new(measure, w1, w2, n1, n2)?;

    let run = file.run;
    let precision = ov.precision.or(run.precision).unwrap_or(mixed_mops::scalar::DEFAULT_PRECISION);
    let backend = match ov.backend.as_deref().or(run.backend.as_deref()).unwrap_or("rational") {
        "rational" => Backend::Rational,
        "float" => Backend::Float(precision),
        other => bail!("field `run.backend`: expected \"rational\" or \"float\", got {other:?}"),
    };
    if precision < 32 {
        bail!("precision must be at least 32 bits, got {precision}");
    }
    let checks = match &run.checks {
        _ if ov.no_checks => Vec::new(),
        None => Check::ALL.to_vec(),
        Some(names) => names
            .iter()
            .map(|s| Check::parse(s).ok_or_else(|| anyhow!("field `run.checks`: unknown check {s:?}")))
            .collect::<Result<Vec<_>>>()?,
    };
    let margin = kernel_margin(&setup);
    let wants_kernel = checks.iter().any(|c| c.needs_kernel_margin());
    let n = ov
        .n
        .or(run.n)
        .unwrap_or(if wants_kernel { DEFAULT_SIZE.max(margin) } else { DEFAULT_SIZE });
    if n == 0 {
        bail!("N must be positive");
    }
    if wants_kernel && n < margin {
        bail!("kernel checks need N >= max(|n1|,|n2|) + |n1| + |n2| + 2 = {margin}, got N = {n}");
    }
    let tol = ov.tol.or(run.tol);
    if let Some(t) = tol {
        if !(t > 0.0) {
            bail!("tolerance must be positive, got {t}");
        }
    }
    let list = |v: &Option<Vec<Number>>, field: &str| -> Result<Option<Vec<Rational>>> {
        v.as_ref()
            .map(|v| v.iter().map(|x| number(x, field)).collect::<Result<Vec<_>>>())
            .transpose()
    };
    let x = list(&run.x, "run.x")?;
    let z = list(&run.z, "run.z")?;
    if let Some(x) = &x {
        if let Some(bad) = x.iter().find(|v| !(**v > setup.measure.lo && **v < setup.measure.hi)) {
            bail!("field `run.x`: {bad} is not interior to the support");
        }
    }
    if let Some(z) = &z {
        if let Some(bad) = z.iter().find(|v| **v >= setup.measure.lo && **v <= setup.measure.hi) {
            bail!("field `run.z`: {bad} lies on the support");
        }
    }
    Ok(RunConfig {
        name: run.name.unwrap_or_else(|| "unnamed".into()),
        setup,
        n,
        backend,
        checks,
        out: ov.out.clone().or(run.out).unwrap_or_else(|| PathBuf::from("mops-out")),
        tol,
        digits: run.digits.unwrap_or(DEFAULT_DIGITS),
        scales: run.scales,
        x,
        z,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const F1: &str = r#"
[measure]
lo = 0
hi = 1
[weights1]
weights = [{ kind = "one" }]
[weights2]
weights = [{ kind = "one" }]
[compositions]
n1 = [1]
n2 = [1]
[run]
name = "hilbert"
N = 12
"#;

    #[test]
    fn rationals() {
        assert_eq!(parse_rational("-1/2").unwrap(), Rational::new((-1).into(), 2.into()));
        assert_eq!(parse_rational("0.25").unwrap(), Rational::new(1.into(), 4.into()));
        assert_eq!(parse_rational("-1.5").unwrap(), Rational::new((-3).into(), 2.into()));
        assert_eq!(parse_rational("7").unwrap(), Rational::from_integer(7.into()));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn parses_hilbert() {
        let c = parse(F1, &Overrides::default()).unwrap();
        assert_eq!(c.n, 12);
        assert_eq!(c.backend, Backend::Rational);
        assert_eq!(c.checks.len(), 7);
        let c = parse(
            F1,
            &Overrides {
                backend: Some("float".into()),
                n: Some(9),
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(c.backend, Backend::Float(128));
        assert_eq!(c.n, 9);
    }

    #[test]
    fn rejects_bad_configs() {
        let mismatch = F1.replace("n1 = [1]", "n1 = [1, 2]");
        assert!(parse(&mismatch, &Overrides::default()).is_err());
        let small = F1.replace("N = 12", "N = 4");
        let e = parse(&small, &Overrides::default()).unwrap_err();
        assert!(format!("{e:#}").contains("N >="));
        let unknown = F1.replace("name = ", "nme = ");
        let e = parse(&unknown, &Overrides::default()).unwrap_err();
        assert!(format!("{e:#}").contains("nme"));
        let tol = parse(F1, &Overrides { tol: Some(-1.0), ..Default::default() });
        assert!(tol.is_err());
    }
}
