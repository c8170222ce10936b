//! JSON shapes for points, maps, metrics and lattices, plus the short
//! command-line spellings that expand into them.
//!
//! Rationals are written `"num/den"`, a decimal string such as `"0.3"`, or a
//! bare JSON integer. All of them are read exactly.

use std::fmt;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context};
use arakelov_core::bergman::MetricFamily;
use arakelov_core::dynamics::{DynPoint, Endomorphism};
use arakelov_core::heights::{AlgebraicP1Point, CyclotomicTorusPoint, RationalProjectivePoint};
use arakelov_core::lattice::NormedLattice;
use arakelov_core::numkernel::arith::rational_to_f64;
use arakelov_core::numkernel::IntPolynomial;
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

/// Exact rational that remembers how it was written.
#[derive(Clone, Debug, PartialEq)]
pub struct Ratio {
    pub value: BigRational,
    text: String,
}

impl Ratio {
    pub fn to_f64(&self) -> f64 {
        rational_to_f64(&self.value)
    }
}

impl From<i64> for Ratio {
    fn from(n: i64) -> Self {
        Ratio { value: BigRational::from_integer(n.into()), text: n.to_string() }
    }
}

fn parse_decimal(s: &str) -> Option<BigRational> {
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("0{int}{frac}").parse().ok()?;
    let v = BigRational::new(digits, num_traits::pow(BigInt::from(10), frac.len()));
    Some(if neg { -v } else { v })
}

impl FromStr for Ratio {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let value = match t.split_once('/') {
            Some((n, d)) => {
                let n: BigInt = n.trim().parse().map_err(|_| anyhow!("bad numerator in `{t}`"))?;
                let d: BigInt = d.trim().parse().map_err(|_| anyhow!("bad denominator in `{t}`"))?;
                if d.is_zero() {
                    bail!("zero denominator in `{t}`");
                }
                BigRational::new(n, d)
            }
            None => parse_decimal(t).ok_or_else(|| anyhow!("`{t}` is not a rational number"))?,
        };
        Ok(Ratio { value, text: t.to_string() })
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

impl Serialize for Ratio {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.text)
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum NumberOrText {
    Int(i64),
    Text(String),
}

impl<'de> Deserialize<'de> for Ratio {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match NumberOrText::deserialize(d).map_err(|_| de::Error::custom("expected an integer or a \"num/den\" string"))? {
            NumberOrText::Int(n) => Ok(n.into()),
            NumberOrText::Text(t) => t.parse().map_err(|e: anyhow::Error| de::Error::custom(e)),
        }
    }
}

/// Arbitrary size integer, written as a JSON integer or a decimal string.
#[derive(Clone, Debug, PartialEq)]
pub struct Int(pub BigInt);

impl Serialize for Int {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match i64::try_from(&self.0) {
            Ok(n) => s.serialize_i64(n),
            Err(_) => s.serialize_str(&self.0.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for Int {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match NumberOrText::deserialize(d).map_err(|_| de::Error::custom("expected an integer"))? {
            NumberOrText::Int(n) => Ok(Int(n.into())),
            NumberOrText::Text(t) => {
                t.trim().parse().map(Int).map_err(|_| de::Error::custom(format!("`{t}` is not an integer")))
            }
        }
    }
}

fn ints(v: &[Int]) -> Vec<BigInt> {
    v.iter().map(|x| x.0.clone()).collect()
}

fn parse_list<T: FromStr>(s: &str) -> anyhow::Result<Vec<T>>
where
    T::Err: fmt::Display,
{
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| p.trim().parse::<T>().map_err(|e| anyhow!("`{}`: {e}", p.trim())))
        .collect()
}

/// Comma separated values and inclusive ranges `a..b` or `a..b:step`,
/// e.g. `5,101,1009` or `10..60:10`.
pub fn parse_range_list(s: &str) -> anyhow::Result<Vec<u64>> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        match part.split_once("..") {
            Some((a, rest)) => {
                let (b, step) = rest.split_once(':').unwrap_or((rest, "1"));
                let a: u64 = a.trim().parse().with_context(|| format!("bad range start in `{part}`"))?;
                let b: u64 = b.trim().parse().with_context(|| format!("bad range end in `{part}`"))?;
                let step: u64 = step.trim().parse().with_context(|| format!("bad step in `{part}`"))?;
                if step == 0 || b < a {
                    bail!("empty range `{part}`");
                }
                out.extend((a..=b).step_by(step as usize));
            }
            None => out.push(part.parse().with_context(|| format!("`{part}` is not a nonnegative integer"))?),
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PointSpec {
    /// Projective coordinates `(x0 : ... : xn)`.
    Rational { coords: Vec<Ratio> },
    /// Integer minimal polynomial, constant term first.
    Minpoly { coeffs: Vec<Int> },
    /// `(zeta_m^e1, ..., zeta_m^en)` on the torus.
    Cyclotomic { m: u64, exp: Vec<i64> },
}

impl PointSpec {
    pub fn to_point(&self) -> anyhow::Result<DynPoint> {
        Ok(match self {
            PointSpec::Rational { coords } => {
                let q: Vec<BigRational> = coords.iter().map(|c| c.value.clone()).collect();
                DynPoint::Rational(RationalProjectivePoint::from_rationals(&q).map_err(|e| anyhow!("point: {e}"))?)
            }
            PointSpec::Minpoly { coeffs } => DynPoint::Algebraic(
                AlgebraicP1Point::new(&IntPolynomial::new(ints(coeffs))).map_err(|e| anyhow!("point: {e}"))?,
            ),
            PointSpec::Cyclotomic { m, exp } => {
                DynPoint::Cyclotomic(CyclotomicTorusPoint::new(*m, exp).map_err(|e| anyhow!("point: {e}"))?)
            }
        })
    }

    /// `1,2` or `1/2,3` for rational points, `minpoly:-2,0,1`, `zeta:m:e1,e2`,
    /// or a JSON object.
    pub fn parse_cli(s: &str) -> anyhow::Result<Self> {
        let s = s.trim();
        if s.starts_with('{') {
            return serde_json::from_str(s).context("point JSON");
        }
        if let Some(rest) = s.strip_prefix("minpoly:") {
            let coeffs = parse_list::<BigInt>(rest)?.into_iter().map(Int).collect();
            return Ok(PointSpec::Minpoly { coeffs });
        }
        if let Some(rest) = s.strip_prefix("zeta:") {
            let (m, e) = rest.split_once(':').unwrap_or((rest, "1"));
            return Ok(PointSpec::Cyclotomic { m: m.trim().parse()?, exp: parse_list(e)? });
        }
        Ok(PointSpec::Rational { coords: parse_list(s)? })
    }
}

/// Endomorphism of `P^n`. `forms[i][k]` is the coefficient of
/// `x0^(q-k) x1^k` in the `i`-th form; `kind: "power"` needs no forms.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapSpec {
    pub n: usize,
    pub q: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub forms: Vec<Vec<Int>>,
}

impl MapSpec {
    pub fn power(n: usize, q: usize) -> Self {
        MapSpec { n, q, kind: Some("power".into()), forms: Vec::new() }
    }

    pub fn to_endomorphism(&self) -> anyhow::Result<Endomorphism> {
        let phi = match self.kind.as_deref() {
            Some("power") => Endomorphism::power(self.n, self.q),
            Some(other) => bail!("map: unknown kind `{other}` (only \"power\" is named)"),
            None => {
                if self.n != 1 {
                    bail!("map: explicit forms are supported on P^1 only; use kind \"power\" for n > 1");
                }
                if self.forms.len() != 2 {
                    bail!("map: expected 2 forms, found {}", self.forms.len());
                }
                if self.forms.iter().any(|f| f.len() != self.q + 1) {
                    bail!("map: each form needs q + 1 = {} coefficients", self.q + 1);
                }
                Endomorphism::validate(&ints(&self.forms[0]), &ints(&self.forms[1]))
            }
        };
        phi.map_err(|e| anyhow!("map: {e}"))
    }

    /// `power2`, `power3`, `unicritical:q:c` (for `z^q + c`), or JSON.
    pub fn parse_cli(s: &str) -> anyhow::Result<Self> {
        let s = s.trim();
        if s.starts_with('{') {
            return serde_json::from_str(s).context("map JSON");
        }
        if let Some(q) = s.strip_prefix("power") {
            let q: usize = q.parse().with_context(|| format!("`{s}`: expected power<q>"))?;
            return Ok(MapSpec::power(1, q));
        }
        if let Some(rest) = s.strip_prefix("unicritical:") {
            let (q, c) = rest.split_once(':').ok_or_else(|| anyhow!("`{s}`: expected unicritical:q:c"))?;
            let q: usize = q.parse()?;
            let c: i64 = c.parse()?;
            let mut f0 = vec![Int(0.into()); q + 1];
            let mut f1 = f0.clone();
            f0[0] = Int(1.into());
            f1[0] = Int(c.into());
            f1[q] = Int(1.into());
            return Ok(MapSpec { n: 1, q, kind: None, forms: vec![f0, f1] });
        }
        bail!("unknown map `{s}`")
    }
}

/// Metric on `O(d)` over `P^1`, built from the two base families.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum MetricSpec {
    /// `|s| / sqrt(|x0|^2 + c |x1|^2)` on `O(1)`.
    C { c: Ratio },
    /// `|s| / (|x0|^t + |x1|^t)^(1/t)` on `O(1)`.
    T { t: u32 },
    Tensor { factors: Vec<MetricSpec> },
    Difference { left: Box<MetricSpec>, right: Box<MetricSpec> },
    Power { base: Box<MetricSpec>, n: i64 },
}

impl MetricSpec {
    pub fn fs() -> Self {
        MetricSpec::C { c: 1.into() }
    }

    pub fn to_metric(&self) -> anyhow::Result<MetricFamily> {
        Ok(match self {
            MetricSpec::C { c } => {
                if !c.value.is_positive() {
                    bail!("metric: c must be positive, got {c}");
                }
                MetricFamily::c(c.to_f64()).map_err(|e| anyhow!("metric c={c}: {e}"))?
            }
            MetricSpec::T { t } => MetricFamily::t(*t).map_err(|e| anyhow!("metric t={t}: {e}"))?,
            MetricSpec::Tensor { factors } => {
                let mut acc = MetricFamily::trivial();
                for f in factors {
                    acc = acc.plus(&f.to_metric()?);
                }
                acc
            }
            MetricSpec::Difference { left, right } => left.to_metric()?.minus(&right.to_metric()?),
            MetricSpec::Power { base, n } => base.to_metric()?.scale(*n),
        })
    }

    /// Single `c` metric, if that is what this is.
    pub fn as_c(&self) -> Option<f64> {
        match self {
            MetricSpec::C { c } => Some(c.to_f64()),
            _ => None,
        }
    }

    /// JSON, or a signed sum of terms `[k*]atom` with atoms `c:<rational>`,
    /// `t:<int>` and `fs`, e.g. `2*c:1/2-t:1`.
    pub fn parse_cli(s: &str) -> anyhow::Result<Self> {
        let s = s.trim();
        if s.starts_with('{') {
            return serde_json::from_str(s).context("metric JSON");
        }
        let mut plus = Vec::new();
        let mut minus = Vec::new();
        let mut sign = 1;
        let mut start = 0;
        let bytes = s.as_bytes();
        for i in 0..=bytes.len() {
            let sep = i == bytes.len() || (matches!(bytes[i], b'+' | b'-') && (i == 0 || bytes[i - 1] != b':'));
            if !sep {
                continue;
            }
            let term = s[start..i].trim();
            if !term.is_empty() {
                let spec = parse_term(term)?;
                if sign > 0 {
                    plus.push(spec)
                } else {
                    minus.push(spec)
                }
            }
            if i < bytes.len() {
                sign = if bytes[i] == b'-' { -1 } else { 1 };
                start = i + 1;
            }
        }
        let wrap = |mut v: Vec<MetricSpec>| if v.len() == 1 { v.pop().expect("one") } else { MetricSpec::Tensor { factors: v } };
        match (plus.is_empty(), minus.is_empty()) {
            (true, true) => bail!("empty metric"),
            (false, true) => Ok(wrap(plus)),
            (true, false) => Ok(MetricSpec::Power { base: Box::new(wrap(minus)), n: -1 }),
            (false, false) => Ok(MetricSpec::Difference { left: Box::new(wrap(plus)), right: Box::new(wrap(minus)) }),
        }
    }
}

fn parse_term(term: &str) -> anyhow::Result<MetricSpec> {
    let (k, atom) = match term.split_once('*') {
        Some((k, a)) => (k.trim().parse::<i64>().with_context(|| format!("bad multiplier in `{term}`"))?, a.trim()),
        None => (1, term),
    };
    let base = if atom == "fs" {
        MetricSpec::fs()
    } else if let Some(c) = atom.strip_prefix("c:") {
        MetricSpec::C { c: c.parse()? }
    } else if let Some(t) = atom.strip_prefix("t:") {
        MetricSpec::T { t: t.trim().parse().with_context(|| format!("bad t in `{term}`"))? }
    } else {
        bail!("unknown metric term `{term}` (expected c:<rational>, t:<int> or fs)")
    };
    Ok(if k == 1 { base } else { MetricSpec::Power { base: Box::new(base), n: k } })
}

/// `{"rank": r, "gram": [["num/den", ...], ...], "torsion": k}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeSpec {
    pub rank: usize,
    pub gram: Vec<Vec<Ratio>>,
    #[serde(default = "one")]
    pub torsion: Int,
}

fn one() -> Int {
    Int(BigInt::one())
}

impl LatticeSpec {
    pub fn to_lattice(&self) -> anyhow::Result<NormedLattice> {
        if self.gram.len() != self.rank {
            bail!("lattice: rank is {} but gram has {} rows", self.rank, self.gram.len());
        }
        let torsion: BigUint =
            self.torsion.0.to_biguint().ok_or_else(|| anyhow!("lattice: torsion must be nonnegative"))?;
        let g = self.gram.iter().map(|row| row.iter().map(|x| x.value.clone()).collect()).collect();
        NormedLattice::new(g, torsion).map_err(|e| anyhow!("lattice: {e}"))
    }

    /// Rows separated by `;`, entries by `,`: `2,1;1,3`.
    pub fn parse_gram(s: &str, torsion: u64) -> anyhow::Result<Self> {
        let gram: Vec<Vec<Ratio>> =
            s.split(';').filter(|r| !r.trim().is_empty()).map(parse_list).collect::<anyhow::Result<_>>()?;
        Ok(LatticeSpec { rank: gram.len(), gram, torsion: Int(torsion.into()) })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratios_are_exact() {
        let r: Ratio = "0.3".parse().unwrap();
        assert_eq!(r.value, BigRational::new(3.into(), 10.into()));
        let r: Ratio = "-6/4".parse().unwrap();
        assert_eq!(r.value, BigRational::new((-3).into(), 2.into()));
        assert!("1/0".parse::<Ratio>().is_err());
        assert!("x".parse::<Ratio>().is_err());
        assert!(".".parse::<Ratio>().is_err());
    }

    #[test]
    fn metric_shorthand() {
        let m = MetricSpec::parse_cli("2*c:1/2-t:1").unwrap();
        assert_eq!(m.to_metric().unwrap().degree(), 1);
        let fs = MetricSpec::parse_cli("fs").unwrap();
        assert_eq!(fs.to_metric().unwrap(), MetricFamily::fs());
        let neg = MetricSpec::parse_cli("-t:2").unwrap();
        assert_eq!(neg.to_metric().unwrap().degree(), -1);
        assert!(MetricSpec::parse_cli("c:-1").unwrap().to_metric().is_err());
        assert!(MetricSpec::parse_cli("q:1").is_err());
        let j: MetricSpec = serde_json::from_str(r#"{"kind":"c","c":"1/2"}"#).unwrap();
        assert_eq!(j.as_c(), Some(0.5));
    }

    #[test]
    fn map_and_point_shorthand() {
        let p = MapSpec::parse_cli("power2").unwrap();
        assert_eq!(p.to_endomorphism().unwrap().degree(), 2);
        let u = MapSpec::parse_cli("unicritical:2:-1").unwrap();
        assert_eq!(u.to_endomorphism().unwrap(), Endomorphism::unicritical(2, -1).unwrap());
        let x = PointSpec::parse_cli("1/2,3").unwrap();
        assert!(matches!(x.to_point().unwrap(), DynPoint::Rational(_)));
        let z = PointSpec::parse_cli("zeta:7:1").unwrap();
        assert_eq!(z, PointSpec::Cyclotomic { m: 7, exp: vec![1] });
        let a = PointSpec::parse_cli("minpoly:-2,0,1").unwrap();
        assert!(matches!(a.to_point().unwrap(), DynPoint::Algebraic(_)));
    }

    #[test]
    fn ranges() {
        assert_eq!(parse_range_list("5,101,1009").unwrap(), vec![5, 101, 1009]);
        assert_eq!(parse_range_list("10..30:10, 7").unwrap(), vec![10, 20, 30, 7]);
        assert!(parse_range_list("3..1").is_err());
        assert!(parse_range_list("a").is_err());
    }

    #[test]
    fn lattice_json() {
        let l: LatticeSpec = serde_json::from_str(r#"{"rank":2,"gram":[["2","1/2"],["1/2",3]],"torsion":4}"#).unwrap();
        let lat = l.to_lattice().unwrap();
        assert_eq!(lat.rank(), 2);
        assert_eq!(lat.torsion(), &BigUint::from(4u32));
        assert_eq!(serde_json::to_string(&l).unwrap(), r#"{"rank":2,"gram":[["2","1/2"],["1/2","3"]],"torsion":4}"#);
        assert!(LatticeSpec::parse_gram("1,0;0", 1).unwrap().to_lattice().is_err());
    }
}
