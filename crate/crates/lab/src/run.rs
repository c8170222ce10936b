//! Executes a [`RunConfig`] and assembles the report.

use anyhow::{anyhow, bail, Context};
use arakelov_core::bergman::{
    self, default_grid, distortion, distortion_difference, gromov_ratio, intersection, siu_growth_experiment,
    volume_comparison, BergmanError, Chart, CurvatureMeasure, MetricFamily, Quadrature, Section, SectionSpace,
};
use arakelov_core::dynamics::{brolin_sample, canonical_height, DynPoint};
use arakelov_core::equidist::{
    bilu_experiment, galois_orbit_cyclotomic, galois_orbit_minpoly, orbit_discrepancy_exact, star_discrepancy,
    weyl_sum, weyl_sum_cyclotomic_exact, BiluRow, TestFunctionBank, DEFAULT_TORUS_TOLERANCE,
};
use arakelov_core::heights::{self, AlgebraicP1Point};
use arakelov_core::lattice::{induced_sub_quotient, sequence_identity_holds, SublatticeEmbedding};
use arakelov_core::numkernel::Precision;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;
use serde_json::{json, Value};

use crate::config::{
    parse_config, BergmanParams, BiluParams, BrolinParams, DifferenceParams, DistortionParams, GromovParams, VolumeParams, CanonicalHeightParams, ConfigError, EquidistParams, HeightParams,
    HilbertSamuelParams, IntersectParams, LatticeParams, OrbitParams, Params, RunConfig, Schema, SiuParams,
};
use crate::fit::fit_line;
use crate::formats::MetricSpec;

/// One inequality the experiment is supposed to satisfy.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub holds: bool,
    /// `lhs <relation> rhs` is what was tested.
    pub lhs: f64,
    pub relation: String,
    pub rhs: f64,
}

impl Check {
    fn le(name: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        Check { name: name.into(), holds: lhs <= rhs, lhs, relation: "<=".into(), rhs }
    }

    fn ge(name: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        Check { name: name.into(), holds: lhs >= rhs, lhs, relation: ">=".into(), rhs }
    }
}

/// Everything a run produces.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub config: String,
    pub results: Value,
    pub certificates: Value,
    pub checks: Vec<Check>,
    /// Plot-ready table, when the command has one.
    pub csv: Option<String>,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }

    /// 0 when every check holds, 2 otherwise.
    pub fn exit_code(&self) -> u8 {
        if self.passed() {
            0
        } else {
            2
        }
    }

    pub fn report_json(&self) -> String {
        #[derive(Serialize)]
        struct Report<'a> {
            schema: Schema,
            config: &'a RawValue,
            results: &'a Value,
            certificates: Value,
        }
        let config: Box<RawValue> = RawValue::from_string(self.config.clone()).expect("config is JSON");
        let mut certificates = self.certificates.clone();
        if let Value::Object(map) = &mut certificates {
            map.insert("checks".into(), serde_json::to_value(&self.checks).expect("checks serialize"));
        }
        let r = Report { schema: Schema, config: &config, results: &self.results, certificates };
        serde_json::to_string_pretty(&r).expect("report serializes")
    }
}

/// A parsed report.
#[derive(Debug)]
pub struct ReportDoc {
    /// The config text exactly as it appears in the report.
    pub config_text: String,
    pub config: RunConfig,
    pub results: Value,
    pub certificates: Value,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawReport<'a> {
    #[allow(dead_code)]
    schema: Schema,
    #[serde(borrow)]
    config: &'a RawValue,
    results: Value,
    certificates: Value,
}

pub fn parse_report(text: &str) -> Result<ReportDoc, ConfigError> {
    let raw: RawReport = serde_json::from_str(text).map_err(|e| ConfigError {
        origin: "report".into(),
        line: e.line(),
        column: e.column(),
        path: ".".into(),
        message: e.to_string(),
    })?;
    let config_text = raw.config.get().to_string();
    let config = parse_config(&config_text, "report config")?;
    Ok(ReportDoc { config_text, config, results: raw.results, certificates: raw.certificates })
}

struct Ctx {
    precision: Precision,
    tolerance: f64,
    seed: u64,
    quad: Quadrature,
}

struct Produced {
    results: Value,
    certificates: Value,
    checks: Vec<Check>,
    csv: Option<String>,
}

/// Runs the experiment on a pool of `config.threads` workers.
pub fn run(config: &RunConfig) -> anyhow::Result<Outcome> {
    let quad = Quadrature::new(Quadrature::default().tolerance, config.quadrature_budget)
        .map_err(|e| anyhow!("quadrature_budget: {e}"))?;
    let ctx = Ctx {
        precision: Precision::bits(config.precision_bits),
        tolerance: config.tolerance,
        seed: config.seed,
        quad,
    };
    let pool = rayon::ThreadPoolBuilder::new().num_threads(config.threads).build()?;
    let p = pool.install(|| match &config.params {
        Params::Height(p) => height(&ctx, p),
        Params::CanonicalHeight(p) => canonical(&ctx, p),
        Params::Orbit(p) => orbit(&ctx, p),
        Params::Equidist(p) => equidist(&ctx, p),
        Params::Lattice(p) => lattice(p),
        Params::Bergman(p) => bergman_cmd(&ctx, p),
        Params::Intersect(p) => intersect(&ctx, p),
        Params::HilbertSamuel(p) => hilbert_samuel(&ctx, p),
        Params::Siu(p) => siu(&ctx, p),
    })?;
    Ok(Outcome { config: config.to_json(), results: p.results, certificates: p.certificates, checks: p.checks, csv: p.csv })
}

fn quad_cert(ctx: &Ctx) -> Value {
    json!({"quadrature": {"tolerance": ctx.quad.tolerance, "budget": ctx.quad.budget}})
}

fn rat(q: &BigRational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

fn csv_table(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> anyhow::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    Ok(String::from_utf8(w.into_inner().map_err(|e| anyhow!("{e}"))?)?)
}

fn height(ctx: &Ctx, p: &HeightParams) -> anyhow::Result<Produced> {
    let (value, cert) = match p.point.to_point()? {
        DynPoint::Rational(x) => (heights::naive_height_rational(&x), json!({"exact": true})),
        DynPoint::Algebraic(x) => {
            let tol = ctx.tolerance.min(ctx.precision.epsilon().sqrt());
            let v = heights::naive_height_minpoly(&x, tol, ctx.precision).map_err(|e| anyhow!("{e}"))?;
            let irr = format!("{:?}", x.irreducibility());
            (v, json!({"exact": false, "root_tolerance": tol, "degree": x.degree(), "irreducibility": irr}))
        }
        DynPoint::Cyclotomic(x) => (heights::height_cyclotomic(&x), json!({"exact": true})),
    };
    Ok(Produced { results: json!({"height": value}), certificates: cert, checks: Vec::new(), csv: None })
}

fn canonical(ctx: &Ctx, p: &CanonicalHeightParams) -> anyhow::Result<Produced> {
    let phi = p.map.to_endomorphism()?;
    let x = p.point.to_point()?;
    let t = canonical_height(&phi, &x, ctx.tolerance, ctx.precision).map_err(|e| anyhow!("canonical height: {e}"))?;
    Ok(Produced {
        results: json!({"value": t.value, "error_bound": t.error_bound, "iterations": t.iterations}),
        certificates: json!({
            "error_bound": t.error_bound,
            "transform_constant": t.transform_constant,
            "precision_bits": t.precision_bits,
            "map_kind": format!("{:?}", phi.kind()),
        }),
        checks: vec![Check::le("error_bound <= tolerance", t.error_bound, ctx.tolerance)],
        csv: None,
    })
}

fn orbit(ctx: &Ctx, p: &OrbitParams) -> anyhow::Result<Produced> {
    let tol = ctx.tolerance.min(ctx.precision.epsilon().sqrt());
    let (orbit, exact_point) = match p.point.to_point()? {
        DynPoint::Cyclotomic(x) => (galois_orbit_cyclotomic(&x), Some(x)),
        DynPoint::Algebraic(x) => (galois_orbit_minpoly(&x, tol, ctx.precision).map_err(|e| anyhow!("{e}"))?, None),
        DynPoint::Rational(x) => {
            if x.dimension() != 1 {
                bail!("orbit: rational points must lie on P^1");
            }
            let a = AlgebraicP1Point::from_rational(&x);
            (galois_orbit_minpoly(&a, tol, ctx.precision).map_err(|e| anyhow!("{e}"))?, None)
        }
    };
    let mu = orbit.measure();
    let bank = TestFunctionBank { dimension: orbit.dimension(), cutoff: p.cutoff };
    let chars = bank.characters();
    let on_torus = mu.points().iter().all(|z| z.iter().all(|c| (c.norm() - 1.0).abs() <= DEFAULT_TORUS_TOLERANCE));
    let mut results = json!({"degree": orbit.degree(), "dimension": orbit.dimension(), "on_torus": on_torus});
    let mut cert = json!({"root_tolerance": tol});
    if on_torus {
        let sums: Vec<f64> = chars
            .par_iter()
            .map(|k| weyl_sum(&mu, k, DEFAULT_TORUS_TOLERANCE).map(|z| z.norm()))
            .collect::<Result<_, _>>()
            .map_err(|e| anyhow!("{e}"))?;
        results["max_weyl"] = json!(sums.iter().copied().fold(0.0, f64::max));
        if orbit.dimension() == 1 {
            results["discrepancy"] = json!(star_discrepancy(&mu, DEFAULT_TORUS_TOLERANCE).map_err(|e| anyhow!("{e}"))?);
        }
    }
    if let Some(x) = exact_point {
        let mut best = BigRational::zero();
        for k in &chars {
            let v = weyl_sum_cyclotomic_exact(&x, k).map_err(|e| anyhow!("{e}"))?.abs();
            if v > best {
                best = v;
            }
        }
        cert["max_weyl_exact"] = json!(rat(&best));
        if let Some(d) = orbit_discrepancy_exact(&orbit) {
            cert["discrepancy_exact"] = json!(rat(&d));
        }
    }
    let dim = orbit.dimension();
    let mut header: Vec<String> = Vec::new();
    for i in 1..=dim {
        header.push(format!("re{i}"));
        header.push(format!("im{i}"));
    }
    header.push("weight".into());
    let w = 1.0 / orbit.degree() as f64;
    let rows = orbit.points().iter().map(|z| {
        let mut r: Vec<String> = z.iter().flat_map(|c| [c.re.to_string(), c.im.to_string()]).collect();
        r.push(w.to_string());
        r
    });
    let h: Vec<&str> = header.iter().map(String::as_str).collect();
    Ok(Produced { results, certificates: cert, checks: Vec::new(), csv: Some(csv_table(&h, rows)?) })
}

fn bilu_rows(orders: &[u64], cutoff: u32) -> anyhow::Result<Vec<BiluRow>> {
    let rows: Vec<Vec<BiluRow>> = orders
        .par_iter()
        .map(|&m| bilu_experiment(&[m], cutoff).map(|r| r.rows))
        .collect::<Result<_, _>>()
        .map_err(|e| anyhow!("bilu: {e}"))?;
    Ok(rows.into_iter().flatten().collect())
}

fn equidist(ctx: &Ctx, p: &EquidistParams) -> anyhow::Result<Produced> {
    match p {
        EquidistParams::Bilu(BiluParams { orders, cutoff, .. }) => {
            if orders.is_empty() {
                bail!("bilu: no orders given");
            }
            let rows = bilu_rows(orders, *cutoff)?;
            let increasing = orders.windows(2).all(|w| w[0] < w[1]);
            let mut checks = Vec::new();
            if increasing {
                for w in rows.windows(2) {
                    checks.push(Check::le(
                        format!("discrepancy({}) <= discrepancy({})", w[1].m, w[0].m),
                        w[1].discrepancy,
                        w[0].discrepancy,
                    ));
                }
            }
            let table = rows.iter().map(|r| {
                vec![
                    r.m.to_string(),
                    r.degree.to_string(),
                    r.max_weyl.to_string(),
                    r.discrepancy.to_string(),
                    rat(&r.max_weyl_exact),
                    rat(&r.discrepancy_exact),
                ]
            });
            let csv = csv_table(
                &["m", "degree", "max_weyl", "discrepancy", "max_weyl_exact", "discrepancy_exact"],
                table,
            )?;
            let results: Vec<Value> = rows
                .iter()
                .map(|r| json!({"m": r.m, "degree": r.degree, "max_weyl": r.max_weyl, "discrepancy": r.discrepancy}))
                .collect();
            let exact: Vec<Value> = rows
                .iter()
                .map(|r| json!({"m": r.m, "max_weyl": rat(&r.max_weyl_exact), "discrepancy": rat(&r.discrepancy_exact)}))
                .collect();
            Ok(Produced {
                results: json!({"cutoff": cutoff, "rows": results}),
                certificates: json!({"exact": exact}),
                checks,
                csv: Some(csv),
            })
        }
        EquidistParams::Brolin(BrolinParams { map, count, burn_in, .. }) => {
            let phi = map.to_endomorphism()?;
            let s = brolin_sample(&phi, *count, *burn_in, ctx.seed, ctx.precision).map_err(|e| anyhow!("{e}"))?;
            let pts = s.points_c64();
            let w = s.weight();
            let n = pts.len() as f64;
            let mean = pts.iter().fold(num_complex_zero(), |a, z| a + z) / n;
            let mean_modulus = pts.iter().map(|z| z.norm()).sum::<f64>() / n;
            let max_radial = pts.iter().map(|z| (z.norm() - 1.0).abs()).fold(0.0, f64::max);
            let mut ang: Vec<(f64, f64)> =
                pts.iter().map(|z| ((z.arg() / std::f64::consts::TAU).rem_euclid(1.0), w)).collect();
            ang.sort_by(|a, b| a.0.total_cmp(&b.0));
            let disc = arakelov_core::equidist::arc_discrepancy_sorted(&ang);
            let csv = csv_table(
                &["re", "im", "weight"],
                pts.iter().map(|z| vec![z.re.to_string(), z.im.to_string(), w.to_string()]),
            )?;
            Ok(Produced {
                results: json!({
                    "count": pts.len(),
                    "first_moment": {"re": mean.re, "im": mean.im},
                    "mean_modulus": mean_modulus,
                    "max_radial_deviation": max_radial,
                    "angular_discrepancy": disc,
                }),
                certificates: json!({"seed": s.seed, "burn_in": s.generations, "stream": "brolin"}),
                checks: Vec::new(),
                csv: Some(csv),
            })
        }
    }
}

fn num_complex_zero() -> arakelov_core::Complex64 {
    arakelov_core::Complex64::new(0.0, 0.0)
}

fn lattice(p: &LatticeParams) -> anyhow::Result<Produced> {
    let m = p.lattice.to_lattice()?;
    let r = m.rank();
    let count = |c: arakelov_core::lattice::BallCounter| -> u64 {
        c.top_range().collect::<Vec<_>>().into_par_iter().map(|t| c.count_with_top(t)).sum()
    };
    let n0 = count(m.h0_counter(p.rank_cap).map_err(|e| anyhow!("lattice: {e}"))?);
    let n1 = count(m.h1_counter(p.rank_cap).map_err(|e| anyhow!("lattice: {e}"))?);
    let tor_ln = arakelov_core::numkernel::arith::ln_biguint(m.torsion());
    let h0 = (n0 as f64).ln() + tor_ln;
    let h1 = (n1 as f64).ln();
    let chi = m.chi();
    let defect = h0 - h1 - chi;
    let scale = r as f64 * ((r + 1) as f64).ln();
    let mut results = json!({
        "rank": r,
        "chi": chi,
        "h0": h0,
        "h1": h1,
        "defect": defect,
        "defect_ratio": if scale > 0.0 { json!(defect.abs() / scale) } else { Value::Null },
    });
    let det = m.det();
    let mut cert = json!({
        "det": rat(&det),
        "torsion": m.torsion().to_string(),
        "h0_count": n0,
        "h1_count": n1,
    });
    let mut checks = Vec::new();
    if let Some(gens) = &p.sublattice {
        let s = SublatticeEmbedding::new(gens.iter().map(|g| g.iter().map(|x| x.0.clone()).collect()).collect());
        let (sub, quot) = induced_sub_quotient(&m, &s).map_err(|e| anyhow!("sublattice: {e}"))?;
        let holds = sequence_identity_holds(&m, &sub, &quot);
        let ln_v = arakelov_core::lattice::ln_unit_ball_volume;
        let balls = ln_v(r) - ln_v(sub.rank()) - ln_v(quot.rank());
        let additivity = chi - sub.chi() - quot.chi();
        results["sub_chi"] = json!(sub.chi());
        results["quotient_chi"] = json!(quot.chi());
        results["chi_difference"] = json!(additivity);
        results["ball_volume_term"] = json!(balls);
        results["identity_residual"] = json!(additivity - balls);
        cert["sub_det"] = json!(rat(&sub.det()));
        cert["quotient_det"] = json!(rat(&quot.det()));
        checks.push(Check {
            name: "det M = det M' * det M'' (exact)".into(),
            holds,
            lhs: if holds { 0.0 } else { 1.0 },
            relation: "==".into(),
            rhs: 0.0,
        });
    }
    Ok(Produced { results, certificates: cert, checks, csv: None })
}

fn grid_pairs(n: &[u32], j: &[u32]) -> Vec<(u32, u32)> {
    n.iter().flat_map(|&a| j.iter().map(move |&b| (a, b))).collect()
}

fn headroom(k: f64, n: u32, j: u32) -> f64 {
    1.0 + k * (1.0 / n as f64 + if j > 0 { 1.0 / j as f64 } else { 0.0 })
}

fn bergman_cmd(ctx: &Ctx, p: &BergmanParams) -> anyhow::Result<Produced> {
    match p {
        BergmanParams::Distortion(DistortionParams { metric, measure, radii, angles, .. }) => {
            let g = metric.to_metric()?;
            let mu = CurvatureMeasure::induced_by(&measure.as_ref().unwrap_or(metric).to_metric()?)
                .map_err(|e| anyhow!("measure: {e}"))?;
            let space = SectionSpace::new(g.degree()).map_err(|e| anyhow!("metric: {e}"))?;
            let prof = distortion(space, &g, &mu, default_grid(*radii, *angles), &ctx.quad)
                .map_err(|e| anyhow!("distortion: {e}"))?;
            let rows = prof.grid.iter().zip(&prof.values).map(|(c, v)| {
                let chart = match c.chart {
                    Chart::Zero => "0",
                    Chart::Infinity => "inf",
                };
                vec![chart.to_string(), c.u.re.to_string(), c.u.im.to_string(), v.to_string()]
            });
            let csv = csv_table(&["chart", "u_re", "u_im", "b"], rows)?;
            Ok(Produced {
                results: json!({
                    "degree": space.degree,
                    "dim": space.dim(),
                    "sup": prof.sup_refined,
                    "grid_sup": prof.sup,
                    "inf": prof.inf,
                }),
                certificates: quad_cert(ctx),
                checks: Vec::new(),
                csv: Some(csv),
            })
        }
        BergmanParams::Difference(DifferenceParams { l, m, n, j, k, .. }) => {
            let (lm, mm) = (l.to_metric()?, m.to_metric()?);
            let pairs = grid_pairs(n, j);
            let rows: Vec<(u32, u32, Option<bergman::DifferenceReport>)> = pairs
                .par_iter()
                .map(|&(a, b)| match distortion_difference(a, b, &lm, &mm, default_grid(24, 48), &ctx.quad) {
                    Ok(r) => Ok((a, b, Some(r))),
                    Err(BergmanError::NegativeDegree) => Ok((a, b, None)),
                    Err(e) => Err(anyhow!("N={a}, j={b}: {e}")),
                })
                .collect::<anyhow::Result<_>>()?;
            let dim_nl = |a: u32| (a as i64 * lm.degree() + 1) as f64;
            let mut checks = Vec::new();
            let mut out = Vec::new();
            let mut table = Vec::new();
            for (a, b, r) in &rows {
                // an empty space has b = 0
                let sup = r.as_ref().map_or(0.0, |r| r.profile.sup_refined);
                let degree = r.as_ref().map_or(-1, |r| r.degree as i64);
                let bound = k.map(|k| dim_nl(*a) * headroom(k, *a, *b));
                if let Some(bound) = bound {
                    checks.push(Check::le(format!("sup b(N={a}, j={b}) <= bound"), sup, bound));
                }
                out.push(json!({"n": a, "j": b, "degree": degree, "sup": sup, "ratio": sup / dim_nl(*a), "bound": bound}));
                table.push(vec![
                    a.to_string(),
                    b.to_string(),
                    degree.to_string(),
                    dim_nl(*a).to_string(),
                    sup.to_string(),
                    (sup / dim_nl(*a)).to_string(),
                    bound.map_or(String::new(), |v| v.to_string()),
                ]);
            }
            let csv = csv_table(&["n", "j", "degree", "dim_nl", "sup_b", "ratio", "bound"], table)?;
            Ok(Produced { results: json!({"rows": out}), certificates: quad_cert(ctx), checks, csv: Some(csv) })
        }
        BergmanParams::Volume(VolumeParams { l, m, section, n, j, k, .. }) => {
            let (lm, mm) = (l.to_metric()?, m.to_metric()?);
            let s = Section::new(section.clone()).map_err(|e| anyhow!("section: {e}"))?;
            let pairs = grid_pairs(n, j);
            let rows: Vec<_> = pairs
                .par_iter()
                .map(|&(a, b)| match volume_comparison(a, b, &s, &lm, &mm, &ctx.quad) {
                    Ok(r) => Ok((a, b, Some(r))),
                    Err(BergmanError::NegativeDegree) => Ok((a, b, None)),
                    Err(e) => Err(anyhow!("N={a}, j={b}: {e}")),
                })
                .collect::<anyhow::Result<Vec<_>>>()?;
            let mut checks = Vec::new();
            let mut out = Vec::new();
            let mut table = Vec::new();
            for (a, b, r) in &rows {
                let Some(r) = r else {
                    out.push(json!({"n": a, "j": b, "empty": true}));
                    continue;
                };
                let bound = k.map(|k| r.comparator * headroom(k, *a, *b));
                if let Some(bound) = bound {
                    checks.push(Check::ge(format!("log volume ratio (N={a}, j={b}) >= bound"), r.log_volume_ratio, bound));
                }
                out.push(json!({
                    "n": a, "j": b,
                    "log_volume_ratio": r.log_volume_ratio,
                    "comparator": r.comparator,
                    "integral_log_norm": r.integral_log_norm,
                    "bound": bound,
                }));
                table.push(vec![
                    a.to_string(),
                    b.to_string(),
                    r.log_volume_ratio.to_string(),
                    r.comparator.to_string(),
                    bound.map_or(String::new(), |v| v.to_string()),
                ]);
            }
            let sup = bergman::sup_norm(&s, &mm).map_err(|e| anyhow!("section: {e}"))?;
            let mut cert = quad_cert(ctx);
            cert["section_sup_norm"] = json!(sup);
            let csv = csv_table(&["n", "j", "log_volume_ratio", "comparator", "bound"], table)?;
            Ok(Produced { results: json!({"rows": out}), certificates: cert, checks, csv: Some(csv) })
        }
        BergmanParams::Gromov(GromovParams { l, m, sums, trials, .. }) => {
            let (lm, mm) = (l.to_metric()?, m.to_metric()?);
            let ratios: Vec<(u32, f64)> = sums
                .par_iter()
                .map(|&s| {
                    let (k, j) = (s.div_ceil(2), s / 2);
                    gromov_ratio(k, j, &lm, &mm, *trials, ctx.seed, &ctx.quad).map(|r| (s, r))
                })
                .collect::<Result<_, _>>()
                .map_err(|e| anyhow!("gromov: {e}"))?;
            let xs: Vec<f64> = ratios.iter().map(|&(s, _)| (s as f64).ln()).collect();
            let ys: Vec<f64> = ratios.iter().map(|&(_, r)| r.ln()).collect();
            let exponent = if xs.len() >= 2 { Some(fit_line(&xs, &ys).slope) } else { None };
            let csv = csv_table(&["k_plus_j", "max_ratio"], ratios.iter().map(|(s, r)| vec![s.to_string(), r.to_string()]))?;
            let rows: Vec<Value> = ratios.iter().map(|(s, r)| json!({"k_plus_j": s, "max_ratio": r})).collect();
            Ok(Produced {
                results: json!({"rows": rows, "exponent": exponent}),
                certificates: json!({"trials": trials, "seed": ctx.seed, "stream": "gromov"}),
                checks: Vec::new(),
                csv: Some(csv),
            })
        }
    }
}

fn intersect(ctx: &Ctx, p: &IntersectParams) -> anyhow::Result<Produced> {
    let a = p.a.to_metric()?;
    let b = p.b.as_ref().unwrap_or(&p.a).to_metric()?;
    let v = intersection(&a, &b, &ctx.quad).map_err(|e| anyhow!("intersection: {e}"))?;
    let mut results = json!({"value": v});
    let same = p.b.as_ref().map_or(true, |b| *b == p.a);
    if let (true, Some(c)) = (same, p.a.as_c()) {
        results["closed_form"] = json!(0.5 * (1.0 + c.ln()));
    }
    Ok(Produced { results, certificates: quad_cert(ctx), checks: Vec::new(), csv: None })
}

fn chi_rows(points: &[arakelov_core::bergman::ChiPoint]) -> anyhow::Result<(Vec<Value>, String)> {
    let rows = points.iter().map(|c| json!({"n": c.n, "chi": c.chi, "normalized": c.normalized})).collect();
    let csv = csv_table(
        &["n", "chi", "normalized"],
        points.iter().map(|c| vec![c.n.to_string(), c.chi.to_string(), c.normalized.map_or(String::new(), |v| v.to_string())]),
    )?;
    Ok((rows, csv))
}

fn require_degree_one(spec: &MetricSpec, what: &str) -> anyhow::Result<MetricFamily> {
    let m = spec.to_metric()?;
    if m.degree() != 1 {
        bail!("{what}: a metric on O(1) is required, got degree {}", m.degree());
    }
    Ok(m)
}

fn hilbert_samuel(ctx: &Ctx, p: &HilbertSamuelParams) -> anyhow::Result<Produced> {
    let m = require_degree_one(&p.metric, "metric")?;
    if p.ns.is_empty() {
        bail!("ns: empty range");
    }
    let target = intersection(&m, &m, &ctx.quad).map_err(|e| anyhow!("{e}"))?;
    let pts: Vec<_> = p
        .ns
        .par_iter()
        .map(|&n| bergman::chi_l2_series(&m, &[n], &ctx.quad).map(|v| v[0]))
        .collect::<Result<_, _>>()
        .map_err(|e| anyhow!("chi: {e}"))?;
    let last = pts.iter().max_by_key(|c| c.n).expect("nonempty");
    let mut checks = Vec::new();
    if let Some(v) = last.normalized {
        checks.push(Check::le(format!("|chi/(N^2/2) - c1^2| at N={}", last.n), (v - target).abs(), p.band));
    }
    let (rows, csv) = chi_rows(&pts)?;
    Ok(Produced {
        results: json!({"self_intersection": target, "rows": rows}),
        certificates: quad_cert(ctx),
        checks,
        csv: Some(csv),
    })
}

fn siu(ctx: &Ctx, p: &SiuParams) -> anyhow::Result<Produced> {
    let l = p.l.to_metric()?;
    let m = require_degree_one(&p.m, "m")?;
    if p.ns.is_empty() {
        bail!("ns: empty range");
    }
    let reports: Vec<_> = p
        .ns
        .par_iter()
        .map(|&n| siu_growth_experiment(&l, &m, &[n], &ctx.quad))
        .collect::<Result<_, _>>()
        .map_err(|e| anyhow!("siu: {e}"))
        .context("siu needs L on O(2) and M on O(1), both positive")?;
    let first = &reports[0];
    let pts: Vec<_> = reports.iter().map(|r| r.points[0]).collect();
    let last = pts.iter().max_by_key(|c| c.n).expect("nonempty");
    let measured = last.normalized.expect("n > 0");
    let mut checks = Vec::new();
    if first.coefficient > 0.0 {
        checks.push(Check::ge(format!("chi/N^2 at N={}", last.n), measured, first.coefficient - p.slack));
    }
    let (rows, csv) = chi_rows(&pts)?;
    Ok(Produced {
        results: json!({
            "l_squared": first.l_squared,
            "l_dot_m": first.l_dot_m,
            "coefficient": first.coefficient,
            "measured_last": measured,
            "measured_min": pts.iter().filter_map(|c| c.normalized).fold(f64::INFINITY, f64::min),
            "rows": rows,
        }),
        certificates: quad_cert(ctx),
        checks,
        csv: Some(csv),
    })
}
