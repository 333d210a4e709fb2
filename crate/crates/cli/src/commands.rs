use crate::args::{BackendArg, Cli, Command, DomainArgs, DomainKind, Format, LemmasArgs, RangeArgs, SpectrumArgs, SweepArgs, VerifyArgs};
use crate::output::{csv_line, num, write_atomic, Failure};
use gauss_neumann::ball_spectrum::{radial_spectrum, Spectrum, SpectrumEntry};
use gauss_neumann::fem2d::{mesh_domain, solve_domain, Domain2D};
use gauss_neumann::radial_ode::{lemma23_check, mu1_ball, RadialProblem, ShootingConfig};
use gauss_neumann::verify::{default_mesh_size, symmetrization_check, verify_domain, Backend, RadialFunction, VerificationRecord, VerifyOptions};
use gauss_neumann::{DomainSpec, Error};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Largest accepted relative ODE residual of a sweep row.
pub const SWEEP_TOLERANCE: f64 = 1e-7;
/// Smallest accepted gap between consecutive μ₁(B_R) in the lemma grid.
pub const GAP_TOLERANCE: f64 = 1e-9;
const SWEEP_RANGE: (f64, f64, f64) = (0.25, 4.0, 0.25);
const LEMMA_RANGE: (f64, f64, f64) = (0.5, 4.0, 0.5);
const MAX_RADIAL_REQUEST: usize = 1 << 14;

/// Rendered output and the exit code it implies.
pub struct Report {
    pub body: String,
    pub code: i32,
    /// Printed on standard error when the code is nonzero.
    pub note: Option<String>,
}

pub fn run(cli: &Cli) -> Result<Report, Failure> {
    if let Some(tol) = cli.tol {
        if !(tol.is_finite() && tol > 0.0) {
            return Err(Failure::Usage(format!("--tol must be positive, got {tol}")));
        }
    }
    let pool = thread_pool()?;
    pool.install(|| match &cli.command {
        Command::Sweep(args) => sweep(cli, args),
        Command::Spectrum(args) => spectrum(cli, args),
        Command::Verify(args) => verify(cli, args),
        Command::Lemmas(args) => lemmas(cli, args),
    })
}

fn thread_pool() -> Result<rayon::ThreadPool, Failure> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(value) = std::env::var("GNL_THREADS") {
        match value.trim().parse::<usize>() {
            Ok(n) if n > 0 => builder = builder.num_threads(n),
            _ => return Err(Failure::Usage(format!("GNL_THREADS must be a positive integer, got {value:?}"))),
        }
    }
    builder.build().map_err(|e| Failure::Solver(format!("cannot start worker threads: {e}")))
}

fn shooting(cli: &Cli) -> ShootingConfig {
    let mut config = ShootingConfig::default();
    if let Some(tol) = cli.tol {
        config.mu_tolerance = tol;
    }
    config
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("report types serialize");
    text.push('\n');
    text
}

pub fn radius_grid(range: &RangeArgs, default: (f64, f64, f64)) -> Result<Vec<f64>, Failure> {
    let radii = if !range.radii.is_empty() {
        if range.from.is_some() || range.to.is_some() || range.step.is_some() {
            return Err(Failure::Usage("give either --R or --from/--to/--step, not both".into()));
        }
        let mut radii = range.radii.clone();
        radii.sort_by(f64::total_cmp);
        radii.dedup();
        radii
    } else {
        let from = range.from.unwrap_or(default.0);
        let to = range.to.unwrap_or(default.1);
        let step = range.step.unwrap_or(default.2);
        if !(step.is_finite() && step > 0.0) {
            return Err(Failure::Usage(format!("--step must be positive, got {step}")));
        }
        if !(from.is_finite() && to.is_finite()) || to < from {
            return Err(Failure::Usage(format!("empty radius range [{from}, {to}]")));
        }
        let n = ((to - from) / step + 1e-9).floor() as usize + 1;
        (0..n).map(|k| from + k as f64 * step).collect()
    };
    if let Some(bad) = radii.iter().find(|r| !(r.is_finite() && **r > 0.0)) {
        return Err(Failure::Usage(format!("radii must be positive, got {bad}")));
    }
    Ok(radii)
}

fn parse_vertices(text: &str) -> Result<Vec<[f64; 2]>, Failure> {
    text.split(';')
        .filter(|s| !s.trim().is_empty())
        .map(|pair| {
            let coords: Vec<&str> = pair.split(',').collect();
            let parse = |s: &str| s.trim().parse::<f64>().map_err(|e| Failure::Usage(format!("bad vertex {pair:?}: {e}")));
            match coords.as_slice() {
                [x, y] => Ok([parse(x)?, parse(y)?]),
                _ => Err(Failure::Usage(format!("vertex {pair:?} is not of the form x,y"))),
            }
        })
        .collect()
}

pub fn parse_domain_json(text: &str) -> Result<DomainSpec, Failure> {
    // the tag is read first so that field errors carry their path within the variant
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| Failure::Usage(format!("domain JSON: {e}")))?;
    let kind = value.get("kind").and_then(|k| k.as_str()).ok_or_else(|| Failure::Usage("domain JSON: field `kind` is missing or not a string".into()))?;
    let fields = match &value {
        serde_json::Value::Object(map) => map.iter().filter(|(k, _)| k.as_str() != "kind").map(|(k, v)| (k.clone(), v.clone())).collect(),
        _ => unreachable!("only objects have a kind"),
    };
    let fields = serde_json::Value::Object(fields);
    fn typed<T: for<'de> Deserialize<'de>>(v: &serde_json::Value) -> Result<T, Failure> {
        serde_path_to_error::deserialize(v).map_err(|e| {
            let path = e.path().to_string();
            Failure::Usage(format!("domain JSON at `{path}`: {}", e.into_inner()))
        })
    }
    #[derive(Deserialize)]
    #[serde(deny_unknown_fields)]
    struct Ball {
        radius: f64,
    }
    #[derive(Deserialize)]
    #[serde(deny_unknown_fields)]
    struct Annulus {
        inner: f64,
        outer: f64,
    }
    #[derive(Deserialize)]
    #[serde(deny_unknown_fields)]
    struct Axes {
        a: f64,
        b: f64,
    }
    #[derive(Deserialize)]
    #[serde(deny_unknown_fields)]
    struct Polygon {
        vertices: Vec<[f64; 2]>,
    }
    Ok(match kind {
        "ball" => DomainSpec::Ball { radius: typed::<Ball>(&fields)?.radius },
        "annulus" => {
            let a: Annulus = typed(&fields)?;
            DomainSpec::Annulus { inner: a.inner, outer: a.outer }
        }
        "ellipse" => {
            let a: Axes = typed(&fields)?;
            DomainSpec::Ellipse { a: a.a, b: a.b }
        }
        "rectangle" => {
            let a: Axes = typed(&fields)?;
            DomainSpec::Rectangle { a: a.a, b: a.b }
        }
        "polygon" => DomainSpec::Polygon { vertices: typed::<Polygon>(&fields)?.vertices },
        other => {
            return Err(Failure::Usage(format!(
                "domain JSON at `kind`: unknown kind {other:?}, expected ball, annulus, ellipse, rectangle or polygon"
            )))
        }
    })
}

pub fn domain_spec(args: &DomainArgs) -> Result<DomainSpec, Failure> {
    if let Some(path) = &args.domain_file {
        let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
        return parse_domain_json(&text).map_err(|f| match f {
            Failure::Usage(s) => Failure::Usage(format!("{}: {s}", path.display())),
            other => other,
        });
    }
    let kind = args.domain.ok_or_else(|| Failure::Usage("give --domain or --domain-file".into()))?;
    let need = |flag: &str, v: Option<f64>| v.ok_or_else(|| Failure::Usage(format!("this domain needs --{flag}")));
    Ok(match kind {
        DomainKind::Ball => DomainSpec::Ball { radius: need("R", args.radius)? },
        DomainKind::Annulus => DomainSpec::Annulus { inner: need("r1", args.r1)?, outer: need("r2", args.r2)? },
        DomainKind::Ellipse => DomainSpec::Ellipse { a: need("a", args.a)?, b: need("b", args.b)? },
        DomainKind::Rectangle => DomainSpec::Rectangle { a: need("a", args.a)?, b: need("b", args.b)? },
        DomainKind::Polygon => {
            let text = args.vertices.as_deref().ok_or_else(|| Failure::Usage("this domain needs --vertices".into()))?;
            DomainSpec::Polygon { vertices: parse_vertices(text)? }
        }
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    #[serde(rename = "R")]
    pub radius: f64,
    pub mu1: f64,
    pub mu1_minus_1: f64,
    pub residual: f64,
}

fn sweep(cli: &Cli, args: &SweepArgs) -> Result<Report, Failure> {
    let tol = cli.tol.unwrap_or(SWEEP_TOLERANCE);
    let radii = radius_grid(&args.range, SWEEP_RANGE)?;
    let config = ShootingConfig::default();
    let m = args.m;
    let rows: Vec<SweepRow> = radii
        .par_iter()
        .map(|&radius| {
            let pair = mu1_ball(m, radius, &config)?;
            let problem = RadialProblem::ball(m, 1, radius)?;
            Ok(SweepRow { radius, mu1: pair.mu, mu1_minus_1: pair.mu - 1.0, residual: pair.ode_residual(&problem) })
        })
        .collect::<Result<_, Error>>()?;
    let body = match cli.format.unwrap_or(Format::Csv) {
        Format::Json => to_json(&rows),
        Format::Csv => {
            let mut out = String::from("R,mu1,mu1_minus_1,residual\n");
            for r in &rows {
                out += &csv_line(&[num(r.radius), num(r.mu1), num(r.mu1_minus_1), num(r.residual)]);
            }
            out
        }
    };
    let bad: Vec<String> = rows.iter().filter(|r| !(r.residual < tol)).map(|r| num(r.radius)).collect();
    let note = (!bad.is_empty()).then(|| format!("residual above {tol:e} at R = {}", bad.join(", ")));
    Ok(Report { body, code: if bad.is_empty() { 0 } else { 1 }, note })
}

fn backend(arg: BackendArg) -> Backend {
    match arg {
        BackendArg::Auto => Backend::Auto,
        BackendArg::Radial => Backend::Radial,
        BackendArg::Fem => Backend::Fem,
    }
}

fn uses_fem(spec: &DomainSpec, arg: BackendArg) -> Result<bool, Failure> {
    match arg {
        BackendArg::Fem => Ok(true),
        BackendArg::Auto => Ok(!spec.is_radial()),
        BackendArg::Radial if spec.is_radial() => Ok(false),
        BackendArg::Radial => Err(Failure::Usage(format!("the radial backend cannot handle a {}", spec.kind()))),
    }
}

fn spectrum(cli: &Cli, args: &SpectrumArgs) -> Result<Report, Failure> {
    let spec = domain_spec(&args.domain)?;
    let m = args.m;
    spec.validate(m)?;
    if args.count == 0 {
        return Err(Failure::Usage("--count must be at least 1".into()));
    }
    let fem = uses_fem(&spec, args.backend)?;
    if !fem && args.mesh_out.is_some() {
        return Err(Failure::Usage("--mesh-out needs the finite-element backend".into()));
    }
    let result = if fem {
        if m != 2 {
            return Err(Failure::Usage(format!("finite elements need --m 2, got {m}")));
        }
        let planar = Domain2D::from_spec(&spec)?;
        let h = args.h.unwrap_or_else(|| default_mesh_size(&planar));
        let solution = solve_domain(&planar, h, args.count - 1)?;
        if let Some(path) = &args.mesh_out {
            write_atomic(path, solution.mesh.to_text().as_bytes())?;
        }
        let entries = solution
            .result
            .eigenvalues
            .iter()
            .take(args.count)
            .map(|&mu| SpectrumEntry { mu, angular_index_l: None, radial_index_n: None, multiplicity: 1 })
            .collect();
        Spectrum { domain: spec, m, entries, modes: Vec::new(), cutoff_ground: None }
    } else {
        let config = shooting(cli);
        let mut request = args.count;
        loop {
            let mut s = radial_spectrum(m, &spec, request, &config)?;
            if s.entries.len() >= args.count {
                s.entries.truncate(args.count);
                break s;
            }
            request *= 2;
            if request > MAX_RADIAL_REQUEST {
                return Err(Failure::Solver(format!("could not collect {} distinct modes", args.count)));
            }
        }
    };
    let body = match cli.format.unwrap_or(Format::Json) {
        Format::Json => to_json(&result),
        Format::Csv => {
            let mut out = String::from("mu,l,n,mult\n");
            let opt = |v: Option<usize>| v.map(|v| v.to_string()).unwrap_or_default();
            for e in &result.entries {
                out += &csv_line(&[num(e.mu), opt(e.angular_index_l), opt(e.radial_index_n), e.multiplicity.to_string()]);
            }
            out
        }
    };
    Ok(Report { body, code: 0, note: None })
}

#[derive(Deserialize)]
#[serde(untagged)]
enum OverrideFile {
    List(Vec<f64>),
    Object { spectrum: Vec<f64> },
}

fn read_override(path: &Path) -> Result<Vec<f64>, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    match serde_json::from_str::<OverrideFile>(&text) {
        Ok(OverrideFile::List(v)) | Ok(OverrideFile::Object { spectrum: v }) => Ok(v),
        Err(_) => Err(Failure::Usage(format!(
            "{}: expected a JSON array of eigenvalues or an object with a `spectrum` array",
            path.display()
        ))),
    }
}

fn verification_csv(record: &VerificationRecord) -> String {
    let mut out = String::from("step,index,left,right,slack,tolerance,satisfied\n");
    for r in &record.chain.records {
        let step = serde_json::to_value(r.step).ok().and_then(|v| v.as_str().map(str::to_owned)).unwrap_or_default();
        let index = r.index.map(|i| i.to_string()).unwrap_or_default();
        out += &csv_line(&[step, index, num(r.left), num(r.right), num(r.slack), num(r.tolerance), r.satisfied.to_string()]);
    }
    let q = &record.inequality;
    out += &csv_line(&[
        "main_inequality".into(),
        String::new(),
        num(q.lhs),
        num(q.rhs),
        num(q.margin),
        num(q.tolerance),
        q.satisfied.to_string(),
    ]);
    out
}

fn verify(cli: &Cli, args: &VerifyArgs) -> Result<Report, Failure> {
    let spec = domain_spec(&args.domain)?;
    spec.validate(args.m)?;
    let fem = uses_fem(&spec, args.backend)?;
    if !fem && args.mesh_out.is_some() {
        return Err(Failure::Usage("--mesh-out needs the finite-element backend".into()));
    }
    let options = VerifyOptions {
        backend: backend(args.backend),
        mesh_size: args.h,
        shooting: shooting(cli),
        spectrum_override: args.spectrum_override.as_deref().map(read_override).transpose()?,
    };
    let record = verify_domain(&spec, args.m, &options)?;
    if let Some(path) = &args.mesh_out {
        let planar = Domain2D::from_spec(&spec)?;
        let mesh = mesh_domain(&planar, args.h.unwrap_or_else(|| default_mesh_size(&planar)))?;
        write_atomic(path, mesh.to_text().as_bytes())?;
    }
    let body = match cli.format.unwrap_or(Format::Json) {
        Format::Json => to_json(&record),
        Format::Csv => verification_csv(&record),
    };
    let note = (!record.passed).then(|| {
        let failed: Vec<String> = record
            .chain
            .records
            .iter()
            .filter(|r| !r.satisfied)
            .map(|r| format!("{:?}{}", r.step, r.index.map(|i| format!("[{i}]")).unwrap_or_default()))
            .collect();
        format!(
            "verification failed: margin {:e} (tolerance {:e}), unsatisfied chain steps: [{}]",
            record.inequality.margin,
            record.inequality.tolerance,
            failed.join(", ")
        )
    });
    Ok(Report { body, code: if record.passed { 0 } else { 1 }, note })
}

#[derive(Debug, Clone, Serialize)]
pub struct LemmaRecord {
    pub check: &'static str,
    pub m: usize,
    pub point: String,
    pub passed: bool,
    pub slack: Option<f64>,
    pub detail: String,
}

struct RearrangementCase {
    m: usize,
    domain: DomainSpec,
    h: RadialFunction,
}

fn random_cases(ms: &[usize], count: usize, seed: u64) -> Vec<RearrangementCase> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|k| {
            let m = ms[k % ms.len()];
            let inner = rng.gen_range(0.1..1.0);
            let outer = inner + rng.gen_range(0.2..1.5);
            let steps = rng.gen_range(1..=4);
            let mut breaks: Vec<f64> = (0..steps).map(|_| rng.gen_range(0.05..3.0)).collect();
            breaks.sort_by(f64::total_cmp);
            breaks.dedup();
            let mut values = vec![rng.gen_range(0.5..2.0)];
            for _ in 0..breaks.len() {
                let last = values[values.len() - 1];
                values.push(last - rng.gen_range(0.0..1.0));
            }
            RearrangementCase { m, domain: DomainSpec::Annulus { inner, outer }, h: RadialFunction::Step { breaks, values } }
        })
        .collect()
}

fn describe(domain: &DomainSpec) -> String {
    match domain {
        DomainSpec::Annulus { inner, outer } => format!("annulus({} {})", num(*inner), num(*outer)),
        DomainSpec::Ball { radius } => format!("ball({})", num(*radius)),
        other => other.kind().to_string(),
    }
}

fn rearrangement_record(case: &RearrangementCase) -> LemmaRecord {
    let point = describe(&case.domain);
    match symmetrization_check(&case.domain, case.m, &case.h) {
        Ok(r) => LemmaRecord {
            check: "rearrangement",
            m: case.m,
            point,
            passed: r.passed,
            slack: Some(r.slack),
            detail: format!("domain {} ball {} tolerance {}", num(r.domain_side), num(r.ball_side), num(r.tolerance)),
        },
        Err(e) => LemmaRecord { check: "rearrangement", m: case.m, point, passed: false, slack: None, detail: e.to_string() },
    }
}

fn lemmas(cli: &Cli, args: &LemmasArgs) -> Result<Report, Failure> {
    if args.m.is_empty() || args.m.iter().any(|&m| m < 2) {
        return Err(Failure::Usage("--m needs dimensions of at least 2".into()));
    }
    let radii = radius_grid(&args.range, LEMMA_RANGE)?;
    let gap_tol = cli.tol.unwrap_or(GAP_TOLERANCE);
    let config = ShootingConfig::default();
    let points: Vec<(usize, f64)> = args.m.iter().flat_map(|&m| radii.iter().map(move |&r| (m, r))).collect();
    let pairs = points.par_iter().map(|&(m, r)| mu1_ball(m, r, &config)).collect::<Result<Vec<_>, Error>>()?;

    let mut records = Vec::new();
    for (block, &m) in args.m.iter().enumerate() {
        let pairs = &pairs[block * radii.len()..(block + 1) * radii.len()];
        for (w, r) in pairs.windows(2).zip(radii.windows(2)) {
            let gap = w[0].mu - w[1].mu;
            records.push(LemmaRecord {
                check: "mu1_decreasing",
                m,
                point: format!("R {} -> {}", num(r[0]), num(r[1])),
                passed: gap > gap_tol,
                slack: Some(gap),
                detail: format!("mu1 {} -> {}", num(w[0].mu), num(w[1].mu)),
            });
        }
        for (pair, &r) in pairs.iter().zip(&radii) {
            records.push(LemmaRecord {
                check: "mu1_above_one",
                m,
                point: format!("R {}", num(r)),
                passed: pair.mu > 1.0,
                slack: Some(pair.mu - 1.0),
                detail: format!("mu1 {}", num(pair.mu)),
            });
        }
        for (pair, &r) in pairs.iter().zip(&radii) {
            let s = lemma23_check(pair);
            records.push(LemmaRecord {
                check: "profile_signs",
                m,
                point: format!("R {}", num(r)),
                passed: s.passed(),
                slack: Some(s.min_interior_g_prime.min(s.tolerance - s.max_h).min(-s.h_at_outer)),
                detail: format!(
                    "min g' {} max H {} H(R) {}",
                    num(s.min_interior_g_prime),
                    num(s.max_h),
                    num(s.h_at_outer)
                ),
            });
        }
    }

    let mut cases = random_cases(&args.m, args.count, cli.seed);
    if args.inject_increasing {
        cases.push(RearrangementCase {
            m: args.m[0],
            domain: DomainSpec::Annulus { inner: 0.5, outer: 1.3 },
            h: RadialFunction::Linear { intercept: 0.0, slope: 1.0 },
        });
    }
    records.extend(cases.par_iter().map(rearrangement_record).collect::<Vec<_>>());

    let body = match cli.format.unwrap_or(Format::Csv) {
        Format::Json => to_json(&records),
        Format::Csv => {
            let mut out = String::from("check,m,point,passed,slack,detail\n");
            for r in &records {
                out += &csv_line(&[
                    r.check.into(),
                    r.m.to_string(),
                    r.point.clone(),
                    r.passed.to_string(),
                    r.slack.map(num).unwrap_or_default(),
                    r.detail.replace(',', ";"),
                ]);
            }
            out
        }
    };
    let failed = records.iter().filter(|r| !r.passed).count();
    let note = (failed > 0).then(|| format!("{failed} of {} checks failed", records.len()));
    Ok(Report { body, code: if failed == 0 { 0 } else { 1 }, note })
}
