use std::fs;
use std::path::{Path, PathBuf};

use num_traits::{One, ToPrimitive, Zero};
use serde_json::json;

use nlbox_core::bounds::{
    chsh_of_settings, consistency_threshold, fine_grained_zeta, j_local_max, j_nonlocal_max,
    mean_square_chsh, mean_square_tripartite_i, monte_carlo_tradeoff, p_w1_from_p, p_w1_of_e2,
    parse_settings_quad, q_w0_from_p, q_w0_of_e2, quad_correlations, reference_tripartite_settings,
    render_tradeoff_csv, tradeoff_curve, tripartite_bell_i, tripartite_bell_j_bound, SettingsQuad,
    TripartiteSettings,
};
use nlbox_core::boxes::{sampler_report, NoiseParameter};
use nlbox_core::fixtures::{
    infer_completions, load_fixture_file, parse_fixture_unchecked, reference_fixture,
    shared_pair_union_size, verify_fixture, REFERENCE_N6_RAW,
};
use nlbox_core::input_spaces::{enumerate_inputs, enumerate_translations, render_space};
use nlbox_core::invariant::{angle_scan_csv, chsh_max_over_angles, invariant_e};
use nlbox_core::report::{format_sig, ratio_string};
use nlbox_core::symmetry::{partition_by_symmetry, render_partition, verify_partition};
use nlbox_core::{BitVector, InputPoint, Rational};

use crate::report::RunReport;
use crate::{Command, Parameter};

const DEFAULT_SETTINGS: &str = include_str!("../data/default_settings.txt");

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] nlbox_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0}")]
    Usage(String),
}

type Result<T> = std::result::Result<T, CliError>;

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.into(),
        source,
    })
}

fn write(report: &mut RunReport, path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.into(),
        source,
    })?;
    report.artifacts.push(path.display().to_string());
    Ok(())
}

/// `a/b`, an integer or a plain decimal such as `0.75`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || CliError::Usage(format!("cannot read {s:?} as a probability"));
    let s = s.trim();
    if let Some((a, b)) = s.split_once('/') {
        let a: i64 = a.trim().parse().map_err(|_| bad())?;
        let b: i64 = b.trim().parse().map_err(|_| bad())?;
        if b == 0 {
            return Err(bad());
        }
        return Ok(Rational::new(a, b));
    }
    let (int, frac) = s.split_once('.').unwrap_or((s, ""));
    if frac.len() > 15 || !frac.bytes().all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let int: i64 = if int.is_empty() {
        0
    } else {
        int.parse().map_err(|_| bad())?
    };
    let scale = 10i64.pow(frac.len() as u32);
    let frac: i64 = if frac.is_empty() {
        0
    } else {
        frac.parse().map_err(|_| bad())?
    };
    Ok(Rational::new(int * scale + frac, scale))
}

fn noise(s: &str) -> Result<NoiseParameter> {
    Ok(NoiseParameter::new(parse_rational(s)?)?)
}

/// Zero-pads `v` on the right to length `n`.
fn pad(v: &InputPoint, n: usize) -> Result<InputPoint> {
    if v.len() > n {
        return Err(CliError::Usage(format!("{v} is longer than n = {n}")));
    }
    let b = BitVector::from_bits(n, v.bits() << (n - v.len()))?;
    Ok(InputPoint::new(b)?)
}

fn pad_quad(q: &SettingsQuad, n: usize) -> Result<SettingsQuad> {
    Ok(SettingsQuad::new(
        pad(&q.x1, n)?,
        pad(&q.x2, n)?,
        pad(&q.y1, n)?,
        pad(&q.y2, n)?,
    )?)
}

fn settings_quad(path: Option<&Path>, n: Option<usize>) -> Result<SettingsQuad> {
    match path {
        Some(p) => {
            let q = parse_settings_quad(&read(p)?)?;
            if let Some(n) = n.filter(|&n| n != q.n()) {
                return Err(CliError::Usage(format!(
                    "settings have n = {}, --n is {n}",
                    q.n()
                )));
            }
            Ok(q)
        }
        None => {
            let q = parse_settings_quad(DEFAULT_SETTINGS)?;
            match n {
                Some(n) => pad_quad(&q, n),
                None => Ok(q),
            }
        }
    }
}

fn ratio(r: Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

pub fn run(cmd: &Command) -> Result<RunReport> {
    match cmd {
        Command::Inputs { n, out } => inputs(*n, out.as_deref()),
        Command::Partition {
            n,
            verify,
            matrices,
            out,
        } => partition(*n, *verify, *matrices, out.as_deref()),
        Command::Fixtures { file, raw, verify } => fixtures(file.as_deref(), *raw, *verify),
        Command::Tradeoff { steps, out } => tradeoff(*steps, out.as_deref()),
        Command::Tsirelson => tsirelson(),
        Command::Variance { n, settings } => variance(*n, settings.as_deref()),
        Command::Uncertainty { n } => uncertainty(*n),
        Command::Tripartite {
            n,
            parameter,
            budget,
        } => tripartite(*n, *parameter, *budget),
        Command::Mc { p, trials, seed } => mc(p, *trials, *seed),
        Command::Invariant { grid, out } => invariant(*grid, out.as_deref()),
        Command::Chsh { settings, p } => chsh(settings.as_deref(), p),
        Command::Sample {
            x,
            y,
            p,
            trials,
            seed,
        } => sample(x, y, p, *trials, *seed),
    }
}

fn inputs(n: usize, out: Option<&Path>) -> Result<RunReport> {
    let mut r = RunReport::new("inputs");
    r.param("n", n);
    let xs = enumerate_inputs(n)?;
    let ts = enumerate_translations(n)?;
    let half = 1usize << (n - 1);
    let text = render_space(
        &format!("inputs, n = {n}"),
        xs.points().iter().map(|p| &**p),
    ) + &render_space(&format!("translations, n = {n}"), ts.iter().map(|t| &**t));
    r.check(
        "input count",
        xs.len() == half,
        format!("{} of {half}", xs.len()),
    );
    r.check(
        "translation count",
        ts.len() == half,
        format!("{} of {half}", ts.len()),
    );
    r.check(
        "parities",
        xs.points().iter().all(|x| x.parity() == 1) && ts.iter().all(|t| t.parity() == 0),
        "",
    );
    r.result = json!({
        "inputs": xs.points().iter().map(|p| p.to_string()).collect::<Vec<_>>(),
        "translations": ts.iter().map(|t| t.to_string()).collect::<Vec<_>>(),
    });
    match out {
        Some(path) => write(&mut r, path, &text)?,
        None => r.text.extend(text.lines().map(String::from)),
    }
    Ok(r)
}

fn partition(
    n: usize,
    verify: bool,
    matrices: Option<usize>,
    out: Option<&Path>,
) -> Result<RunReport> {
    let mut r = RunReport::new("partition");
    r.param("n", n).param("verify", verify);
    let p = partition_by_symmetry(n)?;
    let limit = matrices.unwrap_or(if n == 6 { 4 } else { 0 });
    r.param("matrices", limit);
    let text = render_partition(&p, limit)?;
    if verify {
        for c in verify_partition(&p) {
            r.check(c.name, c.passed, c.detail);
        }
    }
    r.result = json!({
        "subsets": p.subsets.len(),
        "construction": p.construction,
        "translations": p.subsets.iter()
            .map(|s| s.translations().iter().map(|t| t.to_string()).collect::<Vec<_>>())
            .collect::<Vec<_>>(),
    });
    match out {
        Some(path) => write(&mut r, path, &text)?,
        None => r.text.extend(text.lines().map(String::from)),
    }
    Ok(r)
}

fn fixtures(file: Option<&Path>, raw: bool, verify: bool) -> Result<RunReport> {
    let mut r = RunReport::new("fixtures");
    let fx = match (file, raw) {
        (Some(path), _) => {
            r.param("file", path.display());
            load_fixture_file(path)?
        }
        (None, true) => {
            r.param("file", "shipped (raw)");
            let fx = parse_fixture_unchecked(REFERENCE_N6_RAW)?;
            for e in infer_completions(&fx)? {
                let fill: Vec<String> = e.inferred.iter().map(|v| v.to_string()).collect();
                r.line(format!(
                    "subset {} {}: {} listed twice, closure completes with {}",
                    e.subset,
                    e.section,
                    e.duplicate,
                    fill.join(", ")
                ));
            }
            fx
        }
        (None, false) => {
            r.param("file", "shipped");
            reference_fixture()
        }
    };
    r.param("verify", verify);
    r.line(format!(
        "n = {}, {} inputs, {} translations, {} subsets",
        fx.n,
        fx.inputs.len(),
        fx.translations.len(),
        fx.subsets.len()
    ));
    let mut result = json!({ "fixture": fx });
    if verify {
        let report = verify_fixture(&fx);
        for c in &report.checks {
            r.check(format!("({}) {}", c.id, c.name), c.passed, c.detail.clone());
        }
        let union = shared_pair_union_size(&fx);
        let k = fx.subsets.len();
        let size = fx.subsets.first().map_or(0, |s| s.translations.len());
        r.check(
            "shared-pair count",
            union == fx.translations.len(),
            format!("{k}×{size} − {k}×2 + 2 = {union}"),
        );
        r.line(format!("W evaluated on {} quadruples", report.w_quadruples));
        r.line(format!(
            "generated partition equals listed subsets: {}",
            if report.matches_generated {
                "yes"
            } else {
                "no"
            }
        ));
        result["verification"] = json!(report);
    }
    r.result = result;
    Ok(r)
}

fn tradeoff(steps: usize, out: Option<&Path>) -> Result<RunReport> {
    let mut r = RunReport::new("tradeoff");
    r.param("steps", steps);
    let points = tradeoff_curve(steps)?;
    let e_max = consistency_threshold().e;
    let misplaced: Vec<String> = points
        .iter()
        .filter(|p| {
            let inside = p.e.abs() <= e_max + 1e-12;
            let below = p.sum <= 1.0 + 1e-12;
            inside != below
        })
        .map(|p| format_sig(p.e, 12))
        .collect();
    r.check(
        "Q+P ≤ 1 exactly on |E| ≤ √2/2",
        misplaced.is_empty(),
        misplaced.join(", "),
    );
    let csv = render_tradeoff_csv(&points);
    r.result = json!({ "points": points.len() });
    match out {
        Some(path) => write(&mut r, path, &csv)?,
        None => r.text.extend(csv.lines().map(String::from)),
    }
    Ok(r)
}

fn tsirelson() -> Result<RunReport> {
    let mut r = RunReport::new("tsirelson");
    let t = consistency_threshold();
    r.line(format!("threshold E = {}", format_sig(t.e, 15)));
    r.line(format!("E^2 = {}", t.e_squared));
    r.line(format!("Q(W=0) = {}, P(W=1) = {}", t.q_w0, t.p_w1));
    let exact = t.sum == Rational::one();
    r.line(format!(
        "Q+P=1 at threshold: {}",
        if exact { "exact" } else { "inexact" }
    ));
    r.check("Q+P = 1 at threshold", exact, t.sum.to_string());
    r.check(
        "E² = 1/2",
        t.e_squared == Rational::new(1, 2),
        t.e_squared.to_string(),
    );
    let err = (t.e - std::f64::consts::FRAC_1_SQRT_2).abs();
    r.check("E = √2/2 within 1e-15", err <= 1e-15, format_sig(err, 3));
    let mut mismatches = Vec::new();
    for k in 0..=100 {
        let p = Rational::new(k, 100);
        let noise = NoiseParameter::new(p)?;
        let e = Rational::from_integer(2) * p - Rational::one();
        if q_w0_from_p(noise) != q_w0_of_e2(e * e)? || p_w1_from_p(noise) != p_w1_of_e2(e * e)? {
            mismatches.push(p.to_string());
        }
    }
    r.check(
        "closed forms in p and E agree on 101 p",
        mismatches.is_empty(),
        mismatches.join(", "),
    );
    r.result = json!(t);
    Ok(r)
}

fn variance(n: usize, settings: Option<&Path>) -> Result<RunReport> {
    let mut r = RunReport::new("variance");
    r.param("n", n);
    r.param(
        "settings",
        settings.map_or("default".into(), |p| p.display().to_string()),
    );
    let q = settings_quad(settings, Some(n))?;
    let ms = mean_square_chsh(&q)?;
    r.line(format!("mean_square = {}", ratio_string(&ms.mean_square)));
    r.line(format!(
        "bound = {} ({})",
        format_sig(ms.bound, 13),
        ms.bound_symbolic
    ));
    for (sq, count) in &ms.histogram {
        r.line(format!("S^2 = {sq}: {count} translations"));
    }
    if ms.degenerate {
        r.line("settings repeat on one side");
    }
    r.check(
        "⟨S²⟩ ≤ 8",
        ms.mean_square <= Rational::from_integer(8),
        ms.mean_square.to_string(),
    );
    r.result = json!({
        "report": ms.report("S", q.labeled()),
        "histogram": ms.histogram,
    });
    Ok(r)
}

fn uncertainty(n: usize) -> Result<RunReport> {
    let mut r = RunReport::new("uncertainty");
    r.param("n", n);
    if n > 8 {
        return Err(CliError::Usage("uncertainty scans n ≤ 8".into()));
    }
    let xs = enumerate_inputs(n)?;
    let pts = xs.points();
    let mut triples = 0usize;
    let mut off = Vec::new();
    let mut zeta = f64::NAN;
    for x in pts {
        for (i, y1) in pts.iter().enumerate() {
            for y2 in &pts[i + 1..] {
                if x.dot(y1)? != x.dot(y2)? {
                    continue;
                }
                let fg = fine_grained_zeta(x, y1, y2)?;
                triples += 1;
                zeta = fg.zeta;
                if fg.mean_square_g != Rational::from_integer(2) && off.len() < 8 {
                    off.push(format!("({x}, {y1}, {y2}): {}", fg.mean_square_g));
                }
            }
        }
    }
    let want = 0.5 + 1.0 / (2.0 * 2f64.sqrt());
    r.line(format!("triples with x·y1 = x·y2, y1 ≠ y2: {triples}"));
    r.line(format!("zeta = {}", format_sig(zeta, 15)));
    r.check(
        "⟨G²⟩ = 2 for every triple",
        off.is_empty() && triples > 0,
        off.join("; "),
    );
    r.check(
        "ζ = 1/2 + 1/(2√2) within 1e-12",
        (zeta - want).abs() <= 1e-12,
        format_sig(zeta, 15),
    );
    r.result = json!({ "triples": triples, "zeta": zeta });
    Ok(r)
}

fn pad_tripartite(s: &TripartiteSettings, n: usize) -> Result<TripartiteSettings> {
    let p = |v: &InputPoint| pad(v, n);
    Ok(TripartiteSettings::new(
        [p(&s.x[0])?, p(&s.x[1])?],
        [p(&s.y[0])?, p(&s.y[1])?],
        [p(&s.z[0])?, p(&s.z[1])?],
        p(&s.c)?,
    )?)
}

fn tripartite(n: usize, parameter: Parameter, budget: usize) -> Result<RunReport> {
    let mut r = RunReport::new("tripartite");
    r.param("n", n);
    match parameter {
        Parameter::I => {
            r.param("parameter", "I");
            let s = pad_tripartite(&reference_tripartite_settings(), n)?;
            let e = [(0, 0, 0), (0, 1, 1), (1, 0, 0), (1, 1, 1)]
                .map(|(i, j, k)| s.correlation(i, j, k));
            let i = tripartite_bell_i(&s);
            let ms = mean_square_tripartite_i(&s)?;
            r.line(format!("correlations = {e:?}"));
            r.line(format!("I = {i}"));
            r.line(format!("mean_square = {}", ratio_string(&ms.mean_square)));
            r.line(format!(
                "bound = {} ({})",
                format_sig(ms.bound, 13),
                ms.bound_symbolic
            ));
            r.check(
                "correlations (+1, +1, +1, −1)",
                e == [1, 1, 1, -1],
                format!("{e:?}"),
            );
            r.check("I = 4", i == 4, i.to_string());
            r.check(
                "⟨I²⟩ = 8",
                ms.mean_square == Rational::from_integer(8),
                ms.mean_square.to_string(),
            );
            r.result = json!({
                "correlations": e,
                "I": i,
                "report": ms.report("I", s.labeled()),
            });
        }
        Parameter::J => {
            r.param("parameter", "J").param("budget", budget);
            let jb = tripartite_bell_j_bound(n, budget)?;
            let (nonlocal, _) = j_nonlocal_max(n)?;
            r.line(format!("local max |J| = {}", j_local_max()));
            r.line(format!("max J at zero translation = {nonlocal}"));
            r.line(format!("settings evaluated = {}", jb.evaluated));
            r.line(format!("mean_square = {}", ratio_string(&jb.mean_square)));
            r.line(format!(
                "bound = {} ({})",
                format_sig(jb.bound, 13),
                jb.bound_symbolic
            ));
            for (k, v) in jb.witness.labeled() {
                r.line(format!("{k} = {v}"));
            }
            let want = 4.0 * 2f64.sqrt();
            r.check(
                "max √⟨J²⟩ = 4√2 within 1e-9",
                (jb.bound - want).abs() <= 1e-9,
                format_sig(jb.bound, 13),
            );
            r.check(
                "search complete",
                !jb.truncated,
                format!("{} settings", jb.evaluated),
            );
            r.result = json!(jb);
        }
    }
    Ok(r)
}

fn mc(p: &str, trials: usize, seed: u64) -> Result<RunReport> {
    let mut r = RunReport::new("mc");
    r.param("p", p).param("trials", trials);
    r.seed = Some(seed);
    let m = monte_carlo_tradeoff(noise(p)?, trials, seed)?;
    r.line(format!(
        "q_hat = {} (exact {})",
        format_sig(m.q_hat, 12),
        format_sig(m.q_exact, 12)
    ));
    r.line(format!(
        "p_hat = {} (exact {})",
        format_sig(m.p_hat, 12),
        format_sig(m.p_exact, 12)
    ));
    r.check("q_hat within 3σ", m.q_within_3sigma, "");
    r.check("p_hat within 3σ", m.p_within_3sigma, "");
    r.result = json!(m);
    Ok(r)
}

fn invariant(grid: usize, out: Option<&Path>) -> Result<RunReport> {
    let mut r = RunReport::new("invariant");
    r.param("grid", grid);
    let scan = chsh_max_over_angles(grid)?;
    let tsirelson = 2.0 * 2f64.sqrt();
    r.line(format!("angles = {}", scan.angles));
    r.line(format!("max S = {}", format_sig(scan.max, 15)));
    r.line(format!(
        "argmax = {}",
        scan.argmax.map(|v| format_sig(v, 12)).join(", ")
    ));
    r.check(
        "max S = 2√2 within 1e-12",
        (scan.max - tsirelson).abs() <= 1e-12,
        format_sig(scan.max, 15),
    );
    let samples = [0.0, 0.3, 1.0, 2.5, 4.0];
    let same = samples.iter().all(|&t| invariant_e(t, t) == -1.0);
    let opposite = samples
        .iter()
        .all(|&t| invariant_e(t, t + std::f64::consts::PI) == 1.0);
    r.check("E(θ, θ) = −1", same, "");
    r.check("E(θ, θ+π) = +1", opposite, "");
    if let Some(path) = out {
        let csv = angle_scan_csv(grid, scan.argmax[0], scan.argmax[1]);
        write(&mut r, path, &csv)?;
    }
    r.result = json!(scan);
    Ok(r)
}

fn chsh(settings: Option<&Path>, p: &str) -> Result<RunReport> {
    let mut r = RunReport::new("chsh");
    r.param(
        "settings",
        settings.map_or("default".into(), |p| p.display().to_string()),
    );
    r.param("p", p);
    let q = settings_quad(settings, None)?;
    let noise = noise(p)?;
    let s = chsh_of_settings(&q, noise)?;
    let w = q.w()?;
    let dots = quad_correlations(&q)?;
    for (k, v) in q.labeled() {
        r.line(format!("{k} = {v}"));
    }
    r.line(format!("x·y = {dots:?}"));
    r.line(format!("S = {s} ({})", format_sig(ratio(s), 12)));
    r.line(format!("W = {w}"));
    r.check(
        "0 ≤ S ≤ 4",
        s >= Rational::zero() && s <= Rational::from_integer(4),
        s.to_string(),
    );
    r.result = json!({
        "settings": q,
        "inner_products": dots,
        "S": s.to_string(),
        "W": w,
    });
    Ok(r)
}

fn sample(x: &str, y: &str, p: &str, trials: usize, seed: u64) -> Result<RunReport> {
    let mut r = RunReport::new("sample");
    r.param("x", x)
        .param("y", y)
        .param("p", p)
        .param("trials", trials);
    r.seed = Some(seed);
    let xv: InputPoint = x.parse()?;
    let yv: InputPoint = y.parse()?;
    let rep = sampler_report(&xv, &yv, noise(p)?, seed, trials)?;
    r.line(format!(
        "E = {} (exact {})",
        format_sig(rep.empirical_E, 12),
        format_sig(rep.exact_E, 12)
    ));
    let sigma = ((1.0 - rep.exact_E * rep.exact_E) / trials.max(1) as f64).sqrt();
    r.check(
        "empirical E within 3σ",
        (rep.empirical_E - rep.exact_E).abs() <= 3.0 * sigma + 1e-12,
        format!("σ = {}", format_sig(sigma, 6)),
    );
    r.result = json!(rep);
    Ok(r)
}
