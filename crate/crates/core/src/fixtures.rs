//! Reference data for `n = 6`: both spaces, the five subsets and sample
//! rotation matrices, shipped as text and checked against the library.
//!
//! Grammar, line oriented, `#` starts a comment:
//!
//! ```text
//! [inputs]            bitstrings, any number per line
//! [translations]      bitstrings
//! [subset m]          followed by T:, X: and R: sections
//! R:                  matrix rows; every n rows form one matrix, a blank
//!                     line may end a block but not split one
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVector};
use crate::symmetry::{
    is_coset_of, is_self_orthogonal, is_xor_closed, partition_by_symmetry, symmetry_parameter_w,
    xor_completion,
};

/// Cleaned reference file.
pub const REFERENCE_N6: &str = include_str!("../data/n6_reference.txt");
/// Reference file as published, defects included.
pub const REFERENCE_N6_RAW: &str = include_str!("../data/n6_reference_raw.txt");

/// Fewest matrices a subset may list. Two published matrices had no repair and
/// were dropped, leaving three in subsets 4 and 5.
pub const MIN_MATRICES: usize = 3;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FixtureSubset {
    pub index: usize,
    pub translations: Vec<BitVector>,
    pub inputs: Vec<BitVector>,
    #[serde(serialize_with = "ser_matrices")]
    pub matrices: Vec<BitMatrix>,
}

fn ser_matrices<S: serde::Serializer>(ms: &[BitMatrix], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(
        ms.iter()
            .map(|m| m.rows().map(|r| r.to_string()).collect::<Vec<_>>()),
    )
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FixtureSet {
    pub n: usize,
    pub inputs: Vec<BitVector>,
    pub translations: Vec<BitVector>,
    pub subsets: Vec<FixtureSubset>,
}

/// Source line of every parsed vector, for error messages.
#[derive(Default)]
struct Lines {
    inputs: Vec<usize>,
    translations: Vec<usize>,
    subsets: Vec<(Vec<usize>, Vec<usize>, Vec<usize>)>,
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    None,
    Inputs,
    Translations,
    SubsetHeader,
    T,
    X,
    R,
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::FixtureParse {
        line,
        message: message.into(),
    }
}

fn parse_located(text: &str) -> Result<(FixtureSet, Lines)> {
    let mut set = FixtureSet {
        n: 0,
        inputs: Vec::new(),
        translations: Vec::new(),
        subsets: Vec::new(),
    };
    let mut lines = Lines::default();
    let mut section = Section::None;
    let mut block: Vec<BitVector> = Vec::new();
    let mut block_start = 0;

    let flush = |set: &mut FixtureSet,
                 lines: &mut Lines,
                 block: &mut Vec<BitVector>,
                 at: usize|
     -> Result<()> {
        if block.is_empty() {
            return Ok(());
        }
        if block.len() != set.n {
            return Err(parse_err(
                at,
                format!("matrix block has {} rows, expected {}", block.len(), set.n),
            ));
        }
        let m = BitMatrix::from_rows(block).map_err(|e| parse_err(at, e.to_string()))?;
        set.subsets
            .last_mut()
            .expect("inside a subset")
            .matrices
            .push(m);
        lines
            .subsets
            .last_mut()
            .expect("inside a subset")
            .2
            .push(at);
        block.clear();
        Ok(())
    };

    for (i, raw) in text.lines().enumerate() {
        let no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            if section == Section::R {
                flush(&mut set, &mut lines, &mut block, block_start)?;
            }
            continue;
        }
        if line.starts_with('[') {
            if section == Section::R {
                flush(&mut set, &mut lines, &mut block, block_start)?;
            }
            let name = line
                .strip_prefix('[')
                .and_then(|l| l.strip_suffix(']'))
                .ok_or_else(|| parse_err(no, format!("malformed header {line:?}")))?
                .trim();
            section = match name {
                "inputs" => Section::Inputs,
                "translations" => Section::Translations,
                _ => {
                    let index: usize = name
                        .strip_prefix("subset")
                        .and_then(|m| m.trim().parse().ok())
                        .ok_or_else(|| parse_err(no, format!("unknown section {name:?}")))?;
                    set.subsets.push(FixtureSubset {
                        index,
                        translations: Vec::new(),
                        inputs: Vec::new(),
                        matrices: Vec::new(),
                    });
                    lines.subsets.push(Default::default());
                    Section::SubsetHeader
                }
            };
            continue;
        }
        if let Some(label) = line.strip_suffix(':') {
            if section == Section::None
                || section == Section::Inputs
                || section == Section::Translations
            {
                return Err(parse_err(no, format!("{label}: outside a subset")));
            }
            if section == Section::R {
                flush(&mut set, &mut lines, &mut block, block_start)?;
            }
            section = match label.trim() {
                "T" => Section::T,
                "X" => Section::X,
                "R" => Section::R,
                other => return Err(parse_err(no, format!("unknown label {other:?}"))),
            };
            continue;
        }
        for token in line.split_whitespace() {
            let v: BitVector = token
                .parse()
                .map_err(|e: Error| parse_err(no, e.to_string()))?;
            if set.n == 0 {
                set.n = v.len();
            } else if v.len() != set.n {
                return Err(parse_err(
                    no,
                    format!("{token} has length {}, expected {}", v.len(), set.n),
                ));
            }
            match section {
                Section::Inputs => {
                    set.inputs.push(v);
                    lines.inputs.push(no);
                }
                Section::Translations => {
                    set.translations.push(v);
                    lines.translations.push(no);
                }
                Section::T | Section::X => {
                    let sub = set.subsets.last_mut().expect("inside a subset");
                    let loc = lines.subsets.last_mut().expect("inside a subset");
                    if section == Section::T {
                        sub.translations.push(v);
                        loc.0.push(no);
                    } else {
                        sub.inputs.push(v);
                        loc.1.push(no);
                    }
                }
                Section::R => {
                    if block.is_empty() {
                        block_start = no;
                    }
                    block.push(v);
                    if block.len() == set.n {
                        flush(&mut set, &mut lines, &mut block, block_start)?;
                    }
                }
                Section::None | Section::SubsetHeader => {
                    return Err(parse_err(no, "data outside a section"));
                }
            }
        }
    }
    if section == Section::R {
        flush(&mut set, &mut lines, &mut block, block_start)?;
    }
    if set.n == 0 {
        return Err(parse_err(0, "no data"));
    }
    Ok((set, lines))
}

/// Parses the grammar only; no parity, count or duplicate checks.
pub fn parse_fixture_unchecked(text: &str) -> Result<FixtureSet> {
    parse_located(text).map(|(set, _)| set)
}

fn fixture_err(line: usize, message: impl std::fmt::Display) -> Error {
    Error::Fixture(format!("line {line}: {message}"))
}

fn check_list(vs: &[BitVector], at: &[usize], parity: u8, what: &str) -> Result<()> {
    let mut seen = BTreeMap::new();
    for (v, &line) in vs.iter().zip(at) {
        if v.parity() != parity {
            let need = if parity == 1 { "odd" } else { "even" };
            return Err(fixture_err(
                line,
                format!("{need} parity required in {what}: {v}"),
            ));
        }
        if let Some(first) = seen.insert(*v, line) {
            return Err(fixture_err(
                line,
                format!("duplicate {v} in {what} (first on line {first})"),
            ));
        }
    }
    Ok(())
}

fn validate(set: &FixtureSet, lines: &Lines) -> Result<()> {
    let n = set.n;
    let half = 1usize << (n - 1);
    check_list(&set.inputs, &lines.inputs, 1, "inputs")?;
    check_list(&set.translations, &lines.translations, 0, "translations")?;
    if set.inputs.len() != half {
        return Err(Error::Fixture(format!(
            "input count {} != {half}",
            set.inputs.len()
        )));
    }
    if set.translations.len() != half {
        return Err(Error::Fixture(format!(
            "translation count {} != {half}",
            set.translations.len()
        )));
    }
    let size = 1usize << (n / 2);
    let want_subsets = (1usize << ((n - 2) / 2)) + 1;
    if set.subsets.len() != want_subsets {
        return Err(Error::Fixture(format!(
            "subset count {} != {want_subsets}",
            set.subsets.len()
        )));
    }
    for (sub, (lt, lx, lr)) in set.subsets.iter().zip(&lines.subsets) {
        let m = sub.index;
        check_list(&sub.translations, lt, 0, &format!("T{m}"))?;
        check_list(&sub.inputs, lx, 1, &format!("X{m}"))?;
        if sub.translations.len() != size || sub.inputs.len() != size {
            return Err(Error::Fixture(format!(
                "subset {m}: |T| = {}, |X| = {}, expected {size}",
                sub.translations.len(),
                sub.inputs.len()
            )));
        }
        if sub.matrices.len() < MIN_MATRICES {
            return Err(Error::Fixture(format!(
                "subset {m}: {} matrices, expected at least {MIN_MATRICES}",
                sub.matrices.len()
            )));
        }
        for (r, &line) in sub.matrices.iter().zip(lr) {
            if let Some(row) = r.rows().find(|row| row.parity() != 1) {
                return Err(fixture_err(
                    line,
                    format!("odd parity required in R row {row}"),
                ));
            }
        }
    }
    Ok(())
}

/// Parses and checks parity, counts and duplicates.
pub fn load_fixture_str(text: &str) -> Result<FixtureSet> {
    let (set, lines) = parse_located(text)?;
    validate(&set, &lines)?;
    Ok(set)
}

pub fn load_fixture_file(path: impl AsRef<Path>) -> Result<FixtureSet> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Fixture(format!("{}: {e}", path.display())))?;
    load_fixture_str(&text)
}

/// The shipped, cleaned `n = 6` data.
pub fn reference_fixture() -> FixtureSet {
    load_fixture_str(REFERENCE_N6).expect("shipped fixture is valid")
}

/// A listed element that repeats, and the element XOR closure says belongs
/// in its place.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InferredEntry {
    pub subset: usize,
    pub section: &'static str,
    pub duplicate: BitVector,
    pub inferred: Vec<BitVector>,
}

/// For every `T` or `X` list with repeats, the members of the smallest
/// closed set (a subspace for `T`, its coset for `X`) that the list misses.
pub fn infer_completions(set: &FixtureSet) -> Result<Vec<InferredEntry>> {
    let mut out = Vec::new();
    for sub in &set.subsets {
        for (section, list) in [("T", &sub.translations), ("X", &sub.inputs)] {
            let mut seen = BTreeSet::new();
            let dups: Vec<BitVector> = list.iter().filter(|v| !seen.insert(**v)).copied().collect();
            if dups.is_empty() {
                continue;
            }
            let base = list[0];
            let shifted = list
                .iter()
                .map(|v| v.xor(&base))
                .collect::<Result<Vec<_>>>()?;
            let span = xor_completion(&shifted)?
                .into_iter()
                .map(|v| v.xor(&base))
                .collect::<Result<Vec<_>>>()?;
            let missing: Vec<BitVector> = span.into_iter().filter(|v| !seen.contains(v)).collect();
            for d in dups {
                out.push(InferredEntry {
                    subset: sub.index,
                    section,
                    duplicate: d,
                    inferred: missing.clone(),
                });
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FixtureCheck {
    pub id: char,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FixtureReport {
    pub checks: Vec<FixtureCheck>,
    /// Within-subset `(x1, x2, y1, y2)` quadruples evaluated by check (g).
    pub w_quadruples: usize,
    /// Whether the generated partition has exactly the listed `T_m` family.
    pub matches_generated: bool,
}

impl FixtureReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failed(&self) -> impl Iterator<Item = &FixtureCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

fn fails<T: std::fmt::Display>(items: &[T]) -> String {
    items
        .iter()
        .map(|i| i.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

/// Checks (a)–(g); failures are report entries, never errors.
pub fn verify_fixture(fx: &FixtureSet) -> FixtureReport {
    let n = fx.n;
    let half = 1usize << (n - 1);
    let zero = BitVector::zeros(n).expect("valid n");
    let ones = BitVector::ones(n).expect("valid n");
    let mut checks = Vec::new();
    let mut push = |id, name, problems: Vec<String>| {
        checks.push(FixtureCheck {
            id,
            name,
            passed: problems.is_empty(),
            detail: fails(&problems),
        })
    };

    let mut a = Vec::new();
    let inputs: BTreeSet<_> = fx.inputs.iter().collect();
    let translations: BTreeSet<_> = fx.translations.iter().collect();
    if inputs.len() != half || fx.inputs.len() != half {
        a.push(format!(
            "{} distinct inputs of {}",
            inputs.len(),
            fx.inputs.len()
        ));
    }
    if translations.len() != half || fx.translations.len() != half {
        a.push(format!(
            "{} distinct translations of {}",
            translations.len(),
            fx.translations.len()
        ));
    }
    a.extend(
        fx.inputs
            .iter()
            .filter(|v| v.parity() != 1)
            .map(|v| format!("input {v} even")),
    );
    a.extend(
        fx.translations
            .iter()
            .filter(|v| v.parity() != 0)
            .map(|v| format!("translation {v} odd")),
    );
    push('a', "parity and counts", a);

    let mut b = Vec::new();
    for s in &fx.subsets {
        if !is_xor_closed(&s.translations) {
            b.push(format!("T{} not XOR closed", s.index));
        }
        if !is_self_orthogonal(&s.translations) {
            b.push(format!("T{} not self orthogonal", s.index));
        }
    }
    push('b', "T_m closed and self orthogonal", b);

    let c: Vec<String> = fx
        .subsets
        .iter()
        .filter(|s| !is_coset_of(&s.inputs, &s.translations))
        .map(|s| format!("X{} is not a coset of T{}", s.index, s.index))
        .collect();
    push('c', "X_m = x_ref ⊕ T_m", c);

    let mut d = Vec::new();
    for (i, s) in fx.subsets.iter().enumerate() {
        let a: BTreeSet<_> = s.translations.iter().collect();
        for t in &fx.subsets[i + 1..] {
            let inter: Vec<_> = t
                .translations
                .iter()
                .filter(|v| a.contains(v))
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect();
            if inter != [&zero, &ones] {
                d.push(format!("T{} ∩ T{} = {inter:?}", s.index, t.index));
            }
        }
    }
    push('d', "pairwise intersection {0…0, 1…1}", d);

    let union: BTreeSet<_> = fx.subsets.iter().flat_map(|s| &s.translations).collect();
    let mut e = Vec::new();
    if union != translations {
        e.push(format!(
            "union has {} elements, translation space {}",
            union.len(),
            translations.len()
        ));
    }
    push('e', "union covers translations", e);

    let mut f = Vec::new();
    for s in &fx.subsets {
        let ts: BTreeSet<_> = s.translations.iter().collect();
        for (k, r) in s.matrices.iter().enumerate() {
            let label = format!("R{}#{}", s.index, k + 1);
            if !r.is_orthogonal() {
                f.push(format!("{label} not orthogonal"));
            }
            if r.rows().any(|row| row.parity() != 1)
                || r.transpose().rows().any(|c| c.parity() != 1)
            {
                f.push(format!("{label} has an even row or column"));
            }
            let stable = s
                .translations
                .iter()
                .all(|t| r.apply(t).map(|v| ts.contains(&v)).unwrap_or(false));
            if !stable {
                f.push(format!("{label} does not map T{} onto itself", s.index));
            }
        }
    }
    push('f', "R orthogonal, odd rows, stabilizes T_m", f);

    let mut g = Vec::new();
    let mut w_quadruples = 0;
    for s in &fx.subsets {
        let xs = &s.inputs;
        for x1 in xs {
            for x2 in xs {
                for y1 in xs {
                    for y2 in xs {
                        w_quadruples += 1;
                        match symmetry_parameter_w(x1, x2, y1, y2) {
                            Ok(0) => {}
                            Ok(_) => g.push(format!("W = 1 at ({x1}, {x2}, {y1}, {y2})")),
                            Err(e) => g.push(e.to_string()),
                        }
                    }
                }
            }
        }
    }
    g.truncate(8);
    push('g', "W = 0 within subsets", g);

    let matches_generated = partition_by_symmetry(n)
        .map(|p| {
            let ours: BTreeSet<BTreeSet<BitVector>> = p
                .subsets
                .iter()
                .map(|s| s.translations().iter().map(|t| t.vector()).collect())
                .collect();
            let listed: BTreeSet<BTreeSet<BitVector>> = fx
                .subsets
                .iter()
                .map(|s| s.translations.iter().copied().collect())
                .collect();
            ours == listed
        })
        .unwrap_or(false);

    FixtureReport {
        checks,
        w_quadruples,
        matches_generated,
    }
}

/// `k·|T_m| − k·2 + 2`: the union size of `k` subsets sharing exactly the
/// pair `{0…0, 1…1}`.
pub fn shared_pair_union_size(fx: &FixtureSet) -> usize {
    let k = fx.subsets.len();
    let sum: usize = fx.subsets.iter().map(|s| s.translations.len()).sum();
    sum - 2 * k + 2
}
