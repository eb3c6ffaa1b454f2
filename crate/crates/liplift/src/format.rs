//! Text file formats.
//!
//! Space file:
//!
//! ```text
//! points 3
//! base 0
//! labels 0 a b
//! 0 1 2
//! 1 0 1
//! 2 1 0
//! ```
//!
//! Function, free-vector, operator and lifting files name the space files
//! they live on in their header; relative names resolve against the
//! directory of the referring file.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use liplift_core::lifting::{LiftingMatrix, LipOperator};
use liplift_core::{
    FreeVector, LipschitzFunction, Matrix, MetricError, PairSet, PointedMetricSpace, SpaceRef,
};
use thiserror::Error;

use crate::text::TextScalar;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("{path}: line {line}, column {column}: {message}")]
    Parse {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Metric {
        path: String,
        labels: Vec<String>,
        #[source]
        source: MetricError,
    },
}

/// Parsed content along with the bytes read, for report digests.
#[derive(Debug, Clone)]
pub struct Loaded<T> {
    pub value: T,
    pub inputs: Vec<InputFile>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InputFile {
    pub path: String,
    pub bytes: Vec<u8>,
}

pub fn read_input(path: &Path) -> Result<InputFile, FormatError> {
    let bytes = fs::read(path).map_err(|source| FormatError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(InputFile {
        path: path.display().to_string(),
        bytes,
    })
}

/// Tokens of one line with their 1-based character columns.
type Tokens<'a> = Vec<(usize, &'a str)>;

/// Line cursor producing diagnostics with 1-based line and column numbers.
struct Lines<'a> {
    path: &'a str,
    lines: Vec<&'a str>,
    next: usize,
}

impl<'a> Lines<'a> {
    fn new(path: &'a str, text: &'a str) -> Self {
        let mut lines: Vec<&str> = text.lines().collect();
        while lines.last().is_some_and(|l| l.trim().is_empty()) {
            lines.pop();
        }
        Self {
            path,
            lines,
            next: 0,
        }
    }

    fn error(&self, line: usize, column: usize, message: impl Into<String>) -> FormatError {
        FormatError::Parse {
            path: self.path.to_string(),
            line,
            column,
            message: message.into(),
        }
    }

    /// Next line as `(line number, tokens with their columns)`.
    fn next_line(&mut self, what: &str) -> Result<(usize, Tokens<'a>), FormatError> {
        let Some(text) = self.lines.get(self.next).copied() else {
            let line = self.lines.len() + 1;
            return Err(self.error(line, 1, format!("unexpected end of file, expected {what}")));
        };
        self.next += 1;
        Ok((self.next, tokens(text)))
    }

    fn remaining(&self) -> usize {
        self.lines.len() - self.next
    }

    fn expect_end(&self) -> Result<(), FormatError> {
        match self.lines.get(self.next) {
            None => Ok(()),
            Some(_) => Err(self.error(self.next + 1, 1, "unexpected trailing content")),
        }
    }

    /// A line `keyword arg...` with exactly `args` arguments.
    fn keyword(&mut self, keyword: &str, args: usize) -> Result<(usize, Tokens<'a>), FormatError> {
        let (line, toks) = self.next_line(&format!("`{keyword}` line"))?;
        match toks.first() {
            Some((_, k)) if *k == keyword => {}
            Some((col, k)) => {
                return Err(self.error(line, *col, format!("expected `{keyword}`, found `{k}`")))
            }
            None => return Err(self.error(line, 1, format!("expected `{keyword}`"))),
        }
        if toks.len() != args + 1 {
            let col = toks
                .get(args + 1)
                .map_or(toks.last().map_or(1, |t| t.0 + t.1.len()), |t| t.0);
            return Err(self.error(
                line,
                col,
                format!(
                    "`{keyword}` takes {args} argument(s), found {}",
                    toks.len() - 1
                ),
            ));
        }
        Ok((line, toks[1..].to_vec()))
    }

    fn usize_at(&self, line: usize, (col, tok): (usize, &str)) -> Result<usize, FormatError> {
        tok.parse()
            .map_err(|_| self.error(line, col, format!("`{tok}` is not a nonnegative integer")))
    }

    fn scalar_at<S: TextScalar>(
        &self,
        line: usize,
        (col, tok): (usize, &str),
    ) -> Result<S, FormatError> {
        S::parse_token(tok).map_err(|m| self.error(line, col, m))
    }

    fn scalar_row<S: TextScalar>(
        &mut self,
        expected: usize,
        what: &str,
    ) -> Result<Vec<S>, FormatError> {
        let (line, toks) = self.next_line(what)?;
        if toks.len() != expected {
            let col = toks.get(expected).map_or(1, |t| t.0);
            return Err(self.error(
                line,
                col,
                format!("expected {expected} values, found {}", toks.len()),
            ));
        }
        toks.into_iter().map(|t| self.scalar_at(line, t)).collect()
    }
}

fn tokens(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in line.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push((s, &line[s..i]));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push((s, &line[s..]));
    }
    out.into_iter()
        .map(|(byte, tok)| (line[..byte].chars().count() + 1, tok))
        .collect()
}

fn utf8(input: &InputFile) -> Result<&str, FormatError> {
    std::str::from_utf8(&input.bytes).map_err(|e| FormatError::Parse {
        path: input.path.clone(),
        line: 1 + input.bytes[..e.valid_up_to()]
            .iter()
            .filter(|&&b| b == b'\n')
            .count(),
        column: 1,
        message: "file is not valid UTF-8".into(),
    })
}

pub fn parse_space<S: TextScalar>(input: &InputFile) -> Result<PointedMetricSpace<S>, FormatError> {
    let text = utf8(input)?;
    let mut lines = Lines::new(&input.path, text);
    let (line, args) = lines.keyword("points", 1)?;
    let n = lines.usize_at(line, args[0])?;
    if n == 0 {
        return Err(lines.error(line, args[0].0, "a space needs at least one point"));
    }
    let (line, args) = lines.keyword("base", 1)?;
    let base = lines.usize_at(line, args[0])?;
    if base >= n {
        return Err(lines.error(
            line,
            args[0].0,
            format!("base index {base} out of range for {n} points"),
        ));
    }
    let (line, args) = lines.keyword("labels", n)?;
    let labels: Vec<String> = args.iter().map(|(_, t)| t.to_string()).collect();
    for (k, (col, label)) in args.iter().enumerate() {
        if args[..k].iter().any(|(_, l)| l == label) {
            return Err(lines.error(line, *col, format!("duplicate label `{label}`")));
        }
    }
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        rows.push(lines.scalar_row::<S>(n, &format!("distance row {}", i + 1))?);
    }
    lines.expect_end()?;
    let dist = Matrix::from_rows(rows).expect("rows have equal length");
    PointedMetricSpace::new(labels.clone(), dist, base).map_err(|source| FormatError::Metric {
        path: input.path.clone(),
        labels,
        source,
    })
}

pub fn write_space<S: TextScalar>(space: &PointedMetricSpace<S>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "points {}", space.len());
    let _ = writeln!(out, "base {}", space.base());
    let _ = writeln!(out, "labels {}", space.labels().join(" "));
    for row in space.distances().iter_rows() {
        let _ = writeln!(out, "{}", join(row));
    }
    out
}

fn join<S: TextScalar>(values: &[S]) -> String {
    values
        .iter()
        .map(TextScalar::render)
        .collect::<Vec<_>>()
        .join(" ")
}

fn resolve(referrer: &Path, name: &str) -> PathBuf {
    let p = Path::new(name);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        referrer.parent().unwrap_or(Path::new("")).join(p)
    }
}

pub fn load_space<S: TextScalar>(path: &Path) -> Result<Loaded<SpaceRef<S>>, FormatError> {
    let input = read_input(path)?;
    let space = parse_space(&input)?;
    Ok(Loaded {
        value: Arc::new(space),
        inputs: vec![input],
    })
}

/// Shared body of function and free-vector files: `label value` lines over
/// the points of `space`, missing labels read as zero.
fn labelled_values<S: TextScalar>(
    lines: &mut Lines<'_>,
    space: &PointedMetricSpace<S>,
    base_must_vanish: bool,
) -> Result<Vec<S>, FormatError> {
    let mut values = vec![S::zero(); space.dim()];
    let mut seen = vec![false; space.len()];
    while lines.remaining() > 0 {
        let (line, toks) = lines.next_line("`label value`")?;
        if toks.len() != 2 {
            let col = toks.get(2).map_or(1, |t| t.0);
            return Err(lines.error(line, col, "expected `label value`"));
        }
        let (col, label) = toks[0];
        let point = space
            .index_of(label)
            .ok_or_else(|| lines.error(line, col, format!("unknown label `{label}`")))?;
        if std::mem::replace(&mut seen[point], true) {
            return Err(lines.error(line, col, format!("label `{label}` listed twice")));
        }
        let v: S = lines.scalar_at(line, toks[1])?;
        match space.coord(point) {
            Some(c) => values[c] = v,
            None if base_must_vanish && !v.is_zero() => {
                return Err(lines.error(line, toks[1].0, "functions vanish at the base point"));
            }
            None => {}
        }
    }
    Ok(values)
}

fn header_with_space<S: TextScalar>(
    input: &InputFile,
    keyword: &str,
) -> Result<(SpaceRef<S>, Vec<InputFile>, usize), FormatError> {
    let text = utf8(input)?;
    let mut lines = Lines::new(&input.path, text);
    let (_, args) = lines.keyword(keyword, 1)?;
    let space = load_space::<S>(&resolve(Path::new(&input.path), args[0].1))?;
    Ok((space.value, space.inputs, lines.next))
}

pub fn load_function<S: TextScalar>(
    path: &Path,
) -> Result<Loaded<LipschitzFunction<S>>, FormatError> {
    let input = read_input(path)?;
    let (space, mut inputs, _) = header_with_space::<S>(&input, "function")?;
    let mut lines = Lines::new(&input.path, utf8(&input)?);
    lines.next = 1;
    let values = labelled_values(&mut lines, &space, true)?;
    inputs.insert(0, input.clone());
    Ok(Loaded {
        value: LipschitzFunction::new(space, values).expect("length matches"),
        inputs,
    })
}

pub fn load_free_vector<S: TextScalar>(path: &Path) -> Result<Loaded<FreeVector<S>>, FormatError> {
    let input = read_input(path)?;
    let (space, mut inputs, _) = header_with_space::<S>(&input, "freevector")?;
    let mut lines = Lines::new(&input.path, utf8(&input)?);
    lines.next = 1;
    // delta at the base is the zero functional, so a base coefficient is inert.
    let coeffs = labelled_values(&mut lines, &space, false)?;
    inputs.insert(0, input.clone());
    Ok(Loaded {
        value: FreeVector::new(space, coeffs).expect("length matches"),
        inputs,
    })
}

pub fn write_function<S: TextScalar>(f: &LipschitzFunction<S>, space_file: &str) -> String {
    let mut out = format!("function {space_file}\n");
    for p in f.space().non_base_points() {
        let _ = writeln!(out, "{} {}", f.space().label(p), f.value_at(p).render());
    }
    out
}

pub fn write_free_vector<S: TextScalar>(mu: &FreeVector<S>, space_file: &str) -> String {
    let mut out = format!("freevector {space_file}\n");
    let space = mu.space();
    for p in space.non_base_points() {
        let c = space.coord(p).expect("non-base");
        let _ = writeln!(out, "{} {}", space.label(p), mu.coeffs()[c].render());
    }
    out
}

/// `operator <domain> <codomain>` then one row per non-base codomain point.
pub fn load_operator<S: TextScalar>(path: &Path) -> Result<Loaded<LipOperator<S>>, FormatError> {
    let input = read_input(path)?;
    let text = utf8(&input)?;
    let mut lines = Lines::new(&input.path, text);
    let (_, args) = lines.keyword("operator", 2)?;
    let referrer = Path::new(&input.path);
    let domain = load_space::<S>(&resolve(referrer, args[0].1))?;
    let codomain = load_space::<S>(&resolve(referrer, args[1].1))?;
    let (rows, cols) = (codomain.value.dim(), domain.value.dim());
    let mut data = Vec::with_capacity(rows * cols);
    // A one-point domain gives empty rows, which read as blank lines.
    if cols > 0 {
        for i in 0..rows {
            data.extend(lines.scalar_row::<S>(cols, &format!("operator row {}", i + 1))?);
        }
    }
    lines.expect_end()?;
    let matrix = Matrix::from_flat(rows, cols, data).expect("counted");
    let op = LipOperator::new(domain.value, codomain.value, matrix).expect("shape from spaces");
    let mut inputs = vec![input];
    inputs.extend(domain.inputs);
    inputs.extend(codomain.inputs);
    Ok(Loaded { value: op, inputs })
}

pub fn write_operator<S: TextScalar>(
    op: &LipOperator<S>,
    domain_file: &str,
    codomain_file: &str,
) -> String {
    let mut out = format!("operator {domain_file} {codomain_file}\n");
    for row in op.matrix().iter_rows() {
        let _ = writeln!(out, "{}", join(row));
    }
    out
}

fn pair_token<S: liplift_core::Scalar>(
    space: &PointedMetricSpace<S>,
    (x, y): (usize, usize),
) -> String {
    format!("({},{})", space.labels()[x], space.labels()[y])
}

/// ```text
/// lifting <domain> <codomain>
/// columns (x,y) ...
/// (p,q) v ...
/// ```
pub fn write_lifting<S: TextScalar>(
    lifting: &LiftingMatrix<S>,
    domain: &PointedMetricSpace<S>,
    codomain: &PointedMetricSpace<S>,
    domain_file: &str,
    codomain_file: &str,
) -> String {
    let mut out = format!("lifting {domain_file} {codomain_file}\n");
    out.push_str("columns");
    for pair in lifting.col_pairs().iter() {
        out.push(' ');
        out.push_str(&pair_token(domain, pair));
    }
    out.push('\n');
    for (i, pair) in lifting.row_pairs().iter().enumerate() {
        let row = lifting.matrix().row(i);
        let tok = pair_token(codomain, pair);
        if row.is_empty() {
            let _ = writeln!(out, "{tok}");
        } else {
            let _ = writeln!(out, "{tok} {}", join(row));
        }
    }
    out
}

/// Domain, codomain and the lifting between them.
pub type LoadedLifting<S> = (SpaceRef<S>, SpaceRef<S>, LiftingMatrix<S>);

pub fn load_lifting<S: TextScalar>(path: &Path) -> Result<Loaded<LoadedLifting<S>>, FormatError> {
    let input = read_input(path)?;
    let text = utf8(&input)?;
    let mut lines = Lines::new(&input.path, text);
    let (_, args) = lines.keyword("lifting", 2)?;
    let referrer = Path::new(&input.path);
    let domain = load_space::<S>(&resolve(referrer, args[0].1))?;
    let codomain = load_space::<S>(&resolve(referrer, args[1].1))?;
    let col_pairs: PairSet = domain.value.pair_set();
    let row_pairs: PairSet = codomain.value.pair_set();

    let (line, toks) = lines.next_line("`columns` line")?;
    match toks.first() {
        Some((_, "columns")) => {}
        Some((col, t)) => {
            return Err(lines.error(line, *col, format!("expected `columns`, found `{t}`")))
        }
        None => return Err(lines.error(line, 1, "expected `columns`")),
    }
    if toks.len() - 1 != col_pairs.len() {
        return Err(lines.error(
            line,
            1,
            format!(
                "expected {} column pairs, found {}",
                col_pairs.len(),
                toks.len() - 1
            ),
        ));
    }
    for (pair, (col, tok)) in col_pairs.iter().zip(&toks[1..]) {
        let expected = pair_token(&domain.value, pair);
        if *tok != expected {
            return Err(lines.error(
                line,
                *col,
                format!("expected column `{expected}`, found `{tok}`"),
            ));
        }
    }
    let mut data = Vec::with_capacity(row_pairs.len() * col_pairs.len());
    for pair in row_pairs.iter() {
        let expected = pair_token(&codomain.value, pair);
        let (line, toks) = lines.next_line(&format!("row {expected}"))?;
        match toks.first() {
            Some((_, t)) if *t == expected => {}
            Some((col, t)) => {
                return Err(lines.error(
                    line,
                    *col,
                    format!("expected row `{expected}`, found `{t}`"),
                ))
            }
            None => return Err(lines.error(line, 1, format!("expected row `{expected}`"))),
        }
        if toks.len() - 1 != col_pairs.len() {
            let col = toks.get(col_pairs.len() + 1).map_or(toks[0].0, |t| t.0);
            return Err(lines.error(
                line,
                col,
                format!(
                    "expected {} values, found {}",
                    col_pairs.len(),
                    toks.len() - 1
                ),
            ));
        }
        for t in &toks[1..] {
            data.push(lines.scalar_at::<S>(line, *t)?);
        }
    }
    lines.expect_end()?;
    let matrix = Matrix::from_flat(row_pairs.len(), col_pairs.len(), data).expect("counted");
    let lifting =
        LiftingMatrix::new(&domain.value, &codomain.value, matrix).expect("shape from spaces");
    let mut inputs = vec![input];
    inputs.extend(domain.inputs);
    inputs.extend(codomain.inputs);
    Ok(Loaded {
        value: (domain.value, codomain.value, lifting),
        inputs,
    })
}
