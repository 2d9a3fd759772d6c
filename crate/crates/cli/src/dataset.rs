//! Delimited-text datasets.
//!
//! Predictors are `n × p` numeric rows with an optional header. Responses
//! depend on the metric:
//!
//! * distributions: the first row is the probability grid, then one row of
//!   quantile values per subject;
//! * matrices: one square block per subject separated by blank lines, or a
//!   long table with header `subject,row,col,value` (0-based indices);
//! * sphere: one row per subject, either unit vectors or nonnegative
//!   compositions that are normalized and square-root transformed;
//! * Euclidean: one numeric row per subject.
//!
//! Fields are separated by commas, or by whitespace when a line has no comma.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use ifreg::metric_spaces::{ProbGrid, QuantileFunction};
use ifreg::{EuclideanVec, MatrixConstraint, MetricSpaceKind, ObjectValue, SpherePoint, SymMatrix};
use nalgebra::DMatrix;

use crate::error::{CliError, CliResult};
use crate::output::write_atomic;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResponseFormat {
    pub kind: MetricSpaceKind,
    pub constraint: MatrixConstraint,
    pub sqrt_transform: bool,
}

impl ResponseFormat {
    pub fn new(kind: MetricSpaceKind) -> Self {
        ResponseFormat {
            kind,
            constraint: MatrixConstraint::Psd,
            sqrt_transform: false,
        }
    }
}

/// Fields of a non-blank line with their 1-based start columns.
struct Line<'a> {
    number: usize,
    fields: Vec<(usize, &'a str)>,
}

fn split_line(raw: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    if raw.contains(',') {
        let mut start = 0;
        for piece in raw.split(',') {
            let lead = piece.len() - piece.trim_start().len();
            out.push((start + lead + 1, piece.trim()));
            start += piece.len() + 1;
        }
    } else {
        let mut idx = 0;
        for piece in raw.split_whitespace() {
            let at = raw[idx..].find(piece).map(|p| p + idx).unwrap_or(idx);
            out.push((at + 1, piece));
            idx = at + piece.len();
        }
    }
    out
}

/// Blank lines come back as `None` so matrix blocks can be split on them.
fn lines(text: &str) -> Vec<Option<Line<'_>>> {
    text.lines()
        .enumerate()
        .map(|(i, raw)| {
            let raw = raw.trim_end_matches('\r');
            if raw.trim().is_empty() {
                None
            } else {
                Some(Line {
                    number: i + 1,
                    fields: split_line(raw),
                })
            }
        })
        .collect()
}

fn parse_number(path: &Path, line: usize, (column, field): (usize, &str)) -> CliResult<f64> {
    match field.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(CliError::parse(
            path,
            line,
            column,
            format!("'{field}' is not a finite number"),
        )),
    }
}

fn numeric_row(path: &Path, line: &Line<'_>) -> CliResult<Vec<f64>> {
    line.fields
        .iter()
        .map(|f| parse_number(path, line.number, *f))
        .collect()
}

fn is_header(line: &Line<'_>) -> bool {
    line.fields.iter().any(|(_, f)| f.parse::<f64>().is_err())
}

fn read_text(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn check_width(path: &Path, line: &Line<'_>, width: usize) -> CliResult<()> {
    if line.fields.len() != width {
        let column = line
            .fields
            .get(width.min(line.fields.len().saturating_sub(1)))
            .map_or(1, |f| f.0);
        return Err(CliError::parse(
            path,
            line.number,
            column,
            format!("expected {width} fields, found {}", line.fields.len()),
        ));
    }
    Ok(())
}

/// Numeric rows of a file, skipping a non-numeric first row.
fn read_table(path: &Path, text: &str) -> CliResult<Vec<Vec<f64>>> {
    let rows: Vec<Line<'_>> = lines(text).into_iter().flatten().collect();
    let body = match rows.first() {
        Some(first) if is_header(first) => &rows[1..],
        _ => &rows[..],
    };
    let Some(first) = body.first() else {
        return Err(CliError::Input(format!("{}: no data rows", path.display())));
    };
    let width = first.fields.len();
    body.iter()
        .map(|line| {
            check_width(path, line, width)?;
            numeric_row(path, line)
        })
        .collect()
}

pub fn read_predictors(path: &Path) -> CliResult<DMatrix<f64>> {
    let rows = read_table(path, &read_text(path)?)?;
    let p = rows[0].len();
    Ok(DMatrix::from_fn(rows.len(), p, |i, j| rows[i][j]))
}

pub fn format_predictors(x: &DMatrix<f64>) -> String {
    let mut out = String::new();
    let header: Vec<String> = (1..=x.ncols()).map(|j| format!("x{j}")).collect();
    out.push_str(&header.join(","));
    out.push('\n');
    for i in 0..x.nrows() {
        let row: Vec<String> = x.row(i).iter().map(|v| v.to_string()).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn write_predictors(path: &Path, x: &DMatrix<f64>) -> CliResult<()> {
    write_atomic(path, &format_predictors(x))
}

pub fn read_responses(path: &Path, format: ResponseFormat) -> CliResult<Vec<ObjectValue>> {
    parse_responses(&read_text(path)?, path, format)
}

pub fn parse_responses(text: &str, path: &Path, format: ResponseFormat) -> CliResult<Vec<ObjectValue>> {
    let objects = match format.kind {
        MetricSpaceKind::Wasserstein2 => parse_distributions(path, text)?,
        MetricSpaceKind::Frobenius => parse_matrices(path, text, format.constraint)?,
        MetricSpaceKind::SphereGeodesic => parse_sphere(path, text, format.sqrt_transform)?,
        MetricSpaceKind::Euclidean => read_table(path, text)?
            .into_iter()
            .map(|r| EuclideanVec::new(r).map(ObjectValue::from))
            .collect::<Result<_, _>>()?,
    };
    if objects.is_empty() {
        return Err(CliError::Input(format!("{}: no responses", path.display())));
    }
    Ok(objects)
}

fn parse_distributions(path: &Path, text: &str) -> CliResult<Vec<ObjectValue>> {
    let rows: Vec<Line<'_>> = lines(text).into_iter().flatten().collect();
    let Some(head) = rows.first() else {
        return Err(CliError::Input(format!("{}: empty distribution file", path.display())));
    };
    let grid = ProbGrid::new(numeric_row(path, head)?)
        .map_err(|e| CliError::parse(path, head.number, 1, format!("invalid probability grid: {e}")))?;
    rows[1..]
        .iter()
        .map(|line| {
            check_width(path, line, grid.len())?;
            let values = numeric_row(path, line)?;
            QuantileFunction::new(grid.clone(), values)
                .map(ObjectValue::from)
                .map_err(|e| CliError::parse(path, line.number, 1, e.to_string()))
        })
        .collect()
}

fn parse_matrices(path: &Path, text: &str, constraint: MatrixConstraint) -> CliResult<Vec<ObjectValue>> {
    let all = lines(text);
    let first = all.iter().flatten().next();
    if first.is_some_and(|l| l.fields.first().is_some_and(|(_, f)| f.eq_ignore_ascii_case("subject"))) {
        return parse_long_matrices(path, &all, constraint);
    }
    let mut blocks: Vec<Vec<&Line<'_>>> = Vec::new();
    let mut current: Vec<&Line<'_>> = Vec::new();
    for line in &all {
        match line {
            Some(l) => current.push(l),
            None if !current.is_empty() => blocks.push(std::mem::take(&mut current)),
            None => {}
        }
    }
    if !current.is_empty() {
        blocks.push(current);
    }
    blocks
        .into_iter()
        .map(|block| {
            let dim = block.len();
            let mut entries = Vec::with_capacity(dim * dim);
            for line in &block {
                check_width(path, line, dim)?;
                entries.extend(numeric_row(path, line)?);
            }
            SymMatrix::new(dim, entries, constraint)
                .map(ObjectValue::from)
                .map_err(|e| CliError::parse(path, block[0].number, 1, e.to_string()))
        })
        .collect()
}

fn parse_long_matrices(
    path: &Path,
    all: &[Option<Line<'_>>],
    constraint: MatrixConstraint,
) -> CliResult<Vec<ObjectValue>> {
    let mut subjects: Vec<String> = Vec::new();
    let mut cells: BTreeMap<usize, Vec<(usize, usize, f64, usize)>> = BTreeMap::new();
    for line in all.iter().flatten().skip(1) {
        check_width(path, line, 4)?;
        let id = line.fields[0].1;
        let s = match subjects.iter().position(|x| x == id) {
            Some(s) => s,
            None => {
                subjects.push(id.to_string());
                subjects.len() - 1
            }
        };
        let index = |k: usize| {
            let (col, f) = line.fields[k];
            f.parse::<usize>()
                .map_err(|_| CliError::parse(path, line.number, col, format!("'{f}' is not a 0-based index")))
        };
        let (r, c) = (index(1)?, index(2)?);
        let v = parse_number(path, line.number, line.fields[3])?;
        cells.entry(s).or_default().push((r, c, v, line.number));
    }
    cells
        .into_values()
        .enumerate()
        .map(|(s, list)| {
            let dim = list.iter().map(|(r, c, _, _)| r.max(c) + 1).max().unwrap_or(0);
            let mut entries = vec![f64::NAN; dim * dim];
            for &(r, c, v, line) in &list {
                for (i, j) in [(r, c), (c, r)] {
                    let slot = &mut entries[i * dim + j];
                    if !slot.is_nan() && *slot != v {
                        return Err(CliError::parse(
                            path,
                            line,
                            1,
                            format!("conflicting value for ({r}, {c})"),
                        ));
                    }
                    *slot = v;
                }
            }
            if entries.iter().any(|v| v.is_nan()) {
                return Err(CliError::Input(format!(
                    "{}: subject '{}' does not cover every entry of a {dim}x{dim} matrix",
                    path.display(),
                    subjects[s]
                )));
            }
            SymMatrix::new(dim, entries, constraint)
                .map(ObjectValue::from)
                .map_err(|e| CliError::Input(format!("{}: subject '{}': {e}", path.display(), subjects[s])))
        })
        .collect()
}

fn parse_sphere(path: &Path, text: &str, sqrt_transform: bool) -> CliResult<Vec<ObjectValue>> {
    let rows: Vec<Line<'_>> = lines(text).into_iter().flatten().collect();
    let body = match rows.first() {
        Some(first) if is_header(first) => &rows[1..],
        _ => &rows[..],
    };
    let width = body.first().map_or(0, |l| l.fields.len());
    body.iter()
        .map(|line| {
            check_width(path, line, width)?;
            let mut v = numeric_row(path, line)?;
            if sqrt_transform {
                if let Some(pos) = v.iter().position(|x| *x < 0.0) {
                    return Err(CliError::parse(
                        path,
                        line.number,
                        line.fields[pos].0,
                        "compositions must be nonnegative",
                    ));
                }
                let total: f64 = v.iter().sum();
                if !(total > 0.0) {
                    return Err(CliError::parse(path, line.number, 1, "composition sums to zero"));
                }
                v.iter_mut().for_each(|x| *x = (*x / total).sqrt());
            }
            SpherePoint::new(v)
                .map(ObjectValue::from)
                .map_err(|e| CliError::parse(path, line.number, 1, e.to_string()))
        })
        .collect()
}

fn push_row(out: &mut String, values: &[f64]) {
    let row: Vec<String> = values.iter().map(|v| v.to_string()).collect();
    out.push_str(&row.join(","));
    out.push('\n');
}

/// Serializes responses in the format [`read_responses`] reads (sphere points
/// as unit vectors, matrices as blocks).
pub fn format_responses(objects: &[ObjectValue]) -> CliResult<String> {
    let mut out = String::new();
    match objects.first() {
        Some(ObjectValue::Quantile(q)) => push_row(&mut out, q.probs()),
        Some(_) => {}
        None => return Err(CliError::Input("no responses to write".into())),
    }
    for (i, obj) in objects.iter().enumerate() {
        match obj {
            ObjectValue::Matrix(m) => {
                if i > 0 {
                    out.push('\n');
                }
                for r in 0..m.dim() {
                    push_row(&mut out, &m.entries()[r * m.dim()..(r + 1) * m.dim()]);
                }
            }
            other => push_row(&mut out, other.as_slice()),
        }
    }
    Ok(out)
}

pub fn write_responses(path: &Path, objects: &[ObjectValue]) -> CliResult<()> {
    write_atomic(path, &format_responses(objects)?)
}

/// Pearson correlation matrix of the columns of a `T × m` signal matrix.
pub fn pearson_correlation(signals: &DMatrix<f64>) -> ifreg::Result<SymMatrix> {
    let (t, m) = signals.shape();
    if t < 2 || m < 2 {
        return Err(ifreg::IfrError::Dimension(format!(
            "need at least 2 time points and 2 series, got {t}x{m}"
        )));
    }
    let centered: Vec<Vec<f64>> = (0..m)
        .map(|j| {
            let col = signals.column(j);
            let mean = col.sum() / t as f64;
            col.iter().map(|v| v - mean).collect()
        })
        .collect();
    let norms: Vec<f64> = centered
        .iter()
        .map(|c| c.iter().map(|v| v * v).sum::<f64>().sqrt())
        .collect();
    if let Some(j) = norms.iter().position(|n| *n == 0.0) {
        return Err(ifreg::IfrError::DegenerateInput(format!("series {j} is constant")));
    }
    let mut entries = vec![0.0; m * m];
    for a in 0..m {
        entries[a * m + a] = 1.0;
        for b in a + 1..m {
            let dot: f64 = centered[a].iter().zip(&centered[b]).map(|(x, y)| x * y).sum();
            let r = (dot / (norms[a] * norms[b])).clamp(-1.0, 1.0);
            entries[a * m + b] = r;
            entries[b * m + a] = r;
        }
    }
    SymMatrix::new(m, entries, MatrixConstraint::Correlation)
}

/// Reads one signal file per subject and returns their correlation matrices.
pub fn correlations_from_signals(paths: &[PathBuf]) -> CliResult<Vec<ObjectValue>> {
    paths
        .iter()
        .map(|p| {
            let x = read_predictors(p)?;
            pearson_correlation(&x).map(ObjectValue::from).map_err(CliError::from)
        })
        .collect()
}

/// One-line description of a dataset for console output.
pub fn describe(x: &DMatrix<f64>, y: &[ObjectValue]) -> String {
    let mut s = String::new();
    let _ = write!(s, "n = {}, p = {}", x.nrows(), x.ncols());
    if let Some(ObjectValue::Quantile(q)) = y.first() {
        let _ = write!(s, ", grid of {} probabilities", q.probs().len());
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splits_fields_with_columns() {
        let f = split_line("1, 2.5 ,x");
        assert_eq!(f, vec![(1, "1"), (4, "2.5"), (9, "x")]);
        let f = split_line("  3\t4   5");
        assert_eq!(f, vec![(3, "3"), (5, "4"), (9, "5")]);
    }

    #[test]
    fn long_and_block_matrices_agree() {
        let block = "1,0.5\n0.5,2\n\n3,0\n0,1\n";
        let long = "subject,row,col,value\na,0,0,1\na,0,1,0.5\na,1,1,2\nb,0,0,3\nb,1,1,1\nb,1,0,0\n";
        let p = Path::new("m.txt");
        let f = ResponseFormat::new(MetricSpaceKind::Frobenius);
        assert_eq!(
            parse_responses(block, p, f).unwrap(),
            parse_responses(long, p, f).unwrap()
        );
        let bad = "subject,row,col,value\na,0,0,1\na,0,1,0.5\na,1,0,0.6\na,1,1,2\n";
        assert!(matches!(
            parse_responses(bad, p, f),
            Err(CliError::Parse { line: 4, .. })
        ));
    }

    #[test]
    fn compositions_are_square_root_transformed() {
        let f = ResponseFormat {
            sqrt_transform: true,
            ..ResponseFormat::new(MetricSpaceKind::SphereGeodesic)
        };
        let y = parse_responses("a,b,c\n1,1,2\n0,0,5\n", Path::new("s.csv"), f).unwrap();
        assert_eq!(y[0].as_slice(), &[0.5, 0.5, 0.5f64.sqrt()]);
        assert_eq!(y[1].as_slice(), &[0.0, 0.0, 1.0]);
        assert!(parse_responses("1,-1,2\n", Path::new("s.csv"), f).is_err());
    }

    #[test]
    fn pearson_matches_hand_computation() {
        let x = DMatrix::from_row_slice(4, 3, &[1.0, 2.0, 0.0, 2.0, 4.0, 1.0, 3.0, 6.5, 0.0, 4.0, 8.0, 1.0]);
        let c = pearson_correlation(&x).unwrap();
        let col = |j: usize| x.column(j).iter().copied().collect::<Vec<f64>>();
        let r = |a: &[f64], b: &[f64]| {
            let ma = a.iter().sum::<f64>() / 4.0;
            let mb = b.iter().sum::<f64>() / 4.0;
            let sab: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
            let saa: f64 = a.iter().map(|x| (x - ma).powi(2)).sum();
            let sbb: f64 = b.iter().map(|y| (y - mb).powi(2)).sum();
            sab / (saa * sbb).sqrt()
        };
        assert!((c.get(0, 1) - r(&col(0), &col(1))).abs() < 1e-14);
        assert!((c.get(0, 2) - r(&col(0), &col(2))).abs() < 1e-14);
        assert_eq!(c.get(2, 2), 1.0);
        let constant = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 1.0, 1.0, 1.0, 2.0]);
        assert!(pearson_correlation(&constant).is_err());
    }
}
