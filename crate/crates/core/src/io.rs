//! Delimited data files, run headers, and atomic output.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::chain::Chain;
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::summary::PosteriorSummary;

/// Raw class label → binary response.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelMap(BTreeMap<i64, u8>);

impl Default for LabelMap {
    fn default() -> Self {
        Self(BTreeMap::from([(-1, 0), (1, 1)]))
    }
}

impl LabelMap {
    pub fn new(pairs: &[(i64, u8)]) -> Result<Self> {
        if pairs.iter().any(|&(_, y)| y > 1) {
            return Err(Error::Config("label map targets must be 0 or 1".into()));
        }
        Ok(Self(pairs.iter().copied().collect()))
    }

    pub fn get(&self, label: i64) -> Option<u8> {
        self.0.get(&label).copied()
    }
}

impl std::str::FromStr for LabelMap {
    type Err = Error;

    /// `"-1:0,1:1"`
    fn from_str(s: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let (a, b) = item
                .split_once(':')
                .ok_or_else(|| Error::Config(format!("label map entry '{item}' is not raw:binary")))?;
            let a = a
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("bad raw label '{a}'")))?;
            let b = b
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("bad binary label '{b}'")))?;
            pairs.push((a, b));
        }
        Self::new(&pairs)
    }
}

fn split_fields(line: &str) -> Vec<&str> {
    if line.contains(',') {
        line.split(',').map(str::trim).collect()
    } else {
        line.split_whitespace().collect()
    }
}

fn is_skippable(line: &str) -> bool {
    let t = line.trim();
    t.is_empty() || t.starts_with('#')
}

pub(crate) fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::File {
        path: path.display().to_string(),
        source,
    })
}

fn parse_err(path: &Path, line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        path: path.display().to_string(),
        line,
        msg: msg.into(),
    }
}

fn parse_numbers(fields: &[&str], path: &Path, line: usize) -> Result<Vec<f64>> {
    fields
        .iter()
        .enumerate()
        .map(|(c, f)| {
            let v: f64 = f
                .parse()
                .map_err(|_| parse_err(path, line, format!("column {}: '{f}' is not a number", c + 1)))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(parse_err(path, line, format!("column {}: non-finite value", c + 1)))
            }
        })
        .collect()
}

/// Numeric rows of a delimited file, with 1-based source line numbers.
/// Skips blank and `#` lines; a first data line that does not parse is
/// treated as a header when `allow_header` is set.
fn read_rows(path: &Path, allow_header: bool) -> Result<Vec<(usize, Vec<f64>)>> {
    let text = read_text(path)?;
    let mut rows = Vec::new();
    let mut width = None;
    let mut first = true;
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        if is_skippable(line) {
            continue;
        }
        let fields = split_fields(line);
        let parsed = parse_numbers(&fields, path, lineno);
        let values = match parsed {
            Err(_) if first && allow_header => {
                first = false;
                continue;
            }
            other => other?,
        };
        first = false;
        match width {
            None => width = Some(values.len()),
            Some(w) if w != values.len() => {
                return Err(parse_err(
                    path,
                    lineno,
                    format!("expected {w} fields, found {}", values.len()),
                ));
            }
            _ => {}
        }
        rows.push((lineno, values));
    }
    if rows.is_empty() {
        return Err(parse_err(path, 0, "no data rows"));
    }
    Ok(rows)
}

/// UCR-format file: label first, series after; comma or whitespace delimited.
pub fn load_ucr(path: impl AsRef<Path>, labels: &LabelMap) -> Result<Dataset> {
    let path = path.as_ref();
    let rows = read_rows(path, false)?;
    let mut x = Vec::with_capacity(rows.len());
    let mut y = Vec::with_capacity(rows.len());
    for (lineno, row) in rows {
        if row.len() < 2 {
            return Err(parse_err(path, lineno, "row has a label but no series"));
        }
        let raw = row[0];
        if raw.fract() != 0.0 {
            return Err(parse_err(path, lineno, format!("label {raw} is not an integer")));
        }
        let mapped = labels
            .get(raw as i64)
            .ok_or_else(|| parse_err(path, lineno, format!("label {raw} has no mapping")))?;
        y.push(mapped);
        x.push(row[1..].to_vec());
    }
    Dataset::from_rows(&x, y)
}

/// Per-column centring and scaling applied to a design.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Standardization {
    pub means: Vec<f64>,
    pub sds: Vec<f64>,
}

impl Standardization {
    pub fn fit(x: &DMatrix<f64>) -> Result<Self> {
        let n = x.nrows() as f64;
        if x.nrows() < 2 {
            return Err(Error::Dimension("standardization needs at least two rows".into()));
        }
        let mut means = Vec::with_capacity(x.ncols());
        let mut sds = Vec::with_capacity(x.ncols());
        for (j, col) in x.column_iter().enumerate() {
            let m = col.sum() / n;
            let var = col.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (n - 1.0);
            let sd = var.sqrt();
            if sd.is_nan() || sd <= 1e-12 * m.abs().max(1.0) {
                return Err(Error::ZeroVariance(j));
            }
            means.push(m);
            sds.push(sd);
        }
        Ok(Self { means, sds })
    }

    pub fn apply(&self, x: &mut DMatrix<f64>) -> Result<()> {
        if x.ncols() != self.means.len() {
            return Err(Error::Dimension(format!(
                "standardization has {} columns, data has {}",
                self.means.len(),
                x.ncols()
            )));
        }
        for (j, mut col) in x.column_iter_mut().enumerate() {
            col.apply(|v| *v = (*v - self.means[j]) / self.sds[j]);
        }
        Ok(())
    }
}

/// Generic delimited matrix with the binary response in `response_col`
/// (zero-based). Comment lines and an optional header line are skipped.
pub fn load_matrix(
    path: impl AsRef<Path>,
    response_col: usize,
    standardize: bool,
) -> Result<(Dataset, Option<Standardization>)> {
    let path = path.as_ref();
    let rows = read_rows(path, true)?;
    let width = rows[0].1.len();
    if response_col >= width {
        return Err(Error::Dimension(format!(
            "response column {response_col} out of range for {width} columns"
        )));
    }
    let mut x = Vec::with_capacity(rows.len());
    let mut y = Vec::with_capacity(rows.len());
    for (lineno, mut row) in rows {
        let r = row.remove(response_col);
        if r != 0.0 && r != 1.0 {
            return Err(parse_err(path, lineno, format!("response {r} is not 0 or 1")));
        }
        y.push(r as u8);
        x.push(row);
    }
    let mut data = Dataset::from_rows(&x, y)?;
    if !standardize {
        return Ok((data, None));
    }
    let std = Standardization::fit(data.x())?;
    let mut xm = data.x().clone();
    std.apply(&mut xm)?;
    data = Dataset::new(xm, data.y().to_vec())?;
    Ok((data, Some(std)))
}

/// Feature-only delimited file (no response column).
pub fn load_features(path: impl AsRef<Path>) -> Result<DMatrix<f64>> {
    let rows = read_rows(path.as_ref(), true)?;
    let p = rows[0].1.len();
    Ok(DMatrix::from_row_iterator(
        rows.len(),
        p,
        rows.into_iter().flat_map(|(_, r)| r),
    ))
}

/// Provenance lines written as `#` comments at the top of every output file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunHeader {
    pub seed: u64,
    pub model: String,
    pub config_hash: String,
}

impl RunHeader {
    pub fn comment_block(&self) -> String {
        format!(
            "# seed={}\n# model={}\n# config_hash={}\n",
            self.seed, self.model, self.config_hash
        )
    }
}

/// SHA-256 of the canonical JSON form of a configuration.
pub fn config_hash<T: Serialize>(config: &T) -> Result<String> {
    let json = serde_json::to_vec(config)?;
    let digest = Sha256::digest(&json);
    Ok(digest.iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    }))
}

/// Write via a sibling temp file and rename, so readers never see a partial file.
pub fn atomic_write(path: impl AsRef<Path>, contents: &[u8]) -> Result<()> {
    let path = path.as_ref();
    let dir = path
        .parent()
        .filter(|d| !d.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let name = path
        .file_name()
        .ok_or_else(|| Error::Config(format!("'{}' is not a file path", path.display())))?;
    let mut tmp = PathBuf::from(dir);
    tmp.push(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    fs::write(&tmp, contents)?;
    if let Err(e) = fs::rename(&tmp, path) {
        let _ = fs::remove_file(&tmp);
        return Err(e.into());
    }
    Ok(())
}

/// Dataset as CSV: `y, x_1..x_p`. Rust's shortest round-trip float formatting
/// makes a write/load cycle bit-exact.
pub fn dataset_csv(data: &Dataset, header: Option<&RunHeader>) -> String {
    let mut s = header.map(RunHeader::comment_block).unwrap_or_default();
    s.push('y');
    for j in 1..=data.p() {
        let _ = write!(s, ",x{j}");
    }
    s.push('\n');
    for (i, row) in data.x().row_iter().enumerate() {
        let _ = write!(s, "{}", data.y()[i]);
        for v in row.iter() {
            let _ = write!(s, ",{v}");
        }
        s.push('\n');
    }
    s
}

pub fn write_dataset(path: impl AsRef<Path>, data: &Dataset, header: Option<&RunHeader>) -> Result<()> {
    atomic_write(path, dataset_csv(data, header).as_bytes())
}

/// One row per retained draw: iter, beta0, beta_1..beta_p, hyperparameters.
pub fn samples_csv(chain: &Chain, header: &RunHeader) -> String {
    let mut s = header.comment_block();
    s.push_str("iter,beta0");
    for j in 1..=chain.p() {
        let _ = write!(s, ",beta_{j}");
    }
    for name in &chain.hyper_names {
        let _ = write!(s, ",{name}");
    }
    s.push('\n');
    for t in 0..chain.retained {
        let _ = write!(s, "{},{}", chain.iterations[t], chain.beta0_draws[t]);
        for v in &chain.beta_draws[t] {
            let _ = write!(s, ",{v}");
        }
        for col in &chain.hyper_draws {
            let _ = write!(s, ",{}", col[t]);
        }
        s.push('\n');
    }
    s
}

/// Coefficient profile: index, posterior mean, interval, selection flag, and
/// whether a fusion boundary separates it from the next coefficient.
pub fn plot_data_csv(summary: &PosteriorSummary, header: &RunHeader) -> String {
    let mut s = header.comment_block();
    s.push_str("index,mean,ci_lower,ci_upper,selected,boundary_after\n");
    for j in 0..summary.beta_mean.len() {
        let (lo, hi) = summary.ci_beta[j];
        let boundary = summary.fused.get(j).copied().unwrap_or(false);
        let _ = writeln!(
            s,
            "{},{},{},{},{},{}",
            j + 1,
            summary.beta_mean[j],
            lo,
            hi,
            summary.selected[j] as u8,
            boundary as u8
        );
    }
    s
}

/// Saved point estimates read back from a fit's summary JSON.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointEstimates {
    pub beta0: f64,
    pub beta: Vec<f64>,
    #[serde(default)]
    pub standardization: Option<Standardization>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn tmpfile(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    #[test]
    fn ucr_toy_default_map() {
        let f = tmpfile("-1 0.5 1.5\n1 2.0 -3.0\n");
        let d = load_ucr(f.path(), &LabelMap::default()).unwrap();
        assert_eq!(d.y(), &[0, 1]);
        assert_eq!((d.n(), d.p()), (2, 2));
        let f = tmpfile("-1.0,0.5,1.5\n1.0,2.0,-3.0\n");
        assert_eq!(load_ucr(f.path(), &LabelMap::default()).unwrap(), d);
    }

    #[test]
    fn ucr_errors_carry_line_numbers() {
        let f = tmpfile("1 0.5 1.5\n1 2.0\n");
        match load_ucr(f.path(), &LabelMap::default()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        let f = tmpfile("1 0.5 1.5\n\n2 2.0 1.0\n");
        match load_ucr(f.path(), &LabelMap::default()) {
            Err(Error::Parse { line, msg, .. }) => {
                assert_eq!(line, 3);
                assert!(msg.contains("mapping"));
            }
            other => panic!("{other:?}"),
        }
        let f = tmpfile("1 0.5 abc\n");
        assert!(matches!(
            load_ucr(f.path(), &LabelMap::default()),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn label_map_parsing() {
        let m: LabelMap = "2:1, 1:0".parse().unwrap();
        assert_eq!(m.get(2), Some(1));
        assert_eq!(m.get(-1), None);
        assert!("1:2".parse::<LabelMap>().is_err());
        assert!("1".parse::<LabelMap>().is_err());
    }

    #[test]
    fn matrix_with_header_and_response() {
        let f = tmpfile("a,b,y\n1,2,0\n3,4,1\n5,7,1\n");
        let (d, s) = load_matrix(f.path(), 2, false).unwrap();
        assert_eq!((d.n(), d.p()), (3, 2));
        assert_eq!(d.y(), &[0, 1, 1]);
        assert!(s.is_none());
        assert!(load_matrix(f.path(), 3, false).is_err());
        let f = tmpfile("1,2,0.5\n");
        assert!(matches!(load_matrix(f.path(), 2, false), Err(Error::Parse { .. })));
    }

    #[test]
    fn standardization_moments() {
        let f = tmpfile("0,1.0,10\n1,2.0,11\n1,4.0,15\n0,8.5,12\n");
        let (d, s) = load_matrix(f.path(), 0, true).unwrap();
        assert!(s.is_some());
        let n = d.n() as f64;
        for col in d.x().column_iter() {
            let m = col.sum() / n;
            let sd = (col.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
            assert!(m.abs() < 1e-10 && (sd - 1.0).abs() < 1e-10);
        }
        let f = tmpfile("0,1,3\n1,2,3\n1,4,3\n");
        assert!(matches!(load_matrix(f.path(), 0, true), Err(Error::ZeroVariance(1))));
    }

    #[test]
    fn dataset_round_trip_is_bit_exact() {
        let x = DMatrix::from_row_slice(3, 2, &[0.1, 1.0 / 3.0, -2.5e-300, 1e300, std::f64::consts::PI, -0.0]);
        let d = Dataset::new(x, vec![1, 0, 1]).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("d.csv");
        let h = RunHeader {
            seed: 3,
            model: "lbfl".into(),
            config_hash: "00".into(),
        };
        write_dataset(&p, &d, Some(&h)).unwrap();
        let (back, _) = load_matrix(&p, 0, false).unwrap();
        for (a, b) in d.x().iter().zip(back.x().iter()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
        assert_eq!(back.y(), d.y());
    }

    #[test]
    fn atomic_write_leaves_no_temp() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("out.txt");
        atomic_write(&p, b"abc").unwrap();
        atomic_write(&p, b"def").unwrap();
        assert_eq!(fs::read_to_string(&p).unwrap(), "def");
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
    }

    #[test]
    fn hash_is_stable() {
        let a = config_hash(&("x", 1)).unwrap();
        assert_eq!(a.len(), 64);
        assert_eq!(a, config_hash(&("x", 1)).unwrap());
        assert_ne!(a, config_hash(&("x", 2)).unwrap());
    }
}
