//! CSV tables with a single `#` provenance line.

use std::fmt;
use std::io::{self, Write};
use std::path::Path;

/// One CSV field. Floats are written with 17 significant digits, which
/// round-trips every finite `f64`.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Cell {
    pub fn render(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => format!("{v:.16e}"),
            Cell::Text(s) => s.clone(),
        }
    }

    /// Inverse of [`Cell::render`]: integers have no `.` or exponent, floats
    /// always carry an exponent.
    pub fn parse(s: &str) -> Cell {
        if let Ok(v) = s.parse::<i64>() {
            return Cell::Int(v);
        }
        if s.contains('e') {
            if let Ok(v) = s.parse::<f64>() {
                return Cell::Float(v);
            }
        }
        Cell::Text(s.to_string())
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Int(v) => Some(*v as f64),
            Cell::Float(v) => Some(*v),
            Cell::Text(_) => None,
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

#[derive(Debug)]
pub enum TableError {
    Width {
        row: usize,
        expected: usize,
        found: usize,
    },
    Format(String),
}

impl fmt::Display for TableError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TableError::Width {
                row,
                expected,
                found,
            } => {
                write!(f, "row {row} has {found} fields, expected {expected}")
            }
            TableError::Format(m) => f.write_str(m),
        }
    }
}

impl std::error::Error for TableError {}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    provenance: String,
    columns: Vec<String>,
    rows: Vec<Vec<Cell>>,
}

impl ResultTable {
    pub fn new(provenance: impl Into<String>, columns: &[&str]) -> Self {
        Self {
            provenance: provenance.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) -> Result<(), TableError> {
        if row.len() != self.columns.len() {
            return Err(TableError::Width {
                row: self.rows.len(),
                expected: self.columns.len(),
                found: row.len(),
            });
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<Cell>] {
        &self.rows
    }

    /// Values of one column as `f64`, or `None` if the column is missing or
    /// holds text.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.columns.iter().position(|c| c == name)?;
        self.rows.iter().map(|r| r[j].as_f64()).collect()
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = format!("# {}\n", self.provenance.replace('\n', " ")).into_bytes();
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(&mut out);
        w.write_record(&self.columns).expect("writing to memory");
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render))
                .expect("writing to memory");
        }
        w.flush().expect("writing to memory");
        drop(w);
        out
    }

    pub fn parse(bytes: &[u8]) -> Result<Self, TableError> {
        let text = std::str::from_utf8(bytes).map_err(|e| TableError::Format(e.to_string()))?;
        let (first, rest) = text
            .split_once('\n')
            .ok_or_else(|| TableError::Format("missing header".into()))?;
        let provenance = first
            .strip_prefix("# ")
            .ok_or_else(|| TableError::Format("first line is not a `# ` provenance line".into()))?;
        let mut r = csv::ReaderBuilder::new().from_reader(rest.as_bytes());
        let columns: Vec<String> = r
            .headers()
            .map_err(|e| TableError::Format(e.to_string()))?
            .iter()
            .map(str::to_string)
            .collect();
        let mut table = ResultTable {
            provenance: provenance.to_string(),
            columns,
            rows: Vec::new(),
        };
        for rec in r.records() {
            let rec = rec.map_err(|e| TableError::Format(e.to_string()))?;
            table.push(rec.iter().map(Cell::parse).collect())?;
        }
        Ok(table)
    }

    /// Writes `dir/name` through a temporary file in `dir` and a rename, so
    /// readers never see a partial file.
    pub fn write_atomic(&self, path: &Path) -> io::Result<()> {
        let dir = path
            .parent()
            .filter(|p| !p.as_os_str().is_empty())
            .unwrap_or(Path::new("."));
        let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
        tmp.write_all(&self.to_bytes())?;
        tmp.as_file().sync_all()?;
        tmp.persist(path).map_err(|e| e.error)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ResultTable {
        let mut t = ResultTable::new("dissipaq test gamma=0.1", &["index", "value", "tag"]);
        t.push(vec![0usize.into(), 0.1.into(), "real_a".into()])
            .unwrap();
        t.push(vec![1usize.into(), (-1.0 / 3.0).into(), "a,b".into()])
            .unwrap();
        t.push(vec![2usize.into(), 1e-300.into(), "x".into()])
            .unwrap();
        t
    }

    #[test]
    fn layout() {
        let text = String::from_utf8(sample().to_bytes()).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# dissipaq test gamma=0.1");
        assert_eq!(lines[1], "index,value,tag");
        assert_eq!(lines[2], "0,1.0000000000000001e-1,real_a");
        assert_eq!(lines[3], "1,-3.3333333333333331e-1,\"a,b\"");
        assert!(text.ends_with('\n') && !text.contains('\r'));
    }

    #[test]
    fn round_trip() {
        let t = sample();
        let back = ResultTable::parse(&t.to_bytes()).unwrap();
        assert_eq!(back, t);
        for v in [f64::MIN_POSITIVE, 0.1 + 0.2, -0.0, 1e308, 123456789.0] {
            let c = Cell::Float(v);
            assert_eq!(Cell::parse(&c.render()), c);
        }
    }

    #[test]
    fn width_is_checked() {
        let mut t = ResultTable::new("p", &["a", "b"]);
        assert!(t.push(vec![1usize.into()]).is_err());
        assert!(ResultTable::parse(b"no header\n").is_err());
    }

    #[test]
    fn atomic_write() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.csv");
        sample().write_atomic(&p).unwrap();
        assert_eq!(std::fs::read(&p).unwrap(), sample().to_bytes());
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
        assert_eq!(sample().column("value").unwrap()[0], 0.1);
        assert!(sample().column("tag").is_none());
    }
}
