//! CSV and text outputs, written once and atomically.

use std::io::Write;
use std::path::{Path, PathBuf};

use mwxray::recovery::ChordDescriptor;
use mwxray::{CVector, C64};
use tempfile::NamedTempFile;

use crate::error::CliError;

/// 17 significant digits: enough to round-trip every `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// `re_0, im_0, …` column names with an optional prefix.
pub fn complex_headers(prefix: &str, n: usize) -> Vec<String> {
    (0..n)
        .flat_map(|i| [format!("{prefix}re_{i}"), format!("{prefix}im_{i}")])
        .collect()
}

pub fn complex_cells(v: &CVector) -> Vec<String> {
    v.iter()
        .flat_map(|z| [fmt_f64(z.re), fmt_f64(z.im)])
        .collect()
}

/// Writes `contents` to `dir/name` through a temporary file in the same
/// directory, so readers never see a partial file.
pub fn write_atomic(dir: &Path, name: &str, contents: &[u8]) -> Result<PathBuf, CliError> {
    let io = |context: String| move |source| CliError::Io { context, source };
    std::fs::create_dir_all(dir).map_err(io(format!("creating {}", dir.display())))?;
    let target = dir.join(name);
    let mut tmp = NamedTempFile::new_in(dir)
        .map_err(io(format!("creating temp file in {}", dir.display())))?;
    tmp.write_all(contents)
        .map_err(io(format!("writing {}", target.display())))?;
    tmp.persist(&target).map_err(|e| CliError::Io {
        context: format!("renaming into {}", target.display()),
        source: e.error,
    })?;
    Ok(target)
}

/// A CSV table assembled in memory.
pub struct Table {
    writer: csv::Writer<Vec<u8>>,
}

impl Table {
    pub fn new<S: AsRef<str>>(header: &[S]) -> Result<Self, CliError> {
        let mut writer = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        writer.write_record(header.iter().map(AsRef::as_ref))?;
        Ok(Self { writer })
    }

    pub fn row<S: AsRef<str>>(&mut self, cells: &[S]) -> Result<(), CliError> {
        self.writer.write_record(cells.iter().map(AsRef::as_ref))?;
        Ok(())
    }

    pub fn write(self, dir: &Path, name: &str) -> Result<PathBuf, CliError> {
        let bytes = self.writer.into_inner().map_err(|e| CliError::Io {
            context: "flushing csv".into(),
            source: e.into_error(),
        })?;
        write_atomic(dir, name, &bytes)
    }
}

/// Reads a data table with columns `boundary_angle, direction_angle,
/// re_0, im_0, …`.
pub fn read_data(path: &Path, m: usize) -> Result<Vec<(ChordDescriptor, CVector)>, CliError> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| match e.kind() {
        csv::ErrorKind::Io(_) => CliError::Data(format!("{}: {e}", path.display())),
        _ => CliError::Csv(e),
    })?;
    let header = reader.headers()?.clone();
    let expected = 2 + 2 * m;
    if header.len() != expected || &header[0] != "boundary_angle" || &header[1] != "direction_angle"
    {
        return Err(CliError::Data(format!(
            "{}:1: expected boundary_angle, direction_angle and {m} re/im pairs",
            path.display()
        )));
    }
    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec?;
        let line = i + 2;
        let nums = rec
            .iter()
            .map(|c| c.trim().parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| CliError::Data(format!("{}:{line}: {e}", path.display())))?;
        if nums.len() != expected {
            return Err(CliError::Data(format!(
                "{}:{line}: expected {expected} columns, found {}",
                path.display(),
                nums.len()
            )));
        }
        let values = CVector::from_iterator(m, nums[2..].chunks(2).map(|p| C64::new(p[0], p[1])));
        rows.push((ChordDescriptor::new(nums[0], nums[1]), values));
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip_through_text() {
        for x in [0.1, -1.0 / 3.0, 1e-300, 6.02214076e23, std::f64::consts::PI] {
            let s = fmt_f64(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn data_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let mut t = Table::new(&["boundary_angle", "direction_angle", "re_0", "im_0"]).unwrap();
        t.row(&[fmt_f64(0.5), fmt_f64(3.0), fmt_f64(1.25), fmt_f64(-0.1)])
            .unwrap();
        let p = t.write(dir.path(), "d.csv").unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        assert!(!text.contains('\r'));
        let rows = read_data(&p, 1).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].0, ChordDescriptor::new(0.5, 3.0));
        assert_eq!(rows[0].1[0], C64::new(1.25, -0.1));
        assert!(matches!(read_data(&p, 2), Err(CliError::Data(_))));
    }
}
