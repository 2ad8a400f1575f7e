use std::path::Path;

use super::envi::load_label_raster;
use crate::cube::GroundTruth;
use crate::error::{Error, Result};

/// Parses `row,col,label` lines; unlisted pixels are background. A first
/// line that does not parse as numbers is taken as a column header.
pub fn read_labels_csv(text: &str, rows: usize, cols: usize) -> Result<GroundTruth> {
    let mut labels = vec![0u16; rows * cols];
    let mut seen = vec![false; rows * cols];
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let parsed = (fields.len() == 3)
            .then(|| (fields[0].parse::<usize>(), fields[1].parse::<usize>(), fields[2].parse::<i64>()));
        let (r, c, l) = match parsed {
            Some((Ok(r), Ok(c), Ok(l))) => (r, c, l),
            _ if n == 0 => continue,
            _ => return Err(Error::Labels(format!("line {}: expected `row,col,label`", n + 1))),
        };
        if r >= rows || c >= cols {
            return Err(Error::Labels(format!("line {}: pixel ({r}, {c}) outside {rows}x{cols}", n + 1)));
        }
        let label = u16::try_from(l)
            .map_err(|_| Error::Labels(format!("line {}: label {l} outside 0..=65535", n + 1)))?;
        let at = r * cols + c;
        if seen[at] {
            return Err(Error::Labels(format!("line {}: pixel ({r}, {c}) listed twice", n + 1)));
        }
        seen[at] = true;
        labels[at] = label;
    }
    GroundTruth::new(rows, cols, labels)
}

pub fn write_labels_csv(gt: &GroundTruth) -> String {
    let mut out = String::from("row,col,label\n");
    for (i, &l) in gt.labels().iter().enumerate() {
        if l != 0 {
            out.push_str(&format!("{},{},{l}\n", i / gt.cols(), i % gt.cols()));
        }
    }
    out
}

/// Loads labels from a `.csv` file or an ENVI label raster and checks them
/// against the expected raster size.
pub fn load_labels(path: &Path, rows: usize, cols: usize) -> Result<GroundTruth> {
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        return read_labels_csv(&text, rows, cols);
    }
    let (r, c, labels) = load_label_raster(path)?;
    if (r, c) != (rows, cols) {
        return Err(Error::Dimensions(format!("labels are {r}x{c} but cube is {rows}x{cols}")));
    }
    GroundTruth::new(r, c, labels)
}
