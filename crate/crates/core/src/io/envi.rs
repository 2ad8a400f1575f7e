//! ENVI-style cubes: a text header of `key = value` lines next to a raw
//! binary file.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::cube::HyperCube;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DataType {
    U8,
    I16,
    F32,
    U16,
}

impl DataType {
    pub fn from_code(code: u32) -> Result<Self> {
        match code {
            1 => Ok(Self::U8),
            2 => Ok(Self::I16),
            4 => Ok(Self::F32),
            12 => Ok(Self::U16),
            other => Err(Error::UnsupportedDataType(other)),
        }
    }

    pub fn code(self) -> u32 {
        match self {
            Self::U8 => 1,
            Self::I16 => 2,
            Self::F32 => 4,
            Self::U16 => 12,
        }
    }

    pub fn size(self) -> usize {
        match self {
            Self::U8 => 1,
            Self::I16 | Self::U16 => 2,
            Self::F32 => 4,
        }
    }

    pub fn is_integer(self) -> bool {
        self != Self::F32
    }

    fn decode(self, bytes: &[u8], big_endian: bool) -> f64 {
        macro_rules! read {
            ($t:ty) => {{
                let raw = bytes.try_into().expect("element width");
                f64::from(if big_endian { <$t>::from_be_bytes(raw) } else { <$t>::from_le_bytes(raw) })
            }};
        }
        match self {
            Self::U8 => f64::from(bytes[0]),
            Self::I16 => read!(i16),
            Self::F32 => read!(f32),
            Self::U16 => read!(u16),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Interleave {
    Bsq,
    Bil,
    Bip,
}

impl Interleave {
    pub fn name(self) -> &'static str {
        match self {
            Self::Bsq => "bsq",
            Self::Bil => "bil",
            Self::Bip => "bip",
        }
    }

    /// Position of `(line, sample, band)` in element units.
    fn offset(self, line: usize, sample: usize, band: usize, h: &EnviHeader) -> usize {
        match self {
            Self::Bsq => (band * h.lines + line) * h.samples + sample,
            Self::Bil => (line * h.bands + band) * h.samples + sample,
            Self::Bip => (line * h.samples + sample) * h.bands + band,
        }
    }
}

impl std::str::FromStr for Interleave {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "bsq" => Ok(Self::Bsq),
            "bil" => Ok(Self::Bil),
            "bip" => Ok(Self::Bip),
            other => Err(Error::Header(format!("unknown interleave {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnviHeader {
    /// Columns.
    pub samples: usize,
    /// Rows.
    pub lines: usize,
    pub bands: usize,
    pub data_type: DataType,
    pub interleave: Interleave,
    pub big_endian: bool,
    /// Bytes to skip at the start of the data file.
    pub header_offset: usize,
}

impl EnviHeader {
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        match lines.next() {
            Some(first) if first.trim() == "ENVI" => {}
            _ => return Err(Error::Header("first line must be `ENVI`".into())),
        }
        let (mut samples, mut rows, mut bands, mut data_type) = (None, None, None, None);
        let mut interleave = Interleave::Bsq;
        let mut big_endian = false;
        let mut header_offset = 0;
        let mut pending: Option<(String, String)> = None;

        for (n, line) in lines.enumerate() {
            let line_no = n + 2;
            let (key, value) = match pending.take() {
                Some((key, mut value)) => {
                    value.push(' ');
                    value.push_str(line);
                    (key, value)
                }
                None => {
                    if line.trim().is_empty() || line.trim_start().starts_with(';') {
                        continue;
                    }
                    let (k, v) = line
                        .split_once('=')
                        .ok_or_else(|| Error::Header(format!("line {line_no}: expected `key = value`")))?;
                    (k.trim().to_ascii_lowercase(), v.trim().to_string())
                }
            };
            if value.starts_with('{') && !value.contains('}') {
                pending = Some((key, value));
                continue;
            }
            let number = |v: &str| {
                v.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::Header(format!("line {line_no}: {key} must be a nonnegative integer")))
            };
            match key.as_str() {
                "samples" => samples = Some(number(&value)?),
                "lines" => rows = Some(number(&value)?),
                "bands" => bands = Some(number(&value)?),
                "data type" => data_type = Some(DataType::from_code(number(&value)? as u32)?),
                "interleave" => interleave = value.parse()?,
                "byte order" => {
                    big_endian = match number(&value)? {
                        0 => false,
                        1 => true,
                        other => return Err(Error::Header(format!("line {line_no}: byte order {other}"))),
                    }
                }
                "header offset" => header_offset = number(&value)?,
                _ => log::warn!("ignoring ENVI header key {key:?}"),
            }
        }
        if pending.is_some() {
            return Err(Error::Header("unterminated `{` value".into()));
        }
        let missing = |name: &str| Error::Header(format!("missing `{name}`"));
        let header = Self {
            samples: samples.ok_or_else(|| missing("samples"))?,
            lines: rows.ok_or_else(|| missing("lines"))?,
            bands: bands.ok_or_else(|| missing("bands"))?,
            data_type: data_type.ok_or_else(|| missing("data type"))?,
            interleave,
            big_endian,
            header_offset,
        };
        if header.samples == 0 || header.lines == 0 || header.bands == 0 {
            return Err(Error::Header("samples, lines and bands must be at least 1".into()));
        }
        Ok(header)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::from("ENVI\n");
        let _ = writeln!(s, "samples = {}", self.samples);
        let _ = writeln!(s, "lines = {}", self.lines);
        let _ = writeln!(s, "bands = {}", self.bands);
        let _ = writeln!(s, "header offset = {}", self.header_offset);
        let _ = writeln!(s, "data type = {}", self.data_type.code());
        let _ = writeln!(s, "interleave = {}", self.interleave.name());
        let _ = writeln!(s, "byte order = {}", u8::from(self.big_endian));
        s
    }

    pub fn data_len(&self) -> usize {
        self.samples * self.lines * self.bands * self.data_type.size()
    }

    /// Decodes the data into `(row, col, band)` pixel-interleaved order.
    fn decode(&self, data: &[u8]) -> Result<Vec<f64>> {
        let expected = self.header_offset + self.data_len();
        if data.len() < expected {
            return Err(Error::Truncated {
                expected,
                found: data.len(),
            });
        }
        if data.len() > expected {
            log::warn!("{} trailing bytes after cube data", data.len() - expected);
        }
        let data = &data[self.header_offset..];
        let size = self.data_type.size();
        let mut out = Vec::with_capacity(self.samples * self.lines * self.bands);
        for line in 0..self.lines {
            for sample in 0..self.samples {
                for band in 0..self.bands {
                    let at = self.interleave.offset(line, sample, band, self) * size;
                    out.push(self.data_type.decode(&data[at..at + size], self.big_endian));
                }
            }
        }
        Ok(out)
    }
}

pub fn read_envi(header_text: &str, data: &[u8]) -> Result<HyperCube> {
    let header = EnviHeader::parse(header_text)?;
    let values = header.decode(data)?.into_iter().map(|v| v as f32).collect();
    HyperCube::new(header.lines, header.samples, header.bands, values)
}

/// Encodes a cube as 32-bit floats.
pub fn write_envi(cube: &HyperCube, interleave: Interleave, big_endian: bool) -> (String, Vec<u8>) {
    let header = EnviHeader {
        samples: cube.cols(),
        lines: cube.rows(),
        bands: cube.bands(),
        data_type: DataType::F32,
        interleave,
        big_endian,
        header_offset: 0,
    };
    let mut data = vec![0u8; header.data_len()];
    for line in 0..header.lines {
        for sample in 0..header.samples {
            for band in 0..header.bands {
                let v = cube.get(line, sample, band);
                let bytes = if big_endian { v.to_be_bytes() } else { v.to_le_bytes() };
                let at = interleave.offset(line, sample, band, &header) * 4;
                data[at..at + 4].copy_from_slice(&bytes);
            }
        }
    }
    (header.to_text(), data)
}

/// Header/data paths for a cube given either file. A `.hdr` path is paired
/// with the first existing data file among the bare stem and the `.raw`,
/// `.img`, `.dat`, `.bsq`, `.bil`, `.bip` extensions; a data path is paired
/// with `<path>.hdr` or `<stem>.hdr`.
pub fn resolve_paths(path: &Path) -> Result<(PathBuf, PathBuf)> {
    let not_found = || {
        Error::io(
            path,
            std::io::Error::new(std::io::ErrorKind::NotFound, "no matching ENVI header/data pair"),
        )
    };
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("hdr")) {
        let stem = path.with_extension("");
        let data = std::iter::once(stem.clone())
            .chain(["raw", "img", "dat", "bsq", "bil", "bip"].iter().map(|e| stem.with_extension(e)))
            .find(|p| p.is_file())
            .ok_or_else(not_found)?;
        return Ok((path.to_path_buf(), data));
    }
    let mut appended = path.as_os_str().to_owned();
    appended.push(".hdr");
    let header = [PathBuf::from(appended), path.with_extension("hdr")]
        .into_iter()
        .find(|p| p.is_file())
        .ok_or_else(not_found)?;
    Ok((header, path.to_path_buf()))
}

fn read_pair(path: &Path) -> Result<(EnviHeader, Vec<u8>)> {
    let (header_path, data_path) = resolve_paths(path)?;
    let text = std::fs::read_to_string(&header_path).map_err(|e| Error::io(&header_path, e))?;
    let header = EnviHeader::parse(&text)?;
    let data = std::fs::read(&data_path).map_err(|e| Error::io(&data_path, e))?;
    Ok((header, data))
}

pub fn load_envi(path: &Path) -> Result<HyperCube> {
    let (header, data) = read_pair(path)?;
    let values = header.decode(&data)?.into_iter().map(|v| v as f32).collect();
    HyperCube::new(header.lines, header.samples, header.bands, values)
}

/// Writes `<data_path>` and `<data_path stem>.hdr`.
pub fn save_envi(cube: &HyperCube, data_path: &Path, interleave: Interleave) -> Result<()> {
    let (header, data) = write_envi(cube, interleave, false);
    super::write_atomic(data_path, &data)?;
    super::write_atomic(&data_path.with_extension("hdr"), header.as_bytes())
}

/// Reads a single-band integer raster as labels.
pub fn read_label_raster(header_text: &str, data: &[u8]) -> Result<(usize, usize, Vec<u16>)> {
    decode_labels(&EnviHeader::parse(header_text)?, data)
}

pub fn load_label_raster(path: &Path) -> Result<(usize, usize, Vec<u16>)> {
    let (header, data) = read_pair(path)?;
    decode_labels(&header, &data)
}

fn decode_labels(header: &EnviHeader, data: &[u8]) -> Result<(usize, usize, Vec<u16>)> {
    if header.bands != 1 {
        return Err(Error::Labels(format!("label raster has {} bands, expected 1", header.bands)));
    }
    let values = header.decode(data)?;
    let labels = values
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            if v < 0.0 || v.fract() != 0.0 || v > f64::from(u16::MAX) {
                Err(Error::Labels(format!("pixel {i} has label {v}; labels must be integers in 0..=65535")))
            } else {
                Ok(v as u16)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((header.lines, header.samples, labels))
}

/// Encodes labels as a single-band 16-bit raster.
pub fn write_label_raster(rows: usize, cols: usize, labels: &[u16]) -> (String, Vec<u8>) {
    let header = EnviHeader {
        samples: cols,
        lines: rows,
        bands: 1,
        data_type: DataType::U16,
        interleave: Interleave::Bsq,
        big_endian: false,
        header_offset: 0,
    };
    let data = labels.iter().flat_map(|l| l.to_le_bytes()).collect();
    (header.to_text(), data)
}
