use crate::error::{Error, Result};

/// Index 0 is the unlabeled background; class `c ≥ 1` uses entry
/// `(c - 1) % 16 + 1`.
pub const PALETTE: [[u8; 3]; 17] = [
    [0, 0, 0],
    [230, 25, 75],
    [60, 180, 75],
    [255, 225, 25],
    [0, 130, 200],
    [245, 130, 48],
    [145, 30, 180],
    [70, 240, 240],
    [240, 50, 230],
    [210, 245, 60],
    [250, 190, 212],
    [0, 128, 128],
    [220, 190, 255],
    [170, 110, 40],
    [255, 250, 200],
    [128, 0, 0],
    [170, 255, 195],
];

pub fn palette_color(class: u16) -> [u8; 3] {
    if class == 0 {
        PALETTE[0]
    } else {
        PALETTE[(usize::from(class) - 1) % 16 + 1]
    }
}

/// Binary PPM (P6) of a label raster.
pub fn render_labels(labels: &[u16], rows: usize, cols: usize) -> Result<Vec<u8>> {
    if labels.len() != rows * cols {
        return Err(Error::Dimensions(format!(
            "{} labels for a {rows}x{cols} raster",
            labels.len()
        )));
    }
    let mut out = format!("P6\n{cols} {rows}\n255\n").into_bytes();
    out.reserve(labels.len() * 3);
    for &l in labels {
        out.extend_from_slice(&palette_color(l));
    }
    Ok(out)
}

/// Renders predictions on labeled pixels; pixels unlabeled in `gt` stay black.
pub fn render_map(predictions: &[u16], gt: &[u16], rows: usize, cols: usize) -> Result<Vec<u8>> {
    if predictions.len() != gt.len() {
        return Err(Error::LengthMismatch {
            left: predictions.len(),
            right: gt.len(),
        });
    }
    let masked: Vec<u16> = predictions
        .iter()
        .zip(gt)
        .map(|(&p, &g)| if g == 0 { 0 } else { p })
        .collect();
    render_labels(&masked, rows, cols)
}
