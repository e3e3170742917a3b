//! Artifact writers: PGM/PNG mask renders, CSV curves, JSON reports.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::dynamics::JuliaApprox;
use crate::error::Result;
use crate::geometry::Curve;

/// Grayscale image of a sieve result: 255 inside the filled set,
/// escape-time shading 255 * steps / depth (clamped) elsewhere.
pub fn julia_to_gray(ja: &JuliaApprox) -> Vec<u8> {
    let res = ja.k_mask.grid.resolution;
    let depth = ja.depth.max(1) as f64;
    let mut buf = vec![0u8; res * res];
    for iy in 0..res {
        for ix in 0..res {
            let i = ja.k_mask.grid.index(ix, iy);
            // rows flipped so the image's y axis points up
            let o = (res - 1 - iy) * res + ix;
            buf[o] = if ja.k_mask.bits[i] {
                255
            } else {
                let v = 255.0 * ja.escape_steps[i] as f64 / depth;
                v.clamp(0.0, 255.0) as u8
            };
        }
    }
    buf
}

/// Writes a binary PGM (P5), or a PNG when the path ends in `.png`.
pub fn write_image(path: &Path, ja: &JuliaApprox) -> Result<()> {
    let res = ja.k_mask.grid.resolution;
    let buf = julia_to_gray(ja);
    if path.extension().map(|e| e == "png").unwrap_or(false) {
        let img = image::GrayImage::from_raw(res as u32, res as u32, buf)
            .expect("buffer matches dimensions");
        img.save(path)
            .map_err(|e| crate::error::Error::SpecInput(format!("png write: {}", e)))?;
        return Ok(());
    }
    let mut f = fs::File::create(path)?;
    write!(f, "P5\n{} {}\n255\n", res, res)?;
    f.write_all(&buf)?;
    Ok(())
}

/// CSV of (re, im) rows; the closed flag goes into a header comment.
pub fn write_curve_csv(path: &Path, curve: &Curve) -> Result<()> {
    let mut f = fs::File::create(path)?;
    writeln!(f, "# closed = {}", curve.closed)?;
    writeln!(f, "re,im")?;
    for p in &curve.points {
        writeln!(f, "{},{}", p.re, p.im)?;
    }
    Ok(())
}

/// UTF-8 JSON with a trailing newline.
pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}
