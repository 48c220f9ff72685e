use std::io::{self, Write};
use std::path::Path;

use super::{BufferKind, FrameBundle, PixelFormat};

/// Binary PPM (P6) from packed RGB bytes.
pub fn write_ppm<W: Write>(out: &mut W, width: usize, height: usize, rgb: &[u8]) -> io::Result<()> {
    write!(out, "P6\n{width} {height}\n255\n")?;
    out.write_all(rgb)
}

/// Binary PGM (P5) from one byte per pixel.
pub fn write_pgm<W: Write>(out: &mut W, width: usize, height: usize, gray: &[u8]) -> io::Result<()> {
    write!(out, "P5\n{width} {height}\n255\n")?;
    out.write_all(gray)
}

impl FrameBundle {
    /// `ppm` for color buffers, `pgm` for single-channel ones.
    pub fn file_extension(&self, kind: BufferKind) -> &'static str {
        if matches!(kind, BufferKind::Screen | BufferKind::Automap) && self.format == PixelFormat::Rgb24 {
            "ppm"
        } else {
            "pgm"
        }
    }

    /// Writes one buffer as PPM or PGM depending on its channel count.
    /// Returns false if the buffer was not rendered.
    pub fn export(&self, kind: BufferKind, path: &Path) -> io::Result<bool> {
        let Some(data) = self.buffer(kind) else {
            return Ok(false);
        };
        let color = self.file_extension(kind) == "ppm";
        let mut f = io::BufWriter::new(std::fs::File::create(path)?);
        if color {
            write_ppm(&mut f, self.width, self.height, data)?;
        } else {
            write_pgm(&mut f, self.width, self.height, data)?;
        }
        f.flush()?;
        Ok(true)
    }
}
