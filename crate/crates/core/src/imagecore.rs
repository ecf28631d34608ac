//! 8-bit raster images, decoding, channel handling and gray-level quantization.

use image::{DynamicImage, ImageFormat};

use crate::error::{Error, Result};

/// Decoded pixel grid with 1 or 3 interleaved 8-bit channels, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RasterImage {
    width: usize,
    height: usize,
    channels: usize,
    data: Vec<u8>,
}

impl RasterImage {
    pub fn new(width: usize, height: usize, channels: usize, data: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidImage(format!("{width}x{height} has no pixels")));
        }
        if channels != 1 && channels != 3 {
            return Err(Error::ChannelCount {
                expected: 3,
                actual: channels,
            });
        }
        if data.len() != width * height * channels {
            return Err(Error::InvalidImage(format!(
                "buffer holds {} samples, expected {}",
                data.len(),
                width * height * channels
            )));
        }
        Ok(Self {
            width,
            height,
            channels,
            data,
        })
    }

    /// Builds a 3-channel image from a per-pixel closure.
    pub fn from_fn_rgb(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> [u8; 3]) -> Result<Self> {
        let mut data = Vec::with_capacity(width * height * 3);
        for y in 0..height {
            for x in 0..width {
                data.extend_from_slice(&f(x, y));
            }
        }
        Self::new(width, height, 3, data)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn pixel(&self, x: usize, y: usize) -> &[u8] {
        let start = (y * self.width + x) * self.channels;
        &self.data[start..start + self.channels]
    }

    /// Replicates a single channel into three; 3-channel images are returned unchanged.
    pub fn into_rgb(self) -> Self {
        if self.channels == 3 {
            return self;
        }
        let data = self.data.iter().flat_map(|&v| [v, v, v]).collect();
        Self {
            channels: 3,
            data,
            ..self
        }
    }

    /// Encodes the image as PNG.
    pub fn to_png(&self) -> Result<Vec<u8>> {
        let color = if self.channels == 3 {
            image::ExtendedColorType::Rgb8
        } else {
            image::ExtendedColorType::L8
        };
        let mut out = Vec::new();
        image::ImageEncoder::write_image(
            image::codecs::png::PngEncoder::new(&mut out),
            &self.data,
            self.width as u32,
            self.height as u32,
            color,
        )
        .map_err(|e| Error::Decode(e.to_string()))?;
        Ok(out)
    }
}

/// Single-channel 8-bit image, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, data: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidImage(format!("{width}x{height} has no pixels")));
        }
        if data.len() != width * height {
            return Err(Error::InvalidImage(format!(
                "buffer holds {} samples, expected {}",
                data.len(),
                width * height
            )));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> u8) -> Result<Self> {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self::new(width, height, data)
    }

    pub fn filled(width: usize, height: usize, value: u8) -> Result<Self> {
        Self::new(width, height, vec![value; width * height])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.data[y * self.width + x]
    }

    /// Rotates the image by 180 degrees.
    pub fn rotate180(&self) -> Self {
        let mut data = self.data.clone();
        data.reverse();
        Self { data, ..*self }
    }

    pub fn to_png(&self) -> Result<Vec<u8>> {
        RasterImage::new(self.width, self.height, 1, self.data.clone())?.to_png()
    }
}

/// Decodes a PNG or JPEG byte stream into a 3-channel 8-bit image.
///
/// Grayscale inputs are replicated across R, G and B; alpha is discarded.
/// 16-bit and floating point sources are rejected rather than rescaled.
pub fn decode_image(bytes: &[u8]) -> Result<RasterImage> {
    let format = image::guess_format(bytes).map_err(|e| Error::Decode(e.to_string()))?;
    if !matches!(format, ImageFormat::Png | ImageFormat::Jpeg) {
        return Err(Error::UnsupportedFormat(format!("{format:?}")));
    }
    let decoded = image::load_from_memory_with_format(bytes, format).map_err(|e| Error::Decode(e.to_string()))?;
    let (width, height) = (decoded.width() as usize, decoded.height() as usize);
    match decoded {
        DynamicImage::ImageLuma8(buf) => Ok(RasterImage::new(width, height, 1, buf.into_raw())?.into_rgb()),
        DynamicImage::ImageLumaA8(_) => {
            let buf = decoded.to_luma8();
            Ok(RasterImage::new(width, height, 1, buf.into_raw())?.into_rgb())
        }
        DynamicImage::ImageRgb8(buf) => RasterImage::new(width, height, 3, buf.into_raw()),
        DynamicImage::ImageRgba8(_) => RasterImage::new(width, height, 3, decoded.to_rgb8().into_raw()),
        other => Err(Error::UnsupportedFormat(format!("{:?} samples (only 8-bit is accepted)", other.color()))),
    }
}

/// Splits a 3-channel image into its R, G and B planes.
pub fn split_channels(img: &RasterImage) -> Result<(GrayImage, GrayImage, GrayImage)> {
    if img.channels != 3 {
        return Err(Error::ChannelCount {
            expected: 3,
            actual: img.channels,
        });
    }
    let n = img.width * img.height;
    let mut planes = [Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n)];
    for px in img.data.chunks_exact(3) {
        planes[0].push(px[0]);
        planes[1].push(px[1]);
        planes[2].push(px[2]);
    }
    let [r, g, b] = planes;
    Ok((
        GrayImage::new(img.width, img.height, r)?,
        GrayImage::new(img.width, img.height, g)?,
        GrayImage::new(img.width, img.height, b)?,
    ))
}

/// Interleaves three planes back into an RGB image.
pub fn merge_channels(r: &GrayImage, g: &GrayImage, b: &GrayImage) -> Result<RasterImage> {
    ensure_same_dims(r, g, b)?;
    let data = r
        .data
        .iter()
        .zip(&g.data)
        .zip(&b.data)
        .flat_map(|((&r, &g), &b)| [r, g, b])
        .collect();
    RasterImage::new(r.width, r.height, 3, data)
}

/// BT.601 luma, rounded to nearest and clamped to 8 bits.
pub fn to_grayscale(r: &GrayImage, g: &GrayImage, b: &GrayImage) -> Result<GrayImage> {
    ensure_same_dims(r, g, b)?;
    let data = r
        .data
        .iter()
        .zip(&g.data)
        .zip(&b.data)
        .map(|((&r, &g), &b)| luma(r, g, b))
        .collect();
    GrayImage::new(r.width, r.height, data)
}

#[inline]
fn luma(r: u8, g: u8, b: u8) -> u8 {
    let y = 0.299 * f64::from(r) + 0.587 * f64::from(g) + 0.114 * f64::from(b);
    y.round().clamp(0.0, 255.0) as u8
}

/// Maps 256 intensities onto `levels` bins: `floor(v * levels / 256)`.
pub fn quantize(img: &GrayImage, levels: usize) -> Result<GrayImage> {
    if !(2..=256).contains(&levels) {
        return Err(Error::InvalidLevelCount(levels));
    }
    let data = img.data.iter().map(|&v| quantize_value(v, levels)).collect();
    GrayImage::new(img.width, img.height, data)
}

#[inline]
pub(crate) fn quantize_value(v: u8, levels: usize) -> u8 {
    ((usize::from(v) * levels) / 256) as u8
}

fn ensure_same_dims(r: &GrayImage, g: &GrayImage, b: &GrayImage) -> Result<()> {
    let dims = (r.width, r.height);
    if (g.width, g.height) != dims || (b.width, b.height) != dims {
        return Err(Error::DimensionMismatch(format!(
            "channel sizes {}x{}, {}x{}, {}x{}",
            r.width, r.height, g.width, g.height, b.width, b.height
        )));
    }
    Ok(())
}
