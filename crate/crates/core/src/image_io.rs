//! Image decoding, bicubic resampling, and color-space conversions.
//!
//! Everything downstream works on channel *proportions* in [0, 1]: byte
//! images are divided by 255 at decode time, which makes the grayscale and
//! HSV formulas directly applicable and costs nothing for the entropy
//! measure (it is invariant under linear scaling).

use crate::Scalar;

/// Decoded raster image, row-major RGB proportions.
#[derive(Clone, Debug, PartialEq)]
pub struct PixelImage<T> {
    width: usize,
    height: usize,
    pixels: Vec<[T; 3]>,
}

impl<T: Scalar> PixelImage<T> {
    /// Builds an image from row-major pixels.
    ///
    /// Panics when the dimensions are zero, the pixel count does not match,
    /// or (debug builds) a channel leaves [0, 1].
    pub fn new(width: usize, height: usize, pixels: Vec<[T; 3]>) -> Self {
        assert!(width >= 1 && height >= 1, "image dimensions must be positive");
        assert_eq!(pixels.len(), width * height, "pixel count must equal width * height");
        debug_assert!(
            pixels.iter().all(|p| p.iter().all(|&c| c >= T::zero() && c <= T::one())),
            "channels must be proportions in [0, 1]"
        );
        PixelImage { width, height, pixels }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[[T; 3]] {
        &self.pixels
    }

    pub fn pixel(&self, x: usize, y: usize) -> [T; 3] {
        self.pixels[y * self.width + x]
    }
}

/// Grayscale matrix with entries in [0, 1]; rows index image height.
#[derive(Clone, Debug, PartialEq)]
pub struct GrayMatrix<T> {
    rows: usize,
    cols: usize,
    values: Vec<T>,
}

impl<T: Scalar> GrayMatrix<T> {
    pub fn new(rows: usize, cols: usize, values: Vec<T>) -> Self {
        assert!(rows >= 1 && cols >= 1, "matrix dimensions must be positive");
        assert_eq!(values.len(), rows * cols, "value count must equal rows * cols");
        debug_assert!(
            values.iter().all(|&v| v >= T::zero() && v <= T::one()),
            "grayscale values must lie in [0, 1]"
        );
        GrayMatrix { rows, cols, values }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut values = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                values.push(f(i, j));
            }
        }
        GrayMatrix::new(rows, cols, values)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.values[i * self.cols + j]
    }

    /// View as a plain matrix for the decomposition routines.
    pub fn to_mat(&self) -> crate::linalg::Mat<T> {
        crate::linalg::Mat::from_vec(self.rows, self.cols, self.values.clone())
    }
}

/// HSV triple; `hue` is `None` exactly when max(R,G,B) = min(R,G,B).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HsvPixel<T> {
    pub hue: Option<T>,
    pub saturation: T,
    pub value: T,
}

#[derive(Debug, thiserror::Error)]
pub enum ImageError {
    #[error("unsupported image format (PNG and JPEG only)")]
    UnsupportedFormat,
    #[error("corrupt image stream: {0}")]
    CorruptStream(String),
}

/// Decodes a PNG or JPEG byte stream into channel proportions (byte / 255).
///
/// Alpha channels are dropped; grayscale sources are expanded to R = G = B.
/// Any other container format is rejected before decoding is attempted.
pub fn decode_image<T: Scalar>(bytes: &[u8]) -> Result<PixelImage<T>, ImageError> {
    let format = image::guess_format(bytes).map_err(|_| ImageError::UnsupportedFormat)?;
    match format {
        image::ImageFormat::Png | image::ImageFormat::Jpeg => {}
        _ => return Err(ImageError::UnsupportedFormat),
    }
    let decoded = image::load_from_memory_with_format(bytes, format)
        .map_err(|e| ImageError::CorruptStream(e.to_string()))?;
    let rgb = decoded.to_rgb8();
    let (width, height) = (rgb.width() as usize, rgb.height() as usize);
    // A true division per byte: multiplying by a rounded reciprocal of 255
    // misses the correctly rounded proportion by an ulp for some bytes.
    let pixels = rgb
        .pixels()
        .map(|p| {
            [
                T::real(p.0[0] as f64 / 255.0),
                T::real(p.0[1] as f64 / 255.0),
                T::real(p.0[2] as f64 / 255.0),
            ]
        })
        .collect();
    Ok(PixelImage::new(width, height, pixels))
}

/// Keys cubic convolution kernel with a = -0.5.
fn keys_kernel<T: Scalar>(x: T) -> T {
    let a = T::real(-0.5);
    let x = x.abs();
    if x <= T::one() {
        ((a + T::real(2.0)) * x - (a + T::real(3.0))) * x * x + T::one()
    } else if x < T::real(2.0) {
        (((x - T::real(5.0)) * x + T::real(8.0)) * x - T::real(4.0)) * a
    } else {
        T::zero()
    }
}

/// Per-axis resampling plan: for each output position, the four source taps
/// (already clamped to the edge) and their kernel weights.
struct Taps<T> {
    index: Vec<[usize; 4]>,
    weight: Vec<[T; 4]>,
}

fn plan_taps<T: Scalar>(src_len: usize, dst_len: usize) -> Taps<T> {
    let scale = T::real(src_len as f64 / dst_len as f64);
    let half = T::real(0.5);
    let mut index = Vec::with_capacity(dst_len);
    let mut weight = Vec::with_capacity(dst_len);
    for d in 0..dst_len {
        // Pixel-center alignment: source coordinate of output center d.
        let center = (T::real(d as f64) + half) * scale - half;
        let base = center.floor();
        let base_i = num_traits::cast::<T, f64>(base).expect("finite coordinate") as isize;
        let mut idx = [0usize; 4];
        let mut wgt = [T::zero(); 4];
        for (k, off) in (-1isize..=2).enumerate() {
            let i = (base_i + off).clamp(0, src_len as isize - 1) as usize;
            idx[k] = i;
            wgt[k] = keys_kernel(center - (base + T::real(off as f64)));
        }
        index.push(idx);
        weight.push(wgt);
    }
    Taps { index, weight }
}

/// Resamples to `target_w` x `target_h` with Keys a = -0.5 cubic
/// convolution, clamp-to-edge sampling, and pixel-center alignment.
///
/// The aspect ratio is deliberately not preserved (the analysis grid is a
/// uniform square); outputs are clamped to [0, 1] after interpolation since
/// cubic kernels overshoot.
pub fn resize_bicubic<T: Scalar>(
    img: &PixelImage<T>,
    target_w: usize,
    target_h: usize,
) -> PixelImage<T> {
    assert!(target_w >= 1 && target_h >= 1, "target dimensions must be positive");

    let (sw, sh) = (img.width, img.height);
    let hor = plan_taps::<T>(sw, target_w);
    let ver = plan_taps::<T>(sh, target_h);

    // Horizontal pass over source rows, then vertical pass over columns;
    // identical to the direct double sum because the kernel is separable.
    let mut mid = vec![[T::zero(); 3]; target_w * sh];
    for y in 0..sh {
        let row = &img.pixels[y * sw..(y + 1) * sw];
        for x in 0..target_w {
            let idx = hor.index[x];
            let wgt = hor.weight[x];
            let mut acc = [T::zero(); 3];
            for k in 0..4 {
                let p = row[idx[k]];
                for c in 0..3 {
                    acc[c] = acc[c] + wgt[k] * p[c];
                }
            }
            mid[y * target_w + x] = acc;
        }
    }

    let mut out = vec![[T::zero(); 3]; target_w * target_h];
    for y in 0..target_h {
        let idx = ver.index[y];
        let wgt = ver.weight[y];
        for x in 0..target_w {
            let mut acc = [T::zero(); 3];
            for k in 0..4 {
                let p = mid[idx[k] * target_w + x];
                for c in 0..3 {
                    acc[c] = acc[c] + wgt[k] * p[c];
                }
            }
            for c in &mut acc {
                *c = c.max(T::zero()).min(T::one());
            }
            out[y * target_w + x] = acc;
        }
    }

    PixelImage::new(target_w, target_h, out)
}

/// Grayscale projection 0.3 R + 0.59 G + 0.11 B.
///
/// Evaluated as B + 0.3 (R - B) + 0.59 (G - B), which is the same real
/// number but passes equal channels through bitwise exactly; the result is
/// clamped to [0, 1] to absorb the last-ulp rounding at the boundaries.
pub fn to_gray<T: Scalar>(img: &PixelImage<T>) -> GrayMatrix<T> {
    let w30 = T::real(0.3);
    let w59 = T::real(0.59);
    let values = img
        .pixels
        .iter()
        .map(|&[r, g, b]| {
            let v = b + w30 * (r - b) + w59 * (g - b);
            v.max(T::zero()).min(T::one())
        })
        .collect();
    GrayMatrix::new(img.height, img.width, values)
}

/// RGB proportions to HSV.
///
/// Hue is undefined exactly when the channels are equal; otherwise it falls
/// in [0, 360) by the four-branch formula, saturation is (max-min)/max for
/// nonzero max, and value is max(R, G, B).
pub fn to_hsv<T: Scalar>(rgb: [T; 3]) -> HsvPixel<T> {
    let [r, g, b] = rgb;
    let max = r.max(g).max(b);
    let min = r.min(g).min(b);
    let value = max;
    let saturation = if max == T::zero() { T::zero() } else { (max - min) / max };

    let hue = if max == min {
        None
    } else {
        let span = max - min;
        let sixty = T::real(60.0);
        let h = if max == r && g >= b {
            sixty * (g - b) / span
        } else if max == r {
            sixty * (g - b) / span + T::real(360.0)
        } else if max == g {
            sixty * (b - r) / span + T::real(120.0)
        } else {
            sixty * (r - g) / span + T::real(240.0)
        };
        Some(h)
    };

    HsvPixel { hue, saturation, value }
}
