//! Red and blue pixel shares on the half-degree hue scale.
//!
//! Hue in degrees ([0, 360)) is quantized into 180 two-degree bins; the red
//! share counts bins 0-14 and 165-179 (both ends of the circle), the blue
//! share counts bins 105-134. Pixels with undefined hue (gray pixels, where
//! max = min) count toward the denominator but neither numerator.

use crate::image_io::{to_hsv, HsvPixel, PixelImage};
use crate::Scalar;

/// Shares of red and blue pixels in an image; each in [0, 1], summing to at
/// most 1 because the bin ranges are disjoint.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ColorShares<T> {
    pub redpct: T,
    pub bluepct: T,
}

const RED_LO_MAX: u16 = 14;
const RED_HI_MIN: u16 = 165;
const BLUE_MIN: u16 = 105;
const BLUE_MAX: u16 = 134;

/// Half-degree hue bin in [0, 179], or `None` when hue is undefined.
pub fn hue_bin<T: Scalar>(px: &HsvPixel<T>) -> Option<u16> {
    let hue = px.hue?;
    // Hue is produced in [0, 360), but guard the wrap in case rounding in
    // the max=R, G<B branch lands exactly on 360.
    let wrapped = if hue >= T::real(360.0) { hue - T::real(360.0) } else { hue };
    let bin = num_traits::cast::<T, f64>((wrapped / T::real(2.0)).floor())
        .expect("finite hue") as i64;
    Some(bin.clamp(0, 179) as u16)
}

fn is_red(bin: u16) -> bool {
    bin <= RED_LO_MAX || bin >= RED_HI_MIN
}

fn is_blue(bin: u16) -> bool {
    (BLUE_MIN..=BLUE_MAX).contains(&bin)
}

/// Fraction of pixels whose hue bin is red resp. blue.
pub fn red_blue_pct<T: Scalar>(img: &PixelImage<T>) -> ColorShares<T> {
    let mut red = 0usize;
    let mut blue = 0usize;
    for &px in img.pixels() {
        if let Some(bin) = hue_bin(&to_hsv(px)) {
            if is_red(bin) {
                red += 1;
            } else if is_blue(bin) {
                blue += 1;
            }
        }
    }
    let total = T::real(img.pixels().len() as f64);
    ColorShares {
        redpct: T::real(red as f64) / total,
        bluepct: T::real(blue as f64) / total,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hsv_of(h: Option<f64>) -> HsvPixel<f64> {
        HsvPixel { hue: h, saturation: 1.0, value: 1.0 }
    }

    #[test]
    fn bin_is_floor_of_half_degrees() {
        assert_eq!(hue_bin(&hsv_of(Some(0.0))), Some(0));
        assert_eq!(hue_bin(&hsv_of(Some(1.999))), Some(0));
        assert_eq!(hue_bin(&hsv_of(Some(2.0))), Some(1));
        assert_eq!(hue_bin(&hsv_of(Some(359.9))), Some(179));
        assert_eq!(hue_bin(&hsv_of(None)), None);
    }

    #[test]
    fn bin_boundaries_of_the_red_and_blue_ranges() {
        // 29.9 degrees -> bin 14 (red); 30 degrees -> bin 15 (not red).
        assert!(is_red(hue_bin(&hsv_of(Some(29.9))).unwrap()));
        assert!(!is_red(hue_bin(&hsv_of(Some(30.0))).unwrap()));
        // 330 degrees -> bin 165, the low edge of the wrapped red range.
        assert!(is_red(hue_bin(&hsv_of(Some(330.0))).unwrap()));
        assert!(!is_red(hue_bin(&hsv_of(Some(329.9))).unwrap()));
        // Blue covers bins 105..=134, i.e. 210..270 degrees.
        assert!(!is_blue(hue_bin(&hsv_of(Some(209.9))).unwrap()));
        assert!(is_blue(hue_bin(&hsv_of(Some(210.0))).unwrap()));
        assert!(is_blue(hue_bin(&hsv_of(Some(269.9))).unwrap()));
        assert!(!is_blue(hue_bin(&hsv_of(Some(270.0))).unwrap()));
    }

    #[test]
    fn all_red_image() {
        let img = PixelImage::new(2, 2, vec![[1.0, 0.0, 0.0]; 4]);
        let shares = red_blue_pct(&img);
        assert_eq!(shares.redpct, 1.0);
        assert_eq!(shares.bluepct, 0.0);
    }

    #[test]
    fn all_gray_image_counts_in_denominator_only() {
        let img = PixelImage::new(2, 2, vec![[0.4, 0.4, 0.4]; 4]);
        let shares = red_blue_pct(&img);
        assert_eq!(shares.redpct, 0.0);
        assert_eq!(shares.bluepct, 0.0);
    }

    #[test]
    fn half_red_half_blue() {
        let img = PixelImage::new(
            2,
            2,
            vec![[1.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0], [0.0, 0.0, 1.0]],
        );
        let shares = red_blue_pct(&img);
        assert_eq!(shares.redpct, 0.5);
        assert_eq!(shares.bluepct, 0.5);
    }

    #[test]
    fn mixed_image_with_undefined_hues() {
        // One red, one blue, two gray: shares 0.25 each.
        let img = PixelImage::new(
            2,
            2,
            vec![[1.0, 0.0, 0.0], [0.0, 0.0, 1.0], [0.5, 0.5, 0.5], [0.0, 0.0, 0.0]],
        );
        let shares = red_blue_pct(&img);
        assert_eq!(shares.redpct, 0.25);
        assert_eq!(shares.bluepct, 0.25);
    }
}
