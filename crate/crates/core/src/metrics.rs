//! Scrambling-degree and fidelity metrics.
//!
//! `gray_difference_mean` is the interior average of the per-pixel mean
//! squared difference to the four von Neumann neighbors; `gdd` compares it
//! between an original and a scrambled image.

use crate::error::{Error, Result};
use crate::permute::Carrier;
use crate::watermark::BitMatrix;

/// Mean over interior pixels of `(1/4) * sum((p - neighbor)^2)`.
pub fn gray_difference_mean(image: &Carrier) -> Result<f64> {
    let (m, n) = image.require_shape()?;
    if m < 3 || n < 3 {
        return Err(Error::Dimension(format!(
            "gray difference needs at least 3x3, got {m}x{n}"
        )));
    }
    let px = image.samples();
    let sq = |a: u8, b: u8| {
        let d = i32::from(a) - i32::from(b);
        (d * d) as u64
    };
    let mut total = 0u64;
    for i in 1..m - 1 {
        let row = i * n;
        for j in 1..n - 1 {
            let c = px[row + j];
            total += sq(c, px[row - n + j])
                + sq(c, px[row + n + j])
                + sq(c, px[row + j - 1])
                + sq(c, px[row + j + 1]);
        }
    }
    // integer sum is exact; one division by 4 and one by the interior count
    Ok(total as f64 / 4.0 / ((m - 2) * (n - 2)) as f64)
}

/// Normalized and raw change in gray-difference mean from `original` to `test`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gdd {
    /// `(E' - E) / (E' + E)`, or 0 when both are 0.
    pub normalized: f64,
    /// `E' - E`.
    pub raw: f64,
    pub e_original: f64,
    pub e_test: f64,
}

pub fn gdd(original: &Carrier, test: &Carrier) -> Result<Gdd> {
    if original.shape() != test.shape() {
        return Err(Error::Dimension(format!(
            "gdd of {:?} against {:?}",
            original.shape(),
            test.shape()
        )));
    }
    let e = gray_difference_mean(original)?;
    let e_test = gray_difference_mean(test)?;
    let sum = e + e_test;
    let normalized = if sum == 0.0 { 0.0 } else { (e_test - e) / sum };
    Ok(Gdd { normalized, raw: e_test - e, e_original: e, e_test })
}

fn check_same_bits(a: &BitMatrix, b: &BitMatrix) -> Result<()> {
    if (a.height(), a.width()) != (b.height(), b.width()) {
        return Err(Error::Dimension(format!(
            "{}x{} watermark against {}x{}",
            a.height(),
            a.width(),
            b.height(),
            b.width()
        )));
    }
    Ok(())
}

/// Fraction of differing bits.
pub fn ber(a: &BitMatrix, b: &BitMatrix) -> Result<f64> {
    check_same_bits(a, b)?;
    if a.is_empty() {
        return Err(Error::Dimension("bit error rate of an empty watermark".into()));
    }
    let diff = a.bits().iter().zip(b.bits()).filter(|(x, y)| x != y).count();
    Ok(diff as f64 / a.len() as f64)
}

/// Fraction of the reference's set bits that are also set in `b`.
pub fn nc(reference: &BitMatrix, b: &BitMatrix) -> Result<f64> {
    check_same_bits(reference, b)?;
    let ones = reference.count_ones();
    if ones == 0 {
        return Err(Error::UndefinedReference);
    }
    let kept = reference.bits().iter().zip(b.bits()).filter(|(&x, &y)| x && y).count();
    Ok(kept as f64 / ones as f64)
}

/// Peak signal-to-noise ratio for 8-bit samples; `+inf` for identical inputs.
pub fn psnr(a: &Carrier, b: &Carrier) -> Result<f64> {
    if a.len() != b.len() || a.shape() != b.shape() {
        return Err(Error::Dimension(format!(
            "psnr of {} samples {:?} against {} samples {:?}",
            a.len(),
            a.shape(),
            b.len(),
            b.shape()
        )));
    }
    if a.is_empty() {
        return Err(Error::Dimension("psnr of empty carriers".into()));
    }
    let sse: u64 = a
        .samples()
        .iter()
        .zip(b.samples())
        .map(|(&x, &y)| {
            let d = i64::from(x) - i64::from(y);
            (d * d) as u64
        })
        .sum();
    if sse == 0 {
        return Ok(f64::INFINITY);
    }
    let mse = sse as f64 / a.len() as f64;
    Ok(10.0 * (255.0f64 * 255.0 / mse).log10())
}

pub fn histogram(image: &Carrier) -> [u64; 256] {
    let mut counts = [0u64; 256];
    for &v in image.samples() {
        counts[usize::from(v)] += 1;
    }
    counts
}

/// Metric bundle for one experiment cell.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub e_gd_original: f64,
    pub e_gd_test: f64,
    pub gdd_normalized: f64,
    pub gdd_raw: f64,
    pub psnr_db: f64,
    pub ber: f64,
    pub nc: f64,
    pub histogram_equal: bool,
}

impl EvalReport {
    /// `scrambled` feeds the scrambling metrics, `attacked` the fidelity
    /// metrics against `cover`, and the two watermarks give BER and NC.
    pub fn compute(
        cover: &Carrier,
        scrambled: &Carrier,
        attacked: &Carrier,
        watermark: &BitMatrix,
        extracted: &BitMatrix,
    ) -> Result<Self> {
        let g = gdd(cover, scrambled)?;
        Ok(Self {
            e_gd_original: g.e_original,
            e_gd_test: g.e_test,
            gdd_normalized: g.normalized,
            gdd_raw: g.raw,
            psnr_db: psnr(cover, attacked)?,
            ber: ber(watermark, extracted)?,
            nc: nc(watermark, extracted)?,
            histogram_equal: histogram(cover) == histogram(scrambled),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prng::Prng64;
    use proptest::prelude::*;

    fn checkerboard(h: usize, w: usize) -> Carrier {
        Carrier::with_shape(
            (0..h * w).map(|k| if (k / w + k % w).is_multiple_of(2) { 0 } else { 255 }).collect(),
            h,
            w,
        )
        .unwrap()
    }

    fn bm(v: &[u8]) -> BitMatrix {
        BitMatrix::new(1, v.len(), v.iter().map(|&b| b == 1).collect()).unwrap()
    }

    #[test]
    fn gray_difference_examples() {
        assert_eq!(gray_difference_mean(&Carrier::filled(7, 5, 93)).unwrap(), 0.0);
        assert_eq!(gray_difference_mean(&checkerboard(6, 9)).unwrap(), 65025.0);
        let mut px = vec![0u8; 9];
        px[4] = 255;
        let spot = Carrier::with_shape(px, 3, 3).unwrap();
        assert_eq!(gray_difference_mean(&spot).unwrap(), 65025.0);
        assert!(gray_difference_mean(&Carrier::filled(2, 9, 0)).is_err());
        assert!(gray_difference_mean(&Carrier::from_samples(vec![0; 9])).is_err());
    }

    #[test]
    fn gdd_examples() {
        let x = checkerboard(5, 5);
        let g = gdd(&x, &x).unwrap();
        assert_eq!((g.normalized, g.raw), (0.0, 0.0));
        let flat = Carrier::filled(5, 5, 40);
        let g = gdd(&flat, &x).unwrap();
        assert_eq!((g.normalized, g.raw), (1.0, 65025.0));
        assert_eq!(gdd(&x, &flat).unwrap().normalized, -1.0);
        assert_eq!(gdd(&flat, &flat).unwrap().normalized, 0.0);
        assert!(gdd(&flat, &Carrier::filled(5, 6, 0)).is_err());
    }

    #[test]
    fn ber_examples() {
        assert_eq!(ber(&bm(&[1, 0, 1]), &bm(&[1, 0, 1])).unwrap(), 0.0);
        assert_eq!(ber(&bm(&[1, 0, 1]), &bm(&[0, 1, 0])).unwrap(), 1.0);
        assert_eq!(ber(&bm(&[1, 0, 1, 1]), &bm(&[1, 1, 1, 0])).unwrap(), 0.5);
        assert!(ber(&bm(&[1]), &bm(&[1, 0])).is_err());
        assert!(ber(&BitMatrix::zeros(0, 0), &BitMatrix::zeros(0, 0)).is_err());
    }

    #[test]
    fn nc_examples() {
        assert_eq!(nc(&bm(&[1, 0, 1]), &bm(&[1, 0, 1])).unwrap(), 1.0);
        assert_eq!(nc(&bm(&[1, 0, 1]), &bm(&[0, 0, 0])).unwrap(), 0.0);
        assert_eq!(nc(&bm(&[1, 1, 0, 0]), &bm(&[1, 0, 1, 0])).unwrap(), 0.5);
        assert_eq!(nc(&bm(&[0, 0]), &bm(&[1, 1])), Err(Error::UndefinedReference));
    }

    #[test]
    fn psnr_examples() {
        let a = Carrier::filled(4, 4, 0);
        assert_eq!(psnr(&a, &a).unwrap(), f64::INFINITY);
        assert_eq!(psnr(&a, &Carrier::filled(4, 4, 255)).unwrap(), 0.0);
        let one = psnr(&Carrier::from_samples(vec![0]), &Carrier::from_samples(vec![1])).unwrap();
        assert!((one - 48.130803608679).abs() < 1e-9, "{one}");
        assert!(psnr(&a, &Carrier::filled(2, 8, 0)).is_err());
    }

    #[test]
    fn histogram_examples() {
        let h = histogram(&Carrier::from_samples(vec![0, 0, 255]));
        assert_eq!((h[0], h[255]), (2, 1));
        assert_eq!(h.iter().sum::<u64>(), 3);
        assert!(histogram(&Carrier::from_samples(vec![])).iter().all(|&c| c == 0));
    }

    fn naive_gd_mean(px: &[u8], m: usize, n: usize) -> f64 {
        let p = |i: usize, j: usize| f64::from(px[i * n + j]);
        let mut sum = 0.0;
        for i in 1..m - 1 {
            for j in 1..n - 1 {
                let mut gd = 0.0;
                for (a, b) in [(i - 1, j), (i + 1, j), (i, j - 1), (i, j + 1)] {
                    gd += (p(i, j) - p(a, b)).powi(2);
                }
                sum += gd / 4.0;
            }
        }
        sum / ((m - 2) * (n - 2)) as f64
    }

    #[test]
    fn matches_naive_reference() {
        let mut rng = Prng64::new(31337);
        for _ in 0..200 {
            let px: Vec<u8> = (0..25).map(|_| rng.next_u64() as u8).collect();
            let fast = gray_difference_mean(&Carrier::with_shape(px.clone(), 5, 5).unwrap()).unwrap();
            let slow = naive_gd_mean(&px, 5, 5);
            assert!((fast - slow).abs() <= 1e-12 * slow.abs().max(1.0));
        }
    }

    proptest! {
        #[test]
        fn gdd_antisymmetric(a in proptest::collection::vec(any::<u8>(), 16), b in proptest::collection::vec(any::<u8>(), 16)) {
            let a = Carrier::with_shape(a, 4, 4).unwrap();
            let b = Carrier::with_shape(b, 4, 4).unwrap();
            let ab = gdd(&a, &b).unwrap().normalized;
            let ba = gdd(&b, &a).unwrap().normalized;
            prop_assert!((ab + ba).abs() < 1e-12);
            prop_assert!((-1.0..=1.0).contains(&ab));
        }

        #[test]
        fn reflection_invariant(px in proptest::collection::vec(any::<u8>(), 30)) {
            let a = Carrier::with_shape(px.clone(), 5, 6).unwrap();
            let r = Carrier::with_shape(px.iter().map(|v| 255 - v).collect(), 5, 6).unwrap();
            prop_assert_eq!(gray_difference_mean(&a).unwrap(), gray_difference_mean(&r).unwrap());
        }

        #[test]
        fn ber_symmetric(a in proptest::collection::vec(any::<bool>(), 1..64), seed: u64) {
            let mut rng = Prng64::new(seed);
            let b: Vec<bool> = a.iter().map(|_| rng.next_bit()).collect();
            let a = BitMatrix::new(1, a.len(), a).unwrap();
            let b = BitMatrix::new(1, b.len(), b).unwrap();
            prop_assert_eq!(ber(&a, &b).unwrap(), ber(&b, &a).unwrap());
            prop_assert_eq!(ber(&a, &a).unwrap(), 0.0);
        }
    }
}
