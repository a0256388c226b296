//! 14-bit fixed point.
//!
//! Coefficients in `[-1, 1]` are scaled by 8191 and truncated toward zero, so
//! `-x` always quantizes to the negation of `x` and the symmetry of a float
//! bank survives quantization exactly.

use std::fmt;

use crate::error::{invalid, Error, Result};
use crate::wavelets::{FloatCoefficientBank, WaveletSpec, Q14_SCALE};

/// Signed 14-bit code in `[-8192, 8191]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Q14(i16);

impl Q14 {
    pub const BITS: u32 = 14;
    pub const MIN: Q14 = Q14(-8192);
    pub const MAX: Q14 = Q14(8191);
    pub const ZERO: Q14 = Q14(0);

    pub fn new(value: i32) -> Result<Self> {
        if (Self::MIN.0 as i32..=Self::MAX.0 as i32).contains(&value) {
            Ok(Q14(value as i16))
        } else {
            Err(invalid(format!("{value} does not fit in 14 signed bits")))
        }
    }

    /// Clamp into range.
    pub fn saturating(value: i64) -> Self {
        Q14(value.clamp(Self::MIN.0 as i64, Self::MAX.0 as i64) as i16)
    }

    pub fn value(self) -> i16 {
        self.0
    }

    /// The 14-bit two's-complement pattern, e.g. `-8192 -> 0x2000`.
    pub fn to_bits(self) -> u16 {
        (self.0 as u16) & 0x3FFF
    }

    /// Sign-extend a 14-bit pattern. Bits above 13 are ignored.
    pub fn from_bits(bits: u16) -> Self {
        let raw = (bits & 0x3FFF) as i16;
        Q14((raw << 2) >> 2)
    }
}

impl fmt::Display for Q14 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<Q14> for i64 {
    fn from(q: Q14) -> i64 {
        q.0 as i64
    }
}

/// `trunc(x * 8191)`.
pub fn quantize_value(x: f64) -> Result<Q14> {
    if !(x.abs() <= 1.0) {
        return Err(Error::OutOfRange(x));
    }
    Ok(Q14((x * Q14_SCALE).trunc() as i16))
}

/// Quantized wavelet taps.
#[derive(Debug, Clone, PartialEq)]
pub struct Q14CoefficientBank {
    real: Vec<Q14>,
    imag: Vec<Q14>,
    source: Option<WaveletSpec>,
}

impl Q14CoefficientBank {
    /// Build from raw codes; every value must lie in `[-8191, 8191]`.
    pub fn from_codes(real: Vec<i32>, imag: Vec<i32>, source: Option<WaveletSpec>) -> Result<Self> {
        if real.len() != imag.len() {
            return Err(invalid(format!(
                "real/imag lengths differ: {} vs {}",
                real.len(),
                imag.len()
            )));
        }
        if let Some(spec) = &source {
            if spec.tap_count != real.len() {
                return Err(invalid(format!(
                    "bank has {} taps, source spec says {}",
                    real.len(),
                    spec.tap_count
                )));
            }
        }
        let convert = |v: i32| {
            if v.abs() <= Q14::MAX.0 as i32 {
                Ok(Q14(v as i16))
            } else {
                Err(invalid(format!("coefficient {v} outside [-8191, 8191]")))
            }
        };
        Ok(Self {
            real: real.into_iter().map(convert).collect::<Result<_>>()?,
            imag: imag.into_iter().map(convert).collect::<Result<_>>()?,
            source,
        })
    }

    pub fn real(&self) -> &[Q14] {
        &self.real
    }

    pub fn imag(&self) -> &[Q14] {
        &self.imag
    }

    pub fn source(&self) -> Option<&WaveletSpec> {
        self.source.as_ref()
    }

    pub fn tap_count(&self) -> usize {
        self.real.len()
    }

    /// Total number of stored coefficients (real plus imaginary).
    pub fn coefficient_count(&self) -> usize {
        self.real.len() + self.imag.len()
    }

    /// `(sum |real|, sum |imag|)`.
    pub fn abs_sums(&self) -> (i64, i64) {
        let sum = |v: &[Q14]| v.iter().map(|q| i64::from(*q).abs()).sum();
        (sum(&self.real), sum(&self.imag))
    }

    /// Same taps in reverse order.
    pub fn reversed(&self) -> Self {
        let mut out = self.clone();
        out.real.reverse();
        out.imag.reverse();
        out
    }
}

pub fn quantize_bank(bank: &FloatCoefficientBank) -> Result<Q14CoefficientBank> {
    if bank.real.len() != bank.imag.len() {
        return Err(invalid("real/imag lengths differ"));
    }
    Ok(Q14CoefficientBank {
        real: bank.real.iter().map(|&x| quantize_value(x)).collect::<Result<_>>()?,
        imag: bank.imag.iter().map(|&x| quantize_value(x)).collect::<Result<_>>()?,
        source: bank.spec,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wavelets::morlet;

    #[test]
    fn value_examples() {
        assert_eq!(quantize_value(1.0).unwrap().value(), 8191);
        assert_eq!(quantize_value(0.0).unwrap().value(), 0);
        assert_eq!(quantize_value(-0.999).unwrap().value(), -8182);
        assert_eq!(quantize_value(-1.0).unwrap().value(), -8191);
    }

    #[test]
    fn value_out_of_range() {
        assert!(matches!(quantize_value(1.0001), Err(Error::OutOfRange(_))));
        assert!(matches!(quantize_value(-2.0), Err(Error::OutOfRange(_))));
        assert!(quantize_value(f64::NAN).is_err());
    }

    #[test]
    fn bit_patterns() {
        assert_eq!(Q14::MIN.to_bits(), 0x2000);
        assert_eq!(Q14::MAX.to_bits(), 0x1FFF);
        assert_eq!(Q14::new(-1).unwrap().to_bits(), 0x3FFF);
        assert_eq!(Q14::from_bits(0x2000), Q14::MIN);
        assert_eq!(Q14::from_bits(0x3FFF).value(), -1);
        assert!(Q14::new(8192).is_err());
        assert!(Q14::new(-8193).is_err());
        assert_eq!(Q14::saturating(1 << 20), Q14::MAX);
    }

    #[test]
    fn bank_preserves_symmetry() {
        let bank = quantize_bank(&morlet(&WaveletSpec::paper_default()).unwrap()).unwrap();
        let n = bank.tap_count();
        assert_eq!(bank.real()[n / 2].value(), 8191);
        for k in 0..n {
            assert_eq!(bank.real()[k], bank.real()[n - 1 - k]);
            assert_eq!(bank.imag()[k].value(), -bank.imag()[n - 1 - k].value());
        }
        let sum_re: i64 = bank.real().iter().map(|&q| i64::from(q)).sum();
        let sum_im: i64 = bank.imag().iter().map(|&q| i64::from(q)).sum();
        assert!(sum_re.abs() <= n as i64);
        assert_eq!(sum_im, 0);
        assert_eq!(bank.coefficient_count(), 266);
    }

    #[test]
    fn from_codes_validation() {
        assert!(Q14CoefficientBank::from_codes(vec![1, 2], vec![0], None).is_err());
        assert!(Q14CoefficientBank::from_codes(vec![-8192], vec![0], None).is_err());
        assert!(Q14CoefficientBank::from_codes(vec![8191], vec![-8191], None).is_ok());
        let spec = WaveletSpec::paper_default();
        assert!(Q14CoefficientBank::from_codes(vec![0; 3], vec![0; 3], Some(spec)).is_err());
    }
}
