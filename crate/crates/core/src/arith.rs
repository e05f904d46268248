//! Exact fixed-point decimals and closed integer intervals.
//!
//! A [`ScaledInt`] stores `value · 10^-scale`. An [`IntInterval`] stores a
//! closed range `[lo, hi] · 10^-scale`. Nothing in here ever rounds silently.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Internal working precision (decimal digits after the point).
pub const WORK_SCALE: u32 = 15;
/// Display precision used in tables.
pub const DISPLAY_DIGITS: u32 = 9;
/// Coordinate precision of piece data.
pub const COORD_SCALE: u32 = 4;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("`{text}` needs more than {scale} fraction digits")]
    TooManyFractionDigits { text: String, scale: u32 },
    #[error("malformed number `{0}`")]
    MalformedNumber(String),
    #[error("negative radicand")]
    NegativeRadicand,
    #[error("output scale {out} is coarser than coordinate scale {coord}")]
    ScaleTooCoarse { out: u32, coord: u32 },
}

pub fn pow10(k: u32) -> BigInt {
    num_traits::pow(BigInt::from(10u32), k as usize)
}

/// Exact decimal `value · 10^-scale`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ScaledInt {
    pub value: BigInt,
    pub scale: u32,
}

impl ScaledInt {
    pub fn new(value: impl Into<BigInt>, scale: u32) -> Self {
        ScaledInt {
            value: value.into(),
            scale,
        }
    }

    pub fn zero(scale: u32) -> Self {
        ScaledInt::new(0, scale)
    }

    /// Same number expressed at a finer scale. Panics if `scale` is coarser.
    pub fn rescale(&self, scale: u32) -> ScaledInt {
        assert!(scale >= self.scale, "rescale would lose digits");
        ScaledInt {
            value: &self.value * pow10(scale - self.scale),
            scale,
        }
    }

    /// Rescale to a coarser scale if that is exact.
    pub fn try_coarsen(&self, scale: u32) -> Option<ScaledInt> {
        if scale >= self.scale {
            return Some(self.rescale(scale));
        }
        let (q, r) = self.value.div_rem(&pow10(self.scale - scale));
        r.is_zero().then_some(ScaledInt { value: q, scale })
    }

    pub fn to_i64(&self) -> Option<i64> {
        i64::try_from(&self.value).ok()
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    pub fn neg(&self) -> ScaledInt {
        ScaledInt {
            value: -&self.value,
            scale: self.scale,
        }
    }

    pub fn add(&self, other: &ScaledInt) -> ScaledInt {
        let s = self.scale.max(other.scale);
        ScaledInt {
            value: self.rescale(s).value + other.rescale(s).value,
            scale: s,
        }
    }

    pub fn sub(&self, other: &ScaledInt) -> ScaledInt {
        self.add(&other.neg())
    }

    /// Multiply by a small integer.
    pub fn mul_int(&self, k: i64) -> ScaledInt {
        ScaledInt {
            value: &self.value * k,
            scale: self.scale,
        }
    }

    pub fn as_interval(&self) -> IntInterval {
        IntInterval::point(self.value.clone(), self.scale)
    }

    /// Canonical text: no trailing fraction zeros, no trailing point.
    pub fn to_canonical(&self) -> String {
        let full = format_fixed(&self.value, self.scale);
        if !full.contains('.') {
            return full;
        }
        let t = full.trim_end_matches('0').trim_end_matches('.');
        if t == "-0" {
            "0".to_string()
        } else {
            t.to_string()
        }
    }
}

impl PartialOrd for ScaledInt {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ScaledInt {
    fn cmp(&self, other: &Self) -> Ordering {
        let s = self.scale.max(other.scale);
        self.rescale(s).value.cmp(&other.rescale(s).value)
    }
}

impl fmt::Display for ScaledInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_fixed(&self.value, self.scale))
    }
}

/// `value · 10^-scale` with exactly `scale` fraction digits.
pub fn format_fixed(value: &BigInt, scale: u32) -> String {
    let neg = value.is_negative();
    let digits = value.abs().to_string();
    let s = scale as usize;
    let body = if s == 0 {
        digits
    } else if digits.len() > s {
        let (a, b) = digits.split_at(digits.len() - s);
        format!("{a}.{b}")
    } else {
        format!("0.{}{}", "0".repeat(s - digits.len()), digits)
    };
    if neg {
        format!("-{body}")
    } else {
        body
    }
}

/// Parse a finite decimal such as `-2.7` into an exact integer at `scale`.
pub fn parse_fixed_decimal(text: &str, scale: u32) -> Result<ScaledInt, ArithError> {
    let bad = || ArithError::MalformedNumber(text.to_string());
    let t = text.trim();
    let (neg, body) = match t.as_bytes().first() {
        Some(b'-') => (true, &t[1..]),
        Some(b'+') => (false, &t[1..]),
        _ => (false, t),
    };
    let (int_part, frac_part) = match body.split_once('.') {
        Some((a, b)) => (a, b),
        None => (body, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.bytes().all(|c| c.is_ascii_digit())
        || !frac_part.bytes().all(|c| c.is_ascii_digit())
    {
        return Err(bad());
    }
    if body.ends_with('.') && frac_part.is_empty() && int_part.is_empty() {
        return Err(bad());
    }
    let significant = frac_part.trim_end_matches('0');
    if significant.len() > scale as usize {
        return Err(ArithError::TooManyFractionDigits {
            text: text.to_string(),
            scale,
        });
    }
    let mut digits = String::with_capacity(int_part.len() + scale as usize);
    digits.push_str(int_part);
    digits.push_str(significant);
    digits.push_str(&"0".repeat(scale as usize - significant.len()));
    let mut value: BigInt = if digits.is_empty() {
        BigInt::zero()
    } else {
        digits.parse().map_err(|_| bad())?
    };
    if neg {
        value = -value;
    }
    Ok(ScaledInt { value, scale })
}

/// Closed enclosure `[lo, hi] · 10^-scale`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntInterval {
    pub lo: BigInt,
    pub hi: BigInt,
    pub scale: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntervalOrdering {
    Less,
    Greater,
    Overlapping,
}

impl IntInterval {
    pub fn new(lo: BigInt, hi: BigInt, scale: u32) -> Self {
        assert!(lo <= hi, "interval with lo > hi");
        IntInterval { lo, hi, scale }
    }

    pub fn point(v: BigInt, scale: u32) -> Self {
        IntInterval {
            lo: v.clone(),
            hi: v,
            scale,
        }
    }

    pub fn zero(scale: u32) -> Self {
        IntInterval::point(BigInt::zero(), scale)
    }

    pub fn from_decimal(text: &str, scale: u32) -> Result<Self, ArithError> {
        Ok(parse_fixed_decimal(text, scale)?.as_interval())
    }

    pub fn rescale(&self, scale: u32) -> IntInterval {
        assert!(scale >= self.scale, "rescale would lose digits");
        let m = pow10(scale - self.scale);
        IntInterval {
            lo: &self.lo * &m,
            hi: &self.hi * &m,
            scale,
        }
    }

    fn aligned(&self, other: &IntInterval) -> (IntInterval, IntInterval) {
        let s = self.scale.max(other.scale);
        (self.rescale(s), other.rescale(s))
    }

    pub fn add(&self, other: &IntInterval) -> IntInterval {
        if self.scale == other.scale {
            return IntInterval {
                lo: &self.lo + &other.lo,
                hi: &self.hi + &other.hi,
                scale: self.scale,
            };
        }
        let (a, b) = self.aligned(other);
        a.add(&b)
    }

    pub fn sub(&self, other: &IntInterval) -> IntInterval {
        if self.scale == other.scale {
            return IntInterval {
                lo: &self.lo - &other.hi,
                hi: &self.hi - &other.lo,
                scale: self.scale,
            };
        }
        let (a, b) = self.aligned(other);
        a.sub(&b)
    }

    pub fn add_scaled(&self, v: &ScaledInt) -> IntInterval {
        self.add(&v.as_interval())
    }

    pub fn sub_scaled(&self, v: &ScaledInt) -> IntInterval {
        self.sub(&v.as_interval())
    }

    pub fn mul_int(&self, k: u64) -> IntInterval {
        IntInterval {
            lo: &self.lo * k,
            hi: &self.hi * k,
            scale: self.scale,
        }
    }

    pub fn width(&self) -> BigInt {
        &self.hi - &self.lo
    }

    pub fn contains(&self, other: &IntInterval) -> bool {
        let (a, b) = self.aligned(other);
        a.lo <= b.lo && b.hi <= a.hi
    }

    pub fn overlaps(&self, other: &IntInterval) -> bool {
        interval_compare(self, other) == IntervalOrdering::Overlapping
    }

    /// Hull of two enclosures.
    pub fn join(&self, other: &IntInterval) -> IntInterval {
        let (a, b) = self.aligned(other);
        IntInterval {
            lo: a.lo.min(b.lo),
            hi: a.hi.max(b.hi),
            scale: a.scale,
        }
    }

    pub fn lo_scaled(&self) -> ScaledInt {
        ScaledInt::new(self.lo.clone(), self.scale)
    }

    pub fn hi_scaled(&self) -> ScaledInt {
        ScaledInt::new(self.hi.clone(), self.scale)
    }

    /// Outward rounding to `digits`: lower bound down, upper bound up.
    pub fn outward(&self, digits: u32) -> IntInterval {
        if digits >= self.scale {
            return self.rescale(digits);
        }
        let m = pow10(self.scale - digits);
        IntInterval {
            lo: self.lo.div_floor(&m),
            hi: ceil_div(&self.hi, &m),
            scale: digits,
        }
    }

    /// Round to `digits` only if the enclosure pins down a unique value.
    ///
    /// `r` is unique when every point of the enclosure lies strictly within
    /// half a display ulp of `r`.
    pub fn display(&self, digits: u32) -> Rounded {
        if digits >= self.scale {
            let e = self.rescale(digits);
            return if e.lo == e.hi {
                Rounded::Unique(e.lo_scaled())
            } else {
                Rounded::Ambiguous(e)
            };
        }
        let m = pow10(self.scale - digits);
        let two_lo = &self.lo * 2;
        let two_hi = &self.hi * 2;
        // nearest candidate for lo, then check both ends
        let num: BigInt = &two_lo + &m;
        let r = num.div_floor(&(&m * 2u32));
        let lo_edge = &r * 2 * &m - &m;
        let hi_edge = &r * 2 * &m + &m;
        if two_lo > lo_edge && two_hi < hi_edge {
            Rounded::Unique(ScaledInt::new(r, digits))
        } else {
            Rounded::Ambiguous(self.outward(digits))
        }
    }

    pub fn display_string(&self, digits: u32) -> String {
        self.display(digits).to_string()
    }
}

fn ceil_div(a: &BigInt, b: &BigInt) -> BigInt {
    -((-a).div_floor(b))
}

impl fmt::Display for IntInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{},{}]",
            format_fixed(&self.lo, self.scale),
            format_fixed(&self.hi, self.scale)
        )
    }
}

/// Outcome of rounding an enclosure for display.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Rounded {
    Unique(ScaledInt),
    Ambiguous(IntInterval),
}

impl Rounded {
    pub fn is_unique(&self) -> bool {
        matches!(self, Rounded::Unique(_))
    }
}

impl fmt::Display for Rounded {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rounded::Unique(v) => write!(f, "{v}"),
            Rounded::Ambiguous(iv) => write!(f, "{iv}"),
        }
    }
}

pub fn interval_compare(a: &IntInterval, b: &IntInterval) -> IntervalOrdering {
    if a.scale != b.scale {
        let (x, y) = a.aligned(b);
        return interval_compare(&x, &y);
    }
    if a.hi < b.lo {
        IntervalOrdering::Less
    } else if a.lo > b.hi {
        IntervalOrdering::Greater
    } else {
        IntervalOrdering::Overlapping
    }
}

/// `[s, s]` for a perfect square, else `[s, s+1]` with `s = floor(sqrt(n))`.
pub fn interval_isqrt(n: &BigInt) -> Result<IntInterval, ArithError> {
    if n.sign() == Sign::Minus {
        return Err(ArithError::NegativeRadicand);
    }
    let mut s = n.sqrt();
    // check and refine
    while &s * &s > *n {
        s -= 1;
    }
    while (&s + 1u32) * (&s + 1u32) <= *n {
        s += 1;
    }
    let sq = &s * &s;
    assert!(sq <= *n && (&s + BigInt::one()) * (&s + BigInt::one()) > *n);
    let hi = if sq == *n { s.clone() } else { &s + 1u32 };
    Ok(IntInterval {
        lo: s,
        hi,
        scale: 0,
    })
}

/// Enclosure of `sqrt(d2) · 10^out` where `d2` is a squared length at `coord` scale.
pub fn sqrt_enclosure(d2: &BigInt, coord: u32, out: u32) -> Result<IntInterval, ArithError> {
    if out < coord {
        return Err(ArithError::ScaleTooCoarse { out, coord });
    }
    let n = d2 * pow10(2 * (out - coord));
    let iv = interval_isqrt(&n)?;
    Ok(IntInterval { scale: out, ..iv })
}

/// Integer square length of `(dx, dy)`.
pub fn square_len(dx: &BigInt, dy: &BigInt) -> BigInt {
    dx * dx + dy * dy
}
