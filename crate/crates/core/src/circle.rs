//! Elements of the circle group.
//!
//! Values are kept as exact rational angles in `Q/Z` whenever possible, so
//! that `e^{2 pi i p/q}` multiplies by adding fractions mod 1. A unit-modulus
//! floating value is carried only when an input forces it.

use std::f64::consts::TAU;
use std::fmt;
use std::ops::{Mul, MulAssign};

use num_complex::Complex64;
use num_integer::Integer;

use crate::error::{Error, Result};

/// Modulus tolerance for approximate circle values.
pub const MODULUS_TOL: f64 = 1e-12;

/// Tolerance used when an approximate value is compared with anything.
pub const APPROX_EQ_TOL: f64 = 1e-10;

/// A reduced fraction `num/den` with `0 <= num < den`, read as an element of `Q/Z`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Angle {
    num: i64,
    den: i64,
}

impl Angle {
    pub const ZERO: Angle = Angle { num: 0, den: 1 };

    pub fn new(num: i64, den: i64) -> Result<Self> {
        if den <= 0 {
            return Err(Error::InvalidArgument(format!(
                "angle denominator must be positive, got {den}"
            )));
        }
        Ok(Self::reduce(num as i128, den as i128))
    }

    fn reduce(num: i128, den: i128) -> Self {
        let num = num.rem_euclid(den);
        let g = num.gcd(&den);
        let (num, den) = if g == 0 { (0, 1) } else { (num / g, den / g) };
        Angle {
            num: i64::try_from(num).expect("angle numerator overflow"),
            den: i64::try_from(den).expect("angle denominator overflow"),
        }
    }

    pub fn num(&self) -> i64 {
        self.num
    }

    pub fn den(&self) -> i64 {
        self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    pub fn add(self, other: Angle) -> Angle {
        let den = (self.den as i128).lcm(&(other.den as i128));
        let num = self.num as i128 * (den / self.den as i128)
            + other.num as i128 * (den / other.den as i128);
        Self::reduce(num, den)
    }

    pub fn neg(self) -> Angle {
        Self::reduce(-(self.num as i128), self.den as i128)
    }

    pub fn scale(self, n: i64) -> Angle {
        Self::reduce(self.num as i128 * n as i128, self.den as i128)
    }

    pub fn as_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// Parses `"p/q"` or an integer `"p"`.
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        let bad = || Error::parse("angle", format!("expected \"p/q\", got {text:?}"));
        match text.split_once('/') {
            Some((p, q)) => {
                let p: i64 = p.trim().parse().map_err(|_| bad())?;
                let q: i64 = q.trim().parse().map_err(|_| bad())?;
                Angle::new(p, q).map_err(|_| bad())
            }
            None => {
                let p: i64 = text.parse().map_err(|_| bad())?;
                Angle::new(p, 1)
            }
        }
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// An element of the circle group `T`.
///
/// Equality is structural between exact values; as soon as one side is
/// approximate the comparison is made on complex values within
/// [`APPROX_EQ_TOL`].
#[derive(Clone, Copy, Debug)]
pub enum CircleScalar {
    Exact(Angle),
    Approx(Complex64),
}

impl CircleScalar {
    pub const ONE: CircleScalar = CircleScalar::Exact(Angle::ZERO);

    pub fn exact(num: i64, den: i64) -> Result<Self> {
        Angle::new(num, den).map(CircleScalar::Exact)
    }

    /// Primitive `k`-th root of unity raised to `j`.
    pub fn root_of_unity(j: i64, k: i64) -> Self {
        CircleScalar::Exact(Angle::new(j, k).expect("k must be positive"))
    }

    pub fn minus_one() -> Self {
        Self::root_of_unity(1, 2)
    }

    pub fn approx(z: Complex64) -> Result<Self> {
        if !z.re.is_finite() || !z.im.is_finite() || (z.norm() - 1.0).abs() > MODULUS_TOL {
            return Err(Error::InvalidArgument(format!(
                "{z} is not on the unit circle (tolerance {MODULUS_TOL})"
            )));
        }
        Ok(CircleScalar::Approx(z / z.norm()))
    }

    /// `e^{2 pi i theta}` for a floating angle `theta` in turns.
    pub fn from_turns(theta: f64) -> Self {
        CircleScalar::Approx(Complex64::from_polar(1.0, TAU * theta))
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, CircleScalar::Exact(_))
    }

    pub fn angle(&self) -> Option<Angle> {
        match self {
            CircleScalar::Exact(a) => Some(*a),
            CircleScalar::Approx(_) => None,
        }
    }

    /// The angle in turns, in `[0, 1)`.
    pub fn turns(&self) -> f64 {
        match self {
            CircleScalar::Exact(a) => a.as_f64(),
            CircleScalar::Approx(z) => {
                let t = z.arg() / TAU;
                if t < 0.0 {
                    t + 1.0
                } else {
                    t
                }
            }
        }
    }

    pub fn to_complex(&self) -> Complex64 {
        match self {
            CircleScalar::Exact(a) => {
                // Quarter turns exactly, so that +-1 and +-i carry no rounding.
                match (a.num * 4) % a.den == 0 {
                    true => match (a.num * 4) / a.den {
                        0 => Complex64::new(1.0, 0.0),
                        1 => Complex64::new(0.0, 1.0),
                        2 => Complex64::new(-1.0, 0.0),
                        _ => Complex64::new(0.0, -1.0),
                    },
                    false => Complex64::from_polar(1.0, TAU * a.as_f64()),
                }
            }
            CircleScalar::Approx(z) => *z,
        }
    }

    pub fn conj(&self) -> Self {
        match self {
            CircleScalar::Exact(a) => CircleScalar::Exact(a.neg()),
            CircleScalar::Approx(z) => CircleScalar::Approx(z.conj()),
        }
    }

    pub fn inv(&self) -> Self {
        self.conj()
    }

    pub fn pow(&self, n: i64) -> Self {
        match self {
            CircleScalar::Exact(a) => CircleScalar::Exact(a.scale(n)),
            CircleScalar::Approx(z) => {
                let w = z.powi(i32::try_from(n).expect("power out of range"));
                CircleScalar::Approx(w / w.norm())
            }
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            CircleScalar::Exact(a) => a.is_zero(),
            CircleScalar::Approx(z) => (z - Complex64::new(1.0, 0.0)).norm() <= APPROX_EQ_TOL,
        }
    }

    pub fn distance(&self, other: &CircleScalar) -> f64 {
        match (self, other) {
            (CircleScalar::Exact(a), CircleScalar::Exact(b)) if a == b => 0.0,
            _ => (self.to_complex() - other.to_complex()).norm(),
        }
    }

    /// If this value is a `k`-th root of unity, its exponent `j` in `0..k`.
    pub fn root_index(&self, k: u32) -> Option<u32> {
        let k = k as i64;
        match self {
            CircleScalar::Exact(a) => {
                if k % a.den == 0 {
                    Some((a.num * (k / a.den)) as u32)
                } else {
                    None
                }
            }
            CircleScalar::Approx(z) => (0..k).find_map(|j| {
                let r = CircleScalar::root_of_unity(j, k).to_complex();
                ((r - z).norm() <= APPROX_EQ_TOL).then_some(j as u32)
            }),
        }
    }
}

impl PartialEq for CircleScalar {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (CircleScalar::Exact(a), CircleScalar::Exact(b)) => a == b,
            _ => self.distance(other) <= APPROX_EQ_TOL,
        }
    }
}

impl Mul for CircleScalar {
    type Output = CircleScalar;

    fn mul(self, rhs: CircleScalar) -> CircleScalar {
        match (self, rhs) {
            (CircleScalar::Exact(a), CircleScalar::Exact(b)) => CircleScalar::Exact(a.add(b)),
            _ => {
                let z = self.to_complex() * rhs.to_complex();
                CircleScalar::Approx(z / z.norm())
            }
        }
    }
}

impl MulAssign for CircleScalar {
    fn mul_assign(&mut self, rhs: CircleScalar) {
        *self = *self * rhs;
    }
}

impl fmt::Display for CircleScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CircleScalar::Exact(a) => write!(f, "e(2pi i {a})"),
            CircleScalar::Approx(z) => write!(f, "{z}"),
        }
    }
}
