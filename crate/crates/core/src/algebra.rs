//! The twisted convolution *-algebra `C(G, w^n)` of a finite groupoid with
//! counting measures, its left-regular representations and norms.

use std::collections::HashMap;
use std::ops::{Add, Mul, Sub};
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::circle::CircleScalar;
use crate::cocycle::{OneCochain, TwoCocycle};
use crate::error::{Error, Result};
use crate::groupoid::{ArrowId, FiniteGroupoid, UnitId};
use crate::linalg::{self, CMatrix};

/// Identifies the product an element is meant for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct AlgebraTag {
    pub groupoid: u64,
    pub cocycle: u64,
    pub power: i64,
}

/// A complex function on arrows.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraElement {
    tag: AlgebraTag,
    coeff: Vec<Complex64>,
}

impl AlgebraElement {
    pub fn tag(&self) -> AlgebraTag {
        self.tag
    }

    pub fn coeff(&self, a: ArrowId) -> Complex64 {
        self.coeff[a]
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeff
    }

    pub fn is_zero(&self) -> bool {
        self.coeff.iter().all(|z| *z == Complex64::new(0.0, 0.0))
    }

    /// Arrows with a nonzero coefficient.
    pub fn support(&self) -> impl Iterator<Item = ArrowId> + '_ {
        self.coeff
            .iter()
            .enumerate()
            .filter(|(_, z)| **z != Complex64::new(0.0, 0.0))
            .map(|(a, _)| a)
    }

    pub fn max_abs_diff(&self, other: &AlgebraElement) -> f64 {
        self.coeff
            .iter()
            .zip(&other.coeff)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.coeff.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub(crate) fn with_tag(tag: AlgebraTag, coeff: Vec<Complex64>) -> Self {
        AlgebraElement { tag, coeff }
    }

    pub fn scale(&self, c: Complex64) -> AlgebraElement {
        AlgebraElement {
            tag: self.tag,
            coeff: self.coeff.iter().map(|z| z * c).collect(),
        }
    }

    fn zip_with(&self, rhs: &AlgebraElement, f: impl Fn(Complex64, Complex64) -> Complex64) -> Self {
        assert_eq!(self.tag, rhs.tag, "elements of different algebras");
        AlgebraElement {
            tag: self.tag,
            coeff: self.coeff.iter().zip(&rhs.coeff).map(|(x, y)| f(*x, *y)).collect(),
        }
    }
}

impl Add for &AlgebraElement {
    type Output = AlgebraElement;

    fn add(self, rhs: &AlgebraElement) -> AlgebraElement {
        self.zip_with(rhs, |x, y| x + y)
    }
}

impl Sub for &AlgebraElement {
    type Output = AlgebraElement;

    fn sub(self, rhs: &AlgebraElement) -> AlgebraElement {
        self.zip_with(rhs, |x, y| x - y)
    }
}

impl Mul<Complex64> for &AlgebraElement {
    type Output = AlgebraElement;

    fn mul(self, rhs: Complex64) -> AlgebraElement {
        self.scale(rhs)
    }
}

/// `Pi^u(f)` on the basis `s^-1(u)` (arrows with source `u`, index order).
#[derive(Clone, Debug, PartialEq)]
pub struct RegularRep {
    pub unit: UnitId,
    pub basis: Vec<ArrowId>,
    pub matrix: CMatrix,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NormReport {
    pub reduced_norm: f64,
    /// First unit where the maximum is attained; `None` for an empty groupoid.
    pub attained_at: Option<UnitId>,
    pub per_unit: Vec<f64>,
    /// Injectivity of the direct sum of the regular representations.
    pub faithful: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FullNormCertificate {
    pub dimension: usize,
    pub rank: usize,
    pub faithful: bool,
    /// Rank of `f -> Pi^u(f)` for each unit separately.
    pub per_unit_image_rank: Vec<usize>,
    pub commutative: bool,
    pub argument: String,
}

const FULL_NORM_ARGUMENT: &str = "the direct sum of the left-regular representations is \
injective on this finite-dimensional *-algebra; a finite-dimensional *-algebra with a \
faithful *-representation carries exactly one C*-norm, so the universal norm equals the \
reduced norm";

/// `C(G, w^n)` with twist `sigma = w^n`.
#[derive(Clone, Debug)]
pub struct TwistedAlgebra {
    cocycle: Arc<TwoCocycle>,
    power: i64,
    twist: HashMap<(ArrowId, ArrowId), (CircleScalar, Complex64)>,
    tag: AlgebraTag,
}

impl TwistedAlgebra {
    /// The algebra twisted by `w^power`. The cocycle identity must hold.
    pub fn new(cocycle: Arc<TwoCocycle>, power: i64) -> Result<Self> {
        if !cocycle.identity_checked() {
            return Err(Error::Precondition(
                "twisted convolution needs a cocycle satisfying the cocycle identity".into(),
            ));
        }
        let twist = cocycle
            .base()
            .composable_pairs()
            .map(|(a, b)| {
                let s = cocycle.value(a, b).pow(power);
                ((a, b), (s, s.to_complex()))
            })
            .collect();
        let tag = AlgebraTag {
            groupoid: cocycle.base().fingerprint(),
            cocycle: cocycle.fingerprint(),
            power,
        };
        Ok(TwistedAlgebra {
            cocycle,
            power,
            twist,
            tag,
        })
    }

    /// The untwisted groupoid algebra `C(G)`.
    pub fn untwisted(groupoid: Arc<FiniteGroupoid>) -> Self {
        Self::new(Arc::new(TwoCocycle::trivial(groupoid)), 0).expect("trivial cocycle")
    }

    pub fn tag(&self) -> AlgebraTag {
        self.tag
    }

    pub fn power(&self) -> i64 {
        self.power
    }

    pub fn cocycle(&self) -> &Arc<TwoCocycle> {
        &self.cocycle
    }

    pub fn groupoid(&self) -> &Arc<FiniteGroupoid> {
        self.cocycle.base()
    }

    pub fn dimension(&self) -> usize {
        self.groupoid().num_arrows()
    }

    /// `sigma(a, b)` on a composable pair.
    pub fn twist(&self, a: ArrowId, b: ArrowId) -> CircleScalar {
        self.twist[&(a, b)].0
    }

    fn twist_c(&self, a: ArrowId, b: ArrowId) -> Complex64 {
        self.twist[&(a, b)].1
    }

    pub fn zero(&self) -> AlgebraElement {
        AlgebraElement::with_tag(self.tag, vec![Complex64::new(0.0, 0.0); self.dimension()])
    }

    pub fn delta(&self, a: ArrowId) -> AlgebraElement {
        let mut f = self.zero();
        f.coeff[a] = Complex64::new(1.0, 0.0);
        f
    }

    pub fn element(&self, coeff: Vec<Complex64>) -> Result<AlgebraElement> {
        if coeff.len() != self.dimension() {
            return Err(Error::InvalidArgument(format!(
                "expected {} coefficients, got {}",
                self.dimension(),
                coeff.len()
            )));
        }
        Ok(AlgebraElement::with_tag(self.tag, coeff))
    }

    fn check(&self, f: &AlgebraElement) -> Result<()> {
        if f.tag != self.tag {
            return Err(Error::TagMismatch(format!(
                "element tagged {:?} used in algebra {:?}",
                f.tag, self.tag
            )));
        }
        Ok(())
    }

    fn require_normalized(&self) -> Result<()> {
        if self.cocycle.is_normalized() {
            Ok(())
        } else {
            Err(Error::Precondition(
                "the twisting cocycle is not normalized".into(),
            ))
        }
    }

    /// `(f*g)(c) = sum over r(a) = r(c) of f(a) g(a^-1 c) sigma(a, a^-1 c)`.
    pub fn convolve(&self, f: &AlgebraElement, g: &AlgebraElement) -> Result<AlgebraElement> {
        self.check(f)?;
        self.check(g)?;
        let gr = self.groupoid();
        let mut out = self.zero();
        for c in gr.arrows() {
            let mut acc = Complex64::new(0.0, 0.0);
            for &a in gr.arrows_with_range(gr.range(c)) {
                let fa = f.coeff[a];
                if fa == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let rest = gr.compose(gr.inverse(a), c).expect("r(a) = r(c)");
                acc += fa * g.coeff[rest] * self.twist_c(a, rest);
            }
            out.coeff[c] = acc;
        }
        Ok(out)
    }

    /// `f*(c) = conj(f(c^-1)) conj(sigma(c, c^-1))`.
    pub fn involute(&self, f: &AlgebraElement) -> Result<AlgebraElement> {
        self.check(f)?;
        let gr = self.groupoid();
        let coeff = gr
            .arrows()
            .map(|c| {
                let ci = gr.inverse(c);
                f.coeff[ci].conj() * self.twist_c(c, ci).conj()
            })
            .collect();
        Ok(AlgebraElement::with_tag(self.tag, coeff))
    }

    /// The sum of the unit arrows.
    pub fn identity_element(&self) -> Result<AlgebraElement> {
        self.require_normalized()?;
        let gr = self.groupoid();
        let mut e = self.zero();
        for u in gr.units() {
            e.coeff[gr.unit_arrow(u)] = Complex64::new(1.0, 0.0);
        }
        Ok(e)
    }

    /// `delta_a * delta_b = sigma(a, b) delta_{ab}` for composable pairs.
    pub fn structure_constant(&self, a: ArrowId, b: ArrowId) -> Option<(CircleScalar, ArrowId)> {
        let gr = self.groupoid();
        gr.compose(a, b).map(|ab| (self.twist(a, b), ab))
    }

    /// `delta_a^* = conj(sigma(a^-1, a)) delta_{a^-1}`.
    pub fn involution_constant(&self, a: ArrowId) -> (CircleScalar, ArrowId) {
        let ai = self.groupoid().inverse(a);
        (self.twist(ai, a).conj(), ai)
    }

    pub fn is_commutative(&self) -> bool {
        let gr = self.groupoid();
        gr.arrows().all(|a| {
            gr.arrows()
                .all(|b| self.structure_constant(a, b) == self.structure_constant(b, a))
        })
    }

    /// Matrix of `Pi^u(f)`: entry `(g, h)` is `f(g h^-1) sigma(g h^-1, h)` for
    /// `g, h` in `s^-1(u)`.
    pub fn regular_rep(&self, f: &AlgebraElement, u: UnitId) -> Result<RegularRep> {
        self.check(f)?;
        self.require_normalized()?;
        let gr = self.groupoid();
        if u >= gr.num_units() {
            return Err(Error::UnknownUnit(u));
        }
        let basis = gr.arrows_with_source(u).to_vec();
        let n = basis.len();
        let matrix = CMatrix::from_fn(n, n, |i, j| {
            let (g, h) = (basis[i], basis[j]);
            let a = gr.compose(g, gr.inverse(h)).expect("s(g) = s(h) = u");
            f.coeff[a] * self.twist_c(a, h)
        });
        Ok(RegularRep {
            unit: u,
            basis,
            matrix,
        })
    }

    /// `<Pi^u(f) xi, zeta>` for vectors indexed like the basis of `s^-1(u)`.
    pub fn regular_pairing(
        &self,
        f: &AlgebraElement,
        u: UnitId,
        xi: &[Complex64],
        zeta: &[Complex64],
    ) -> Result<Complex64> {
        let rep = self.regular_rep(f, u)?;
        let n = rep.basis.len();
        if xi.len() != n || zeta.len() != n {
            return Err(Error::InvalidArgument(format!(
                "vectors must have length {n}"
            )));
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                acc += rep.matrix[(i, j)] * xi[j] * zeta[i].conj();
            }
        }
        Ok(acc)
    }

    /// The linear map `f -> (Pi^u(f))_u` on the delta basis, one column per arrow.
    fn regular_map(&self, units: &[UnitId]) -> CMatrix {
        let gr = self.groupoid();
        let rows: usize = units.iter().map(|&u| gr.arrows_with_source(u).len().pow(2)).sum();
        let mut m = CMatrix::zeros(rows, gr.num_arrows());
        for a in gr.arrows() {
            let delta = self.delta(a);
            let mut offset = 0;
            for &u in units {
                let rep = self.regular_rep(&delta, u).expect("valid unit");
                for (k, z) in rep.matrix.iter().enumerate() {
                    m[(offset + k, a)] = *z;
                }
                offset += rep.matrix.len();
            }
        }
        m
    }

    /// Rank of `f -> (Pi^u(f))_u`; faithful when it equals the dimension.
    pub fn faithful_rank(&self) -> Result<usize> {
        self.require_normalized()?;
        let units: Vec<UnitId> = self.groupoid().units().collect();
        Ok(linalg::rank(&self.regular_map(&units)))
    }

    pub fn reduced_norm(&self, f: &AlgebraElement) -> Result<NormReport> {
        self.check(f)?;
        let gr = self.groupoid();
        let mut per_unit = Vec::with_capacity(gr.num_units());
        let mut best: Option<(UnitId, f64)> = None;
        for u in gr.units() {
            let norm = linalg::spectral_norm(&self.regular_rep(f, u)?.matrix);
            per_unit.push(norm);
            if best.is_none_or(|(_, b)| norm > b) {
                best = Some((u, norm));
            }
        }
        Ok(NormReport {
            reduced_norm: best.map_or(0.0, |(_, n)| n),
            attained_at: best.map(|(u, _)| u),
            per_unit,
            faithful: self.faithful_rank()? == self.dimension(),
        })
    }

    /// Certifies that the universal and reduced norms agree by exhibiting a
    /// faithful direct sum of regular representations.
    pub fn full_norm_certificate(&self) -> Result<FullNormCertificate> {
        let rank = self.faithful_rank()?;
        let dimension = self.dimension();
        if rank != dimension {
            return Err(Error::Internal(format!(
                "regular representations have rank {rank} on an algebra of dimension {dimension}"
            )));
        }
        let per_unit_image_rank = self
            .groupoid()
            .units()
            .map(|u| linalg::rank(&self.regular_map(&[u])))
            .collect();
        Ok(FullNormCertificate {
            dimension,
            rank,
            faithful: true,
            per_unit_image_rank,
            commutative: self.is_commutative(),
            argument: FULL_NORM_ARGUMENT.to_string(),
        })
    }

    /// Checks on the delta basis that `f -> (g -> b(g) f(g))` is a
    /// *-isomorphism from `self` onto `target`. This holds exactly when
    /// `self`'s twist equals `target`'s twist times the coboundary of `b`.
    pub fn is_cochain_isomorphism(&self, target: &TwistedAlgebra, b: &OneCochain) -> bool {
        let gr = self.groupoid();
        if gr.fingerprint() != target.groupoid().fingerprint() || b.values.len() != gr.num_arrows()
        {
            return false;
        }
        let products = gr.composable_pairs().all(|(x, y)| {
            let xy = gr.compose(x, y).unwrap();
            let image_of_product = self.twist(x, y) * b.get(xy);
            let product_of_images = b.get(x) * b.get(y) * target.twist(x, y);
            image_of_product == product_of_images
        });
        let stars = gr.arrows().all(|x| {
            let (c, xi) = self.involution_constant(x);
            let (ct, _) = target.involution_constant(x);
            c * b.get(xi) == b.get(x).conj() * ct
        });
        products && stars
    }
}
