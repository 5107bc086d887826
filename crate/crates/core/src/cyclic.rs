//! The finite extension `mu_k x_w G` for a `mu_k`-valued cocycle, with its
//! own (ungraded) convolution algebra.
//!
//! This module is deliberately self-contained: it convolves functions on the
//! finite groupoid `mu_k x_w G` directly and never calls the twisted or
//! graded convolution code. It is used to check the mode decomposition
//! against an honest groupoid algebra, either exactly (coefficients in the
//! cyclotomic field `Q(zeta_k)`) or in floating point.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Sub};
use std::sync::Arc;

use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::algebra::TwistedAlgebra;
use crate::circle::CircleScalar;
use crate::cocycle::TwoCocycle;
use crate::error::{Error, Result};
use crate::extension::LaurentElement;
use crate::groupoid::{
    check_morphism, is_isomorphism, quotient_by_isotropy, ArrowId, FiniteGroupoid, GroupoidParts,
    UnitId,
};
use crate::linalg::{self, CMatrix};
use crate::validation::ValidationReport;

/// Float tolerance for the oracle's structure-constant comparison.
pub const FLOAT_TOL: f64 = 1e-10;

/// An element `sum_j c_j zeta^j` of `Q(zeta_k)`, `zeta = exp(2 pi i / k)`.
///
/// Coefficients live in the group ring `Q[Z/k]`; equality is decided in the
/// field, i.e. modulo the `k`-th cyclotomic polynomial.
#[derive(Clone)]
pub struct Cyclotomic {
    coeffs: Vec<Rational64>,
}

impl Cyclotomic {
    pub fn zero(k: u32) -> Self {
        Cyclotomic {
            coeffs: vec![Rational64::zero(); k as usize],
        }
    }

    /// `zeta_k^j`.
    pub fn root(j: i64, k: u32) -> Self {
        let mut c = Self::zero(k);
        c.coeffs[j.rem_euclid(k as i64) as usize] = Rational64::one();
        c
    }

    pub fn order(&self) -> u32 {
        self.coeffs.len() as u32
    }

    pub fn coeffs(&self) -> &[Rational64] {
        &self.coeffs
    }

    pub fn conj(&self) -> Self {
        let k = self.coeffs.len();
        let mut out = Self::zero(k as u32);
        for (j, c) in self.coeffs.iter().enumerate() {
            out.coeffs[(k - j) % k] = *c;
        }
        out
    }

    pub fn scale(&self, r: Rational64) -> Self {
        Cyclotomic {
            coeffs: self.coeffs.iter().map(|c| c * r).collect(),
        }
    }

    pub fn to_complex(&self) -> Complex64 {
        let k = self.coeffs.len() as f64;
        self.coeffs
            .iter()
            .enumerate()
            .map(|(j, c)| {
                let value = *c.numer() as f64 / *c.denom() as f64;
                Complex64::from_polar(value, std::f64::consts::TAU * j as f64 / k)
            })
            .sum()
    }

    /// True when this is zero as a complex number.
    pub fn is_zero(&self) -> bool {
        if self.coeffs.iter().all(Zero::is_zero) {
            return true;
        }
        let phi = cyclotomic_polynomial(self.order() as usize);
        let mut rem: Vec<Rational64> = self.coeffs.clone();
        let deg = phi.len() - 1;
        // phi is monic; reduce from the top
        for top in (deg..rem.len()).rev() {
            let lead = rem[top];
            if lead.is_zero() {
                continue;
            }
            for (i, p) in phi.iter().enumerate() {
                rem[top - deg + i] -= lead * Rational64::from_integer(*p);
            }
        }
        rem.iter().all(Zero::is_zero)
    }

    fn is_structurally_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }
}

impl Add for &Cyclotomic {
    type Output = Cyclotomic;
    fn add(self, other: &Cyclotomic) -> Cyclotomic {
        Cyclotomic {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &Cyclotomic {
    type Output = Cyclotomic;
    fn sub(self, other: &Cyclotomic) -> Cyclotomic {
        Cyclotomic {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &Cyclotomic {
    type Output = Cyclotomic;
    fn mul(self, other: &Cyclotomic) -> Cyclotomic {
        let k = self.coeffs.len();
        let mut out = Cyclotomic::zero(k as u32);
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    out.coeffs[(i + j) % k] += a * b;
                }
            }
        }
        out
    }
}

impl PartialEq for Cyclotomic {
    fn eq(&self, other: &Self) -> bool {
        self.order() == other.order() && (self - other).is_zero()
    }
}

impl fmt::Debug for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(j, c)| format!("({c})z^{j}"))
            .collect();
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

/// Integer coefficients of the `k`-th cyclotomic polynomial, constant term first.
pub fn cyclotomic_polynomial(k: usize) -> Vec<i64> {
    assert!(k > 0);
    // x^k - 1 divided by every Phi_d with d | k, d < k
    let mut num = vec![0i64; k + 1];
    num[0] = -1;
    num[k] = 1;
    for d in (1..k).filter(|d| k.is_multiple_of(*d)) {
        num = divide_monic(&num, &cyclotomic_polynomial(d));
    }
    num
}

fn divide_monic(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let mut quot = vec![0i64; num.len() - dd];
    for top in (dd..num.len()).rev() {
        let lead = rem[top];
        quot[top - dd] = lead;
        for (i, c) in den.iter().enumerate() {
            rem[top - dd + i] -= lead * c;
        }
    }
    debug_assert!(rem.iter().all(|&r| r == 0));
    quot
}

/// Scalars the oracle computes with.
pub trait OracleScalar: Clone {
    fn zero(k: u32) -> Self;
    fn root(j: i64, k: u32) -> Self;
    fn plus(&self, other: &Self) -> Self;
    fn times(&self, other: &Self) -> Self;
    fn conj(&self) -> Self;
    /// Multiplication by `1/k`.
    fn over_k(&self, k: u32) -> Self;
    /// Cheap structural zero test used to skip terms.
    fn negligible(&self) -> bool;
    /// Distance to `other`, and whether the two agree in this arithmetic.
    fn compare(&self, other: &Self) -> (f64, bool);
}

impl OracleScalar for Cyclotomic {
    fn zero(k: u32) -> Self {
        Cyclotomic::zero(k)
    }
    fn root(j: i64, k: u32) -> Self {
        Cyclotomic::root(j, k)
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn conj(&self) -> Self {
        Cyclotomic::conj(self)
    }
    fn over_k(&self, k: u32) -> Self {
        self.scale(Rational64::new(1, k as i64))
    }
    fn negligible(&self) -> bool {
        self.is_structurally_zero()
    }
    fn compare(&self, other: &Self) -> (f64, bool) {
        let d = self - other;
        if d.is_zero() {
            (0.0, true)
        } else {
            (d.to_complex().norm().max(f64::MIN_POSITIVE), false)
        }
    }
}

impl OracleScalar for Complex64 {
    fn zero(_: u32) -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn root(j: i64, k: u32) -> Self {
        CircleScalar::root_of_unity(j, k as i64).to_complex()
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn conj(&self) -> Self {
        Complex64::conj(self)
    }
    fn over_k(&self, k: u32) -> Self {
        self / k as f64
    }
    fn negligible(&self) -> bool {
        *self == Complex64::new(0.0, 0.0)
    }
    fn compare(&self, other: &Self) -> (f64, bool) {
        let d = (self - other).norm();
        (d, d <= FLOAT_TOL)
    }
}

/// `mu_k x_w G` with arrows `(zeta^j, g)` at index `g * k + j`.
#[derive(Clone, Debug)]
pub struct CyclicExtension {
    k: u32,
    cocycle: Arc<TwoCocycle>,
    groupoid: FiniteGroupoid,
}

/// Builds `mu_k x_w G`: `(s, h)(t, g) = (s t w(h, g), h g)` and
/// `(t, g)^-1 = (t^-1 w(g, g^-1)^-1, g^-1)`.
pub fn cyclic_extension(cocycle: &Arc<TwoCocycle>, k: u32) -> Result<CyclicExtension> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be positive".into()));
    }
    if !cocycle.identity_checked() || !cocycle.is_normalized() {
        return Err(Error::Precondition(
            "the cyclic extension needs a normalized 2-cocycle".into(),
        ));
    }
    let g = cocycle.base();
    let mut index: HashMap<(ArrowId, ArrowId), u32> = HashMap::new();
    for (a, b) in g.composable_pairs() {
        let j = cocycle
            .value(a, b)
            .root_index(k)
            .ok_or_else(|| Error::NotRootOfUnity {
                a: g.arrow_name(a).to_string(),
                b: g.arrow_name(b).to_string(),
                k,
            })?;
        index.insert((a, b), j);
    }
    let kk = k as usize;
    let n = g.num_arrows();
    let arrow = |j: usize, a: ArrowId| a * kk + j % kk;
    let mut parts = GroupoidParts {
        unit_names: g.unit_names().to_vec(),
        arrow_names: Vec::with_capacity(n * kk),
        range: Vec::with_capacity(n * kk),
        source: Vec::with_capacity(n * kk),
        compose: HashMap::new(),
        inverse: Vec::with_capacity(n * kk),
    };
    for a in g.arrows() {
        let ai = g.inverse(a);
        for j in 0..kk {
            parts.arrow_names.push(format!("(z^{j},{})", g.arrow_name(a)));
            parts.range.push(g.range(a));
            parts.source.push(g.source(a));
            let twist = index[&(a, ai)] as usize;
            parts.inverse.push(arrow(2 * kk - j - twist, ai));
        }
    }
    for (&(a, b), &w) in &index {
        let ab = g.compose(a, b).expect("composable");
        for i in 0..kk {
            for j in 0..kk {
                parts
                    .compose
                    .insert((arrow(i, a), arrow(j, b)), arrow(i + j + w as usize, ab));
            }
        }
    }
    let groupoid = FiniteGroupoid::new(parts).map_err(|e| {
        Error::Internal(format!("cyclic extension failed validation: {e}"))
    })?;
    Ok(CyclicExtension {
        k,
        cocycle: cocycle.clone(),
        groupoid,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SummandReport {
    pub mode: u32,
    pub dimension: usize,
    pub center_dimension: usize,
    pub commutative: bool,
}

/// Result of comparing `C(mu_k x_w G)` with `sum_n C(G, w^n)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CyclicCertificate {
    pub k: u32,
    pub base_arrows: usize,
    pub total_dimension: usize,
    pub summands: Vec<SummandReport>,
    /// Comparisons that failed in exact cyclotomic arithmetic.
    pub exact_mismatches: usize,
    pub exact_comparisons: usize,
    /// Largest deviation of the same comparisons in floating point.
    pub float_residual: f64,
    pub faithful_rank: usize,
    pub faithful: bool,
}

impl CyclicCertificate {
    pub fn passed(&self) -> bool {
        self.exact_mismatches == 0
            && self.float_residual <= FLOAT_TOL
            && self.faithful
            && self.summands.iter().all(|s| s.dimension == self.base_arrows)
            && self.summands.len() * self.base_arrows == self.total_dimension
    }
}

#[derive(Default)]
struct Tally {
    comparisons: usize,
    mismatches: usize,
    residual: f64,
}

impl Tally {
    fn record<S: OracleScalar>(&mut self, got: &[S], expected: &[S]) {
        self.comparisons += 1;
        let mut ok = true;
        for (x, y) in got.iter().zip(expected) {
            let (d, same) = x.compare(y);
            self.residual = self.residual.max(d);
            ok &= same;
        }
        if !ok {
            self.mismatches += 1;
        }
    }
}

impl CyclicExtension {
    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn cocycle(&self) -> &Arc<TwoCocycle> {
        &self.cocycle
    }

    pub fn base(&self) -> &Arc<FiniteGroupoid> {
        self.cocycle.base()
    }

    pub fn groupoid(&self) -> &FiniteGroupoid {
        &self.groupoid
    }

    /// Index of `(zeta^j, a)`.
    pub fn arrow(&self, j: i64, a: ArrowId) -> ArrowId {
        a * self.k as usize + j.rem_euclid(self.k as i64) as usize
    }

    pub fn phase(&self, x: ArrowId) -> u32 {
        (x % self.k as usize) as u32
    }

    pub fn base_arrow(&self, x: ArrowId) -> ArrowId {
        x / self.k as usize
    }

    /// `zeta^j . (t, g) = (zeta^j t, g)`.
    pub fn act(&self, j: i64, x: ArrowId) -> ArrowId {
        self.arrow(self.phase(x) as i64 + j, self.base_arrow(x))
    }

    /// The projection `(t, g) -> g`.
    pub fn projection(&self) -> Vec<ArrowId> {
        self.groupoid.arrows().map(|x| self.base_arrow(x)).collect()
    }

    /// Groupoid axioms, the projection being a morphism, fibres of size `k`,
    /// and the circle action commuting with range and source.
    pub fn check_structure(&self) -> ValidationReport {
        let mut report = self.groupoid.validate();
        report.extend(check_morphism(&self.groupoid, self.base(), &self.projection()));
        let mut fibre = vec![0usize; self.base().num_arrows()];
        for x in self.groupoid.arrows() {
            fibre[self.base_arrow(x)] += 1;
            for j in 0..self.k as i64 {
                let y = self.act(j, x);
                if self.groupoid.range(y) != self.groupoid.range(x)
                    || self.groupoid.source(y) != self.groupoid.source(x)
                {
                    report.push(
                        "action_endpoints",
                        vec![self.groupoid.arrow_name(x).to_string()],
                        "the circle action moves range or source",
                    );
                }
            }
        }
        for (a, &size) in fibre.iter().enumerate() {
            if size != self.k as usize {
                report.push(
                    "fibre_size",
                    vec![self.base().arrow_name(a).to_string()],
                    format!("fibre has {size} points, expected {}", self.k),
                );
            }
        }
        report
    }

    /// Checks that dividing `mu_k x_w G` by its isotropy gives the same
    /// groupoid as dividing `G` by its own, via `[(t, g)] -> [g]`.
    pub fn isotropy_quotient_matches_base(&self) -> bool {
        let (ext_q, ext_proj) = quotient_by_isotropy(&self.groupoid);
        let (base_q, base_proj) = quotient_by_isotropy(self.base());
        let mut map = vec![usize::MAX; ext_q.num_arrows()];
        for x in self.groupoid.arrows() {
            let target = base_proj[self.base_arrow(x)];
            let slot = &mut map[ext_proj[x]];
            if *slot != usize::MAX && *slot != target {
                return false;
            }
            *slot = target;
        }
        is_isomorphism(&ext_q, &base_q, &map)
    }

    fn scalar_of<S: OracleScalar>(&self, c: CircleScalar) -> Result<S> {
        let j = c.root_index(self.k).ok_or_else(|| {
            Error::Internal(format!("{c} is not a {}-th root of unity", self.k))
        })?;
        Ok(S::root(j as i64, self.k))
    }

    /// `(f * g)(x) = sum_{r(y) = r(x)} (1/k) f(y) g(y^-1 x)`.
    pub fn convolve<S: OracleScalar>(&self, f: &[S], g: &[S]) -> Vec<S> {
        let h = &self.groupoid;
        let mut out = vec![S::zero(self.k); h.num_arrows()];
        for y in h.arrows() {
            if f[y].negligible() {
                continue;
            }
            for &z in h.arrows_with_range(h.source(y)) {
                if g[z].negligible() {
                    continue;
                }
                let yz = h.compose(y, z).expect("composable");
                out[yz] = out[yz].plus(&f[y].times(&g[z]).over_k(self.k));
            }
        }
        out
    }

    /// `f*(x) = conj f(x^-1)`.
    pub fn involute<S: OracleScalar>(&self, f: &[S]) -> Vec<S> {
        self.groupoid
            .arrows()
            .map(|x| f[self.groupoid.inverse(x)].conj())
            .collect()
    }

    /// `p_n(f)(t, g) = (1/k) sum_{s in mu_k} f(s t, g) s^n`.
    pub fn project<S: OracleScalar>(&self, f: &[S], n: u32) -> Vec<S> {
        self.groupoid
            .arrows()
            .map(|x| {
                let mut acc = S::zero(self.k);
                for j in 0..self.k as i64 {
                    let term = f[self.act(j, x)].times(&S::root(j * n as i64, self.k));
                    acc = acc.plus(&term);
                }
                acc.over_k(self.k)
            })
            .collect()
    }

    /// `e_{n,g}(t, h) = t^{-n} [h = g]`, the image of `delta_g` in mode `n`.
    pub fn mode_basis<S: OracleScalar>(&self, n: u32, a: ArrowId) -> Vec<S> {
        let mut out = vec![S::zero(self.k); self.groupoid.num_arrows()];
        for j in 0..self.k as i64 {
            out[self.arrow(j, a)] = S::root(-j * n as i64, self.k);
        }
        out
    }

    pub fn delta<S: OracleScalar>(&self, x: ArrowId) -> Vec<S> {
        let mut out = vec![S::zero(self.k); self.groupoid.num_arrows()];
        out[x] = S::root(0, self.k);
        out
    }

    /// Left regular representation on `L^2` of the source fibre at `u`, in an
    /// orthonormal basis: entry `(x, z)` is `(1/k) f(x z^-1)`.
    pub fn regular_matrix(&self, f: &[Complex64], u: UnitId) -> CMatrix {
        let h = &self.groupoid;
        let fibre = h.arrows_with_source(u);
        let mut m = CMatrix::zeros(fibre.len(), fibre.len());
        for (i, &x) in fibre.iter().enumerate() {
            for (j, &z) in fibre.iter().enumerate() {
                let xz = h.compose(x, h.inverse(z)).expect("same source");
                m[(i, j)] = f[xz] / self.k as f64;
            }
        }
        m
    }

    /// `max_u || regular_matrix(f, u) ||`.
    pub fn reduced_norm(&self, f: &[Complex64]) -> f64 {
        self.groupoid
            .units()
            .map(|u| linalg::spectral_norm(&self.regular_matrix(f, u)))
            .fold(0.0, f64::max)
    }

    /// Rank of `f -> (regular_matrix(f, u))_u` on the delta basis.
    pub fn faithful_rank(&self) -> usize {
        let h = &self.groupoid;
        let rows: usize = h.units().map(|u| h.arrows_with_source(u).len().pow(2)).sum();
        let mut m = CMatrix::zeros(rows, h.num_arrows());
        for x in h.arrows() {
            let f: Vec<Complex64> = self.delta(x);
            let mut r = 0;
            for u in h.units() {
                for z in self.regular_matrix(&f, u).iter() {
                    m[(r, x)] = *z;
                    r += 1;
                }
            }
        }
        linalg::rank(&m)
    }

    /// The function `(t, g) -> sum_n t^{-n} F_n(g)`; requires the modes of
    /// `F` to be distinct modulo `k`.
    pub fn from_laurent(&self, f: &LaurentElement) -> Result<Vec<Complex64>> {
        let mut seen = HashMap::new();
        for n in f.support() {
            if let Some(m) = seen.insert(n.rem_euclid(self.k as i64), n) {
                return Err(Error::InvalidArgument(format!(
                    "modes {m} and {n} coincide modulo {}",
                    self.k
                )));
            }
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.groupoid.num_arrows()];
        for (n, component) in f.modes() {
            for x in self.groupoid.arrows() {
                let t = CircleScalar::root_of_unity(-n * self.phase(x) as i64, self.k as i64);
                out[x] += t.to_complex() * component.coeff(self.base_arrow(x));
            }
        }
        Ok(out)
    }

    fn certify_in<S: OracleScalar>(&self, algebras: &[TwistedAlgebra], tally: &mut Tally) -> Result<()> {
        let g = self.base();
        let k = self.k;
        // completeness: sum_n p_n = id
        for x in self.groupoid.arrows() {
            let d: Vec<S> = self.delta(x);
            let mut sum = vec![S::zero(k); d.len()];
            for n in 0..k {
                for (acc, v) in sum.iter_mut().zip(self.project(&d, n)) {
                    *acc = acc.plus(&v);
                }
            }
            tally.record(&sum, &d);
        }
        let zero = vec![S::zero(k); self.groupoid.num_arrows()];
        let basis: Vec<Vec<Vec<S>>> = (0..k)
            .map(|n| g.arrows().map(|a| self.mode_basis(n, a)).collect())
            .collect();
        for n in 0..k {
            let alg = &algebras[n as usize];
            for a in g.arrows() {
                let e = &basis[n as usize][a];
                // p_m e_{n,a} = delta_{mn} e_{n,a}
                for m in 0..k {
                    let expected = if m == n { e } else { &zero };
                    tally.record(&self.project(e, m), expected);
                }
                // evaluation at t = 1 recovers delta_a
                let at_one: Vec<S> = g.arrows().map(|b| e[self.arrow(0, b)].clone()).collect();
                let mut delta = vec![S::zero(k); g.num_arrows()];
                delta[a] = S::root(0, k);
                tally.record(&at_one, &delta);
                // involution constants
                let (c, ai) = alg.involution_constant(a);
                let expected: Vec<S> = basis[n as usize][ai]
                    .iter()
                    .map(|v| v.times(&self.scalar_of::<S>(c).unwrap()))
                    .collect();
                tally.record(&self.involute(e), &expected);
                // products against every mode
                for m in 0..k {
                    for b in g.arrows() {
                        let got = self.convolve(e, &basis[m as usize][b]);
                        let expected = match (m == n, alg.structure_constant(a, b)) {
                            (true, Some((c, ab))) => {
                                let c: S = self.scalar_of(c)?;
                                basis[n as usize][ab].iter().map(|v| v.times(&c)).collect()
                            }
                            _ => zero.clone(),
                        };
                        tally.record(&got, &expected);
                    }
                }
            }
        }
        Ok(())
    }

    fn center_dimension(&self, n: u32) -> usize {
        let g = self.base();
        let basis: Vec<Vec<Complex64>> = g.arrows().map(|a| self.mode_basis(n, a)).collect();
        let size = self.groupoid.num_arrows();
        let mut m = CMatrix::zeros(g.num_arrows() * size, g.num_arrows());
        for (a, ea) in basis.iter().enumerate() {
            for (b, eb) in basis.iter().enumerate() {
                let ab = self.convolve(ea, eb);
                let ba = self.convolve(eb, ea);
                for x in 0..size {
                    m[(b * size + x, a)] = ab[x] - ba[x];
                }
            }
        }
        g.num_arrows() - linalg::rank(&m)
    }

    fn summand_dimension(&self, n: u32) -> usize {
        let size = self.groupoid.num_arrows();
        let mut m = CMatrix::zeros(size, size);
        for x in self.groupoid.arrows() {
            let d: Vec<Complex64> = self.delta(x);
            for (i, v) in self.project(&d, n).into_iter().enumerate() {
                m[(i, x)] = v;
            }
        }
        linalg::rank(&m)
    }

    /// Certifies `C(mu_k x_w G) = sum_{n<k} Image(p_n)` with
    /// `Image(p_n) ~ C(G, w^n)` via `f -> f(1, .)`, comparing every structure
    /// constant and involution constant exactly and in floating point.
    pub fn decompose(&self) -> Result<CyclicCertificate> {
        let algebras: Vec<TwistedAlgebra> = (0..self.k)
            .map(|n| TwistedAlgebra::new(self.cocycle.clone(), n as i64))
            .collect::<Result<_>>()?;
        let mut exact = Tally::default();
        self.certify_in::<Cyclotomic>(&algebras, &mut exact)?;
        let mut float = Tally::default();
        self.certify_in::<Complex64>(&algebras, &mut float)?;
        let summands = (0..self.k)
            .map(|n| {
                let center_dimension = self.center_dimension(n);
                SummandReport {
                    mode: n,
                    dimension: self.summand_dimension(n),
                    center_dimension,
                    commutative: center_dimension == self.base().num_arrows(),
                }
            })
            .collect();
        let faithful_rank = self.faithful_rank();
        Ok(CyclicCertificate {
            k: self.k,
            base_arrows: self.base().num_arrows(),
            total_dimension: self.groupoid.num_arrows(),
            summands,
            exact_mismatches: exact.mismatches,
            exact_comparisons: exact.comparisons,
            float_residual: float.residual,
            faithful_rank,
            faithful: faithful_rank == self.groupoid.num_arrows(),
        })
    }
}

/// Shorthand for [`CyclicExtension::decompose`].
pub fn cyclic_decompose(e: &CyclicExtension) -> Result<CyclicCertificate> {
    e.decompose()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cocycle::turn;
    use crate::extension::CircleExtension;
    use crate::groupoid::{abelian_group, cyclic_group, pair_groupoid};

    fn pauli() -> Arc<TwoCocycle> {
        let g = Arc::new(abelian_group(&[2, 2]).unwrap());
        Arc::new(TwoCocycle::from_fn(g, |x, y| turn(((x % 2) * (y / 2)) as i64, 2)))
    }

    #[test]
    fn cyclotomic_polynomials() {
        assert_eq!(cyclotomic_polynomial(1), vec![-1, 1]);
        assert_eq!(cyclotomic_polynomial(4), vec![1, 0, 1]);
        assert_eq!(cyclotomic_polynomial(6), vec![1, -1, 1]);
        assert_eq!(cyclotomic_polynomial(12), vec![1, 0, -1, 0, 1]);
    }

    #[test]
    fn cyclotomic_equality_is_field_equality() {
        let sum = (0..3).fold(Cyclotomic::zero(3), |acc, j| &acc + &Cyclotomic::root(j, 3));
        assert!(sum.is_zero());
        assert_eq!(&Cyclotomic::root(2, 4) + &Cyclotomic::root(0, 4), Cyclotomic::zero(4));
        assert_ne!(Cyclotomic::root(1, 6), Cyclotomic::root(0, 6));
        assert!((Cyclotomic::root(1, 4).to_complex() - Complex64::new(0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn trivial_cocycle_splits() {
        let g = Arc::new(cyclic_group(2).unwrap());
        let e = cyclic_extension(&Arc::new(TwoCocycle::trivial(g)), 2).unwrap();
        let h = e.groupoid();
        assert_eq!(h.num_arrows(), 4);
        assert!(h.arrows().all(|x| h.compose(x, x) == Some(h.unit_arrow(0))));
        assert!(e.check_structure().is_empty());
    }

    #[test]
    fn pauli_extension_is_nonabelian() {
        let w = pauli();
        let e = cyclic_extension(&w, 2).unwrap();
        let g = e.base();
        let (x01, x10, x11) = (
            g.arrow_by_name("(0,1)").unwrap(),
            g.arrow_by_name("(1,0)").unwrap(),
            g.arrow_by_name("(1,1)").unwrap(),
        );
        let h = e.groupoid();
        assert_eq!(h.compose(e.arrow(0, x01), e.arrow(0, x10)), Some(e.arrow(1, x11)));
        assert_eq!(h.compose(e.arrow(0, x10), e.arrow(0, x01)), Some(e.arrow(0, x11)));
        assert!(e.check_structure().is_empty());
    }

    #[test]
    fn values_outside_mu_k_are_rejected() {
        let g = Arc::new(abelian_group(&[3, 3]).unwrap());
        let w = Arc::new(TwoCocycle::from_fn(g, |x, y| turn(((x % 3) * (y / 3)) as i64, 3)));
        match cyclic_extension(&w, 2) {
            Err(Error::NotRootOfUnity { k: 2, .. }) => {}
            other => panic!("expected NotRootOfUnity, got {other:?}"),
        }
        assert!(cyclic_extension(&w, 6).is_ok());
    }

    #[test]
    fn pauli_summands() {
        let e = cyclic_extension(&pauli(), 2).unwrap();
        let cert = e.decompose().unwrap();
        assert!(cert.passed(), "{cert:?}");
        assert_eq!(cert.exact_mismatches, 0);
        let dims: Vec<_> = cert.summands.iter().map(|s| (s.dimension, s.center_dimension)).collect();
        assert_eq!(dims, vec![(4, 4), (4, 1)]);
    }

    #[test]
    fn trivial_twist_gives_copies_of_the_groupoid_algebra() {
        let g = Arc::new(pair_groupoid(2).unwrap());
        let e = cyclic_extension(&Arc::new(TwoCocycle::trivial(g)), 2).unwrap();
        let cert = e.decompose().unwrap();
        assert!(cert.passed());
        assert!(cert.summands.iter().all(|s| s.dimension == 4 && s.center_dimension == 1));
    }

    #[test]
    fn norm_matches_the_mode_decomposition() {
        let w = pauli();
        let ext = CircleExtension::new(w.clone()).unwrap();
        let e = cyclic_extension(&w, 2).unwrap();
        let f = ext.monomial(1, 1).add(&ext.monomial(0, 0)).add(&ext.monomial(1, 2));
        let oracle = e.reduced_norm(&e.from_laurent(&f).unwrap());
        let graded = ext.decompose(&f).unwrap().norm;
        assert!((oracle - graded).abs() < 1e-9, "{oracle} vs {graded}");
        let clash = ext.monomial(1, 1).add(&ext.monomial(3, 0));
        assert!(e.from_laurent(&clash).is_err());
    }

    #[test]
    fn quotient_by_isotropy_recovers_the_base() {
        let g = Arc::new(pair_groupoid(2).unwrap());
        let e = cyclic_extension(&Arc::new(TwoCocycle::trivial(g)), 2).unwrap();
        assert!(e.isotropy_quotient_matches_base());
        let e = cyclic_extension(&pauli(), 4).unwrap();
        assert!(e.isotropy_quotient_matches_base());
    }
}
