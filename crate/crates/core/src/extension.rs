//! The extension groupoid `T x_w G` and its convolution algebra, modelled
//! exactly on the span of the functions `s^m (x) f`.
//!
//! A [`LaurentElement`] `F` stores, for each mode `n`, the coefficient of
//! `s^{-n}`: `F(t, g) = sum_n t^{-n} F_n(g)`. Mode `n` lies in the subalgebra
//! of functions with `F(s.(t, g)) = s^{-n} F(t, g)`.
//!
//! Products, involution and the averaging maps are evaluated on the
//! extension itself: points of `T x_w G` carry a circle coordinate that is a
//! monomial `c r^a t^b` in formal circle variables, the extension's product
//! and inverse act on those monomials, and integrals over `T` pick out the
//! terms with exponent zero. Nothing here calls the twisted convolution of
//! [`crate::algebra`]; the two are compared by the checks below.

use std::collections::BTreeMap;
use std::ops::RangeInclusive;
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::algebra::{AlgebraElement, AlgebraTag, NormReport, TwistedAlgebra};
use crate::circle::CircleScalar;
use crate::cocycle::TwoCocycle;
use crate::error::{Error, Result};
use crate::groupoid::{ArrowId, FiniteGroupoid, UnitId};
use crate::linalg::{self, CMatrix};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// `constant * r^r_exp * t^t_exp` for formal circle variables `r` and `t`.
#[derive(Clone, Copy, Debug, PartialEq)]
struct Phase {
    constant: CircleScalar,
    r_exp: i64,
    t_exp: i64,
}

impl Phase {
    const ONE: Phase = Phase {
        constant: CircleScalar::ONE,
        r_exp: 0,
        t_exp: 0,
    };

    fn var_r() -> Self {
        Phase { r_exp: 1, ..Self::ONE }
    }

    fn var_t() -> Self {
        Phase { t_exp: 1, ..Self::ONE }
    }

    fn times(self, other: Phase) -> Phase {
        Phase {
            constant: self.constant * other.constant,
            r_exp: self.r_exp + other.r_exp,
            t_exp: self.t_exp + other.t_exp,
        }
    }

    fn scaled(self, c: CircleScalar) -> Phase {
        Phase {
            constant: self.constant * c,
            ..self
        }
    }

    fn pow(self, n: i64) -> Phase {
        Phase {
            constant: self.constant.pow(n),
            r_exp: self.r_exp * n,
            t_exp: self.t_exp * n,
        }
    }

    fn inv(self) -> Phase {
        self.pow(-1)
    }
}

/// A point `(phase, g)` of the extension.
#[derive(Clone, Copy, Debug)]
struct ExtPoint {
    phase: Phase,
    arrow: ArrowId,
}

/// A term `coeff * r^r_exp * t^t_exp` of a function value.
#[derive(Clone, Copy, Debug)]
struct Term {
    coeff: Complex64,
    r_exp: i64,
    t_exp: i64,
}

/// Mode-indexed coefficient vectors; used both for algebra elements and for
/// vectors in `L^2` of a source fibre of the extension.
type Modes = BTreeMap<i64, Vec<Complex64>>;

/// A finitely supported element `sum_n s^{-n} (x) F_n` of `C_c(G^w)`.
#[derive(Clone, Debug, PartialEq)]
pub struct LaurentElement {
    groupoid: u64,
    cocycle: u64,
    modes: BTreeMap<i64, AlgebraElement>,
}

impl LaurentElement {
    /// Modes with a nonzero component.
    pub fn support(&self) -> Vec<i64> {
        self.modes.keys().copied().collect()
    }

    pub fn mode(&self, n: i64) -> Option<&AlgebraElement> {
        self.modes.get(&n)
    }

    pub fn modes(&self) -> impl Iterator<Item = (i64, &AlgebraElement)> {
        self.modes.iter().map(|(&n, f)| (n, f))
    }

    pub fn is_zero(&self) -> bool {
        self.modes.is_empty()
    }

    /// Largest coefficient difference over all modes.
    pub fn max_abs_diff(&self, other: &LaurentElement) -> f64 {
        let keys: std::collections::BTreeSet<i64> =
            self.modes.keys().chain(other.modes.keys()).copied().collect();
        keys.into_iter()
            .map(|n| match (self.modes.get(&n), other.modes.get(&n)) {
                (Some(a), Some(b)) => a.max_abs_diff(b),
                (Some(a), None) | (None, Some(a)) => a.max_abs(),
                (None, None) => 0.0,
            })
            .fold(0.0, f64::max)
    }

    /// Sum of two elements over the same extension.
    pub fn add(&self, other: &LaurentElement) -> LaurentElement {
        assert_eq!(
            (self.groupoid, self.cocycle),
            (other.groupoid, other.cocycle),
            "elements of different extensions"
        );
        let mut modes = self.modes.clone();
        for (&n, f) in &other.modes {
            let sum = match modes.get(&n) {
                Some(g) => g + f,
                None => f.clone(),
            };
            modes.insert(n, sum);
        }
        LaurentElement {
            groupoid: self.groupoid,
            cocycle: self.cocycle,
            modes: modes.into_iter().filter(|(_, f)| !f.is_zero()).collect(),
        }
    }
}

/// The isometry `V_n: l^2(s^-1(u)) -> L^2(G^w_u)`, `xi -> s^{-n} (x) xi`,
/// stored as a correspondence of bases.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ModeUnitary {
    pub unit: UnitId,
    pub mode: i64,
    pub basis: Vec<ArrowId>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Decomposition {
    pub per_mode_norm: BTreeMap<i64, NormReport>,
    /// Norm of the element, the maximum of the summand norms.
    pub norm: f64,
    #[serde(skip)]
    pub components: BTreeMap<i64, AlgebraElement>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IntertwineResidual {
    pub unit: UnitId,
    pub window: (i64, i64),
    pub dimension: usize,
    /// `max |R^u(F) - V L^u(Upsilon(F)) V*|` entrywise.
    pub residual: f64,
    /// `max |<V_m e_i, V_n e_j> - delta_mn delta_ij|` over the window.
    pub isometry_residual: f64,
    pub extension_norm: f64,
    pub max_mode_norm: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReducedDecompositionCertificate {
    pub samples: usize,
    /// Largest `| ||R^u(F)|| - max_n ||L_n^u(Upsilon_n F)|| |` over samples and units.
    pub max_deviation: f64,
    pub max_intertwine_residual: f64,
    pub per_sample_norms: Vec<(f64, f64)>,
}

/// `G^w = T x_w G` for a normalized cocycle `w`.
#[derive(Clone, Debug)]
pub struct CircleExtension {
    cocycle: Arc<TwoCocycle>,
}

impl CircleExtension {
    pub fn new(cocycle: Arc<TwoCocycle>) -> Result<Self> {
        if !cocycle.identity_checked() || !cocycle.is_normalized() {
            return Err(Error::Precondition(
                "the extension needs a normalized 2-cocycle".into(),
            ));
        }
        Ok(CircleExtension { cocycle })
    }

    pub fn cocycle(&self) -> &Arc<TwoCocycle> {
        &self.cocycle
    }

    pub fn groupoid(&self) -> &Arc<FiniteGroupoid> {
        self.cocycle.base()
    }

    /// `C(G, w^n)`.
    pub fn algebra(&self, n: i64) -> TwistedAlgebra {
        TwistedAlgebra::new(self.cocycle.clone(), n).expect("normalized cocycle")
    }

    fn tag(&self, n: i64) -> AlgebraTag {
        AlgebraTag {
            groupoid: self.groupoid().fingerprint(),
            cocycle: self.cocycle.fingerprint(),
            power: n,
        }
    }

    fn check(&self, f: &LaurentElement) -> Result<()> {
        if (f.groupoid, f.cocycle) != (self.groupoid().fingerprint(), self.cocycle.fingerprint()) {
            return Err(Error::TagMismatch(
                "Laurent element belongs to a different extension".into(),
            ));
        }
        Ok(())
    }

    fn from_modes(&self, modes: Modes) -> LaurentElement {
        LaurentElement {
            groupoid: self.groupoid().fingerprint(),
            cocycle: self.cocycle.fingerprint(),
            modes: modes
                .into_iter()
                .filter(|(_, v)| v.iter().any(|z| *z != ZERO))
                .map(|(n, v)| (n, AlgebraElement::with_tag(self.tag(n), v)))
                .collect(),
        }
    }

    fn to_modes(f: &LaurentElement) -> Modes {
        f.modes.iter().map(|(&n, a)| (n, a.coeffs().to_vec())).collect()
    }

    pub fn zero(&self) -> LaurentElement {
        self.from_modes(Modes::new())
    }

    /// `s^{-n} (x) f` for `f` in `C(G, w^n)`; the inverse of `phi_n`.
    pub fn embed(&self, f: &AlgebraElement) -> Result<LaurentElement> {
        let n = f.tag().power;
        if f.tag() != self.tag(n) {
            return Err(Error::TagMismatch(
                "element is not in a twisted algebra of this extension".into(),
            ));
        }
        Ok(self.from_modes(Modes::from([(n, f.coeffs().to_vec())])))
    }

    /// `s^{-n} (x) delta_a`.
    pub fn monomial(&self, n: i64, a: ArrowId) -> LaurentElement {
        let mut v = vec![ZERO; self.groupoid().num_arrows()];
        v[a] = Complex64::new(1.0, 0.0);
        self.from_modes(Modes::from([(n, v)]))
    }

    /// Builds an element from raw mode coefficients.
    pub fn element(&self, modes: BTreeMap<i64, Vec<Complex64>>) -> Result<LaurentElement> {
        let n = self.groupoid().num_arrows();
        if let Some((m, v)) = modes.iter().find(|(_, v)| v.len() != n) {
            return Err(Error::InvalidArgument(format!(
                "mode {m} has {} coefficients, expected {n}",
                v.len()
            )));
        }
        Ok(self.from_modes(modes))
    }

    /// The unit `s^0 (x) (sum of unit arrows)`.
    pub fn identity(&self) -> LaurentElement {
        let g = self.groupoid();
        let mut v = vec![ZERO; g.num_arrows()];
        for u in g.units() {
            v[g.unit_arrow(u)] = Complex64::new(1.0, 0.0);
        }
        self.from_modes(Modes::from([(0, v)]))
    }

    /// `(s, h)(t, g) = (s t w(h, g), h g)`.
    fn ext_mul(&self, x: ExtPoint, y: ExtPoint) -> ExtPoint {
        let g = self.groupoid();
        let arrow = g.compose(x.arrow, y.arrow).expect("composable extension arrows");
        ExtPoint {
            phase: x.phase.times(y.phase).scaled(self.cocycle.value(x.arrow, y.arrow)),
            arrow,
        }
    }

    /// `(t, g)^-1 = (t^-1 w(g, g^-1)^-1, g^-1)`.
    fn ext_inverse(&self, x: ExtPoint) -> ExtPoint {
        let g = self.groupoid();
        let gi = g.inverse(x.arrow);
        ExtPoint {
            phase: x.phase.inv().scaled(self.cocycle.value(x.arrow, gi).inv()),
            arrow: gi,
        }
    }

    /// Value of the mode-`n` part `s^{-n} (x) v` at a point.
    fn eval_mode(n: i64, v: &[Complex64], x: ExtPoint) -> Term {
        let p = x.phase.pow(-n);
        Term {
            coeff: v[x.arrow] * p.constant.to_complex(),
            r_exp: p.r_exp,
            t_exp: p.t_exp,
        }
    }

    /// Convolution on `G^w` with Haar system `tau x lambda`:
    /// `(F * X)(t, g) = int_T sum_{r(a) = r(g)} F(r, a) X((r, a)^-1 (t, g)) dr`.
    fn convolve_modes(&self, f: &Modes, x: &Modes) -> Modes {
        let g = self.groupoid();
        let mut out = Modes::new();
        for target in g.arrows() {
            let point = ExtPoint {
                phase: Phase::var_t(),
                arrow: target,
            };
            for &a in g.arrows_with_range(g.range(target)) {
                let integration_point = ExtPoint {
                    phase: Phase::var_r(),
                    arrow: a,
                };
                let rest = self.ext_mul(self.ext_inverse(integration_point), point);
                for (&p, fv) in f {
                    if fv[a] == ZERO {
                        continue;
                    }
                    let left = Self::eval_mode(p, fv, integration_point);
                    for (&q, xv) in x {
                        let right = Self::eval_mode(q, xv, rest);
                        // int_T r^k dr vanishes unless k = 0
                        if left.r_exp + right.r_exp != 0 {
                            continue;
                        }
                        let mode = -(left.t_exp + right.t_exp);
                        let slot = out
                            .entry(mode)
                            .or_insert_with(|| vec![ZERO; g.num_arrows()]);
                        slot[target] += left.coeff * right.coeff;
                    }
                }
            }
        }
        out
    }

    /// The convolution product of `C_c(G^w)` on Laurent elements.
    pub fn product(&self, f: &LaurentElement, g: &LaurentElement) -> Result<LaurentElement> {
        self.check(f)?;
        self.check(g)?;
        Ok(self.from_modes(self.convolve_modes(&Self::to_modes(f), &Self::to_modes(g))))
    }

    /// `F*(x) = conj(F(x^-1))` (the extension algebra is untwisted).
    pub fn involute(&self, f: &LaurentElement) -> Result<LaurentElement> {
        self.check(f)?;
        let g = self.groupoid();
        let mut out = Modes::new();
        for (&p, fv) in &Self::to_modes(f) {
            for target in g.arrows() {
                let inv = self.ext_inverse(ExtPoint {
                    phase: Phase::var_t(),
                    arrow: target,
                });
                let term = Self::eval_mode(p, fv, inv);
                // conj(t^e) = t^-e on the circle
                let mode = term.t_exp;
                out.entry(mode)
                    .or_insert_with(|| vec![ZERO; g.num_arrows()])[target] += term.coeff.conj();
            }
        }
        Ok(self.from_modes(out))
    }

    /// `chi_n(F)(t, g) = int_T F(s.(t, g)) s^n ds` with `s.(t, g) = (s t, g)`.
    pub fn chi(&self, f: &LaurentElement, n: i64) -> Result<LaurentElement> {
        self.check(f)?;
        let g = self.groupoid();
        let mut out = Modes::new();
        for (&p, fv) in &Self::to_modes(f) {
            for target in g.arrows() {
                let acted = ExtPoint {
                    phase: Phase::var_r().times(Phase::var_t()),
                    arrow: target,
                };
                let term = Self::eval_mode(p, fv, acted);
                if term.r_exp + n != 0 {
                    continue;
                }
                out.entry(-term.t_exp)
                    .or_insert_with(|| vec![ZERO; g.num_arrows()])[target] += term.coeff;
            }
        }
        Ok(self.from_modes(out))
    }

    /// `Upsilon_n(F)(g) = int_T F(t, g) t^n dt`, an element of `C(G, w^n)`.
    pub fn upsilon(&self, f: &LaurentElement, n: i64) -> Result<AlgebraElement> {
        self.check(f)?;
        let g = self.groupoid();
        let mut v = vec![ZERO; g.num_arrows()];
        for (&p, fv) in &Self::to_modes(f) {
            for target in g.arrows() {
                let term = Self::eval_mode(
                    p,
                    fv,
                    ExtPoint {
                        phase: Phase::var_t(),
                        arrow: target,
                    },
                );
                if term.t_exp + n == 0 {
                    v[target] += term.coeff;
                }
            }
        }
        Ok(AlgebraElement::with_tag(self.tag(n), v))
    }

    /// `Upsilon(F) = (Upsilon_n F)_n` with per-summand reduced norms; the norm
    /// of `F` is the maximum over summands.
    pub fn decompose(&self, f: &LaurentElement) -> Result<Decomposition> {
        self.check(f)?;
        let mut components = BTreeMap::new();
        let mut per_mode_norm = BTreeMap::new();
        let mut norm: f64 = 0.0;
        for n in f.support() {
            let component = self.upsilon(f, n)?;
            let report = self.algebra(n).reduced_norm(&component)?;
            norm = norm.max(report.reduced_norm);
            per_mode_norm.insert(n, report);
            components.insert(n, component);
        }
        Ok(Decomposition {
            per_mode_norm,
            norm,
            components,
        })
    }

    pub fn mode_unitary(&self, u: UnitId, n: i64) -> Result<ModeUnitary> {
        let g = self.groupoid();
        if u >= g.num_units() {
            return Err(Error::UnknownUnit(u));
        }
        Ok(ModeUnitary {
            unit: u,
            mode: n,
            basis: g.arrows_with_source(u).to_vec(),
        })
    }

    /// `<s^{-m} (x) xi, s^{-n} (x) zeta>` in `L^2(G^w, tau x lambda_u)`.
    /// `xi` and `zeta` are functions on all arrows, supported on `s^-1(u)`.
    pub fn mode_inner(&self, m: i64, xi: &[Complex64], n: i64, zeta: &[Complex64]) -> Complex64 {
        let g = self.groupoid();
        let mut acc = ZERO;
        for a in g.arrows() {
            let point = ExtPoint {
                phase: Phase::var_t(),
                arrow: a,
            };
            let x = Self::eval_mode(m, xi, point);
            let z = Self::eval_mode(n, zeta, point);
            // conj(t^e) = t^-e
            if x.t_exp - z.t_exp == 0 {
                acc += x.coeff * z.coeff.conj();
            }
        }
        acc
    }

    fn check_window(f: &LaurentElement, window: &RangeInclusive<i64>) -> Result<()> {
        let missing: Vec<i64> = f.support().into_iter().filter(|n| !window.contains(n)).collect();
        if missing.is_empty() {
            Ok(())
        } else {
            Err(Error::WindowTooSmall {
                window: format!("{}..{}", window.start(), window.end()),
                missing,
            })
        }
    }

    /// Matrix of `R^u(F)` on `span{ s^{-m} (x) delta_h : m in window, h in s^-1(u) }`,
    /// obtained by convolving `F` with each basis vector on the extension.
    pub fn regular_block(
        &self,
        f: &LaurentElement,
        u: UnitId,
        window: &RangeInclusive<i64>,
    ) -> Result<CMatrix> {
        self.check(f)?;
        Self::check_window(f, window)?;
        let g = self.groupoid();
        if u >= g.num_units() {
            return Err(Error::UnknownUnit(u));
        }
        let fibre = g.arrows_with_source(u);
        let modes: Vec<i64> = window.clone().collect();
        let dim = modes.len() * fibre.len();
        let mut out = CMatrix::zeros(dim, dim);
        let fm = Self::to_modes(f);
        for (mi, &m) in modes.iter().enumerate() {
            for (hi, &h) in fibre.iter().enumerate() {
                let mut basis = vec![ZERO; g.num_arrows()];
                basis[h] = Complex64::new(1.0, 0.0);
                let image = self.convolve_modes(&fm, &Modes::from([(m, basis)]));
                let col = mi * fibre.len() + hi;
                for (ni, &n) in modes.iter().enumerate() {
                    for (gi, &target) in fibre.iter().enumerate() {
                        let mut probe = vec![ZERO; g.num_arrows()];
                        probe[target] = Complex64::new(1.0, 0.0);
                        let row = ni * fibre.len() + gi;
                        out[(row, col)] = image
                            .iter()
                            .map(|(&p, v)| self.mode_inner(p, v, n, &probe))
                            .sum();
                    }
                }
            }
        }
        Ok(out)
    }

    /// Compares `R^u(F)` with `V (sum_n L_n^u(Upsilon_n F)) V*` on the window.
    pub fn intertwine_check(
        &self,
        f: &LaurentElement,
        u: UnitId,
        window: RangeInclusive<i64>,
    ) -> Result<IntertwineResidual> {
        let r = self.regular_block(f, u, &window)?;
        let mut blocks = Vec::new();
        let mut isometry_residual: f64 = 0.0;
        let fibre = self.groupoid().arrows_with_source(u).to_vec();
        for n in window.clone() {
            let component = self.upsilon(f, n)?;
            blocks.push(self.algebra(n).regular_rep(&component, u)?.matrix);
            let v = self.mode_unitary(u, n)?;
            for m in window.clone() {
                for (i, _) in v.basis.iter().enumerate() {
                    for (j, _) in fibre.iter().enumerate() {
                        let (mut xi, mut zeta) =
                            (vec![ZERO; self.groupoid().num_arrows()], vec![ZERO; self.groupoid().num_arrows()]);
                        xi[v.basis[i]] = Complex64::new(1.0, 0.0);
                        zeta[fibre[j]] = Complex64::new(1.0, 0.0);
                        let expected = if m == n && i == j { 1.0 } else { 0.0 };
                        let got = self.mode_inner(n, &xi, m, &zeta);
                        isometry_residual =
                            isometry_residual.max((got - Complex64::new(expected, 0.0)).norm());
                    }
                }
            }
        }
        let l = linalg::block_diagonal(&blocks);
        let residual = if r.is_empty() {
            0.0
        } else {
            linalg::max_entry_diff(&r, &l)
        };
        let max_mode_norm = blocks.iter().map(linalg::spectral_norm).fold(0.0, f64::max);
        Ok(IntertwineResidual {
            unit: u,
            window: (*window.start(), *window.end()),
            dimension: r.nrows(),
            residual,
            isometry_residual,
            extension_norm: linalg::spectral_norm(&r),
            max_mode_norm,
        })
    }

    /// For each sample, compares `||R^u(F)||` with `max_n ||L_n^u(Upsilon_n F)||`
    /// at every unit.
    pub fn reduced_decompose_check(
        &self,
        samples: &[LaurentElement],
    ) -> Result<ReducedDecompositionCertificate> {
        let mut max_deviation: f64 = 0.0;
        let mut max_residual: f64 = 0.0;
        let mut per_sample_norms = Vec::with_capacity(samples.len());
        for f in samples {
            let support = f.support();
            let window = match (support.first(), support.last()) {
                (Some(&a), Some(&b)) => a..=b,
                _ => 0..=0,
            };
            let (mut ext, mut modes): (f64, f64) = (0.0, 0.0);
            for u in self.groupoid().units() {
                let check = self.intertwine_check(f, u, window.clone())?;
                max_deviation = max_deviation.max((check.extension_norm - check.max_mode_norm).abs());
                max_residual = max_residual.max(check.residual);
                ext = ext.max(check.extension_norm);
                modes = modes.max(check.max_mode_norm);
            }
            per_sample_norms.push((ext, modes));
        }
        Ok(ReducedDecompositionCertificate {
            samples: samples.len(),
            max_deviation,
            max_intertwine_residual: max_residual,
            per_sample_norms,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cocycle::turn;
    use crate::groupoid::{abelian_group, pair_groupoid};

    fn pauli() -> CircleExtension {
        let g = Arc::new(abelian_group(&[2, 2]).unwrap());
        let w = TwoCocycle::from_fn(g, |x, y| turn(((x % 2) * (y / 2)) as i64, 2));
        CircleExtension::new(Arc::new(w)).unwrap()
    }

    fn pair2() -> CircleExtension {
        let g = Arc::new(pair_groupoid(2).unwrap());
        CircleExtension::new(Arc::new(TwoCocycle::trivial(g))).unwrap()
    }

    #[test]
    fn mode_zero_is_untwisted_convolution() {
        let e = pair2();
        let g = e.groupoid().clone();
        let (a12, a21, a11) = (
            g.arrow_by_name("(1,2)").unwrap(),
            g.arrow_by_name("(2,1)").unwrap(),
            g.arrow_by_name("(1,1)").unwrap(),
        );
        let p = e.product(&e.monomial(0, a12), &e.monomial(0, a21)).unwrap();
        assert_eq!(p, e.monomial(0, a11));
    }

    #[test]
    fn cross_mode_products_vanish() {
        let e = pauli();
        for a in 0..4 {
            for b in 0..4 {
                let p = e.product(&e.monomial(1, a), &e.monomial(0, b)).unwrap();
                assert!(p.is_zero());
            }
        }
    }

    #[test]
    fn pauli_mode_one_square() {
        let e = pauli();
        let x = e.groupoid().arrow_by_name("(0,1)").unwrap();
        let p = e.product(&e.monomial(1, x), &e.monomial(1, x)).unwrap();
        assert_eq!(p, e.monomial(1, 0));
    }

    #[test]
    fn chi_projects_onto_modes() {
        let e = pauli();
        let f = e.monomial(1, 1).add(&e.monomial(0, 2));
        assert_eq!(e.chi(&f, 1).unwrap(), e.monomial(1, 1));
        assert_eq!(e.chi(&f, 0).unwrap(), e.monomial(0, 2));
        assert!(e.chi(&f, 2).unwrap().is_zero());
    }

    #[test]
    fn upsilon_extracts_the_component() {
        let e = pauli();
        let alg = e.algebra(-2);
        let f = &alg.delta(3) * Complex64::new(0.5, -1.0);
        let lifted = e.embed(&f).unwrap();
        assert_eq!(lifted.support(), vec![-2]);
        assert_eq!(e.upsilon(&lifted, -2).unwrap(), f);
        assert!(e.upsilon(&lifted, 2).unwrap().is_zero());
    }

    #[test]
    fn involution_matches_componentwise_star() {
        let e = pauli();
        let a = e.groupoid().arrow_by_name("(1,1)").unwrap();
        let star = e.involute(&e.monomial(1, a)).unwrap();
        // w((1,1),(1,1)) = -1 in mode 1
        assert_eq!(star, e.element(BTreeMap::from([(1, {
            let mut v = vec![ZERO; 4];
            v[a] = Complex64::new(-1.0, 0.0);
            v
        })])).unwrap());
    }

    #[test]
    fn decompose_examples() {
        let e = pauli();
        let d = e.decompose(&e.identity()).unwrap();
        assert!((d.norm - 1.0).abs() < 1e-12);
        assert_eq!(d.per_mode_norm.keys().copied().collect::<Vec<_>>(), vec![0]);

        let x = e.groupoid().arrow_by_name("(0,1)").unwrap();
        let f = e.monomial(1, x).add(&e.monomial(0, 0));
        let d = e.decompose(&f).unwrap();
        assert!((d.per_mode_norm[&0].reduced_norm - 1.0).abs() < 1e-12);
        assert!((d.per_mode_norm[&1].reduced_norm - 1.0).abs() < 1e-12);
        assert!((d.norm - 1.0).abs() < 1e-12);

        let d = e.decompose(&e.zero()).unwrap();
        assert_eq!(d.norm, 0.0);
        assert!(d.components.is_empty());
    }

    #[test]
    fn intertwining_on_matrix_unit() {
        let e = pair2();
        let a12 = e.groupoid().arrow_by_name("(1,2)").unwrap();
        let check = e.intertwine_check(&e.monomial(0, a12), 0, 0..=0).unwrap();
        assert_eq!(check.residual, 0.0);
        assert_eq!(check.isometry_residual, 0.0);
        assert!((check.extension_norm - 1.0).abs() < 1e-12);
    }

    #[test]
    fn intertwining_needs_a_wide_enough_window() {
        let e = pauli();
        let f = e.monomial(2, 0).add(&e.monomial(-1, 1));
        match e.intertwine_check(&f, 0, 0..=1) {
            Err(Error::WindowTooSmall { missing, .. }) => assert_eq!(missing, vec![-1, 2]),
            other => panic!("expected window error, got {other:?}"),
        }
    }

    #[test]
    fn mode_unitaries_are_orthogonal() {
        let e = pauli();
        let xi = vec![Complex64::new(1.0, 2.0), ZERO, Complex64::new(0.0, -1.0), ZERO];
        let zeta = vec![Complex64::new(3.0, 0.0), ZERO, Complex64::new(1.0, 1.0), ZERO];
        let same = e.mode_inner(2, &xi, 2, &zeta);
        let plain: Complex64 = xi.iter().zip(&zeta).map(|(x, z)| x * z.conj()).sum();
        assert_eq!(same, plain);
        assert_eq!(e.mode_inner(1, &xi, 2, &zeta), ZERO);
    }

    #[test]
    fn modes_agree_with_twisted_convolution() {
        let g = Arc::new(abelian_group(&[3, 3]).unwrap());
        let w = TwoCocycle::from_fn(g, |x, y| turn(((x % 3) * (y / 3)) as i64, 3));
        let e = CircleExtension::new(Arc::new(w)).unwrap();
        for n in [-2, -1, 1, 2, 4] {
            let alg = e.algebra(n);
            for a in 0..9 {
                for b in 0..9 {
                    let expected = alg.convolve(&alg.delta(a), &alg.delta(b)).unwrap();
                    let got = e.product(&e.monomial(n, a), &e.monomial(n, b)).unwrap();
                    assert!(e.upsilon(&got, n).unwrap().max_abs_diff(&expected) < 1e-12);
                    assert_eq!(got.support(), vec![n]);
                }
                let star = e.involute(&e.monomial(n, a)).unwrap();
                let expected = alg.involute(&alg.delta(a)).unwrap();
                assert!(e.upsilon(&star, n).unwrap().max_abs_diff(&expected) < 1e-12);
            }
        }
    }

    #[test]
    fn non_normalized_cocycles_are_rejected() {
        let g = Arc::new(abelian_group(&[2]).unwrap());
        let w = TwoCocycle::from_fn(g, |_, _| turn(1, 3));
        assert!(CircleExtension::new(Arc::new(w)).is_err());
    }
}
