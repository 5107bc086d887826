//! The fixed-point algebra of a principal finite groupoid and the left
//! inner product of the imprimitivity bimodule `C(G^0)`.

use std::ops::RangeInclusive;
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::algebra::{AlgebraElement, TwistedAlgebra};
use crate::error::{Error, Result};
use crate::extension::{CircleExtension, LaurentElement};
use crate::groupoid::{FiniteGroupoid, UnitId};
use crate::linalg::{self, SpanBuilder};

/// Lower bound accepted for eigenvalues of a positive operator.
pub const POSITIVITY_TOL: f64 = 1e-12;

/// Functions on the orbit space `G \ G^0` with pointwise operations.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FixedPointAlgebra {
    pub orbit_of: Vec<usize>,
    pub orbits: Vec<Vec<UnitId>>,
}

impl FixedPointAlgebra {
    pub fn dimension(&self) -> usize {
        self.orbits.len()
    }

    pub fn multiply(&self, f: &[Complex64], g: &[Complex64]) -> Vec<Complex64> {
        f.iter().zip(g).map(|(a, b)| a * b).collect()
    }

    pub fn involute(&self, f: &[Complex64]) -> Vec<Complex64> {
        f.iter().map(Complex64::conj).collect()
    }

    /// The orbit-constant function on units determined by `f`.
    pub fn on_units(&self, f: &[Complex64]) -> Vec<Complex64> {
        self.orbit_of.iter().map(|&o| f[o]).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FullnessCertificate {
    pub ideal_dimension: usize,
    pub algebra_dimension: usize,
    pub orbits: usize,
    pub full: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SaturationReport {
    pub window: (i64, i64),
    pub ideal_dimension: usize,
    /// Dimension of the mode-0 summand, `|arrows|`.
    pub mode_zero_dimension: usize,
    /// Largest coefficient of an ideal basis vector outside mode 0.
    pub off_mode_mass: f64,
}

fn require_principal(g: &FiniteGroupoid) -> Result<()> {
    match g.principal_witness() {
        None => Ok(()),
        Some(a) => Err(Error::HypothesesNotMet(format!(
            "groupoid is not principal (arrow {} has trivial endpoints)",
            g.arrow_name(a)
        ))),
    }
}

pub fn fixed_point_algebra(g: &FiniteGroupoid) -> Result<FixedPointAlgebra> {
    require_principal(g)?;
    let orbits = g.orbits();
    Ok(FixedPointAlgebra {
        orbit_of: orbits.orbit_of,
        orbits: orbits.orbits,
    })
}

/// `<f, g>(x) = f(r(x)) conj g(s(x))`, an element of the mode-0 algebra.
pub fn left_inner(alg: &TwistedAlgebra, f: &[Complex64], g: &[Complex64]) -> Result<AlgebraElement> {
    if alg.power() != 0 {
        return Err(Error::TagMismatch(format!(
            "left inner products take values in the untwisted algebra, not power {}",
            alg.power()
        )));
    }
    let base = alg.groupoid();
    require_principal(base)?;
    if f.len() != base.num_units() || g.len() != base.num_units() {
        return Err(Error::InvalidArgument(format!(
            "bimodule elements need {} values",
            base.num_units()
        )));
    }
    alg.element(
        base.arrows()
            .map(|x| f[base.range(x)] * g[base.source(x)].conj())
            .collect(),
    )
}

fn unit_delta(n: usize, u: UnitId) -> Vec<Complex64> {
    let mut v = vec![Complex64::new(0.0, 0.0); n];
    v[u] = Complex64::new(1.0, 0.0);
    v
}

/// Dimension of the two-sided ideal of `C(G)` generated by all
/// `<delta_u, delta_v>`, by span closure under convolution with the delta basis.
pub fn fullness_check(g: &Arc<FiniteGroupoid>) -> Result<FullnessCertificate> {
    require_principal(g)?;
    let alg = TwistedAlgebra::untwisted(g.clone());
    let n = g.num_units();
    let mut span = SpanBuilder::new();
    let mut queue = Vec::new();
    for u in g.units() {
        for v in g.units() {
            let x = left_inner(&alg, &unit_delta(n, u), &unit_delta(n, v))?;
            if span.insert(x.coeffs()) {
                queue.push(x);
            }
        }
    }
    while let Some(x) = queue.pop() {
        for a in g.arrows() {
            let d = alg.delta(a);
            for y in [alg.convolve(&d, &x)?, alg.convolve(&x, &d)?] {
                if span.insert(y.coeffs()) {
                    queue.push(y);
                }
            }
        }
    }
    Ok(FullnessCertificate {
        ideal_dimension: span.dim(),
        algebra_dimension: g.num_arrows(),
        orbits: g.orbits().orbits.len(),
        full: span.dim() == g.num_arrows(),
    })
}

/// Smallest eigenvalue of `Pi^u(<f, f>)` over all units.
pub fn positivity_margin(alg: &TwistedAlgebra, f: &[Complex64]) -> Result<f64> {
    let x = left_inner(alg, f, f)?;
    let mut least = f64::INFINITY;
    for u in alg.groupoid().units() {
        let m = alg.regular_rep(&x, u)?.matrix;
        least = least.min(linalg::min_hermitian_eigenvalue(&m));
    }
    Ok(if least.is_finite() { least } else { 0.0 })
}

pub fn positivity_check(alg: &TwistedAlgebra, f: &[Complex64]) -> Result<bool> {
    Ok(positivity_margin(alg, f)? >= -POSITIVITY_TOL)
}

/// `<f, g>` as a function on the extension: `(t, x) -> f(r(x)) conj g(s(x))`.
pub fn lifted_inner(ext: &CircleExtension, f: &[Complex64], g: &[Complex64]) -> Result<LaurentElement> {
    ext.embed(&left_inner(&ext.algebra(0), f, g)?)
}

/// Largest deviation from mode-0 homogeneity of the lifted inner product,
/// measured by the circle averages `chi_n` over the window.
pub fn mode_zero_deviation(
    ext: &CircleExtension,
    f: &[Complex64],
    g: &[Complex64],
    window: RangeInclusive<i64>,
) -> Result<f64> {
    let x = lifted_inner(ext, f, g)?;
    let mut worst = ext.chi(&x, 0)?.max_abs_diff(&x);
    for n in window.filter(|&n| n != 0) {
        worst = worst.max(ext.chi(&x, n)?.max_abs_diff(&ext.zero()));
    }
    Ok(worst)
}

/// Closes the lifted inner products under left and right multiplication by
/// `s^{-m} (x) delta_a` for `m` in the window and reports how much of the
/// resulting ideal lies outside mode 0.
pub fn saturation_report(ext: &CircleExtension, window: RangeInclusive<i64>) -> Result<SaturationReport> {
    let g = ext.groupoid().clone();
    require_principal(&g)?;
    let modes: Vec<i64> = window.clone().collect();
    let n_arrows = g.num_arrows();
    let flatten = |x: &LaurentElement| -> Option<Vec<Complex64>> {
        let mut v = vec![Complex64::new(0.0, 0.0); modes.len() * n_arrows];
        for (n, f) in x.modes() {
            let slot = modes.iter().position(|&m| m == n)?;
            v[slot * n_arrows..(slot + 1) * n_arrows].copy_from_slice(f.coeffs());
        }
        Some(v)
    };
    let multipliers: Vec<LaurentElement> = modes
        .iter()
        .flat_map(|&m| g.arrows().map(move |a| (m, a)))
        .map(|(m, a)| ext.monomial(m, a))
        .collect();
    let mut span = SpanBuilder::new();
    let mut queue = Vec::new();
    let mut off_mode_mass: f64 = 0.0;
    let zero_slot = modes.iter().position(|&m| m == 0);
    let mut admit = |x: LaurentElement, span: &mut SpanBuilder, queue: &mut Vec<LaurentElement>| {
        for (n, f) in x.modes() {
            if n != 0 {
                off_mode_mass = off_mode_mass.max(f.max_abs());
            }
        }
        match flatten(&x) {
            Some(v) if span.insert(&v) => queue.push(x),
            Some(_) => {}
            // a product left the window; it cannot be mode 0, so record it
            None => off_mode_mass = off_mode_mass.max(x.modes().map(|(_, f)| f.max_abs()).fold(0.0, f64::max)),
        }
    };
    let n_units = g.num_units();
    for u in g.units() {
        for v in g.units() {
            let x = lifted_inner(ext, &unit_delta(n_units, u), &unit_delta(n_units, v))?;
            admit(x, &mut span, &mut queue);
        }
    }
    while let Some(x) = queue.pop() {
        for d in &multipliers {
            admit(ext.product(d, &x)?, &mut span, &mut queue);
            admit(ext.product(&x, d)?, &mut span, &mut queue);
        }
    }
    Ok(SaturationReport {
        window: (*window.start(), *window.end()),
        ideal_dimension: span.dim(),
        mode_zero_dimension: if zero_slot.is_some() { n_arrows } else { 0 },
        off_mode_mass,
    })
}
