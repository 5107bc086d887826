//! Circle-valued 2-cocycles on finite groupoids and their coboundary calculus.

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, HashMap};
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::circle::{Angle, CircleScalar};
use crate::error::{Error, Result};
use crate::groupoid::{cover_groupoid, cover_units, ArrowId, FiniteCover, FiniteGroupoid};
use crate::validation::ValidationReport;

/// A map from composable pairs to the circle, stored sparsely with default 1.
#[derive(Clone, Debug)]
pub struct TwoCocycle {
    base: Arc<FiniteGroupoid>,
    values: BTreeMap<(ArrowId, ArrowId), CircleScalar>,
    identity_checked: bool,
    normalized: bool,
    fingerprint: u64,
}

/// A circle-valued function on arrows.
#[derive(Clone, Debug, PartialEq)]
pub struct OneCochain {
    pub values: Vec<CircleScalar>,
}

impl OneCochain {
    pub fn constant(n_arrows: usize, value: CircleScalar) -> Self {
        OneCochain {
            values: vec![value; n_arrows],
        }
    }

    pub fn get(&self, a: ArrowId) -> CircleScalar {
        self.values[a]
    }

    pub fn is_exact(&self) -> bool {
        self.values.iter().all(CircleScalar::is_exact)
    }
}

impl TwoCocycle {
    /// Builds a cocycle from its values on composable pairs. Pairs absent
    /// from `entries` take the value 1.
    pub fn from_entries(
        base: Arc<FiniteGroupoid>,
        entries: impl IntoIterator<Item = ((ArrowId, ArrowId), CircleScalar)>,
    ) -> Result<Self> {
        let mut values = BTreeMap::new();
        for ((a, b), w) in entries {
            if a >= base.num_arrows() || b >= base.num_arrows() || !base.is_composable(a, b) {
                return Err(Error::InvalidArgument(format!(
                    "cocycle entry ({a}, {b}) is not a composable pair"
                )));
            }
            if !w.is_one() || !w.is_exact() {
                values.insert((a, b), w);
            }
        }
        Ok(Self::assemble(base, values))
    }

    pub fn from_fn(
        base: Arc<FiniteGroupoid>,
        f: impl Fn(ArrowId, ArrowId) -> CircleScalar,
    ) -> Self {
        let values = base
            .composable_pairs()
            .map(|(a, b)| ((a, b), f(a, b)))
            .filter(|(_, w)| !(w.is_one() && w.is_exact()))
            .collect();
        Self::assemble(base, values)
    }

    pub fn trivial(base: Arc<FiniteGroupoid>) -> Self {
        Self::assemble(base, BTreeMap::new())
    }

    fn assemble(
        base: Arc<FiniteGroupoid>,
        values: BTreeMap<(ArrowId, ArrowId), CircleScalar>,
    ) -> Self {
        let mut hasher = DefaultHasher::new();
        base.fingerprint().hash(&mut hasher);
        for (&(a, b), w) in &values {
            (a, b).hash(&mut hasher);
            match w {
                CircleScalar::Exact(angle) => (0u8, angle.num(), angle.den()).hash(&mut hasher),
                CircleScalar::Approx(z) => (1u8, z.re.to_bits(), z.im.to_bits()).hash(&mut hasher),
            }
        }
        let mut w = TwoCocycle {
            base,
            values,
            identity_checked: false,
            normalized: false,
            fingerprint: hasher.finish(),
        };
        w.identity_checked = w.check_identity().is_empty();
        w.normalized = w.check_normalized().is_empty();
        w
    }

    pub fn base(&self) -> &Arc<FiniteGroupoid> {
        &self.base
    }

    /// True when the cocycle identity was verified on every composable triple.
    pub fn identity_checked(&self) -> bool {
        self.identity_checked
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    pub fn is_exact(&self) -> bool {
        self.values.values().all(CircleScalar::is_exact)
    }

    /// Value at a composable pair; 1 for pairs not stored.
    pub fn value(&self, a: ArrowId, b: ArrowId) -> CircleScalar {
        self.values.get(&(a, b)).copied().unwrap_or(CircleScalar::ONE)
    }

    /// Stored (non-unit) entries in pair order.
    pub fn entries(&self) -> impl Iterator<Item = ((ArrowId, ArrowId), CircleScalar)> + '_ {
        self.values.iter().map(|(&p, &w)| (p, w))
    }

    /// Smallest `k` with every value a `k`-th root of unity, for exact cocycles.
    pub fn root_order(&self) -> Option<u32> {
        let mut k: i64 = 1;
        for w in self.values.values() {
            k = k.lcm(&w.angle()?.den());
        }
        u32::try_from(k).ok()
    }

    pub fn check_identity(&self) -> ValidationReport {
        let g = &self.base;
        let mut report = ValidationReport::default();
        for (a, b) in g.composable_pairs() {
            let ab = g.compose(a, b).expect("validated groupoid");
            for &c in g.arrows_with_range(g.source(b)) {
                let bc = g.compose(b, c).expect("validated groupoid");
                let lhs = self.value(a, b) * self.value(ab, c);
                let rhs = self.value(b, c) * self.value(a, bc);
                if lhs != rhs {
                    report.push(
                        "cocycle_identity",
                        vec![
                            g.arrow_name(a).to_string(),
                            g.arrow_name(b).to_string(),
                            g.arrow_name(c).to_string(),
                        ],
                        format!("w(a,b) w(ab,c) = {lhs} but w(b,c) w(a,bc) = {rhs}"),
                    );
                }
            }
        }
        report
    }

    pub fn check_normalized(&self) -> ValidationReport {
        let g = &self.base;
        let mut report = ValidationReport::default();
        for a in g.arrows() {
            let left = self.value(g.unit_arrow(g.range(a)), a);
            let right = self.value(a, g.unit_arrow(g.source(a)));
            if !left.is_one() || !right.is_one() {
                report.push(
                    "normalization",
                    vec![g.arrow_name(a).to_string()],
                    format!("w(r(g), g) = {left}, w(g, s(g)) = {right}"),
                );
            }
        }
        report
    }

    fn require_identity(&self) -> Result<()> {
        if self.identity_checked {
            Ok(())
        } else {
            Err(Error::Precondition(
                "cocycle identity does not hold".into(),
            ))
        }
    }

    fn require_normalized(&self) -> Result<()> {
        self.require_identity()?;
        if self.normalized {
            Ok(())
        } else {
            Err(Error::Precondition("cocycle is not normalized".into()))
        }
    }

    /// `w * conj(db)` with `b(g) = w(r(g), g)`; returns the normalized cocycle
    /// and `b`, so that the input equals `result * coboundary(b)`.
    pub fn normalize(&self) -> Result<(TwoCocycle, OneCochain)> {
        self.require_identity()?;
        let g = &self.base;
        let b = OneCochain {
            values: g
                .arrows()
                .map(|a| self.value(g.unit_arrow(g.range(a)), a))
                .collect(),
        };
        let db = coboundary(g, &b);
        let normalized = TwoCocycle::from_fn(g.clone(), |x, y| self.value(x, y) * db.value(x, y).conj());
        Ok((normalized, b))
    }

    pub fn power(&self, n: i64) -> Result<TwoCocycle> {
        self.require_identity()?;
        let values = self
            .values
            .iter()
            .map(|(&p, w)| (p, w.pow(n)))
            .filter(|(_, w)| !(w.is_one() && w.is_exact()))
            .collect();
        Ok(Self::assemble(self.base.clone(), values))
    }

    /// Pointwise product.
    pub fn multiply(&self, other: &TwoCocycle) -> Result<TwoCocycle> {
        if self.base.fingerprint() != other.base.fingerprint() {
            return Err(Error::InvalidArgument(
                "cocycles live on different groupoids".into(),
            ));
        }
        Ok(TwoCocycle::from_fn(self.base.clone(), |a, b| {
            self.value(a, b) * other.value(a, b)
        }))
    }

    /// Largest pointwise distance on composable pairs.
    pub fn max_distance(&self, other: &TwoCocycle) -> f64 {
        self.base
            .composable_pairs()
            .map(|(a, b)| self.value(a, b).distance(&other.value(a, b)))
            .fold(0.0, f64::max)
    }

    /// Pointwise equality (exact for exact values).
    pub fn same_values(&self, other: &TwoCocycle) -> bool {
        self.base
            .composable_pairs()
            .all(|(a, b)| self.value(a, b) == other.value(a, b))
    }

    /// Writes the cocycle as a coboundary on a principal groupoid:
    /// `b(g) = w(g, alpha_g)` with `alpha_g` the arrow from the base unit of
    /// the orbit (its minimal unit) to `s(g)`.
    pub fn trivialize_principal(&self) -> Result<OneCochain> {
        let g = &self.base;
        if let Some(a) = g.principal_witness() {
            return Err(Error::IsotropyObstruction {
                arrow: g.arrow_name(a).to_string(),
            });
        }
        self.require_normalized()?;
        let orbits = g.orbits();
        let b = OneCochain {
            values: g
                .arrows()
                .map(|a| {
                    let base_unit = orbits.orbits[orbits.orbit_of[g.source(a)]][0];
                    let alpha = g
                        .arrow_between(g.source(a), base_unit)
                        .expect("units in one orbit are joined by an arrow");
                    self.value(a, alpha)
                })
                .collect(),
        };
        let db = coboundary(g, &b);
        if !db.same_values(self) {
            return Err(Error::Internal(
                "trivializing cochain does not reproduce the cocycle".into(),
            ));
        }
        Ok(b)
    }

    /// Decides whether the class of an exact cocycle is trivial and, if so,
    /// returns a cochain `b` with `coboundary(b) = w`.
    ///
    /// Angles are lifted to `Q`; the system `beta(a) + beta(b) - beta(ab) = theta(a,b)`
    /// must hold modulo `Z`. The integer matrix is diagonalised by unimodular
    /// row and column operations; rows with zero pivot give the integrality
    /// conditions, the others are solved directly. The candidate is then
    /// checked pointwise.
    pub fn solve_coboundary(&self) -> Result<Option<OneCochain>> {
        if !self.is_exact() {
            return Err(Error::ExactAnglesRequired);
        }
        let g = &self.base;
        let pairs: Vec<(ArrowId, ArrowId)> = g.composable_pairs().collect();
        let n = g.num_arrows();
        let mut matrix: Vec<Vec<BigInt>> = Vec::with_capacity(pairs.len());
        let mut rhs: Vec<BigRational> = Vec::with_capacity(pairs.len());
        for &(a, b) in &pairs {
            let mut row = vec![BigInt::zero(); n];
            let ab = g.compose(a, b).expect("validated groupoid");
            row[a] += 1;
            row[b] += 1;
            row[ab] -= 1;
            matrix.push(row);
            let angle = self.value(a, b).angle().expect("exact");
            rhs.push(BigRational::new(angle.num().into(), angle.den().into()));
        }
        let Some(beta) = solve_mod_integers(matrix, rhs, n) else {
            return Ok(None);
        };
        let b = OneCochain {
            values: beta
                .iter()
                .map(|q| {
                    let num = q.numer().to_i64().expect("small numerator");
                    let den = q.denom().to_i64().expect("small denominator");
                    CircleScalar::exact(num, den).expect("positive denominator")
                })
                .collect(),
        };
        if coboundary(g, &b).same_values(self) {
            Ok(Some(b))
        } else {
            Err(Error::Internal(
                "coboundary solver produced a cochain that fails verification".into(),
            ))
        }
    }
}

/// `db(g, h) = b(g) b(h) conj(b(gh))`.
pub fn coboundary(base: &Arc<FiniteGroupoid>, b: &OneCochain) -> TwoCocycle {
    TwoCocycle::from_fn(base.clone(), |x, y| {
        let xy = base.compose(x, y).expect("composable pair");
        b.get(x) * b.get(y) * b.get(xy).conj()
    })
}

/// Solves `M beta = theta (mod Z^rows)` over `Q`, returning `beta` reduced
/// to `[0, 1)`, or `None` if no solution exists.
fn solve_mod_integers(
    mut m: Vec<Vec<BigInt>>,
    mut theta: Vec<BigRational>,
    cols: usize,
) -> Option<Vec<BigRational>> {
    let rows = m.len();
    // Column operations are accumulated in `c`, so that M c = (row-reduced) D.
    let mut c: Vec<Vec<BigInt>> = (0..cols)
        .map(|i| (0..cols).map(|j| BigInt::from((i == j) as i32)).collect())
        .collect();
    let mut rank = 0;
    while rank < rows.min(cols) {
        // Choose the smallest nonzero entry in the remaining block as pivot.
        let mut pivot: Option<(usize, usize)> = None;
        for i in rank..rows {
            for j in rank..cols {
                if !m[i][j].is_zero()
                    && pivot.is_none_or(|(pi, pj)| m[i][j].abs() < m[pi][pj].abs())
                {
                    pivot = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = pivot else { break };
        m.swap(rank, pi);
        theta.swap(rank, pi);
        for row in m.iter_mut() {
            row.swap(rank, pj);
        }
        for row in c.iter_mut() {
            row.swap(rank, pj);
        }
        loop {
            let p = m[rank][rank].clone();
            let mut clean = true;
            for i in rank + 1..rows {
                if m[i][rank].is_zero() {
                    continue;
                }
                let q = m[i][rank].div_floor(&p);
                for j in rank..cols {
                    let t = &m[rank][j] * &q;
                    m[i][j] -= t;
                }
                let t = &theta[rank] * BigRational::from_integer(q.clone());
                theta[i] -= t;
                if !m[i][rank].is_zero() {
                    clean = false;
                }
            }
            for j in rank + 1..cols {
                if m[rank][j].is_zero() {
                    continue;
                }
                let q = m[rank][j].div_floor(&p);
                for i in 0..rows {
                    let t = &m[i][rank] * &q;
                    m[i][j] -= t;
                }
                for i in 0..cols {
                    let t = &c[i][rank] * &q;
                    c[i][j] -= t;
                }
                if !m[rank][j].is_zero() {
                    clean = false;
                }
            }
            if clean {
                break;
            }
            // A remainder smaller than the pivot appeared; move it into the pivot slot.
            let mut best = (rank, rank);
            for i in rank..rows {
                if !m[i][rank].is_zero() && m[i][rank].abs() < m[best.0][best.1].abs() {
                    best = (i, rank);
                }
            }
            for j in rank..cols {
                if !m[rank][j].is_zero() && m[rank][j].abs() < m[best.0][best.1].abs() {
                    best = (rank, j);
                }
            }
            if best.0 != rank {
                m.swap(rank, best.0);
                theta.swap(rank, best.0);
            }
            if best.1 != rank {
                for row in m.iter_mut() {
                    row.swap(rank, best.1);
                }
                for row in c.iter_mut() {
                    row.swap(rank, best.1);
                }
            }
        }
        rank += 1;
    }
    // Rows without a pivot read 0 = theta_i (mod 1).
    if theta[rank..].iter().any(|t| !t.is_integer()) {
        return None;
    }
    let y: Vec<BigRational> = (0..cols)
        .map(|j| {
            if j < rank {
                &theta[j] / BigRational::from_integer(m[j][j].clone())
            } else {
                BigRational::zero()
            }
        })
        .collect();
    Some(
        (0..cols)
            .map(|i| {
                let v = (0..cols).fold(BigRational::zero(), |acc, j| {
                    acc + BigRational::from_integer(c[i][j].clone()) * &y[j]
                });
                let v = &v - v.floor();
                if v == BigRational::one() {
                    BigRational::zero()
                } else {
                    v
                }
            })
            .collect(),
    )
}

/// The cocycle `w_lambda(((x,i),(x,j)), ((x,j),(x,k))) = lambda(i, j, k, x)` on the
/// cover groupoid. `lambda` is consulted on every triple overlap that
/// occurs in a composable pair; `None` there is an error.
pub fn cech_cocycle(
    cover: &FiniteCover,
    lambda: impl Fn(usize, usize, usize, usize) -> Option<CircleScalar>,
) -> Result<TwoCocycle> {
    let g = Arc::new(cover_groupoid(cover)?);
    let units = cover_units(cover);
    let mut entries = Vec::new();
    for (a, b) in g.composable_pairs() {
        let (x, i) = units[g.range(a)];
        let (_, j) = units[g.source(a)];
        let (_, k) = units[g.source(b)];
        let w = lambda(i, j, k, x).ok_or(Error::MissingCechValue { i, j, k, x })?;
        entries.push(((a, b), w));
    }
    TwoCocycle::from_entries(g, entries)
}

/// A Cech 2-cochain given by its values on triple overlaps, keyed by `(i, j, k, x)`.
pub fn cech_table(values: &HashMap<(usize, usize, usize, usize), CircleScalar>)
    -> impl Fn(usize, usize, usize, usize) -> Option<CircleScalar> + '_ {
    move |i, j, k, x| values.get(&(i, j, k, x)).copied()
}

/// The Cech coboundary `mu_ij mu_jk conj(mu_ik)` of a 1-cochain given on
/// ordered pairs of cover indices (constant in the point).
pub fn cech_coboundary(mu: impl Fn(usize, usize) -> CircleScalar)
    -> impl Fn(usize, usize, usize, usize) -> Option<CircleScalar> {
    move |i, j, k, _x| Some(mu(i, j) * mu(j, k) * mu(i, k).conj())
}

/// Exact angle helper for tests and fixtures.
pub fn turn(num: i64, den: i64) -> CircleScalar {
    CircleScalar::Exact(Angle::new(num, den).expect("positive denominator"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupoid::{abelian_group, cyclic_group, pair_groupoid};

    fn pauli() -> TwoCocycle {
        let g = Arc::new(abelian_group(&[2, 2]).unwrap());
        // element index = 2a + b for (a, b)
        TwoCocycle::from_fn(g, |x, y| {
            let (b, c) = (x % 2, y / 2);
            turn((b * c) as i64, 2)
        })
    }

    #[test]
    fn constant_one_is_a_cocycle() {
        let g = Arc::new(pair_groupoid(3).unwrap());
        let w = TwoCocycle::trivial(g);
        assert!(w.check_identity().is_empty());
        assert!(w.is_normalized());
    }

    #[test]
    fn pauli_cocycle_satisfies_identity() {
        let w = pauli();
        assert!(w.identity_checked());
        assert!(w.is_normalized());
    }

    #[test]
    fn negating_one_value_gives_violations() {
        let w = pauli();
        let g = w.base().clone();
        let x = g.arrow_by_name("(0,1)").unwrap();
        let y = g.arrow_by_name("(1,0)").unwrap();
        let broken = TwoCocycle::from_fn(g, |a, b| {
            let v = w.value(a, b);
            if (a, b) == (x, y) {
                v * CircleScalar::minus_one()
            } else {
                v
            }
        });
        let report = broken.check_identity();
        assert!(!report.is_empty());
        assert!(!broken.identity_checked());
        assert!(broken.power(2).is_err());
    }

    #[test]
    fn normalize_constant_third_turn_on_z2() {
        let g = Arc::new(cyclic_group(2).unwrap());
        let c = turn(1, 3);
        let w = TwoCocycle::from_fn(g.clone(), |_, _| c);
        assert!(w.identity_checked());
        assert!(!w.is_normalized());
        let (wn, b) = w.normalize().unwrap();
        assert!(wn.is_normalized() && wn.identity_checked());
        assert_eq!(wn.value(0, 1), CircleScalar::ONE);
        assert!(b.values.iter().all(|&v| v == c));
        // w = wn * db
        assert!(wn.multiply(&coboundary(&g, &b)).unwrap().same_values(&w));
    }

    #[test]
    fn normalize_is_identity_on_normalized_input() {
        let w = pauli();
        let (wn, b) = w.normalize().unwrap();
        assert!(wn.same_values(&w));
        assert!(b.values.iter().all(CircleScalar::is_one));
    }

    #[test]
    fn powers() {
        let w = pauli();
        assert!(w.power(0).unwrap().same_values(&TwoCocycle::trivial(w.base().clone())));
        assert!(w.power(2).unwrap().same_values(&TwoCocycle::trivial(w.base().clone())));
        let g = Arc::new(pair_groupoid(2).unwrap());
        let b = OneCochain {
            values: (0..4).map(|i| turn(i, 5)).collect(),
        };
        let d = coboundary(&g, &b);
        assert!(d.power(5).unwrap().same_values(&TwoCocycle::trivial(g)));
    }

    #[test]
    fn coboundary_of_constant_quarter_turn_on_z2() {
        let g = Arc::new(cyclic_group(2).unwrap());
        let b = OneCochain::constant(2, turn(1, 4));
        let d = coboundary(&g, &b);
        // b(x) b(y) conj(b(xy)) = i * i * conj(i) = i everywhere
        for (x, y) in g.composable_pairs() {
            assert_eq!(d.value(x, y), turn(1, 4));
        }
        assert!(d.check_identity().is_empty());
    }

    #[test]
    fn trivialize_rejects_isotropy() {
        let w = pauli();
        match w.trivialize_principal() {
            Err(Error::IsotropyObstruction { arrow }) => assert_eq!(arrow, "(0,1)"),
            other => panic!("expected obstruction, got {other:?}"),
        }
    }

    #[test]
    fn trivialize_trivial_cocycle() {
        let g = Arc::new(pair_groupoid(3).unwrap());
        let b = TwoCocycle::trivial(g.clone()).trivialize_principal().unwrap();
        assert!(b.values.iter().all(CircleScalar::is_one));
    }

    #[test]
    fn solve_coboundary_requires_exact_values() {
        let g = Arc::new(cyclic_group(2).unwrap());
        let w = TwoCocycle::from_fn(g, |_, _| CircleScalar::from_turns(0.1));
        assert_eq!(w.solve_coboundary().unwrap_err(), Error::ExactAnglesRequired);
    }

    #[test]
    fn solve_coboundary_trivial_and_pauli() {
        let g = Arc::new(pair_groupoid(2).unwrap());
        let b = TwoCocycle::trivial(g).solve_coboundary().unwrap().unwrap();
        assert!(b.values.iter().all(CircleScalar::is_one));
        assert!(pauli().solve_coboundary().unwrap().is_none());
    }

    #[test]
    fn solve_coboundary_handles_torsion() {
        // A symmetric 2-torsion coboundary on Z_2: b(1) = 1/4 gives db(1,1) = 1/2.
        let g = Arc::new(cyclic_group(2).unwrap());
        let b = OneCochain {
            values: vec![CircleScalar::ONE, turn(1, 4)],
        };
        let w = coboundary(&g, &b);
        let solved = w.solve_coboundary().unwrap().unwrap();
        assert!(coboundary(&g, &solved).same_values(&w));
    }

    #[test]
    fn cech_missing_value_is_reported() {
        let cover = FiniteCover::new(vec!["x".into()], vec![vec![0], vec![0]]).unwrap();
        let err = cech_cocycle(&cover, |i, j, k, _| {
            ((i, j, k) != (0, 1, 0)).then_some(CircleScalar::ONE)
        });
        assert!(matches!(err, Err(Error::MissingCechValue { i: 0, j: 1, k: 0, x: 0 })));
    }

    #[test]
    fn cech_constant_one() {
        let cover = FiniteCover::new(vec!["x".into(), "y".into()], vec![vec![0, 1], vec![0]]).unwrap();
        let w = cech_cocycle(&cover, |_, _, _, _| Some(CircleScalar::ONE)).unwrap();
        assert!(w.same_values(&TwoCocycle::trivial(w.base().clone())));
    }

    #[test]
    fn cech_violation_is_detected() {
        let cover = FiniteCover::new(vec!["x".into()], vec![vec![0], vec![0], vec![0]]).unwrap();
        let w = cech_cocycle(&cover, |i, j, k, _| {
            Some(if (i, j, k) == (0, 1, 2) { turn(1, 5) } else { CircleScalar::ONE })
        })
        .unwrap();
        assert!(!w.check_identity().is_empty());
    }
}
