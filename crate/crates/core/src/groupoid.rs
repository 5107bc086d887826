//! Finite groupoids with counting-measure Haar systems.
//!
//! Arrows and units are dense indices. Composition is a partial table keyed
//! by composable pairs `(a, b)` with `source(a) == range(b)`, read as `a b`.

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeSet, HashMap};
use std::hash::{Hash, Hasher};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::validation::ValidationReport;

pub type ArrowId = usize;
pub type UnitId = usize;

/// Raw tables from which a [`FiniteGroupoid`] is assembled.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GroupoidParts {
    pub unit_names: Vec<String>,
    pub arrow_names: Vec<String>,
    pub range: Vec<UnitId>,
    pub source: Vec<UnitId>,
    pub compose: HashMap<(ArrowId, ArrowId), ArrowId>,
    pub inverse: Vec<ArrowId>,
}

#[derive(Clone, Debug)]
pub struct FiniteGroupoid {
    unit_names: Vec<String>,
    arrow_names: Vec<String>,
    range: Vec<UnitId>,
    source: Vec<UnitId>,
    compose: HashMap<(ArrowId, ArrowId), ArrowId>,
    inverse: Vec<ArrowId>,
    unit_arrow: Vec<Option<ArrowId>>,
    with_range: Vec<Vec<ArrowId>>,
    with_source: Vec<Vec<ArrowId>>,
    fingerprint: u64,
}

impl PartialEq for FiniteGroupoid {
    fn eq(&self, other: &Self) -> bool {
        self.unit_names == other.unit_names
            && self.arrow_names == other.arrow_names
            && self.range == other.range
            && self.source == other.source
            && self.compose == other.compose
            && self.inverse == other.inverse
    }
}

/// Orbits of the unit space and isotropy groups at every unit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrbitDecomposition {
    pub orbit_of: Vec<usize>,
    pub orbits: Vec<Vec<UnitId>>,
    pub isotropy: Vec<Vec<ArrowId>>,
}

pub const PROPER_NOTE: &str =
    "(range, source) is a map between finite discrete spaces, so it is proper";

impl FiniteGroupoid {
    /// Assembles the tables without checking the axioms. Index bounds are
    /// still enforced, since nothing else could be evaluated otherwise.
    pub fn unchecked(parts: GroupoidParts) -> Result<Self> {
        let GroupoidParts {
            unit_names,
            arrow_names,
            range,
            source,
            compose,
            inverse,
        } = parts;
        let n_units = unit_names.len();
        let n_arrows = arrow_names.len();
        if range.len() != n_arrows || source.len() != n_arrows || inverse.len() != n_arrows {
            return Err(Error::InvalidGroupoid(
                "range, source and inverse must have one entry per arrow".into(),
            ));
        }
        if let Some(a) = (0..n_arrows).find(|&a| range[a] >= n_units || source[a] >= n_units) {
            return Err(Error::InvalidGroupoid(format!(
                "arrow {} refers to a unit out of range",
                arrow_names[a]
            )));
        }
        if let Some(a) = (0..n_arrows).find(|&a| inverse[a] >= n_arrows) {
            return Err(Error::InvalidGroupoid(format!(
                "inverse of arrow {} is out of range",
                arrow_names[a]
            )));
        }
        if compose
            .iter()
            .any(|(&(a, b), &c)| a >= n_arrows || b >= n_arrows || c >= n_arrows)
        {
            return Err(Error::InvalidGroupoid(
                "composition table refers to an arrow out of range".into(),
            ));
        }

        let mut with_range = vec![Vec::new(); n_units];
        let mut with_source = vec![Vec::new(); n_units];
        for a in 0..n_arrows {
            with_range[range[a]].push(a);
            with_source[source[a]].push(a);
        }
        // The identity at u is the unique idempotent arrow in the isotropy group at u.
        let unit_arrow = (0..n_units)
            .map(|u| {
                with_range[u]
                    .iter()
                    .copied()
                    .find(|&a| source[a] == u && compose.get(&(a, a)) == Some(&a))
            })
            .collect();

        let mut hasher = DefaultHasher::new();
        unit_names.hash(&mut hasher);
        arrow_names.hash(&mut hasher);
        range.hash(&mut hasher);
        source.hash(&mut hasher);
        inverse.hash(&mut hasher);
        let mut table: Vec<_> = compose.iter().map(|(&(a, b), &c)| (a, b, c)).collect();
        table.sort_unstable();
        table.hash(&mut hasher);

        Ok(FiniteGroupoid {
            unit_names,
            arrow_names,
            range,
            source,
            compose,
            inverse,
            unit_arrow,
            with_range,
            with_source,
            fingerprint: hasher.finish(),
        })
    }

    /// Assembles and validates; any violated axiom is an error.
    pub fn new(parts: GroupoidParts) -> Result<Self> {
        let g = Self::unchecked(parts)?;
        let report = g.validate();
        if let Some(v) = report.violations.first() {
            return Err(Error::InvalidGroupoid(format!(
                "{} violation(s); first: {} at {:?}: {}",
                report.len(),
                v.check,
                v.witnesses,
                v.detail
            )));
        }
        Ok(g)
    }

    pub fn num_units(&self) -> usize {
        self.unit_names.len()
    }

    pub fn num_arrows(&self) -> usize {
        self.arrow_names.len()
    }

    pub fn units(&self) -> std::ops::Range<UnitId> {
        0..self.num_units()
    }

    pub fn arrows(&self) -> std::ops::Range<ArrowId> {
        0..self.num_arrows()
    }

    pub fn unit_name(&self, u: UnitId) -> &str {
        &self.unit_names[u]
    }

    pub fn arrow_name(&self, a: ArrowId) -> &str {
        &self.arrow_names[a]
    }

    pub fn unit_names(&self) -> &[String] {
        &self.unit_names
    }

    pub fn arrow_names(&self) -> &[String] {
        &self.arrow_names
    }

    pub fn arrow_by_name(&self, name: &str) -> Option<ArrowId> {
        self.arrow_names.iter().position(|n| n == name)
    }

    pub fn unit_by_name(&self, name: &str) -> Option<UnitId> {
        self.unit_names.iter().position(|n| n == name)
    }

    pub fn range(&self, a: ArrowId) -> UnitId {
        self.range[a]
    }

    pub fn source(&self, a: ArrowId) -> UnitId {
        self.source[a]
    }

    pub fn inverse(&self, a: ArrowId) -> ArrowId {
        self.inverse[a]
    }

    pub fn is_composable(&self, a: ArrowId, b: ArrowId) -> bool {
        self.source[a] == self.range[b]
    }

    /// `a b`, defined exactly on composable pairs.
    pub fn compose(&self, a: ArrowId, b: ArrowId) -> Option<ArrowId> {
        self.compose.get(&(a, b)).copied()
    }

    /// The identity arrow at `u`.
    ///
    /// Panics if the groupoid has no identity at `u`; validated groupoids always do.
    pub fn unit_arrow(&self, u: UnitId) -> ArrowId {
        self.unit_arrow[u].expect("groupoid has no identity arrow at this unit")
    }

    pub fn is_unit_arrow(&self, a: ArrowId) -> bool {
        self.unit_arrow[self.range[a]] == Some(a)
    }

    /// Arrows with range `u`, in index order.
    pub fn arrows_with_range(&self, u: UnitId) -> &[ArrowId] {
        &self.with_range[u]
    }

    /// Arrows with source `u`, in index order.
    pub fn arrows_with_source(&self, u: UnitId) -> &[ArrowId] {
        &self.with_source[u]
    }

    /// All composable pairs `(a, b)` in lexicographic order.
    pub fn composable_pairs(&self) -> impl Iterator<Item = (ArrowId, ArrowId)> + '_ {
        self.arrows().flat_map(move |a| {
            self.with_range[self.source[a]]
                .iter()
                .map(move |&b| (a, b))
        })
    }

    pub fn num_composable_pairs(&self) -> usize {
        self.arrows()
            .map(|a| self.with_range[self.source[a]].len())
            .sum()
    }

    /// Stable content hash, used to tag algebras built over this groupoid.
    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        let name = |a: ArrowId| self.arrow_names[a].clone();

        for (&(a, b), &c) in sorted(&self.compose) {
            if !self.is_composable(a, b) {
                report.push(
                    "composition_not_composable",
                    vec![name(a), name(b)],
                    format!("{} o {} is tabulated but source != range", name(a), name(b)),
                );
            } else if self.range[c] != self.range[a] || self.source[c] != self.source[b] {
                report.push(
                    "composition_endpoints",
                    vec![name(a), name(b), name(c)],
                    format!(
                        "{} o {} = {} does not run from source({}) to range({})",
                        name(a),
                        name(b),
                        name(c),
                        name(b),
                        name(a)
                    ),
                );
            }
        }
        for (a, b) in self.composable_pairs() {
            if !self.compose.contains_key(&(a, b)) {
                report.push(
                    "composition_missing",
                    vec![name(a), name(b)],
                    "composable pair has no product",
                );
            }
        }

        for u in self.units() {
            let idempotents: Vec<_> = self.with_range[u]
                .iter()
                .copied()
                .filter(|&a| self.source[a] == u && self.compose.get(&(a, a)) == Some(&a))
                .collect();
            if idempotents.len() != 1 {
                report.push(
                    "unit_arrow",
                    idempotents.iter().map(|&a| name(a)).collect(),
                    format!(
                        "unit {} has {} idempotent arrows, expected exactly one",
                        self.unit_names[u],
                        idempotents.len()
                    ),
                );
            }
        }
        if self.unit_arrow.iter().any(Option::is_none) {
            // The remaining laws are phrased through unit arrows.
            return report;
        }

        for g in self.arrows() {
            let left = self.unit_arrow(self.range[g]);
            let right = self.unit_arrow(self.source[g]);
            if self.compose(left, g) != Some(g) {
                report.push("left_unit_law", vec![name(g)], "r(g) g != g");
            }
            if self.compose(g, right) != Some(g) {
                report.push("right_unit_law", vec![name(g)], "g s(g) != g");
            }
            let h = self.inverse[g];
            if self.range[h] != self.source[g] || self.source[h] != self.range[g] {
                report.push(
                    "inverse_endpoints",
                    vec![name(g), name(h)],
                    "range/source of the inverse are not swapped",
                );
            }
            if self.inverse[h] != g {
                report.push(
                    "inverse_involution",
                    vec![name(g), name(h)],
                    "inverse(inverse(g)) != g",
                );
            }
            if self.compose(g, h) != Some(left) {
                report.push(
                    "inverse_unit_law",
                    vec![name(g), name(h)],
                    format!("g g^-1 is not the unit arrow {}", name(left)),
                );
            }
            if self.compose(h, g) != Some(right) {
                report.push(
                    "inverse_unit_law",
                    vec![name(h), name(g)],
                    format!("g^-1 g is not the unit arrow {}", name(right)),
                );
            }
        }

        for (a, b) in self.composable_pairs() {
            let Some(ab) = self.compose(a, b) else { continue };
            for &c in &self.with_range[self.source[b]] {
                let lhs = self.compose(ab, c);
                let rhs = self.compose(b, c).and_then(|bc| self.compose(a, bc));
                if lhs != rhs {
                    report.push(
                        "associativity",
                        vec![name(a), name(b), name(c)],
                        "(a b) c != a (b c)",
                    );
                }
            }
        }
        report
    }

    pub fn orbits(&self) -> OrbitDecomposition {
        let n = self.num_units();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for a in self.arrows() {
            let (x, y) = (find(&mut parent, self.range[a]), find(&mut parent, self.source[a]));
            if x != y {
                parent[x.max(y)] = x.min(y);
            }
        }
        let mut orbit_of = vec![usize::MAX; n];
        let mut orbits: Vec<Vec<UnitId>> = Vec::new();
        let mut root_to_orbit = HashMap::new();
        for u in 0..n {
            let root = find(&mut parent, u);
            let id = *root_to_orbit.entry(root).or_insert_with(|| {
                orbits.push(Vec::new());
                orbits.len() - 1
            });
            orbit_of[u] = id;
            orbits[id].push(u);
        }
        let isotropy = self
            .units()
            .map(|u| {
                self.with_range[u]
                    .iter()
                    .copied()
                    .filter(|&a| self.source[a] == u)
                    .collect()
            })
            .collect();
        OrbitDecomposition {
            orbit_of,
            orbits,
            isotropy,
        }
    }

    /// Injectivity of `g -> (range(g), source(g))`.
    pub fn is_principal(&self) -> bool {
        self.principal_witness().is_none()
    }

    /// A non-unit arrow with equal range and source, if any.
    pub fn principal_witness(&self) -> Option<ArrowId> {
        self.arrows()
            .find(|&a| self.range[a] == self.source[a] && !self.is_unit_arrow(a))
    }

    pub fn is_transitive(&self) -> bool {
        self.num_units() <= 1 || self.orbits().orbits.len() == 1
    }

    /// Always true for finite groupoids; see [`PROPER_NOTE`].
    pub fn is_proper(&self) -> bool {
        true
    }

    /// The unique arrow from `v` to `u` (range `u`, source `v`) in a principal groupoid.
    pub fn arrow_between(&self, u: UnitId, v: UnitId) -> Option<ArrowId> {
        self.with_range[u].iter().copied().find(|&a| self.source[a] == v)
    }

    pub fn parts(&self) -> GroupoidParts {
        GroupoidParts {
            unit_names: self.unit_names.clone(),
            arrow_names: self.arrow_names.clone(),
            range: self.range.clone(),
            source: self.source.clone(),
            compose: self.compose.clone(),
            inverse: self.inverse.clone(),
        }
    }
}

fn sorted<K: Ord + Copy, V>(map: &HashMap<K, V>) -> Vec<(&K, &V)> {
    let mut entries: Vec<_> = map.iter().collect();
    entries.sort_unstable_by_key(|(k, _)| **k);
    entries
}

/// Builds the composition and inverse tables of a groupoid whose arrows are
/// given by `(range, source)` plus a product rule on arrow indices.
fn assemble(
    unit_names: Vec<String>,
    arrow_names: Vec<String>,
    range: Vec<UnitId>,
    source: Vec<UnitId>,
    product: impl Fn(ArrowId, ArrowId) -> ArrowId,
    inverse: impl Fn(ArrowId) -> ArrowId,
) -> FiniteGroupoid {
    let n = arrow_names.len();
    let mut compose = HashMap::new();
    for a in 0..n {
        for b in 0..n {
            if source[a] == range[b] {
                compose.insert((a, b), product(a, b));
            }
        }
    }
    let inverse = (0..n).map(inverse).collect();
    FiniteGroupoid::new(GroupoidParts {
        unit_names,
        arrow_names,
        range,
        source,
        compose,
        inverse,
    })
    .expect("standard construction produced an invalid groupoid")
}

/// The pair groupoid on `n` points: arrows `(i, j)` with `(i, j)(j, k) = (i, k)`.
///
/// Units and arrows are labelled from 1. Arrow `(i, j)` has index `(i-1) n + (j-1)`.
pub fn pair_groupoid(n: usize) -> Result<FiniteGroupoid> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "pair groupoid needs at least one point".into(),
        ));
    }
    let unit_names = (1..=n).map(|i| i.to_string()).collect();
    let mut arrow_names = Vec::with_capacity(n * n);
    let (mut range, mut source) = (Vec::new(), Vec::new());
    for i in 0..n {
        for j in 0..n {
            arrow_names.push(format!("({},{})", i + 1, j + 1));
            range.push(i);
            source.push(j);
        }
    }
    Ok(assemble(
        unit_names,
        arrow_names,
        range,
        source,
        |a, b| (a / n) * n + b % n,
        |a| (a % n) * n + a / n,
    ))
}

/// A group presented by its multiplication table, viewed as a one-unit groupoid.
///
/// `table[a][b]` is the index of `a b`; element 0 must be the identity.
pub fn group_groupoid(names: Vec<String>, table: &[Vec<usize>]) -> Result<FiniteGroupoid> {
    let n = names.len();
    if n == 0 || table.len() != n || table.iter().any(|row| row.len() != n) {
        return Err(Error::InvalidArgument(
            "group table must be square and nonempty".into(),
        ));
    }
    if table.iter().flatten().any(|&c| c >= n) {
        return Err(Error::InvalidArgument("group table entry out of range".into()));
    }
    let mut inverse = vec![usize::MAX; n];
    for a in 0..n {
        if let Some(b) = (0..n).find(|&b| table[a][b] == 0) {
            inverse[a] = b;
        }
    }
    if inverse.contains(&usize::MAX) {
        return Err(Error::InvalidArgument("group table has no inverses".into()));
    }
    let mut compose = HashMap::new();
    for a in 0..n {
        for b in 0..n {
            compose.insert((a, b), table[a][b]);
        }
    }
    FiniteGroupoid::new(GroupoidParts {
        unit_names: vec!["e".into()],
        arrow_names: names,
        range: vec![0; n],
        source: vec![0; n],
        compose,
        inverse,
    })
}

/// `Z_{n_1} x ... x Z_{n_r}` as a one-unit groupoid.
///
/// Elements are named `(a_1,...,a_r)` and indexed in mixed radix with the
/// last factor varying fastest, so `(0,...,0)` is the identity.
pub fn abelian_group(orders: &[usize]) -> Result<FiniteGroupoid> {
    if orders.is_empty() || orders.contains(&0) {
        return Err(Error::InvalidArgument(
            "abelian group needs positive factor orders".into(),
        ));
    }
    let size: usize = orders.iter().product();
    let digits = |mut x: usize| {
        let mut d = vec![0; orders.len()];
        for (slot, &m) in d.iter_mut().zip(orders).rev() {
            *slot = x % m;
            x /= m;
        }
        d
    };
    let index = |d: &[usize]| d.iter().zip(orders).fold(0, |acc, (&x, &m)| acc * m + x);
    let names = (0..size)
        .map(|x| {
            let d: Vec<String> = digits(x).iter().map(|v| v.to_string()).collect();
            format!("({})", d.join(","))
        })
        .collect();
    let table: Vec<Vec<usize>> = (0..size)
        .map(|a| {
            (0..size)
                .map(|b| {
                    let s: Vec<usize> = digits(a)
                        .iter()
                        .zip(digits(b))
                        .zip(orders)
                        .map(|((x, y), m)| (x + y) % m)
                        .collect();
                    index(&s)
                })
                .collect()
        })
        .collect();
    group_groupoid(names, &table)
}

pub fn cyclic_group(n: usize) -> Result<FiniteGroupoid> {
    abelian_group(&[n])
}

/// The symmetric group on three letters, as a one-unit groupoid.
pub fn symmetric_group_3() -> FiniteGroupoid {
    let perms: [[usize; 3]; 6] = [
        [0, 1, 2],
        [1, 0, 2],
        [0, 2, 1],
        [2, 1, 0],
        [1, 2, 0],
        [2, 0, 1],
    ];
    let index = |p: [usize; 3]| perms.iter().position(|q| *q == p).unwrap();
    let table: Vec<Vec<usize>> = perms
        .iter()
        .map(|p| {
            perms
                .iter()
                .map(|q| index([p[q[0]], p[q[1]], p[q[2]]]))
                .collect()
        })
        .collect();
    let names = perms
        .iter()
        .map(|p| format!("[{}{}{}]", p[0] + 1, p[1] + 1, p[2] + 1))
        .collect();
    group_groupoid(names, &table).expect("S3 table is a group")
}

/// Disjoint union; units and arrows of `h` are appended after those of `g`.
pub fn disjoint_union(g: &FiniteGroupoid, h: &FiniteGroupoid) -> FiniteGroupoid {
    let (nu, na) = (g.num_units(), g.num_arrows());
    let tag = |prefix: &str, names: &[String]| -> Vec<String> {
        names.iter().map(|n| format!("{prefix}{n}")).collect()
    };
    let unit_names = [tag("L", &g.unit_names), tag("R", &h.unit_names)].concat();
    let arrow_names = [tag("L", &g.arrow_names), tag("R", &h.arrow_names)].concat();
    let range = g
        .range
        .iter()
        .copied()
        .chain(h.range.iter().map(|u| u + nu))
        .collect();
    let source = g
        .source
        .iter()
        .copied()
        .chain(h.source.iter().map(|u| u + nu))
        .collect();
    let inverse = g
        .inverse
        .iter()
        .copied()
        .chain(h.inverse.iter().map(|a| a + na))
        .collect();
    let mut compose = g.compose.clone();
    compose.extend(h.compose.iter().map(|(&(a, b), &c)| ((a + na, b + na), c + na)));
    FiniteGroupoid::new(GroupoidParts {
        unit_names,
        arrow_names,
        range,
        source,
        compose,
        inverse,
    })
    .expect("disjoint union of groupoids is a groupoid")
}

/// Product groupoid `g x h`; arrow `(a, b)` has index `a * |h| + b`.
pub fn product(g: &FiniteGroupoid, h: &FiniteGroupoid) -> FiniteGroupoid {
    let (hu, ha) = (h.num_units(), h.num_arrows());
    let mut unit_names = Vec::new();
    for u in g.units() {
        for v in h.units() {
            unit_names.push(format!("{}.{}", g.unit_names[u], h.unit_names[v]));
        }
    }
    let mut arrow_names = Vec::new();
    let (mut range, mut source) = (Vec::new(), Vec::new());
    for a in g.arrows() {
        for b in h.arrows() {
            arrow_names.push(format!("{}.{}", g.arrow_names[a], h.arrow_names[b]));
            range.push(g.range[a] * hu + h.range[b]);
            source.push(g.source[a] * hu + h.source[b]);
        }
    }
    assemble(
        unit_names,
        arrow_names,
        range,
        source,
        |x, y| {
            let a = g.compose(x / ha, y / ha).expect("composable");
            let b = h.compose(x % ha, y % ha).expect("composable");
            a * ha + b
        },
        |x| g.inverse[x / ha] * ha + h.inverse[x % ha],
    )
}

/// A finite space with a cover by subsets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteCover {
    pub points: Vec<String>,
    /// Each set lists point indices.
    pub sets: Vec<Vec<usize>>,
}

impl FiniteCover {
    pub fn new(points: Vec<String>, sets: Vec<Vec<usize>>) -> Result<Self> {
        let cover = FiniteCover { points, sets };
        cover.check()?;
        Ok(cover)
    }

    fn check(&self) -> Result<()> {
        let n = self.points.len();
        for (i, set) in self.sets.iter().enumerate() {
            if let Some(&x) = set.iter().find(|&&x| x >= n) {
                return Err(Error::InvalidArgument(format!(
                    "cover set {} refers to point index {x} out of range",
                    i + 1
                )));
            }
        }
        for x in 0..n {
            if !self.sets.iter().any(|s| s.contains(&x)) {
                return Err(Error::InvalidArgument(format!(
                    "point {} lies outside every cover set",
                    self.points[x]
                )));
            }
        }
        Ok(())
    }

    pub fn contains(&self, set: usize, x: usize) -> bool {
        self.sets[set].contains(&x)
    }
}

/// Units of [`cover_groupoid`] in index order, as `(point, cover set)`.
pub fn cover_units(cover: &FiniteCover) -> Vec<(usize, usize)> {
    let mut units = Vec::new();
    for (i, set) in cover.sets.iter().enumerate() {
        let members: BTreeSet<usize> = set.iter().copied().collect();
        units.extend(members.into_iter().map(|x| (x, i)));
    }
    units
}

/// The groupoid `R(Psi)` of a cover: units `(x, i)` with `x` in `U_i`, arrows
/// `((x,i),(x,j))` for `x` in `U_i cap U_j`, and
/// `((x,i),(x,j)) ((x,j),(x,k)) = ((x,i),(x,k))`.
///
/// Units are ordered by cover set, then by point. Arrows are ordered by
/// range unit, then source unit. Cover sets are named from 1.
pub fn cover_groupoid(cover: &FiniteCover) -> Result<FiniteGroupoid> {
    cover.check()?;
    let units = cover_units(cover);
    let unit_names: Vec<String> = units
        .iter()
        .map(|&(x, i)| format!("({},{})", cover.points[x], i + 1))
        .collect();
    let mut arrow_of = HashMap::new();
    let mut arrow_names = Vec::new();
    let (mut range, mut source) = (Vec::new(), Vec::new());
    for (a, &(x, _)) in units.iter().enumerate() {
        for (b, &(y, _)) in units.iter().enumerate() {
            if x == y {
                arrow_of.insert((a, b), arrow_names.len());
                arrow_names.push(format!("({},{})", unit_names[a], unit_names[b]));
                range.push(a);
                source.push(b);
            }
        }
    }
    let ends: Vec<(usize, usize)> = range.iter().copied().zip(source.iter().copied()).collect();
    Ok(assemble(
        unit_names,
        arrow_names,
        range,
        source,
        |p, q| arrow_of[&(ends[p].0, ends[q].1)],
        |p| arrow_of[&(ends[p].1, ends[p].0)],
    ))
}

/// `G / A` for the isotropy bundle `A`: classes `gA`, canonicalized by their
/// minimal arrow index and numbered in order of that representative.
///
/// Returns the quotient groupoid and the projection from arrows to classes.
pub fn quotient_by_isotropy(g: &FiniteGroupoid) -> (FiniteGroupoid, Vec<ArrowId>) {
    let orbits = g.orbits();
    let rep: Vec<ArrowId> = g
        .arrows()
        .map(|a| {
            orbits.isotropy[g.source(a)]
                .iter()
                .map(|&iso| g.compose(a, iso).expect("a and isotropy at s(a) compose"))
                .min()
                .expect("isotropy contains the unit")
        })
        .collect();
    let reps: BTreeSet<ArrowId> = rep.iter().copied().collect();
    let class_of_rep: HashMap<ArrowId, usize> =
        reps.iter().enumerate().map(|(i, &r)| (r, i)).collect();
    let projection: Vec<ArrowId> = rep.iter().map(|r| class_of_rep[r]).collect();
    let reps: Vec<ArrowId> = reps.into_iter().collect();

    let arrow_names = reps.iter().map(|&r| format!("[{}]", g.arrow_name(r))).collect();
    let range = reps.iter().map(|&r| g.range(r)).collect();
    let source = reps.iter().map(|&r| g.source(r)).collect();
    let inverse = reps.iter().map(|&r| projection[g.inverse(r)]).collect();
    let mut compose = HashMap::new();
    for (i, &a) in reps.iter().enumerate() {
        for (j, &b) in reps.iter().enumerate() {
            if g.is_composable(a, b) {
                compose.insert((i, j), projection[g.compose(a, b).unwrap()]);
            }
        }
    }
    let quotient = FiniteGroupoid::new(GroupoidParts {
        unit_names: g.unit_names.clone(),
        arrow_names,
        range,
        source,
        compose,
        inverse,
    })
    .expect("quotient by the isotropy bundle is a groupoid");
    (quotient, projection)
}

/// Checks that `map` (arrows of `g` to arrows of `h`) is a groupoid morphism:
/// it carries units to units and composable pairs to their products.
pub fn check_morphism(g: &FiniteGroupoid, h: &FiniteGroupoid, map: &[ArrowId]) -> ValidationReport {
    let mut report = ValidationReport::default();
    if map.len() != g.num_arrows() || map.iter().any(|&x| x >= h.num_arrows()) {
        report.push("morphism_shape", vec![], "map must send every arrow into the target");
        return report;
    }
    for u in g.units() {
        let e = g.unit_arrow(u);
        if !h.is_unit_arrow(map[e]) {
            report.push(
                "morphism_units",
                vec![g.arrow_name(e).to_string()],
                "unit arrow not sent to a unit arrow",
            );
        }
    }
    for (a, b) in g.composable_pairs() {
        let ab = g.compose(a, b).unwrap();
        if h.compose(map[a], map[b]) != Some(map[ab]) {
            report.push(
                "morphism_composition",
                vec![g.arrow_name(a).to_string(), g.arrow_name(b).to_string()],
                "f(a b) != f(a) f(b)",
            );
        }
    }
    report
}

/// A bijective morphism whose inverse is also a morphism.
pub fn is_isomorphism(g: &FiniteGroupoid, h: &FiniteGroupoid, map: &[ArrowId]) -> bool {
    if g.num_arrows() != h.num_arrows() || !check_morphism(g, h, map).is_empty() {
        return false;
    }
    let mut inverse = vec![usize::MAX; h.num_arrows()];
    for (a, &x) in map.iter().enumerate() {
        if inverse[x] != usize::MAX {
            return false;
        }
        inverse[x] = a;
    }
    check_morphism(h, g, &inverse).is_empty()
}
