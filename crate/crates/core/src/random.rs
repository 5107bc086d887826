//! Seeded random groupoids, cocycles and elements for property checks.

use std::collections::BTreeMap;
use std::ops::RangeInclusive;
use std::sync::Arc;

use num_complex::Complex64;
use num_integer::Integer;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{AlgebraElement, TwistedAlgebra};
use crate::circle::CircleScalar;
use crate::cocycle::{coboundary, OneCochain, TwoCocycle};
use crate::extension::{CircleExtension, LaurentElement};
use crate::groupoid::{
    abelian_group, cover_groupoid, disjoint_union, pair_groupoid, product, symmetric_group_3,
    ArrowId, FiniteCover, FiniteGroupoid,
};

pub const MAX_ARROWS: usize = 12;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// How a random groupoid was built; used to place nontrivial cocycle classes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Shape {
    Pair(usize),
    Abelian(Vec<usize>),
    S3,
    /// `pair(n) x H`.
    Times(usize, Box<Shape>),
    Union(Box<Shape>, Box<Shape>),
    Cover(FiniteCover),
}

impl Shape {
    pub fn build(&self) -> FiniteGroupoid {
        match self {
            Shape::Pair(n) => pair_groupoid(*n).expect("positive size"),
            Shape::Abelian(orders) => abelian_group(orders).expect("positive orders"),
            Shape::S3 => symmetric_group_3(),
            Shape::Times(n, h) => product(&pair_groupoid(*n).expect("positive size"), &h.build()),
            Shape::Union(g, h) => disjoint_union(&g.build(), &h.build()),
            Shape::Cover(c) => cover_groupoid(c).expect("valid cover"),
        }
    }

    pub fn arrows(&self) -> usize {
        match self {
            Shape::Pair(n) => n * n,
            Shape::Abelian(orders) => orders.iter().product(),
            Shape::S3 => 6,
            Shape::Times(n, h) => n * n * h.arrows(),
            Shape::Union(g, h) => g.arrows() + h.arrows(),
            Shape::Cover(c) => cover_groupoid(c).map(|g| g.num_arrows()).unwrap_or(usize::MAX),
        }
    }

    pub fn is_principal(&self) -> bool {
        match self {
            Shape::Pair(_) | Shape::Cover(_) => true,
            Shape::Abelian(orders) => orders.iter().product::<usize>() == 1,
            Shape::S3 => false,
            Shape::Times(_, h) => h.is_principal(),
            Shape::Union(g, h) => g.is_principal() && h.is_principal(),
        }
    }

    /// A cocycle exponent `e(a, b)` in `Z/k` whose class is typically
    /// nontrivial: a bicharacter on the first two factors of an abelian
    /// group, pulled back through products and placed on union components.
    fn seed(&self, k: u32, rng: &mut impl Rng) -> Option<Box<dyn Fn(ArrowId, ArrowId) -> i64>> {
        match self {
            Shape::Abelian(orders) if orders.len() >= 2 => {
                let d = orders[0].gcd(&orders[1]);
                if d < 2 || !(k as usize).is_multiple_of(d) {
                    return None;
                }
                let scale = (k as usize / d) as i64 * rng.random_range(1..d as i64);
                let tail: usize = orders[2..].iter().product();
                let (m1, m2) = (orders[0], orders[1]);
                let digits = move |x: ArrowId| ((x / tail / m2 % m1) as i64, (x / tail % m2) as i64);
                Some(Box::new(move |a, b| scale * digits(a).1 * digits(b).0))
            }
            Shape::Times(_, h) => {
                let size = h.arrows();
                let inner = h.seed(k, rng)?;
                Some(Box::new(move |a, b| inner(a % size, b % size)))
            }
            Shape::Union(g, h) => {
                let split = g.arrows();
                let left = g.seed(k, rng);
                let right = h.seed(k, rng);
                if left.is_none() && right.is_none() {
                    return None;
                }
                Some(Box::new(move |a, b| {
                    if a < split {
                        left.as_ref().map_or(0, |f| f(a, b))
                    } else {
                        right.as_ref().map_or(0, |f| f(a - split, b - split))
                    }
                }))
            }
            _ => None,
        }
    }
}

fn random_small_shape(rng: &mut impl Rng, budget: usize) -> Shape {
    loop {
        let shape = match rng.random_range(0..9) {
            0 => Shape::Pair(rng.random_range(1..=3)),
            1 => Shape::Abelian(vec![rng.random_range(2..=6)]),
            2 => Shape::Abelian(vec![2, 2]),
            3 => Shape::Abelian(vec![3, 3]),
            4 => Shape::Abelian(vec![2, 4]),
            5 => Shape::S3,
            6 => Shape::Abelian(vec![2, 2, 2]),
            7 => Shape::Abelian(vec![2, 6]),
            _ => Shape::Abelian(vec![4, 2]),
        };
        if shape.arrows() <= budget {
            return shape;
        }
    }
}

fn random_cover(rng: &mut impl Rng) -> FiniteCover {
    loop {
        let points = rng.random_range(1..=3);
        let sets = rng.random_range(1..=3);
        let sets: Vec<Vec<usize>> = (0..sets)
            .map(|_| (0..points).filter(|_| rng.random_bool(0.6)).collect())
            .collect();
        if let Ok(cover) = FiniteCover::new((0..points).map(|x| format!("x{x}")).collect(), sets) {
            if Shape::Cover(cover.clone()).arrows() <= MAX_ARROWS {
                return cover;
            }
        }
    }
}

pub fn random_shape(rng: &mut impl Rng) -> Shape {
    match rng.random_range(0..5) {
        0 | 1 => random_small_shape(rng, MAX_ARROWS),
        2 => {
            let n = 2;
            Shape::Times(n, Box::new(random_small_shape(rng, MAX_ARROWS / (n * n))))
        }
        3 => {
            let left = random_small_shape(rng, MAX_ARROWS - 1);
            let right = random_small_shape(rng, MAX_ARROWS - left.arrows());
            Shape::Union(Box::new(left), Box::new(right))
        }
        _ => Shape::Cover(random_cover(rng)),
    }
}

pub fn random_principal_shape(rng: &mut impl Rng) -> Shape {
    match rng.random_range(0..4) {
        0 => Shape::Pair(rng.random_range(1..=3)),
        1 => Shape::Union(
            Box::new(Shape::Pair(rng.random_range(1..=2))),
            Box::new(Shape::Pair(rng.random_range(1..=2))),
        ),
        2 => Shape::Times(2, Box::new(Shape::Pair(1))),
        _ => Shape::Cover(random_cover(rng)),
    }
}

pub fn random_root(rng: &mut impl Rng, k: u32) -> CircleScalar {
    CircleScalar::root_of_unity(rng.random_range(0..k as i64), k as i64)
}

pub fn random_cochain(rng: &mut impl Rng, n_arrows: usize, k: u32) -> OneCochain {
    OneCochain {
        values: (0..n_arrows).map(|_| random_root(rng, k)).collect(),
    }
}

/// A `mu_k`-valued cocycle, usually not normalized: an optional nontrivial
/// seed times the coboundary of a random `mu_k` cochain.
pub fn random_raw_cocycle(rng: &mut impl Rng, shape: &Shape, g: &Arc<FiniteGroupoid>, k: u32) -> TwoCocycle {
    let seed = if rng.random_bool(0.8) { shape.seed(k, rng) } else { None };
    let base = match seed {
        Some(e) => TwoCocycle::from_fn(g.clone(), |a, b| CircleScalar::root_of_unity(e(a, b), k as i64)),
        None => TwoCocycle::trivial(g.clone()),
    };
    base.multiply(&coboundary(g, &random_cochain(rng, g.num_arrows(), k)))
        .expect("product of cocycles on one groupoid")
}

/// [`random_raw_cocycle`], normalized.
pub fn random_cocycle(rng: &mut impl Rng, shape: &Shape, g: &Arc<FiniteGroupoid>, k: u32) -> TwoCocycle {
    let (w, _) = random_raw_cocycle(rng, shape, g, k)
        .normalize()
        .expect("cocycle identity holds");
    w
}

/// A random groupoid with a normalized `mu_k` cocycle.
#[derive(Clone, Debug)]
pub struct Instance {
    pub shape: Shape,
    pub cocycle: Arc<TwoCocycle>,
    pub k: u32,
}

impl Instance {
    pub fn groupoid(&self) -> &Arc<FiniteGroupoid> {
        self.cocycle.base()
    }
}

pub fn random_instance(rng: &mut impl Rng, ks: &[u32]) -> Instance {
    let shape = random_shape(rng);
    instance_on(rng, shape, ks)
}

pub fn random_principal_instance(rng: &mut impl Rng, ks: &[u32]) -> Instance {
    let shape = random_principal_shape(rng);
    instance_on(rng, shape, ks)
}

fn instance_on(rng: &mut impl Rng, shape: Shape, ks: &[u32]) -> Instance {
    let g = Arc::new(shape.build());
    let k = *ks.choose(rng).expect("nonempty list of orders");
    let cocycle = Arc::new(random_cocycle(rng, &shape, &g, k));
    Instance { shape, cocycle, k }
}

pub fn random_complex(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

pub fn random_vector(rng: &mut impl Rng, n: usize) -> Vec<Complex64> {
    (0..n).map(|_| random_complex(rng)).collect()
}

/// A random element with roughly half of the coefficients nonzero.
pub fn random_element(rng: &mut impl Rng, alg: &TwistedAlgebra) -> AlgebraElement {
    let coeffs = (0..alg.dimension())
        .map(|_| if rng.random_bool(0.5) { random_complex(rng) } else { Complex64::new(0.0, 0.0) })
        .collect();
    alg.element(coeffs).expect("right length")
}

/// A random Laurent element with modes in `window`.
pub fn random_laurent(rng: &mut impl Rng, ext: &CircleExtension, window: RangeInclusive<i64>) -> LaurentElement {
    let n = ext.groupoid().num_arrows();
    let mut modes = BTreeMap::new();
    for m in window {
        if rng.random_bool(0.7) {
            modes.insert(m, random_vector(rng, n));
        }
    }
    ext.element(modes).expect("right lengths")
}
