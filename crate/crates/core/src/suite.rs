//! Named verification checks, shared by the command-line front end.
//!
//! Each function runs one family of checks on a document or on seeded
//! random instances and returns [`Check`] records; it never prints.

use std::ops::RangeInclusive;
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use serde_json::{json, Value};

use crate::algebra::{AlgebraElement, TwistedAlgebra};
use crate::circle::CircleScalar;
use crate::cocycle::{coboundary, OneCochain, TwoCocycle};
use crate::cyclic::cyclic_extension;
use crate::doc::{cochain_doc, coefficient_doc, groupoid_doc, cocycle_doc};
use crate::error::Result;
use crate::extension::{CircleExtension, LaurentElement};
use crate::groupoid::FiniteGroupoid;
use crate::morita::{
    fixed_point_algebra, fullness_check, left_inner, mode_zero_deviation, positivity_margin,
    saturation_report, POSITIVITY_TOL,
};
use crate::random::{
    random_element, random_instance, random_laurent, random_principal_instance, random_raw_cocycle,
    random_shape, random_vector,
};
use crate::report::{num, Check};

/// Tolerance for identities that hold exactly up to rounding.
pub const IDENTITY_TOL: f64 = 1e-12;
/// Tolerance for norm comparisons.
pub const NORM_TOL: f64 = 1e-9;
/// Cocycle orders used for random instances.
pub const ORDERS: &[u32] = &[2, 3, 4, 6];

fn max(a: f64, b: f64) -> f64 {
    a.max(b)
}

/// The cocycle a document carries, normalized, or the trivial one.
pub fn normalized_cocycle(g: &Arc<FiniteGroupoid>, w: Option<&Arc<TwoCocycle>>) -> Result<Arc<TwoCocycle>> {
    match w {
        None => Ok(Arc::new(TwoCocycle::trivial(g.clone()))),
        Some(w) if w.is_normalized() => Ok(w.clone()),
        Some(w) => Ok(Arc::new(w.normalize()?.0)),
    }
}

pub fn validate_checks(g: &FiniteGroupoid, report: &crate::validation::ValidationReport, w: Option<&TwoCocycle>) -> Vec<Check> {
    let mut out = Vec::new();
    let violations: Vec<Value> = report
        .violations
        .iter()
        .map(|v| json!({"check": v.check, "witnesses": v.witnesses, "detail": v.detail}))
        .collect();
    let mut axioms = Check::new("groupoid_axioms", report.is_empty())
        .with("units", g.num_units())
        .with("arrows", g.num_arrows())
        .with("violations", violations);
    if report.is_empty() {
        let orbits = g.orbits();
        axioms = axioms
            .with("orbits", orbits.orbits.len())
            .with("principal", g.is_principal())
            .with("transitive", g.is_transitive())
            .with("proper", g.is_proper());
    }
    out.push(axioms);
    if let Some(w) = w {
        let identity = w.check_identity();
        let normalized = w.check_normalized();
        out.push(
            Check::new("cocycle_identity", identity.is_empty())
                .with("violations", identity.len())
                .with("normalized", normalized.is_empty())
                .with("exact", w.is_exact())
                .with("root_order", w.root_order().map_or(Value::Null, Value::from)),
        );
    }
    out
}

/// Normalizes `w` and checks `w = w' . delta(b)` with `w'` normalized.
pub fn normalize_checks(w: &TwoCocycle) -> Result<(Vec<Check>, TwoCocycle)> {
    let (wn, b) = w.normalize()?;
    let rebuilt = wn.multiply(&coboundary(w.base(), &b))?;
    let checks = vec![
        Check::new("normalized_output", wn.is_normalized() && wn.identity_checked())
            .with("entries", wn.entries().count()),
        Check::new("cohomologous_to_input", rebuilt.same_values(w))
            .with_f64("max_distance", rebuilt.max_distance(w)),
    ];
    Ok((checks, wn))
}

/// Writes `w` as a coboundary on a principal groupoid, or reports the
/// isotropy obstruction. Also reports whether an exact cocycle is a
/// coboundary at all.
pub fn trivialize_checks(w: &TwoCocycle) -> Result<(Vec<Check>, Option<Value>)> {
    let g = w.base();
    let mut out = Vec::new();
    let mut payload = None;
    let (wn, b0) = w.normalize()?;
    match wn.trivialize_principal() {
        Ok(b) => {
            let total = OneCochain {
                values: b.values.iter().zip(&b0.values).map(|(x, y)| *x * *y).collect(),
            };
            let ok = coboundary(g, &total).same_values(w);
            payload = Some(json!({"cochain": cochain_doc(g, &total)}));
            out.push(Check::new("principal_trivialization", ok).with("arrows", g.num_arrows()));
        }
        Err(crate::error::Error::IsotropyObstruction { arrow }) => {
            out.push(Check::new("principal_trivialization", false).with("obstruction", arrow));
        }
        Err(e) => return Err(e),
    }
    if w.is_exact() {
        let solved = w.solve_coboundary()?;
        let verified = solved
            .as_ref()
            .is_none_or(|b| coboundary(g, b).same_values(w));
        out.push(
            Check::new("coboundary_solution_verified", verified).with("is_coboundary", solved.is_some()),
        );
    }
    Ok((out, payload))
}

fn c_star_error(alg: &TwistedAlgebra, f: &AlgebraElement) -> Result<f64> {
    let n = alg.reduced_norm(f)?.reduced_norm;
    let ff = alg.convolve(&alg.involute(f)?, f)?;
    let lhs = alg.reduced_norm(&ff)?.reduced_norm;
    Ok((lhs - n * n).abs() / (n * n).max(f64::MIN_POSITIVE))
}

/// `||f* f|| = ||f||^2`, `*`-algebra laws, and faithfulness for `C(G, w^n)`.
pub fn algebra_checks(
    w: &Arc<TwoCocycle>,
    power: i64,
    element: Option<&AlgebraElement>,
    rng: &mut impl Rng,
    samples: usize,
) -> Result<(Vec<Check>, Option<Value>)> {
    let alg = TwistedAlgebra::new(w.clone(), power)?;
    let mut elements: Vec<AlgebraElement> = (0..samples).map(|_| random_element(rng, &alg)).collect();
    if let Some(f) = element {
        elements.push(f.clone());
    }
    let mut worst_cstar: f64 = 0.0;
    let mut worst_law: f64 = 0.0;
    for (i, f) in elements.iter().enumerate() {
        worst_cstar = max(worst_cstar, c_star_error(&alg, f)?);
        let g = &elements[(i + 1) % elements.len()];
        let h = &elements[(i + 2) % elements.len()];
        let fg = alg.convolve(f, g)?;
        let assoc = alg.convolve(&fg, h)?.max_abs_diff(&alg.convolve(f, &alg.convolve(g, h)?)?);
        let star = alg
            .involute(&fg)?
            .max_abs_diff(&alg.convolve(&alg.involute(g)?, &alg.involute(f)?)?);
        let twice = alg.involute(&alg.involute(f)?)?.max_abs_diff(f);
        worst_law = worst_law.max(assoc).max(star).max(twice);
    }
    let cert = alg.full_norm_certificate()?;
    let mut out = vec![
        Check::new("c_star_identity", worst_cstar <= NORM_TOL)
            .with("power", power)
            .with("elements", elements.len())
            .with_f64("max_relative_error", worst_cstar),
        Check::new("star_algebra_laws", worst_law <= IDENTITY_TOL).with_f64("max_residual", worst_law),
        Check::new("faithful_regular_representation", cert.faithful)
            .with("dimension", cert.dimension)
            .with("rank", cert.rank)
            .with("commutative", cert.commutative),
    ];
    let mut payload = None;
    if let Some(f) = element {
        let report = alg.reduced_norm(f)?;
        let names = alg.groupoid().arrow_names();
        let mut matrices = serde_json::Map::new();
        for u in alg.groupoid().units() {
            let rep = alg.regular_rep(f, u)?;
            let rows: Vec<Value> = (0..rep.matrix.nrows())
                .map(|i| {
                    Value::from(
                        (0..rep.matrix.ncols())
                            .map(|j| {
                                let z = rep.matrix[(i, j)];
                                json!([num(z.re), num(z.im)])
                            })
                            .collect::<Vec<_>>(),
                    )
                })
                .collect();
            matrices.insert(alg.groupoid().unit_name(u).to_string(), Value::from(rows));
        }
        out.push(
            Check::new("element_norm", true)
                .with_f64("reduced_norm", report.reduced_norm)
                .with(
                    "attained_at",
                    report
                        .attained_at
                        .map_or(Value::Null, |u| Value::from(alg.groupoid().unit_name(u))),
                ),
        );
        payload = Some(json!({
            "element": coefficient_doc(names, f.coeffs()),
            "regular_representation": matrices,
        }));
    }
    Ok((out, payload))
}

/// Grading, averaging maps, mode extraction and the regular-representation
/// comparison for the extension of `w`.
pub fn decompose_checks(
    w: &Arc<TwoCocycle>,
    window: RangeInclusive<i64>,
    element: Option<&LaurentElement>,
    rng: &mut impl Rng,
    samples: usize,
) -> Result<Vec<Check>> {
    let ext = CircleExtension::new(w.clone())?;
    let g = ext.groupoid().clone();
    let modes: Vec<i64> = window.clone().collect();
    let exact = w.is_exact();

    // grading on the delta basis
    let (mut cross, mut same): (f64, f64) = (0.0, 0.0);
    for &m in &modes {
        for &n in &modes {
            let alg = ext.algebra(n);
            for a in g.arrows() {
                for b in g.arrows() {
                    let p = ext.product(&ext.monomial(m, a), &ext.monomial(n, b))?;
                    if m != n {
                        cross = cross.max(p.max_abs_diff(&ext.zero()));
                    } else {
                        let expected = alg.convolve(&alg.delta(a), &alg.delta(b))?;
                        same = same.max(ext.upsilon(&p, n)?.max_abs_diff(&expected));
                        let stray = p.modes().filter(|(k, _)| *k != n).map(|(_, f)| f.max_abs());
                        same = same.max(stray.fold(0.0, f64::max));
                    }
                }
            }
        }
    }
    let grading_tol = if exact { 0.0 } else { IDENTITY_TOL };
    let mut out = vec![Check::new("mode_grading", cross == 0.0 && same <= grading_tol)
        .with("modes", format!("{}..{}", window.start(), window.end()))
        .with_f64("cross_mode_residual", cross)
        .with_f64("same_mode_residual", same)];

    // averaging maps and mode extraction
    let mut basis: Vec<LaurentElement> = Vec::new();
    for &n in &modes {
        for a in g.arrows() {
            basis.push(ext.monomial(n, a));
        }
    }
    let randoms: Vec<LaurentElement> = (0..samples).map(|_| random_laurent(rng, &ext, window.clone())).collect();
    let mut chi_res: f64 = 0.0;
    let mut ups_res: f64 = 0.0;
    let pairs = basis
        .iter()
        .flat_map(|x| basis.iter().map(move |y| (x, y)))
        .chain(randoms.iter().zip(randoms.iter().cycle().skip(1)));
    for (x, y) in pairs {
        let xy = ext.product(x, y)?;
        for &n in &modes {
            let alg = ext.algebra(n);
            let (ux, uy) = (ext.upsilon(x, n)?, ext.upsilon(y, n)?);
            ups_res = ups_res.max(ext.upsilon(&xy, n)?.max_abs_diff(&alg.convolve(&ux, &uy)?));
            let cx = ext.chi(x, n)?;
            chi_res = chi_res.max(ext.chi(&xy, n)?.max_abs_diff(&ext.product(&cx, &ext.chi(y, n)?)?));
        }
    }
    for x in basis.iter().chain(&randoms) {
        let xs = ext.involute(x)?;
        let mut sum = ext.zero();
        for &n in &modes {
            let alg = ext.algebra(n);
            let cx = ext.chi(x, n)?;
            sum = sum.add(&cx);
            chi_res = chi_res
                .max(ext.chi(&cx, n)?.max_abs_diff(&cx))
                .max(ext.chi(&xs, n)?.max_abs_diff(&ext.involute(&cx)?));
            let ux = ext.upsilon(x, n)?;
            ups_res = ups_res
                .max(ext.upsilon(&xs, n)?.max_abs_diff(&alg.involute(&ux)?))
                .max(ext.embed(&ux)?.max_abs_diff(&cx))
                .max(ext.upsilon(&ext.embed(&ux)?, n)?.max_abs_diff(&ux));
        }
        chi_res = chi_res.max(sum.max_abs_diff(x));
    }
    out.push(Check::new("averaging_projections", chi_res <= IDENTITY_TOL).with_f64("max_residual", chi_res));
    out.push(Check::new("mode_extraction_homomorphism", ups_res <= IDENTITY_TOL).with_f64("max_residual", ups_res));

    // regular representations
    let mut samples_f = randoms.clone();
    if let Some(f) = element {
        samples_f.push(f.clone());
    }
    let mut residual: f64 = 0.0;
    let mut isometry: f64 = 0.0;
    for f in &samples_f {
        for u in g.units() {
            let r = ext.intertwine_check(f, u, window.clone())?;
            residual = residual.max(r.residual);
            isometry = isometry.max(r.isometry_residual);
        }
    }
    out.push(
        Check::new("intertwining", residual <= IDENTITY_TOL && isometry <= IDENTITY_TOL)
            .with("elements", samples_f.len())
            .with_f64("max_residual", residual)
            .with_f64("isometry_residual", isometry),
    );
    let mut with_identity = samples_f.clone();
    with_identity.push(ext.identity());
    let cert = ext.reduced_decompose_check(&with_identity)?;
    out.push(
        Check::new("norm_decomposition", cert.max_deviation <= NORM_TOL)
            .with("elements", cert.samples)
            .with_f64("max_deviation", cert.max_deviation),
    );
    if let Some(f) = element {
        let d = ext.decompose(f)?;
        let per_mode: serde_json::Map<String, Value> = d
            .per_mode_norm
            .iter()
            .map(|(n, r)| (n.to_string(), num(r.reduced_norm)))
            .collect();
        out.push(
            Check::new("element_decomposition", true)
                .with("per_mode_norm", per_mode)
                .with_f64("norm", d.norm),
        );
    }
    Ok(out)
}

/// Builds `mu_k x_w G`, certifies its decomposition, and compares its
/// reduced norms with the mode decomposition.
pub fn cyclic_checks(w: &Arc<TwoCocycle>, k: u32, rng: &mut impl Rng, samples: usize) -> Result<Vec<Check>> {
    let e = cyclic_extension(w, k)?;
    let structure = e.check_structure();
    let cert = e.decompose()?;
    let ext = CircleExtension::new(w.clone())?;
    let mut norm_dev: f64 = 0.0;
    for _ in 0..samples {
        let f = random_laurent(rng, &ext, 0..=(k as i64 - 1));
        let oracle = e.reduced_norm(&e.from_laurent(&f)?);
        norm_dev = norm_dev.max((oracle - ext.decompose(&f)?.norm).abs());
    }
    let dims: Vec<usize> = cert.summands.iter().map(|s| s.dimension).collect();
    let centers: Vec<usize> = cert.summands.iter().map(|s| s.center_dimension).collect();
    Ok(vec![
        Check::new("extension_structure", structure.is_empty())
            .with("k", k)
            .with("arrows", e.groupoid().num_arrows())
            .with("violations", structure.len()),
        Check::new("cyclic_decomposition", cert.passed())
            .with("summand_dimensions", dims)
            .with("center_dimensions", centers)
            .with("exact_comparisons", cert.exact_comparisons)
            .with("exact_mismatches", cert.exact_mismatches)
            .with_f64("float_residual", cert.float_residual)
            .with("faithful_rank", cert.faithful_rank),
        Check::new("oracle_norm_agreement", norm_dev <= NORM_TOL)
            .with("elements", samples)
            .with_f64("max_deviation", norm_dev),
        Check::new("isotropy_quotient", e.isotropy_quotient_matches_base()),
    ])
}

/// Fullness, fixed-point algebra, positivity and mode-0 homogeneity of the
/// left inner product.
pub fn morita_checks(
    w: &Arc<TwoCocycle>,
    bimodule: Option<&[Complex64]>,
    window: RangeInclusive<i64>,
    rng: &mut impl Rng,
    samples: usize,
) -> Result<Vec<Check>> {
    let g = w.base().clone();
    let full = fullness_check(&g)?;
    let fixed = fixed_point_algebra(&g)?;
    let ext = CircleExtension::new(w.clone())?;
    let alg = ext.algebra(0);
    let n = g.num_units();
    let mut vectors: Vec<Vec<Complex64>> = (0..samples).map(|_| random_vector(rng, n)).collect();
    vectors.push(vec![Complex64::new(0.0, 0.0); n]);
    if let Some(b) = bimodule {
        vectors.push(b.to_vec());
    }
    let mut margin = f64::INFINITY;
    let mut hermitian: f64 = 0.0;
    let mut homogeneity: f64 = 0.0;
    for (i, f) in vectors.iter().enumerate() {
        let h = &vectors[(i + 1) % vectors.len()];
        margin = margin.min(positivity_margin(&alg, f)?);
        let lhs = alg.involute(&left_inner(&alg, f, h)?)?;
        hermitian = hermitian.max(lhs.max_abs_diff(&left_inner(&alg, h, f)?));
        homogeneity = homogeneity.max(mode_zero_deviation(&ext, f, h, window.clone())?);
    }
    let saturation = saturation_report(&ext, window.clone())?;
    Ok(vec![
        Check::new("fullness", full.full)
            .with("ideal_dimension", full.ideal_dimension)
            .with("algebra_dimension", full.algebra_dimension)
            .with("orbits", full.orbits),
        Check::new("fixed_point_algebra", fixed.dimension() == full.orbits).with("dimension", fixed.dimension()),
        Check::new("inner_product_positivity", margin >= -POSITIVITY_TOL && hermitian <= IDENTITY_TOL)
            .with("elements", vectors.len())
            .with_f64("min_eigenvalue", margin)
            .with_f64("hermitian_residual", hermitian),
        Check::new("mode_zero_homogeneity", homogeneity == 0.0).with_f64("max_deviation", homogeneity),
        Check::new(
            "ideal_in_mode_zero",
            saturation.off_mode_mass == 0.0 && saturation.ideal_dimension == saturation.mode_zero_dimension,
        )
        .with("modes", format!("{}..{}", window.start(), window.end()))
        .with("ideal_dimension", saturation.ideal_dimension)
        .with_f64("off_mode_mass", saturation.off_mode_mass),
    ])
}

/// Every `b` in `mu_k^arrows` with `delta(b) = w`, by enumeration.
pub fn exhaustive_coboundary_search(w: &TwoCocycle, k: u32) -> Vec<OneCochain> {
    let g = w.base();
    let n = g.num_arrows();
    let total = (k as u64).pow(n as u32);
    let mut found = Vec::new();
    for code in 0..total {
        let mut c = code;
        let values = (0..n)
            .map(|_| {
                let j = (c % k as u64) as i64;
                c /= k as u64;
                CircleScalar::root_of_unity(j, k as i64)
            })
            .collect();
        let b = OneCochain { values };
        if coboundary(g, &b).same_values(w) {
            found.push(b);
        }
    }
    found
}

/// Checks over seeded random instances, independent of any document.
pub fn random_checks(rng: &mut impl Rng, samples: usize) -> Result<Vec<Check>> {
    let mut out = Vec::new();

    // cyclic decompositions and faithfulness
    let (mut passed, mut mismatches, mut comparisons) = (0usize, 0usize, 0usize);
    let (mut float_res, mut norm_dev): (f64, f64) = (0.0, 0.0);
    let (mut faithful, mut algebras) = (0usize, 0usize);
    for _ in 0..samples {
        let inst = random_instance(rng, ORDERS);
        let e = cyclic_extension(&inst.cocycle, inst.k)?;
        let cert = e.decompose()?;
        if cert.passed() && e.check_structure().is_empty() {
            passed += 1;
        }
        mismatches += cert.exact_mismatches;
        comparisons += cert.exact_comparisons;
        float_res = float_res.max(cert.float_residual);
        let ext = CircleExtension::new(inst.cocycle.clone())?;
        let f = random_laurent(rng, &ext, 0..=(inst.k as i64 - 1));
        norm_dev = norm_dev.max((e.reduced_norm(&e.from_laurent(&f)?) - ext.decompose(&f)?.norm).abs());
        for n in 0..inst.k as i64 {
            algebras += 1;
            if ext.algebra(n).full_norm_certificate()?.faithful {
                faithful += 1;
            }
        }
        algebras += 1;
        if cert.faithful {
            faithful += 1;
        }
    }
    out.push(
        Check::new("random_cyclic_decompositions", passed == samples && mismatches == 0 && float_res <= 1e-10)
            .with("instances", samples)
            .with("passed", passed)
            .with("exact_comparisons", comparisons)
            .with("exact_mismatches", mismatches)
            .with_f64("float_residual", float_res),
    );
    out.push(
        Check::new("random_oracle_norms", norm_dev <= NORM_TOL)
            .with("instances", samples)
            .with_f64("max_deviation", norm_dev),
    );
    out.push(
        Check::new("random_faithfulness", faithful == algebras)
            .with("algebras", algebras)
            .with("faithful", faithful),
    );

    // C*-identity
    let elements = 5 * samples;
    let mut worst: f64 = 0.0;
    let mut inst = random_instance(rng, ORDERS);
    for i in 0..elements {
        if i % 5 == 0 {
            inst = random_instance(rng, ORDERS);
        }
        let alg = TwistedAlgebra::new(inst.cocycle.clone(), rng.random_range(-2..=3))?;
        worst = worst.max(c_star_error(&alg, &random_element(rng, &alg))?);
    }
    out.push(
        Check::new("random_c_star_identity", worst <= NORM_TOL)
            .with("elements", elements)
            .with_f64("max_relative_error", worst),
    );

    // cocycle calculus
    let mut normalize_ok = 0;
    for _ in 0..samples {
        let shape = random_shape(rng);
        let g = Arc::new(shape.build());
        let k = ORDERS[rng.random_range(0..ORDERS.len())];
        let w = random_raw_cocycle(rng, &shape, &g, k);
        let (checks, _) = normalize_checks(&w)?;
        if checks.iter().all(|c| c.passed) {
            normalize_ok += 1;
        }
    }
    out.push(Check::new("random_normalization", normalize_ok == samples).with("instances", samples).with("passed", normalize_ok));
    let mut trivialize_ok = 0;
    for _ in 0..samples {
        let inst = random_principal_instance(rng, ORDERS);
        let b = inst.cocycle.trivialize_principal()?;
        if coboundary(inst.groupoid(), &b).same_values(&inst.cocycle) {
            trivialize_ok += 1;
        }
    }
    out.push(Check::new("random_principal_trivialization", trivialize_ok == samples).with("instances", samples).with("passed", trivialize_ok));

    // isotropy quotients of cyclic extensions
    let quotients = samples.div_ceil(2);
    let mut quotient_ok = 0;
    for _ in 0..quotients {
        let inst = random_principal_instance(rng, ORDERS);
        let e = cyclic_extension(&inst.cocycle, inst.k)?;
        if e.isotropy_quotient_matches_base() {
            quotient_ok += 1;
        }
    }
    out.push(Check::new("random_isotropy_quotients", quotient_ok == quotients).with("instances", quotients).with("passed", quotient_ok));

    // left inner products
    let vectors = 2 * samples;
    let mut margin = f64::INFINITY;
    let mut full = true;
    let mut inst = random_principal_instance(rng, ORDERS);
    for i in 0..vectors {
        if i % 10 == 0 {
            inst = random_principal_instance(rng, ORDERS);
            full &= fullness_check(inst.groupoid())?.full;
        }
        let alg = TwistedAlgebra::new(inst.cocycle.clone(), 0)?;
        margin = margin.min(positivity_margin(&alg, &random_vector(rng, inst.groupoid().num_units()))?);
    }
    out.push(
        Check::new("random_positivity_and_fullness", margin >= -POSITIVITY_TOL && full)
            .with("elements", vectors)
            .with_f64("min_eigenvalue", margin),
    );
    Ok(out)
}

/// The document as JSON, with the given cocycle.
pub fn document_value(g: &FiniteGroupoid, w: &TwoCocycle) -> Value {
    json!({"groupoid": groupoid_doc(g), "cocycle": cocycle_doc(w)})
}
