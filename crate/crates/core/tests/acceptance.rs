//! The acceptance suite: one test per criterion, each printing a PASS line
//! with the checked quantity. Run with
//! `cargo test -p dqcalc --test acceptance -- --nocapture`.

use dqcalc::diffop::{hkr, hochschild_differential};
use dqcalc::formality::{
    extract_characteristic, moyal_weights, multi_wedge_graph, star_product, CharKind,
    StarProduct, WeightCollection,
};
use dqcalc::gc2::{
    act_on_wheel_weights, gc_bracket, gc_differential, wheel_coefficient, GraphVector,
};
use dqcalc::graph::{canonicalize, wedge_graph, wheel_family, Graph, Species, WheelKind};
use dqcalc::mc::estimate_weight;
use dqcalc::pbw::{
    duflo_coefficients, duflo_multiplicativity_residual, sl2_casimir, CoeffNormalization,
    LieAlgebra,
};
use dqcalc::poly::Poly;
use dqcalc::polyvec::PolyVectorField;
use dqcalc::rational::{factorial, rat, rat_to_f64, rint, Rat};
use dqcalc::relations::{relation_contributors, Mechanism, RelationKind};
use dqcalc::series::{
    bernoulli, duflo_closed_form, duflo_log_expansion, duflo_reference_series, log_gamma,
    zeta_log_gamma_sum, zeta_reference_series, ZetaVariant, EULER_GAMMA,
};
use num_complex::Complex64;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn pass(criterion: usize, detail: &str) {
    println!("[acceptance] criterion {criterion:2} PASS: {detail}");
}

#[test]
fn criterion_01_bernoulli_closed_form_identity() {
    let start = std::time::Instant::now();
    let closed = duflo_closed_form(30);
    let expanded = duflo_log_expansion(30);
    assert_eq!(closed, expanded, "series routes disagree");
    for k in 1..=15usize {
        let expected = -bernoulli(2 * k)
            / (Rat::from_integer((4 * k as i64).into()) * Rat::from_integer(factorial(2 * k)));
        assert_eq!(closed.exact_coeff(2 * k).unwrap(), &expected, "2k = {}", 2 * k);
        if k < 15 {
            assert!(closed.exact_coeff(2 * k + 1).unwrap().is_zero());
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}");
    pass(1, &format!("log expansion equals -B_2j/(4j(2j)!) through x^30 in {elapsed:?}"));
}

#[test]
fn criterion_02_log_gamma_identity() {
    let start = std::time::Instant::now();
    let mut worst = 0.0f64;
    for z in [Complex64::new(0.1, 0.0), Complex64::new(0.0, 0.1)] {
        let lhs = zeta_log_gamma_sum(z, 40);
        let rhs = log_gamma(Complex64::new(1.0, 0.0) - z) - EULER_GAMMA * z;
        worst = worst.max((lhs - rhs).norm());
    }
    assert!(worst < 1e-12, "worst error {worst:e}");
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}");
    pass(2, &format!("zeta sum matches log Gamma(1-z) - gamma z to {worst:.2e}"));
}

#[test]
fn criterion_03_associator_even_part() {
    let kz = zeta_reference_series(ZetaVariant::Kz, 12);
    let half = zeta_reference_series(ZetaVariant::HalfPropagator, 12);
    assert_eq!(kz, half, "the two zeta-series normalizations must coincide");
    let duflo = duflo_reference_series(12);
    let err = kz.even_part().max_abs_diff(&duflo);
    assert!(err < 1e-12, "even part off by {err:e}");
    pass(3, &format!("even part of the associator series matches the reference to {err:.2e}"));
}

#[test]
fn criterion_04_wheel_action_invariance() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x04);
    let wheels: Vec<GraphVector> = [3usize, 5, 7]
        .iter()
        .map(|&j| {
            GraphVector::single(&wheel_family(WheelKind::Gc2Wheel, j).unwrap(), rint(1)).unwrap()
        })
        .collect();
    let rand_rat = |rng: &mut ChaCha8Rng| {
        rat(rng.gen_range(-20..=20), rng.gen_range(1..=9))
    };
    for trial in 0..50 {
        // Random cocycle combination of odd wheels.
        let mut v = GraphVector::new();
        for w in &wheels {
            v = v.add(&w.scale(&rand_rat(&mut rng)));
        }
        // Random weight table on the wheel families, j <= 8.
        let mut table = WeightCollection::new(12);
        for j in 2..=8 {
            for kind in [WheelKind::DufloI, WheelKind::DufloII, WheelKind::CurvIII] {
                table
                    .set_weight(&wheel_family(kind, j).unwrap(), rand_rat(&mut rng))
                    .unwrap();
            }
        }
        let acted = act_on_wheel_weights(&table, &v)
            .unwrap_or_else(|e| panic!("trial {trial}: {e}"));
        let before = extract_characteristic(&table, CharKind::Duflo, 8)
            .unwrap()
            .sub(&extract_characteristic(&table, CharKind::Curv, 8).unwrap());
        let after = extract_characteristic(&acted, CharKind::Duflo, 8)
            .unwrap()
            .sub(&extract_characteristic(&acted, CharKind::Curv, 8).unwrap());
        assert_eq!(before, after, "trial {trial}");
    }
    pass(4, "duflo - curv unchanged under 50 random odd-wheel cocycle actions");
}

#[test]
fn criterion_05_relation_contributors() {
    for j in 2..=6 {
        let base_key = canonicalize(&wheel_family(WheelKind::HomotopyBase, j).unwrap()).key;

        let found = relation_contributors(
            &wheel_family(WheelKind::DufloI, j).unwrap(),
            RelationKind::CochainHomotopy,
        )
        .unwrap();
        assert_eq!(found.len(), 1, "spokes-in wheel j={j}: {found:?}");
        assert_eq!(canonicalize(&found[0].0).key, base_key);
        assert_eq!(found[0].1, Mechanism::GerstenhaberCompose);

        let found = relation_contributors(
            &wheel_family(WheelKind::DufloII, j).unwrap(),
            RelationKind::CochainHomotopy,
        )
        .unwrap();
        assert_eq!(found.len(), 1, "two-ground wheel j={j}: {found:?}");
        assert_eq!(canonicalize(&found[0].0).key, base_key);
        assert_eq!(found[0].1, Mechanism::HochschildAttach);

        let found = relation_contributors(
            &wheel_family(WheelKind::ModuleTarget, j).unwrap(),
            RelationKind::Module,
        )
        .unwrap();
        let mut keys: Vec<_> = found.iter().map(|(g, _)| canonicalize(g).key).collect();
        keys.sort();
        let mut expected = vec![
            canonicalize(&wheel_family(WheelKind::CurvIII, j).unwrap()).key,
            canonicalize(&wheel_family(WheelKind::ChainWheel, j).unwrap()).key,
        ];
        expected.sort();
        assert_eq!(keys, expected, "module target j={j}");
    }
    pass(5, "unique homotopy sources and the exact module source pair for 2 <= j <= 6");
}

/// All isomorphism classes of valid gc2 graphs with the given vertex count,
/// as canonical representatives (graphs with sign 0 included).
fn all_gc2_classes(n: usize) -> Vec<Graph> {
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            pairs.push((i, j));
        }
    }
    let mut seen = std::collections::BTreeSet::new();
    let mut out = Vec::new();
    for mask in 0u32..(1 << pairs.len()) {
        if (mask.count_ones() as usize) < 3 * n / 2 {
            continue;
        }
        let edges: Vec<(usize, usize)> = pairs
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &e)| e)
            .collect();
        let Ok(g) = Graph::new(Species::Gc2, n, 0, None, edges) else {
            continue;
        };
        let canon = canonicalize(&g);
        if seen.insert(canon.key.clone()) {
            out.push(canon.representative());
        }
    }
    out
}

#[test]
fn criterion_06_gc2_suite() {
    let start = std::time::Instant::now();

    let tetra = wheel_family(WheelKind::Tetrahedron, 0).unwrap();
    let tetra_vec = GraphVector::single(&tetra, rint(1)).unwrap();
    assert!(gc_differential(&tetra_vec).is_zero(), "tetrahedron not closed");

    let w5 = wheel_family(WheelKind::Gc2Wheel, 5).unwrap();
    let w5_vec = GraphVector::single(&w5, rint(1)).unwrap();
    assert!(gc_differential(&w5_vec).is_zero(), "5-wheel not closed");

    assert_eq!(
        canonicalize(&wheel_family(WheelKind::Gc2Wheel, 4).unwrap()).sign,
        0,
        "4-wheel must vanish"
    );

    // d^2 = 0 on every gc2 graph with at most 6 vertices.
    let mut classes = 0usize;
    for n in 4..=6 {
        for g in all_gc2_classes(n) {
            let v = match GraphVector::single(&g, rint(1)) {
                Ok(v) => v,
                Err(_) => continue,
            };
            let ddv = gc_differential(&gc_differential(&v));
            assert!(ddv.is_zero(), "d^2 != 0 on {:?}", g.edges);
            classes += 1;
        }
    }

    // Graded Jacobi on random triples of graphs with <= 5 vertices (with
    // random labelings and edge orders exercising the orientation signs).
    let mut pool: Vec<Graph> = Vec::new();
    for n in 4..=5 {
        pool.extend(all_gc2_classes(n));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x06);
    for _ in 0..12 {
        let pick = |rng: &mut ChaCha8Rng| {
            let g = pool[rng.gen_range(0..pool.len())].clone();
            shuffle_graph(&g, rng)
        };
        let a = GraphVector::single(&pick(&mut rng), rint(1)).unwrap();
        let b = GraphVector::single(&pick(&mut rng), rint(1)).unwrap();
        let c = GraphVector::single(&pick(&mut rng), rint(1)).unwrap();
        // All graphs here have even degree, so the graded signs are +1:
        // [a,[b,c]] + [b,[c,a]] + [c,[a,b]] = 0.
        let jac = gc_bracket(&a, &gc_bracket(&b, &c))
            .add(&gc_bracket(&b, &gc_bracket(&c, &a)))
            .add(&gc_bracket(&c, &gc_bracket(&a, &b)));
        assert!(jac.is_zero(), "Jacobi fails");
    }
    // Antisymmetry across distinct even-degree elements.
    let anti = gc_bracket(&tetra_vec, &w5_vec).add(&gc_bracket(&w5_vec, &tetra_vec));
    assert!(anti.is_zero(), "antisymmetry fails on [tetra, w5]");

    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 60, "took {elapsed:?}");
    pass(
        6,
        &format!("closed wheels, vanishing even wheel, d^2 = 0 on {classes} classes, Jacobi; {elapsed:?}"),
    );
}

/// Random relabeling and edge reordering of a gc2 graph.
fn shuffle_graph(g: &Graph, rng: &mut ChaCha8Rng) -> Graph {
    let n = g.vertex_count();
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        perm.swap(i, rng.gen_range(0..=i));
    }
    let mut edges: Vec<(usize, usize)> =
        g.edges.iter().map(|&(s, t)| (perm[s], perm[t])).collect();
    for i in (1..edges.len()).rev() {
        edges.swap(i, rng.gen_range(0..=i));
    }
    Graph::new(g.species, g.aerial, g.ground, None, edges).unwrap()
}

#[test]
fn criterion_07_weight_oracle() {
    let start = std::time::Instant::now();
    let seed = 20260809;
    let wedge = estimate_weight(&wedge_graph(), 1_000_000, seed).unwrap();
    assert!(wedge.stderr < 0.005, "wedge stderr {}", wedge.stderr);
    assert!(
        (wedge.mean - 0.5).abs() <= 3.0 * wedge.stderr,
        "wedge {} +- {}",
        wedge.mean,
        wedge.stderr
    );
    let double = estimate_weight(&multi_wedge_graph(2), 1_000_000, seed).unwrap();
    assert!(double.stderr < 0.005, "double wedge stderr {}", double.stderr);
    assert!(
        (double.mean - 0.25).abs() <= 3.0 * double.stderr,
        "double wedge {} +- {}",
        double.mean,
        double.stderr
    );
    // Deterministic per seed.
    let again = estimate_weight(&wedge_graph(), 1_000_000, seed).unwrap();
    assert_eq!(wedge, again);
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 60, "took {elapsed:?}");
    pass(
        7,
        &format!(
            "wedge {:.4}+-{:.4}, double {:.4}+-{:.4} at 1e6 samples; {elapsed:?}",
            wedge.mean, wedge.stderr, double.mean, double.stderr
        ),
    );
}

#[test]
fn criterion_08_star_product_suite() {
    // Exact Moyal part.
    let moyal = moyal_weights(6).unwrap();
    let mut pi = PolyVectorField::zero(2, 2);
    pi.add_component(vec![0, 1], Poly::one(2)).unwrap();
    let x = Poly::var(2, 0);
    let y = Poly::var(2, 1);
    let xy = star_product(&moyal, &pi, 2, &x, &y).unwrap();
    let yx = star_product(&moyal, &pi, 2, &y, &x).unwrap();
    let comm = xy.sub(&yx);
    assert!(comm.coeff(0).is_zero());
    assert_eq!(comm.coeff(1), &Poly::one(2), "x * y - y * x != hbar");
    assert!(comm.coeff(2).is_zero());

    let star = StarProduct::new(&moyal, &pi, 6).unwrap();
    let f = &(&x * &x) * &y;
    let g = &(&y * &y) + &x;
    let h = &(&x * &y) + &(&y * &y);
    let residual = dqcalc::formality::associativity_residual_of(&star, &f, &g, &h);
    assert!(residual.is_zero(), "Moyal residual nonzero");

    // Monte Carlo order-2 weights with the linear Poisson structure
    // pi = x1 d1 ^ d2. The residual at hbar^2 is affine in the six
    // second-order class weights; each weight's sensitivity is computed
    // exactly and the estimate errors are propagated linearly.
    let mut pi_lin = PolyVectorField::zero(2, 2);
    pi_lin.add_component(vec![0, 1], Poly::var(2, 0)).unwrap();

    let classes = order_two_classes();
    assert_eq!(classes.len(), 6, "expected six second-order classes");
    let seed = 20260809;
    let estimates: Vec<_> = classes
        .iter()
        .map(|g| estimate_weight(g, 1_000_000, seed).unwrap())
        .collect();

    let residual_h2 = |weights: &[Rat]| -> Poly {
        let mut w = WeightCollection::new(4);
        w.set_weight(&wedge_graph(), rat(1, 2)).unwrap();
        for (g, c) in classes.iter().zip(weights) {
            w.set_weight(g, c.clone()).unwrap();
        }
        let star = StarProduct::new(&w, &pi_lin, 2).unwrap();
        dqcalc::formality::associativity_residual_of(&star, &f, &g, &h)
            .coeff(2)
            .clone()
    };

    let zeros = vec![Rat::from_integer(0.into()); classes.len()];
    let base = residual_h2(&zeros);
    let sensitivities: Vec<Poly> = (0..classes.len())
        .map(|i| {
            let mut unit = zeros.clone();
            unit[i] = Rat::from_integer(1.into());
            &residual_h2(&unit) - &base
        })
        .collect();

    // Collect every monomial appearing anywhere.
    let mut monomials: std::collections::BTreeSet<Vec<u16>> = Default::default();
    monomials.extend(base.terms().map(|(e, _)| e.clone()));
    for s in &sensitivities {
        monomials.extend(s.terms().map(|(e, _)| e.clone()));
    }
    assert!(!monomials.is_empty(), "residual is structurally zero; no check");
    let mut worst_ratio = 0.0f64;
    for mono in &monomials {
        let mut value = rat_to_f64(&base.coeff(mono));
        let mut var = 0.0f64;
        for (est, sens) in estimates.iter().zip(&sensitivities) {
            let l = rat_to_f64(&sens.coeff(mono));
            value += est.mean * l;
            var += (est.stderr * l).powi(2);
        }
        let bound = 3.0 * var.sqrt();
        assert!(
            value.abs() <= bound,
            "monomial {mono:?}: residual {value:e} exceeds 3 sigma {bound:e}"
        );
        if bound > 0.0 {
            worst_ratio = worst_ratio.max(value.abs() / bound);
        }
    }
    pass(
        8,
        &format!(
            "Moyal exact through hbar^6; MC hbar^2 residual within 3 sigma (worst ratio {worst_ratio:.2})"
        ),
    );
}

/// The six isomorphism classes of two-aerial, two-ground graphs in which
/// every aerial vertex has out-degree two.
fn order_two_classes() -> Vec<Graph> {
    let mut seen = std::collections::BTreeSet::new();
    let mut out = Vec::new();
    let targets = [1usize, 2, 3]; // for vertex 0: {1, g1, g2}; similar for 1
    for a1 in targets {
        for a2 in targets {
            if a2 <= a1 {
                continue;
            }
            for b1 in [0usize, 2, 3] {
                for b2 in [0usize, 2, 3] {
                    if b2 <= b1 {
                        continue;
                    }
                    let g = Graph::new(
                        Species::Kontsevich,
                        2,
                        2,
                        None,
                        vec![(0, a1), (0, a2), (1, b1), (1, b2)],
                    )
                    .unwrap();
                    let canon = canonicalize(&g);
                    if seen.insert(canon.key.clone()) {
                        out.push(canon.representative());
                    }
                }
            }
        }
    }
    out
}

#[test]
fn criterion_09_hkr_chain_map() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x09);
    for trial in 0..100 {
        let degree = rng.gen_range(0..=3usize);
        let mut field = PolyVectorField::zero(3, degree);
        // Random components on random increasing tuples with coefficients of
        // degree <= 2.
        for _ in 0..3 {
            let mut dirs: Vec<u8> = (0..3u8).collect();
            for i in (1..3).rev() {
                dirs.swap(i, rng.gen_range(0..=i));
            }
            let mut dirs: Vec<u8> = dirs.into_iter().take(degree).collect();
            dirs.sort_unstable();
            let mut coeff = Poly::zero(3);
            for _ in 0..2 {
                let exps = vec![
                    rng.gen_range(0..=1u16),
                    rng.gen_range(0..=1u16),
                    rng.gen_range(0..=1u16),
                ];
                coeff.add_term(exps, rat(rng.gen_range(-9..=9), 1));
            }
            field.add_component(dirs, coeff).unwrap();
        }
        let image = hkr(&field);
        let dh = hochschild_differential(&image);
        assert!(dh.is_zero(), "trial {trial}: d_H(hkr) != 0");
    }
    pass(9, "d_H(hkr(field)) = 0 for 100 random fields on R^3");
}

#[test]
fn criterion_10_duflo_theorem_instance() {
    let start = std::time::Instant::now();
    let sl2 = LieAlgebra::sl2();
    let cas = sl2_casimir();
    let coeffs = duflo_coefficients(4, CoeffNormalization::Plain);

    let corrected = duflo_multiplicativity_residual(&sl2, &cas, &cas, &coeffs).unwrap();
    assert!(corrected.is_zero(), "corrected sl2 residual nonzero");
    let plain = duflo_multiplicativity_residual(&sl2, &cas, &cas, &[]).unwrap();
    assert!(!plain.is_zero(), "plain symmetrization unexpectedly multiplicative");
    let recorded = plain.render(&["H", "E", "F"]);

    // Abelian and Heisenberg fixtures vanish in every configuration.
    let abelian = LieAlgebra::abelian(3);
    let p = {
        let x = Poly::var(3, 0);
        let y = Poly::var(3, 1);
        &(&x * &x) + &(&x * &y)
    };
    let heis = LieAlgebra::heisenberg();
    let z = Poly::var(3, 2);
    let z2 = &z * &z;
    for coeffs in [
        Vec::new(),
        duflo_coefficients(4, CoeffNormalization::Plain),
        duflo_coefficients(4, CoeffNormalization::PerOrder),
    ] {
        assert!(duflo_multiplicativity_residual(&abelian, &p, &p, &coeffs)
            .unwrap()
            .is_zero());
        assert!(duflo_multiplicativity_residual(&heis, &z2, &z, &coeffs)
            .unwrap()
            .is_zero());
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 30, "took {elapsed:?}");
    pass(
        10,
        &format!("sl2 Casimir residual 0 with the Bernoulli coefficients; identity residual = {recorded}; {elapsed:?}"),
    );
}

#[test]
fn criterion_11_brane_bookkeeping() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x11);
    let mut table = WeightCollection::new(12);
    // The two normalization graphs carry coefficient 1.
    for dist in [0usize, 1] {
        let g = Graph::new(Species::Brane, 0, 2, Some(dist), vec![]).unwrap();
        table.set_weight(&g, rint(1)).unwrap();
    }
    let mut expected: Vec<(usize, Rat)> = Vec::new();
    for j in 2..=8 {
        let a = rat(rng.gen_range(-30..=30), rng.gen_range(1..=7));
        let b = rat(rng.gen_range(-30..=30), rng.gen_range(1..=7));
        table
            .set_weight(&wheel_family(WheelKind::DufloI, j).unwrap(), a.clone())
            .unwrap();
        table
            .set_weight(&wheel_family(WheelKind::BraneWheel, j).unwrap(), b.clone())
            .unwrap();
        expected.push((j, (a + b) / Rat::from_integer((j as i64).into())));
    }
    table.validate_normalization().unwrap();
    let series = extract_characteristic(&table, CharKind::Brane, 8).unwrap();
    for (j, want) in expected {
        assert_eq!(series.exact_coeff(j).unwrap(), &want, "j = {j}");
    }
    pass(11, "brane series equals (c_I + c_bar)/j per coefficient on a synthetic table");
}
