use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use prony_dh::classical::{hankel_matrix, hankel_nullspace, polynomial_roots, prony_solve};
use prony_dh::conditioning::{cn_decimated, cn_full, forward_jacobian};
use prony_dh::esprit::{esprit_estimate, EspritOptions};
use prony_dh::hankelize::{
    build_hankel_system, closed_form_jacobian, elementary_symmetric, prony_polynomial, tau_expansion,
};
use prony_dh::linalg::{inverse, pseudo_inverse};
use prony_dh::model::{add_noise, decimate, forward_map, scale_map, separation};
use prony_dh::pipeline::{generate_instance, node_error, InstanceSpec};
use prony_dh::polysolve::{solve_system, MultiPoly, SquareSystem, TrackOptions};
use prony_dh::pruning::{aliased_roots, residual, select_exhaustive, select_from, select_prefilter};
use prony_dh::{MultiplicityVector, NoiseSpec, PronyParameters};

fn unit(theta: f64) -> Complex64 {
    Complex64::from_polar(1.0, theta)
}

fn coefficient() -> impl Strategy<Value = Complex64> {
    (0.5..1.5f64, 0.0..2.0 * PI).prop_map(|(r, t)| Complex64::from_polar(r, t))
}

/// Parameters with `s <= 3`, `d_j <= 3` and nodes at least `gap` apart.
fn params(gap: f64) -> impl Strategy<Value = PronyParameters> {
    prop::collection::vec((1..=3usize, 0.0..2.0 * PI), 1..=3)
        .prop_filter("separated", move |v| {
            v.iter().enumerate().all(|(i, a)| v[..i].iter().all(|b| (unit(a.1) / unit(b.1)).arg().abs() >= gap))
        })
        .prop_flat_map(|v| {
            let nodes: Vec<Complex64> = v.iter().map(|(_, t)| unit(*t)).collect();
            let coefs: Vec<_> = v.iter().map(|(d, _)| prop::collection::vec(coefficient(), *d)).collect();
            (Just(nodes), coefs)
        })
        .prop_map(|(nodes, coefs)| PronyParameters::new(nodes, coefs).unwrap())
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

fn clustered(seed: u64, delta: f64) -> PronyParameters {
    let spec = InstanceSpec { multiplicities: MultiplicityVector::new(vec![2, 2]).unwrap(), delta_min: delta, delta_max: delta };
    generate_instance(&spec, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap().0
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn decimation_commutes_with_scaling(x in params(0.1), p in 1..12usize) {
        let r = x.multiplicities().r();
        let dec = decimate(&forward_map(&x, p * (r - 1) + 1), p, r).unwrap();
        let direct = forward_map(&scale_map(&x, p).unwrap(), r);
        for (a, b) in dec.values().iter().zip(direct.values()) {
            prop_assert!((a - b).norm() <= 1e-12 * (1.0 + b.norm()));
        }
    }

    #[test]
    fn forward_map_superposition(x in params(0.1), extra in coefficient(), pick in any::<prop::sample::Index>()) {
        let flat = x.to_flat();
        let labels = x.flat_labels();
        let coef_slots: Vec<usize> = (0..flat.len()).filter(|&i| labels[i].starts_with('a')).collect();
        let slot = coef_slots[pick.index(coef_slots.len())];
        let mut bumped = flat.clone();
        bumped[slot] += extra;
        let mut only = vec![Complex64::new(0.0, 0.0); flat.len()];
        for (i, l) in labels.iter().enumerate() {
            if l.starts_with('z') {
                only[i] = flat[i];
            }
        }
        only[slot] = extra;
        let mv = x.multiplicities();
        // Zero coefficients are fine for the forward map even if invalid as a model.
        let n = 30;
        let lhs = forward_map(&PronyParameters::from_flat(mv, &bumped).unwrap(), n);
        let a = forward_map(&x, n);
        let b = forward_map_loose(&only, mv, n);
        for (k, bk) in b.iter().enumerate() {
            let sum = a.values()[k] + bk;
            prop_assert!((lhs.values()[k] - sum).norm() <= 1e-13 * (1.0 + k as f64).powi(3));
        }
    }

    #[test]
    fn separation_invariances(x in params(0.05), theta in 0.0..2.0 * PI) {
        let base = separation(&x);
        let mut nodes = x.nodes().to_vec();
        let mut coefs = x.coefficients().to_vec();
        nodes.reverse();
        coefs.reverse();
        let flipped = separation(&PronyParameters::new(nodes.clone(), coefs.clone()).unwrap());
        let rotated = separation(
            &PronyParameters::new(nodes.iter().map(|z| z * unit(theta)).collect(), coefs).unwrap(),
        );
        prop_assert!((base.global - flipped.global).abs() < 1e-12);
        prop_assert!((base.diameter - rotated.diameter).abs() < 1e-12);
        prop_assert!((base.global - rotated.global).abs() < 1e-12);
    }

    #[test]
    fn bounded_noise_respects_bound(level in 1e-12..1.0f64, seed in any::<u64>()) {
        let clean = forward_map(&PronyParameters::new(vec![unit(0.3)], vec![vec![Complex64::new(1.0, 0.0)]]).unwrap(), 200);
        let noisy = add_noise(&clean, &NoiseSpec::bounded(level, seed));
        for (a, b) in noisy.values().iter().zip(clean.values()) {
            prop_assert!((a - b).norm() < level);
        }
    }

    #[test]
    fn tau_matches_prony_polynomial(parts in prop::collection::vec(1..=3usize, 1..=3), seed in any::<u64>()) {
        let mv = MultiplicityVector::new(parts).unwrap();
        let tau = tau_expansion(&mv).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let point: Vec<Complex64> = (0..mv.s())
            .map(|_| {
                use rand::Rng;
                Complex64::new(rng.random_range(-1.5..1.5), rng.random_range(-1.5..1.5))
            })
            .collect();
        let expected = prony_polynomial(&point, &mv).unwrap();
        let scale: f64 = expected.iter().map(|c| c.norm()).fold(0.0, f64::max);
        for (l, c) in expected.iter().enumerate() {
            prop_assert!((tau.evaluate(l, &point) - c).norm() <= 1e-12 * scale.max(1.0));
        }
    }

    #[test]
    fn hankel_system_is_linear_in_data(
        a in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 6),
        b in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 6),
        alpha in (-2.0..2.0f64, -2.0..2.0f64),
        beta in (-2.0..2.0f64, -2.0..2.0f64),
    ) {
        let mv = MultiplicityVector::new(vec![2, 2]).unwrap();
        let to_c = |v: &[(f64, f64)]| v.iter().map(|(r, i)| Complex64::new(*r, *i)).collect::<Vec<_>>();
        let (na, nb) = (to_c(&a), to_c(&b));
        let (al, be) = (Complex64::new(alpha.0, alpha.1), Complex64::new(beta.0, beta.1));
        let mix: Vec<Complex64> = na.iter().zip(&nb).map(|(x, y)| al * x + be * y).collect();
        let build = |v: Vec<Complex64>| build_hankel_system(&prony_dh::MeasurementSequence::new(v), &mv).unwrap();
        let (sa, sb, sm) = (build(na), build(nb), build(mix));
        for k in 0..2 {
            for (exp, c) in sm.equations()[k].terms() {
                let expected = al * sa.equations()[k].coefficient(exp) + be * sb.equations()[k].coefficient(exp);
                prop_assert!((c - expected).norm() <= 1e-12 * (1.0 + expected.norm()));
            }
        }
    }

    #[test]
    fn jacobian_determinant_factorizes(x in params(0.3)) {
        let jf = closed_form_jacobian(&x).unwrap();
        let w = x.nodes();
        let det_v: Complex64 = (0..w.len())
            .flat_map(|i| (i + 1..w.len()).map(move |j| (i, j)))
            .map(|(i, j)| w[j] - w[i])
            .product();
        let diag: Complex64 = (0..w.len()).map(|j| jf.diagonal[(j, j)]).product();
        prop_assert!(rel(jf.vandermonde.determinant(), det_v) <= 1e-10);
        prop_assert!(rel(jf.product.determinant(), det_v * diag) <= 1e-10);
    }

    #[test]
    fn roots_invert_prony_polynomial(x in params(0.3)) {
        let mv = x.multiplicities();
        let simple = MultiplicityVector::new(vec![1; mv.s()]).unwrap();
        let poly = prony_polynomial(x.nodes(), &simple).unwrap();
        let roots = polynomial_roots(&poly);
        prop_assert!(node_error(x.nodes(), &roots) <= 1e-8);
    }

    #[test]
    fn prony_recovers_separated_nodes(x in params(0.5)) {
        let d = x.multiplicities().d();
        let meas = forward_map(&x, 2 * d);
        let est = prony_solve(&meas, x.multiplicities()).unwrap();
        // Triple roots split by about eps^(1/3); the cluster centroid cancels
        // only the first-order part, leaving errors near 1e-8.
        let triple = x.multiplicities().parts().contains(&3);
        let tol = if triple { 1e-6 } else { 1e-8 };
        prop_assert!(node_error(x.nodes(), est.nodes()) <= tol);
        // Same conditioning limit for the 1e-9 coefficient match.
        if !triple {
            let null = hankel_nullspace(&hankel_matrix(&meas, d).unwrap()).unwrap();
            let expected = prony_polynomial(x.nodes(), x.multiplicities()).unwrap();
            for (a, b) in null.iter().zip(&expected) {
                prop_assert!((a - b).norm() <= 1e-9 * (1.0 + b.norm()), "{a} vs {b}");
            }
        }
    }

    #[test]
    fn esprit_is_scale_invariant(thetas in prop::collection::vec(0.0..2.0 * PI, 2..=3), scale in coefficient()) {
        prop_assume!(thetas.iter().enumerate().all(|(i, a)| thetas[..i].iter().all(|b| (unit(*a) / unit(*b)).arg().abs() >= 0.5)));
        let nodes: Vec<Complex64> = thetas.iter().map(|t| unit(*t)).collect();
        let coefs = nodes.iter().enumerate().map(|(i, _)| vec![unit(i as f64)]).collect();
        let x = PronyParameters::new(nodes, coefs).unwrap();
        let meas = forward_map(&x, 40);
        let opts = EspritOptions::default();
        let a = esprit_estimate(&meas, x.multiplicities(), &opts).unwrap();
        let b = esprit_estimate(&meas.scaled(scale), x.multiplicities(), &opts).unwrap();
        prop_assert!(node_error(a.nodes(), b.nodes()) <= 1e-10);
        prop_assert!(node_error(x.nodes(), a.nodes()) <= 1e-7);
        prop_assert_eq!(a, esprit_estimate(&meas, x.multiplicities(), &opts).unwrap());
    }

    #[test]
    fn pseudo_inverse_identity(x in params(0.3)) {
        let j = forward_jacobian(&x, 1, 3 * x.multiplicities().r());
        let pinv = pseudo_inverse(&j);
        let back = &j * &pinv.matrix * &j;
        let err = (&back - &j).iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        let norm = j.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        prop_assert!(err <= 1e-10 * norm);
    }

    #[test]
    fn decimated_cn_uses_strided_rows(x in params(0.2), p in 1..6usize) {
        let r = x.multiplicities().r();
        let full = forward_jacobian(&x, 1, p * (r - 1) + 1);
        let rows = nalgebra::DMatrix::from_fn(r, r, |k, c| full[(p * k, c)]);
        prop_assert_eq!(&rows, &forward_jacobian(&x, p, r));
        if let (Ok(rep), Some(inv)) = (cn_decimated(&x, p), inverse(&rows)) {
            for (i, v) in rep.values.iter().enumerate() {
                let direct: f64 = (0..r).map(|k| inv[(i, k)].norm()).sum();
                prop_assert!((v - direct).abs() <= 1e-9 * direct);
            }
            prop_assert_eq!(rep.values, cn_decimated(&x, p).unwrap().values);
        }
        if let Ok(a) = cn_full(&x, 4 * r) {
            prop_assert_eq!(a.values, cn_full(&x, 4 * r).unwrap().values);
        }
    }

    #[test]
    fn aliases_power_back(thetas in prop::collection::vec(0.0..2.0 * PI, 1..=3), radius in 0.8..1.2f64, p in 1..9usize) {
        let u: Vec<Complex64> = thetas.iter().map(|t| Complex64::from_polar(radius, *t)).collect();
        let set = aliased_roots(&u, p);
        prop_assert_eq!(set.len(), p.pow(u.len() as u32));
        for c in &set.candidates {
            for (z, x) in c.nodes.iter().zip(&u) {
                prop_assert!((z.powu(p as u32) - x / x.norm()).norm() <= 1e-12);
            }
        }
    }
}

/// Forward map that accepts zero coefficients.
fn forward_map_loose(flat: &[Complex64], mv: &MultiplicityVector, n: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    let mut col = 0;
    for &dj in mv.parts() {
        let block = &flat[col..col + dj];
        let z = flat[col + dj];
        for (k, v) in out.iter_mut().enumerate() {
            let amp: Complex64 = block.iter().enumerate().map(|(l, a)| a * (k as f64).powi(l as i32)).sum();
            *v += z.powu(k as u32) * amp;
        }
        col += dj + 1;
    }
    out
}

#[test]
fn symmetric_functions_expand_integer_products() {
    // (x - 1)^2 (x - 2)(x + 3) = x^4 - x^3 - 7x^2 + 13x - 6
    let mv = MultiplicityVector::new(vec![2, 1, 1]).unwrap();
    let nodes = [1.0, 2.0, -3.0].map(|v| Complex64::new(v, 0.0));
    let poly = prony_polynomial(&nodes, &mv).unwrap();
    let expected = [-6.0, 13.0, -7.0, -1.0, 1.0];
    for (c, e) in poly.iter().zip(expected) {
        assert_eq!(*c, Complex64::new(e, 0.0));
    }
    let sigma = elementary_symmetric(&[1.0, 1.0, 2.0, -3.0].map(|v| Complex64::new(v, 0.0))).sigma;
    for (k, s) in sigma.iter().enumerate() {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        assert_eq!(*s * sign, poly[4 - k]);
    }
}

#[test]
fn single_node_limit_roots() {
    let x = PronyParameters::new(vec![unit(0.3)], vec![vec![Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)]]).unwrap();
    let p = 1000;
    let dec = decimate(&forward_map(&x, 3 * p + 1), p, 4).unwrap();
    let q = prony_dh::hankelize::single_node_polynomial(&dec, 2).unwrap();
    let mut mods: Vec<f64> = polynomial_roots(&q).iter().map(|r| r.norm()).collect();
    mods.sort_by(f64::total_cmp);
    assert!((mods[1] / mods[0] - 3.0).abs() <= 0.01);
}

fn dense_quadratic(rng: &mut ChaCha8Rng) -> MultiPoly {
    use rand_distr::{Distribution, StandardNormal};
    let mut sample = || Complex64::new(StandardNormal.sample(rng), StandardNormal.sample(rng));
    MultiPoly::from_terms(2, [[0, 0], [1, 0], [0, 1], [2, 0], [1, 1], [0, 2]].map(|e| (e.to_vec(), sample())))
}

#[test]
fn path_bookkeeping_and_gamma_independence() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for trial in 0..10 {
        let sys = SquareSystem::new(vec![dense_quadratic(&mut rng), dense_quadratic(&mut rng)]).unwrap();
        let a = solve_system(&sys, &TrackOptions::with_seed(trial)).unwrap();
        let b = solve_system(&sys, &TrackOptions::with_seed(trial + 1000)).unwrap();
        assert_eq!(a.converged_paths + a.diverged_paths + a.failed_paths, a.bezout_number);
        assert_eq!(a, solve_system(&sys, &TrackOptions::with_seed(trial)).unwrap());
        assert_eq!(a.len(), b.len());
        for (x, y) in a.solutions.iter().zip(&b.solutions) {
            assert!(prony_dh::polysolve::distance(&x.point, &y.point) <= 1e-8);
        }
        let tol = TrackOptions::default().endpoint_tol * (1.0 + sys.coefficient_norm());
        assert!(a.solutions.iter().all(|s| s.residual <= tol));
    }
}

#[test]
fn true_nodes_minimize_residual() {
    for seed in 0..10 {
        let x = clustered(seed, 0.05);
        let mv = x.multiplicities().clone();
        let p = 8;
        let meas = forward_map(&x, 6 * p);
        let dec = decimate(&meas, p, 6).unwrap();
        let set = solve_system(build_hankel_system(&dec, &mv).unwrap().system(), &TrackOptions::with_seed(seed)).unwrap();
        let (_, candidates) = select_prefilter(&set, p).unwrap();
        let truth = residual(x.nodes(), &meas, &mv, 3).unwrap();
        let mut others = 0;
        for c in &candidates.candidates {
            if node_error(x.nodes(), &c.nodes) > 1e-6 {
                others += 1;
                assert!(residual(&c.nodes, &meas, &mv, 3).unwrap() > truth);
            }
        }
        assert!(others > 0);
        let via_prefilter = select_from(&candidates, &meas, &mv, 3).unwrap();
        let exhaustive = select_exhaustive(&set, p, &meas, &mv, 3).unwrap();
        assert!(node_error(&via_prefilter.nodes, &exhaustive.nodes) <= 1e-10);
        assert!(node_error(x.nodes(), &exhaustive.nodes) <= 1e-8);
    }
}
