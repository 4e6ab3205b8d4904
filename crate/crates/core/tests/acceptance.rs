//! End-to-end checks, one test per shipped guarantee. Each test prints a
//! single `criterion NN <name>: pass` line on success; run with
//! `cargo test --test acceptance -- --nocapture` to see them all.

mod common;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use linkpack::burnside::{b23_elements, b23_mul, b23_pow, burnside_order, B23Element};
use linkpack::certify::{
    certificate, certificates_equal, dc_count_bound_for_epsilon, linking_integer,
};
use linkpack::diagrams::{mu_bar, samples, PDCode};
use linkpack::geometry::{
    canonical_hopf, hopf_pair, rigid_transform, split_pair, PLLink, Point3, RigidTransform,
};
use linkpack::grid::{tessellate, CellIx, Region};
use linkpack::homology::{build_complex, h1_basis};
use linkpack::magnus::{
    band_sum_invariance, cube_divisibility, filtration_min_degree, random_lcs_element,
    IntRing, MonomialTable, NRPoly,
};
use linkpack::packing::{density_fit, generation0, multigeneration, verify_packing};

fn pass(n: usize, what: &str) {
    println!("criterion {n:02} {what}: pass");
}

#[test]
fn criterion_01_hopf_and_split_certificates_at_two_scales() {
    for epsilon in [0.2, 0.1] {
        let started = Instant::now();
        let hopf = canonical_hopf(epsilon).unwrap();
        let cert = certificate(&hopf, "r", "b", epsilon).unwrap();
        assert!(cert.eq1(), "hopf pair at {epsilon} must certify");
        let split = split_pair(epsilon).unwrap();
        let cert = certificate(&split, "r", "b", epsilon).unwrap();
        assert!(!cert.eq1(), "split pair at {epsilon} must not certify");
        assert!(started.elapsed() < Duration::from_secs(30));
    }
    pass(1, "hopf and split certificates at 0.2 and 0.1");
}

#[test]
fn criterion_02_generation0_certificates_distinct_and_exhaustive() {
    let started = Instant::now();
    let epsilon = 0.05;
    let generation = generation0(epsilon).unwrap();
    assert_eq!(generation.count(), 8);
    let certs: Vec<_> = generation
        .links
        .iter()
        .map(|link| certificate(link, "r", "b", epsilon).unwrap())
        .collect();
    for cert in &certs {
        assert!(cert.eq1());
    }
    for i in 0..certs.len() {
        for j in i + 1..certs.len() {
            assert!(
                !certificates_equal(&certs[i], &certs[j]).unwrap(),
                "pairs {i} and {j} produced the same certificate"
            );
        }
    }
    let fingerprints: BTreeSet<_> = certs.iter().map(|c| c.fingerprint().to_string()).collect();
    assert_eq!(fingerprints.len(), certs.len());
    assert!(started.elapsed() < Duration::from_secs(300));
    pass(2, "one distinct certificate per packed pair at 0.05");
}

#[test]
fn criterion_03_coloring_bound_log_scales_by_eight_per_halving() {
    let bounds: Vec<_> = [0.2, 0.1, 0.05]
        .iter()
        .map(|&e| dc_count_bound_for_epsilon(e).unwrap())
        .collect();
    for pair in bounds.windows(2) {
        let ratio = pair[1].ln / pair[0].ln;
        assert!(
            (ratio - 8.0).abs() <= 0.4,
            "log-bound ratio {ratio} outside 8 +/- 5%"
        );
    }
    pass(3, "coloring-count log bound scales by 8 per halving");
}

#[test]
fn criterion_04_density_exponent_and_multigeneration_budget() {
    let started = Instant::now();
    let fit = density_fit(&[0.05, 0.025, 0.0125]).unwrap();
    assert!(
        (fit.exponent - 3.0).abs() <= 0.3,
        "density exponent {} outside 3 +/- 0.3",
        fit.exponent
    );
    let packing = multigeneration(0.0125, 8).unwrap();
    let n0 = packing.generations[0].count() as f64;
    let budget = 8.0 / 7.0 * n0 + packing.generations.len() as f64;
    assert!((packing.total_count() as f64) < budget);
    let report = verify_packing(&packing, 0.0125);
    assert!(report.pass);
    assert!(started.elapsed() < Duration::from_secs(600));
    pass(4, "cubic density growth and multigeneration count budget");
}

#[test]
fn criterion_05_mu_bar_golden_values() {
    let hopf = PDCode::parse(samples::HOPF_PD).unwrap();
    let result = mu_bar(&hopf, &[1, 2], None).unwrap();
    assert_eq!(result.coefficient.abs(), BigInt::from(1));
    assert!(!result.indeterminate);

    let unlink = PDCode::parse(samples::UNLINK3_PD).unwrap();
    let result = mu_bar(&unlink, &[1, 2, 3], None).unwrap();
    assert!(result.coefficient.is_zero());
    assert!(!result.indeterminate);

    let borromean = PDCode::parse(samples::BORROMEAN_PD).unwrap();
    let result = mu_bar(&borromean, &[1, 2, 3], Some(3)).unwrap();
    assert_eq!(result.coefficient.abs(), BigInt::from(1));
    assert!(!result.indeterminate);
    let residue = result.residue.unwrap();
    assert!(residue == 1 || residue == 2, "triple invariant vanished mod 3");
    pass(5, "exact two- and three-component invariants");
}

#[test]
fn criterion_06_cube_coefficients_divisible_by_three() {
    let table = MonomialTable::shared(2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0x6375_6265);
    for _ in 0..200 {
        let mut poly = NRPoly::one(IntRing, 2).unwrap();
        for idx in 1..table.len() {
            let seq: Vec<u32> = table.sequence(idx).iter().map(|&b| b as u32).collect();
            let value = BigInt::from(rng.gen_range(-9i64..=9));
            poly.set_coefficient(&seq, value).unwrap();
        }
        assert!(cube_divisibility(&poly).unwrap());
    }
    pass(6, "cubes of monic series have coefficients divisible by 3");
}

#[test]
fn criterion_07_filtration_depth_and_band_sums() {
    // Level-i elements expand with no terms below degree i.
    for t in 0..500u64 {
        let v = 1 + (t as usize) % 4;
        let level = 1 + ((t / 4) as usize) % 4;
        let p = [2u64, 3, 5][((t / 16) as usize) % 3];
        let word = random_lcs_element(level, p, v, 0x6c63_7300 + t).unwrap();
        if let Some(degree) = filtration_min_degree(&word, p, v).unwrap() {
            assert!(
                degree >= level.min(v + 1),
                "level-{level} element over {v} variables mod {p} has degree {degree}"
            );
        }
    }
    // One level past the variable count the expansion collapses to 1.
    for v in 1..=3usize {
        for p in [2u64, 3, 5] {
            for seed in 0..2u64 {
                let word = random_lcs_element(v + 1, p, v, 0xc01_1a50 + seed).unwrap();
                assert_eq!(filtration_min_degree(&word, p, v).unwrap(), None);
            }
        }
    }
    // Adding a band whose expansion is trivial never moves the coefficient.
    for t in 0..100u64 {
        let p = [2u64, 3, 5][(t as usize) % 3];
        let longitude = random_lcs_element(1, p, 2, 0xba5e_0000 + t).unwrap();
        let beta = random_lcs_element(3, p, 2, 0xbe7a_0000 + t).unwrap();
        assert!(band_sum_invariance(&longitude, &beta, p, &[1, 2]).unwrap());
    }
    pass(7, "filtration depth, collapse past the alphabet, band sums");
}

#[test]
fn criterion_08_burnside_orders_and_exponent_group() {
    assert_eq!(burnside_order(1).unwrap().to_string(), "3");
    assert_eq!(burnside_order(2).unwrap().to_string(), "27");
    assert_eq!(burnside_order(3).unwrap().to_string(), "2187");

    let elements = b23_elements();
    assert_eq!(elements.len(), 27);
    let identity = B23Element::identity();
    for &e in &elements {
        assert_eq!(b23_pow(e, 3), identity, "element does not cube to identity");
    }
    let x = B23Element::gen_x();
    let y = B23Element::gen_y();
    assert_ne!(b23_mul(x, y), b23_mul(y, x), "group must be non-abelian");

    // The two generators already reach everything.
    let mut seen = BTreeSet::new();
    let mut frontier = vec![identity];
    seen.insert(identity);
    while let Some(e) = frontier.pop() {
        for g in [x, y] {
            let next = b23_mul(e, g);
            if seen.insert(next) {
                frontier.push(next);
            }
        }
    }
    assert_eq!(seen.len(), 27);
    pass(8, "burnside orders 3, 27, 2187 and the exponent-3 group on two generators");
}

#[test]
fn criterion_09_homology_dimensions_match_dense_oracle() {
    let grid = tessellate(0.5).unwrap();
    let region = |cells: &[(u32, u32, u32)]| {
        Region::from_cells(
            "probe",
            &grid,
            cells.iter().map(|&(i, j, k)| CellIx { i, j, k }).collect(),
        )
    };
    let mut block = Vec::new();
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                block.push((i, j, k));
            }
        }
    }
    let ring: Vec<_> = (0..3)
        .flat_map(|i| (0..3).map(move |j| (i, j, 0)))
        .filter(|&(i, j, _)| !(i == 1 && j == 1))
        .collect();
    let mut double_ring = ring.clone();
    double_ring.extend(ring.iter().map(|&(i, j, k)| (i + 4, j, k)));

    for (cells, expected) in [(&block, 0usize), (&ring, 1), (&double_ring, 2)] {
        let complex = build_complex(&region(cells)).unwrap();
        let dim = h1_basis(&complex).dim();
        assert_eq!(dim, expected);
        assert_eq!(dim, common::dense_h1_dim(&complex), "dense oracle disagrees");
        assert!(common::boundary_square_is_zero(&complex));
        assert!(complex
            .boundary1_dense()
            .mul(&complex.boundary2_dense())
            .is_zero());
    }
    pass(9, "homology dimensions 0, 1, 2 confirmed by dense elimination");
}

#[test]
fn criterion_10_linking_rotation_invariance_and_gauss_oracle() {
    let hopf = canonical_hopf(0.2).unwrap();
    let base = linking_integer(
        hopf.component("r").unwrap(),
        hopf.component("b").unwrap(),
    )
    .unwrap();
    assert_eq!(base.abs(), 1);

    let mut rng = ChaCha8Rng::seed_from_u64(0x726f_7461);
    let mut rotated_links = Vec::new();
    for _ in 0..10 {
        // Rotations act about the cube center, where this pair sits.
        let rot = random_rotation(&mut rng);
        let transform = RigidTransform::from_matrix(rot, [0.0, 0.0, 0.0]).unwrap();
        let moved = rigid_transform(&hopf, &transform).unwrap();
        let lk = linking_integer(
            moved.component("r").unwrap(),
            moved.component("b").unwrap(),
        )
        .unwrap();
        assert_eq!(lk, base, "rotation changed the linking number");
        rotated_links.push(moved);
    }

    let pairs: Vec<PLLink> = vec![
        hopf.clone(),
        canonical_hopf(0.1).unwrap(),
        split_pair(0.2).unwrap(),
        hopf_pair(Point3::new(0.45, 0.5, 0.5).unwrap(), 0.2, 36).unwrap(),
        rotated_links.swap_remove(0),
    ];
    for link in &pairs {
        let r = link.component("r").unwrap();
        let b = link.component("b").unwrap();
        let lk = linking_integer(r, b).unwrap();
        let gauss = common::gauss_linking(r, b);
        assert!(
            (gauss - lk as f64).abs() < 0.05,
            "gauss integral {gauss} disagrees with combinatorial value {lk}"
        );
    }
    pass(10, "linking number rigid-motion invariance and quadrature agreement");
}

/// A uniformish random rotation matrix from an axis-angle draw.
fn random_rotation(rng: &mut ChaCha8Rng) -> [[f64; 3]; 3] {
    let axis = loop {
        let a: [f64; 3] = [
            rng.gen_range(-1.0..=1.0),
            rng.gen_range(-1.0..=1.0),
            rng.gen_range(-1.0..=1.0),
        ];
        let n = (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt();
        if n > 0.3 {
            break [a[0] / n, a[1] / n, a[2] / n];
        }
    };
    let angle: f64 = rng.gen_range(0.4..5.9);
    let (s, c) = angle.sin_cos();
    let k = axis;
    let mut rot = [[0.0f64; 3]; 3];
    let cross = [
        [0.0, -k[2], k[1]],
        [k[2], 0.0, -k[0]],
        [-k[1], k[0], 0.0],
    ];
    for i in 0..3 {
        for j in 0..3 {
            let eye = if i == j { 1.0 } else { 0.0 };
            rot[i][j] = c * eye + (1.0 - c) * k[i] * k[j] + s * cross[i][j];
        }
    }
    rot
}
