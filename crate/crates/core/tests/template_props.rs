use num_bigint::BigInt;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use origami_core::invariants::{
    detect_prismatic, euler_characteristic, first_homology, fundamental_group, lattice_quotient_nx, simply_connected,
};
use origami_core::mv::{betti_dim4, mv_constraint_system, solve_betti, solve_constraints, BettiMethod};
use origami_core::template::{validate_template, OrigamiTemplate, RawTemplate};
use origami_testkit::{random_prism_template, random_template, random_unimodular, transform, TemplateShape};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn shape(dim: usize, bipartite: bool) -> TemplateShape {
    TemplateShape {
        dim,
        max_vertices: 5,
        extra_edges: 3,
        bipartite,
    }
}

fn alternating(values: &[u64]) -> i64 {
    values
        .iter()
        .enumerate()
        .map(|(k, &b)| if k % 2 == 0 { b as i64 } else { -(b as i64) })
        .sum()
}

fn moved<R: Rng>(rng: &mut R, raw: &RawTemplate) -> RawTemplate {
    let n = raw.dim;
    let g = random_unimodular(rng, n);
    let t: Vec<BigInt> = (0..n).map(|_| BigInt::from(rng.gen_range(-3..=3))).collect();
    let mut out = raw.clone();
    for p in &mut out.polytopes {
        p.halfspaces = transform(&p.halfspaces, &g, &t);
    }
    out
}

fn valid(raw: &RawTemplate) -> OrigamiTemplate {
    validate_template(raw).unwrap_or_else(|e| panic!("generated template rejected: {e}"))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn simply_connected_iff_tree(seed in any::<u64>(), n in 1usize..=3, bipartite in any::<bool>()) {
        let mut r = rng(seed);
        let t = valid(&random_template(&mut r, shape(n, bipartite)));
        let stats = t.graph_stats();
        prop_assert_eq!(simply_connected(&t).unwrap(), stats.acyclic);
        prop_assert_ne!(euler_characteristic(&t).unwrap(), 1);
        if stats.bipartite {
            let pi1 = fundamental_group(&t).unwrap();
            prop_assert_eq!(pi1.free_rank, stats.cycle_rank);
            let h1 = first_homology(&t).unwrap();
            prop_assert_eq!(h1.group.free_rank(), stats.cycle_rank + pi1.cyclic_part.free_rank());
        }
    }

    #[test]
    fn invariants_survive_lattice_moves(seed in any::<u64>(), n in 1usize..=3) {
        let mut r = rng(seed);
        let raw = random_template(&mut r, shape(n, true));
        let a = valid(&raw);
        let b = valid(&moved(&mut r, &raw));
        prop_assert_eq!(fundamental_group(&a).unwrap(), fundamental_group(&b).unwrap());
        prop_assert_eq!(lattice_quotient_nx(&a), lattice_quotient_nx(&b));
        prop_assert_eq!(euler_characteristic(&a).unwrap(), euler_characteristic(&b).unwrap());
        prop_assert_eq!(detect_prismatic(&a).unwrap().prismatic, detect_prismatic(&b).unwrap().prismatic);
        prop_assert_eq!(solve_betti(&a).unwrap().betti, solve_betti(&b).unwrap().betti);
    }

    #[test]
    fn dim4_closed_form_identities(seed in any::<u64>()) {
        let mut r = rng(seed);
        let t = valid(&random_template(&mut r, shape(2, true)));
        let report = betti_dim4(&t).unwrap();
        let b = report.values().unwrap();
        prop_assert_eq!(b.len(), 5);
        prop_assert_eq!(b[0], b[4]);
        prop_assert_eq!(b[1], b[3]);
        prop_assert_eq!(alternating(&b), euler_characteristic(&t).unwrap());
        let system = mv_constraint_system(&t).unwrap();
        for rel in &system.relations {
            prop_assert!(rel.holds(&b), "{} fails on {:?}", rel, b);
        }
        let (betti, method, _) = solve_constraints(&system);
        if method == BettiMethod::ConstraintSolved {
            let solved: Vec<u64> = betti.iter().map(|x| x.value().unwrap()).collect();
            prop_assert_eq!(solved, b);
        }
    }

    #[test]
    fn prism_cycles_are_prismatic(seed in any::<u64>(), n in 1usize..=3) {
        let mut r = rng(seed);
        let t = valid(&random_prism_template(&mut r, n));
        let info = detect_prismatic(&t).unwrap();
        prop_assert!(info.prismatic);
        prop_assert!(lattice_quotient_nx(&t).is_infinite_cyclic());
        let fiber = info.fiber.unwrap();
        prop_assert_eq!(fiber.dim(), n - 1);
        let report = solve_betti(&t).unwrap();
        let b = report.values().unwrap();
        prop_assert_eq!(alternating(&b), 0);
        prop_assert_eq!(b[1], 2);
        // Künneth with T²: b^k = h_{k/2} + 2 h_{(k−1)/2} + h_{(k−2)/2}.
        let h = fiber.h_vector();
        let at = |i: i64| if i >= 0 && (i as usize) < h.len() { h[i as usize] as u64 } else { 0 };
        for (k, &bk) in b.iter().enumerate() {
            let k = k as i64;
            let expected = if k % 2 == 0 { at(k / 2) + at(k / 2 - 1) } else { 2 * at((k - 1) / 2) };
            prop_assert_eq!(bk, expected);
        }
        let system = mv_constraint_system(&t).unwrap();
        for rel in &system.relations {
            prop_assert!(rel.holds(&b));
        }
        if n == 2 {
            prop_assert_eq!(report.method, BettiMethod::ClosedFormDim4);
        } else {
            prop_assert_eq!(report.method, BettiMethod::KunnethPrismatic);
        }
    }

    #[test]
    fn constraint_route_is_consistent(seed in any::<u64>(), bipartite in any::<bool>()) {
        let mut r = rng(seed);
        let t = valid(&random_template(&mut r, shape(3, bipartite)));
        let report = solve_betti(&t).unwrap();
        prop_assert_eq!(report.betti.len(), 7);
        prop_assert_eq!(report.euler_characteristic, euler_characteristic(&t).unwrap());
        if let Some(b) = report.values() {
            prop_assert_eq!(alternating(&b), report.euler_characteristic);
        }
        if report.orientable {
            prop_assert_eq!(report.betti[6].value(), Some(1));
        }
    }
}
