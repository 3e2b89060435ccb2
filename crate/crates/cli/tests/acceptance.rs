//! Acceptance run: one PASS/FAIL line per criterion.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use origami_cli::format::parse_template_file;
use origami_cli::run_command;
use origami_core::cohomology::{complement_cohomology, fold_component_invariants, graded_basis, Dim4FoldType};
use origami_core::invariants::{euler_characteristic, fundamental_group, lattice_quotient_nx, simply_connected};
use origami_core::lattice::{cokernel_structure, integer_kernel, rational_rank, smith_normal_form, AbelianGroup, IntMatrix};
use origami_core::mv::{betti_dim4, mv_constraint_system};
use origami_core::polytope::{build_polytope_from_ints, DelzantPolytope};
use origami_core::template::{validate_template, OrigamiTemplate};
use origami_testkit::{
    random_delzant, random_fold_set, random_prism_template, random_prism_with_caps, random_template, TemplateShape,
};

type Outcome = Result<String, String>;

fn corpus_template(name: &str) -> OrigamiTemplate {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("corpus").join(format!("{name}.json"));
    let parsed = parse_template_file(&path).unwrap();
    validate_template(&parsed.raw).unwrap()
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn alternating(values: &[u64]) -> i64 {
    values
        .iter()
        .enumerate()
        .map(|(k, &b)| if k % 2 == 0 { b as i64 } else { -(b as i64) })
        .sum()
}

fn truncated_cube() -> DelzantPolytope {
    build_polytope_from_ints(
        &[&[-1, -1, -1], &[1, 0, 0], &[-1, 0, 0], &[0, 1, 0], &[0, -1, 0], &[0, 0, 1], &[0, 0, -1]],
        &[-1, 2, 0, 2, 0, 2, 0],
    )
    .unwrap()
}

/// Every template generated anywhere in the run, for the Euler check.
#[derive(Default)]
struct Seen {
    euler: Vec<i64>,
}

fn criterion_1() -> Outcome {
    let cases = [
        ("s2xt2", AbelianGroup::free(1), "Z x Z"),
        ("s3xs1", AbelianGroup::trivial(), "Z"),
        ("lens_2", AbelianGroup::cyclic(2), "Z/2 x Z"),
        ("lens_3", AbelianGroup::cyclic(3), "Z/3 x Z"),
    ];
    for (name, quotient, pi1) in cases {
        let t = corpus_template(name);
        let q = lattice_quotient_nx(&t);
        ensure(q == quotient, || format!("{name}: N/N_X = {q}, expected {quotient}"))?;
        let g = fundamental_group(&t).map_err(|e| e.to_string())?;
        ensure(g.to_string() == pi1, || format!("{name}: pi1 = {g}, expected {pi1}"))?;
        ensure(g.cyclic_part == quotient && g.free_rank == 1, || format!("{name}: descriptor {g:?}"))?;
    }
    Ok("N/N_X = Z, 1, Z/k and pi1 = Z x Z, Z, Z/k x Z for k = 2, 3".into())
}

fn criterion_2(seen: &mut Seen) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let count = 600;
    let mut trees = 0;
    for i in 0..count {
        let dim = 1 + i % 3;
        let raw = if i % 4 == 3 {
            random_prism_template(&mut rng, dim)
        } else {
            let shape = TemplateShape {
                dim,
                max_vertices: rng.gen_range(1..=6),
                extra_edges: rng.gen_range(0..=6),
                bipartite: rng.gen_bool(0.6),
            };
            random_template(&mut rng, shape)
        };
        let t = validate_template(&raw).map_err(|e| e.to_string())?;
        let stats = t.graph_stats();
        let sc = simply_connected(&t).map_err(|e| e.to_string())?;
        ensure(sc == stats.acyclic, || format!("template {i}: simply connected {sc}, acyclic {}", stats.acyclic))?;
        trees += usize::from(stats.acyclic);
        seen.euler.push(euler_characteristic(&t).map_err(|e| e.to_string())?);
    }
    Ok(format!("{count} templates in dimensions 2, 4, 6 ({trees} trees), no counterexample"))
}

fn criterion_3(seen: &mut Seen) -> Outcome {
    for (name, expected) in [("m1", [1u64, 1, 4, 1, 1]), ("m2", [1, 5, 8, 5, 1])] {
        let r = betti_dim4(&corpus_template(name)).map_err(|e| e.to_string())?;
        let b = r.values().unwrap();
        ensure(b == expected, || format!("{name}: {b:?}, expected {expected:?}"))?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let count = 240;
    for i in 0..count {
        let raw = if i % 6 == 5 {
            random_prism_template(&mut rng, 2)
        } else {
            let shape = TemplateShape {
                dim: 2,
                max_vertices: 6,
                extra_edges: rng.gen_range(0..=3),
                bipartite: true,
            };
            random_template(&mut rng, shape)
        };
        let t = validate_template(&raw).map_err(|e| e.to_string())?;
        let b = betti_dim4(&t).map_err(|e| e.to_string())?.values().unwrap();
        let chi = euler_characteristic(&t).map_err(|e| e.to_string())?;
        seen.euler.push(chi);
        let system = mv_constraint_system(&t).map_err(|e| e.to_string())?;
        for rel in &system.relations {
            ensure(rel.holds(&b), || format!("template {i}: {b:?} violates {rel}"))?;
        }
        ensure(b[0] == b[4] && b[1] == b[3], || format!("template {i}: {b:?} breaks duality"))?;
        ensure(alternating(&b) == chi, || format!("template {i}: chi {chi} vs {b:?}"))?;
        ensure(chi == t.orbit_space_summary().fixed_point_count as i64, || format!("template {i}: fixed points"))?;
    }
    Ok(format!("M1 = (1,1,4,1,1), M2 = (1,5,8,5,1); {count} random templates satisfy MV, duality and chi"))
}

/// Closed-form ranks in degrees 0, 1, 2, 2n−1, 2n.
fn closed_form(p: &DelzantPolytope, folds: &[usize]) -> (bool, [(usize, i64); 5]) {
    let n = p.dim();
    let others: Vec<usize> = (0..p.facet_count()).filter(|f| !folds.contains(f)).collect();
    let prismatic = cokernel_structure(&p.normal_matrix().select_columns(&others)).is_infinite_cyclic();
    let (d, n_, r) = (p.facet_count() as i64, n as i64, folds.len() as i64);
    let table = if prismatic {
        [(0, 1), (1, 1), (2, d - n_ - 1), (2 * n - 1, 1), (2 * n, 0)]
    } else {
        [(0, 1), (1, 0), (2, d - n_ - r), (2 * n - 1, r - 1), (2 * n, 0)]
    };
    (prismatic, table)
}

fn complement_instances() -> Vec<(DelzantPolytope, Vec<usize>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    (0..240)
        .map(|i| {
            let n = 2 + i % 2;
            if i % 5 == 4 {
                random_prism_with_caps(&mut rng, n)
            } else {
                let p = random_delzant(&mut rng, n, 3);
                let folds = random_fold_set(&mut rng, &p);
                (p, folds)
            }
        })
        .collect()
}

fn criterion_4(instances: &[(DelzantPolytope, Vec<usize>)]) -> Outcome {
    let mut prismatic_count = 0;
    for (i, (p, folds)) in instances.iter().enumerate() {
        let c = complement_cohomology(p, folds).map_err(|e| format!("instance {i}: {e}"))?;
        let (prismatic, table) = closed_form(p, folds);
        prismatic_count += usize::from(prismatic);
        for (degree, expected) in table {
            let found = c.groups[degree].free_rank() as i64;
            ensure(found == expected, || format!("instance {i}: degree {degree} has rank {found}, expected {expected}"))?;
        }
    }
    Ok(format!("{} pairs in dimensions 4 and 6 ({prismatic_count} prismatic) match the table", instances.len()))
}

fn criterion_5() -> Outcome {
    let p = truncated_cube();
    let c = complement_cohomology(&p, &[0, 1]).map_err(|e| e.to_string())?;
    let expected: Vec<AbelianGroup> = [1, 0, 2, 0, 1, 1, 0].iter().map(|&r| AbelianGroup::free(r)).collect();
    ensure(c.groups == expected, || format!("groups {:?}", c.groups.iter().map(ToString::to_string).collect::<Vec<_>>()))?;
    let kernel = &c.kernels[2];
    ensure(kernel.cols() == 1, || format!("degree-5 kernel has rank {}", kernel.cols()))?;
    let (b0, b1) = (&c.pieces[0], &c.pieces[1]);
    let local = |corr: &[usize], facets: &[usize]| -> Vec<u32> {
        corr.iter().map(|j| facets.iter().filter(|&f| f == j).count() as u32).collect()
    };
    let mut generator = b0.cohomology.basis(2).project_monomial(&local(&b0.correspondence, &[2, 2]));
    let second = b1.cohomology.basis(2).project_monomial(&local(&b1.correspondence, &[4, 6]));
    generator.extend(second.into_iter().map(|x| -x));
    let column = kernel.column(0);
    let negated: Vec<BigInt> = generator.iter().map(|x| -x).collect();
    ensure(column == generator || column == negated, || format!("kernel {column:?} is not x0 b2^2 - x1 b4 b6"))?;
    Ok("groups (Z,0,Z^2,0,Z,Z,0); degree-5 kernel generated by x0 b2^2 - x1 b4 b6".into())
}

fn criterion_6() -> Outcome {
    let p = truncated_cube();
    let f0 = fold_component_invariants(&p, 0).map_err(|e| e.to_string())?.betti;
    let f1 = fold_component_invariants(&p, 1).map_err(|e| e.to_string())?.betti;
    ensure(f0 == [1, 0, 0, 0, 0, 1], || format!("F0: {f0:?}"))?;
    ensure(f1 == [1, 1, 2, 2, 1, 1], || format!("F1: {f1:?}"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let count = 300;
    let mut kinds = [0usize; 3];
    for i in 0..count {
        let p = random_delzant(&mut rng, 2, 4);
        let s = rng.gen_range(0..p.facet_count());
        let us = &p.facet(s).normal;
        let adj: Vec<usize> = p.adjacent_facets(s).iter().copied().collect();
        let sum: Vec<BigInt> = (0..2).map(|j| &p.facet(adj[0]).normal[j] + &p.facet(adj[1]).normal[j]).collect();
        let j = if us[0].is_zero() { 1 } else { 0 };
        let c = (&sum[j] / &us[j]).abs();
        let z = fold_component_invariants(&p, s).map_err(|e| e.to_string())?;
        let expected = if c.is_zero() {
            kinds[0] += 1;
            Dim4FoldType::S1xS2
        } else if c.is_one() {
            kinds[1] += 1;
            Dim4FoldType::S3
        } else {
            kinds[2] += 1;
            Dim4FoldType::Lens(c.clone())
        };
        ensure(z.dim4_type.as_ref() == Some(&expected), || format!("fold {i}: {:?} vs |e| = {c}", z.dim4_type))?;
        let chi: i64 = z.betti.iter().enumerate().map(|(k, &b)| if k % 2 == 0 { b as i64 } else { -(b as i64) }).sum();
        ensure(chi == 0, || format!("fold {i}: chi(Z) = {chi}"))?;
    }
    Ok(format!(
        "F0 = S^5, F1 = S^2 x S^2 x S^1; {count} random folds ({} S^1 x S^2, {} S^3, {} lens)",
        kinds[0], kinds[1], kinds[2]
    ))
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let check = |p: &DelzantPolytope, label: &str| -> Result<(), String> {
        for k in 0..=p.dim() {
            let b = graded_basis(p, k).map_err(|e| e.to_string())?;
            ensure(b.rank() as i64 == p.h_vector()[k], || format!("{label}: rank {} vs h_{k}", b.rank()))?;
            let quotient = cokernel_structure(&b.relations().transpose());
            ensure(quotient.is_free() && quotient.free_rank() == b.rank(), || format!("{label}: quotient {quotient}"))?;
        }
        Ok(())
    };
    let polygons = 520;
    let solids = 60;
    for i in 0..polygons {
        check(&random_delzant(&mut rng, 2, 5), &format!("polygon {i}"))?;
    }
    for i in 0..solids {
        check(&random_delzant(&mut rng, 3, 3), &format!("3-polytope {i}"))?;
    }
    Ok(format!("{polygons} polygons and {solids} 3-polytopes: ranks equal h_k, quotients torsion-free"))
}

fn criterion_8(instances: &[(DelzantPolytope, Vec<usize>)]) -> Outcome {
    for (i, (p, folds)) in instances.iter().enumerate() {
        let c = complement_cohomology(p, folds).map_err(|e| format!("instance {i}: {e}"))?;
        let expected = p.vertex_count() as i64 - folds.iter().map(|&s| p.vertices_on_facet(s) as i64).sum::<i64>();
        let found = c.euler_characteristic();
        ensure(found == expected, || format!("instance {i}: chi {found} vs vertex difference {expected}"))?;
    }
    Ok(format!("{} instances: chi(Y minus B) equals the vertex-count difference", instances.len()))
}

fn criterion_9() -> Outcome {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("corpus").join("double_truncated_cube.json");
    let out = run_command(["origami", "betti", path.to_str().unwrap(), "--json"]);
    ensure(out.code == 0, || format!("exit {}: {}", out.code, out.stderr))?;
    let v: serde_json::Value = serde_json::from_str(&out.stdout).map_err(|e| e.to_string())?;
    let betti = &v["betti"];
    for (k, expected) in [(0, 1), (6, 1), (1, 1), (5, 1)] {
        ensure(betti[k] == expected, || format!("b{k} = {}", betti[k]))?;
    }
    for k in 2..=4 {
        ensure(betti[k].is_null(), || format!("b{k} should be open, got {}", betti[k]))?;
    }
    ensure(v["constraints"] == serde_json::json!(["b2 = b4", "b2 - b3 + b4 = 6"]), || format!("relations {}", v["constraints"]))?;
    ensure(v["euler_characteristic"] == 6, || format!("chi {}", v["euler_characteristic"]))?;
    ensure(v["method"] == "underdetermined", || format!("method {}", v["method"]))?;
    let note = v["note"].as_str().unwrap_or_default();
    ensure(note.contains("b2 = b4 = 2, b3 = 1") && note.contains("not reproduced"), || format!("note {note:?}"))?;
    Ok("b0=b6=1, b1=b5=1, residual {b2 = b4, b2 - b3 + b4 = 6}, chi = 6, underdetermined with note".into())
}

fn criterion_10(seen: &mut Seen) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for n in 1..=3 {
        for _ in 0..20 {
            let t = validate_template(&random_prism_template(&mut rng, n)).map_err(|e| e.to_string())?;
            seen.euler.push(euler_characteristic(&t).map_err(|e| e.to_string())?);
        }
    }
    let ones = seen.euler.iter().filter(|&&x| x == 1).count();
    ensure(ones == 0, || format!("{ones} templates with chi = 1"))?;
    Ok(format!("{} templates, none with chi = 1", seen.euler.len()))
}

fn criterion_11() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let count = 1200;
    for i in 0..count {
        let (r, c) = (rng.gen_range(1..=6), rng.gen_range(1..=8));
        let rows: Vec<Vec<i64>> = (0..r)
            .map(|_| {
                (0..c)
                    .map(|_| if rng.gen_bool(0.25) { 0 } else { rng.gen_range(-50..=50) })
                    .collect()
            })
            .collect();
        let m = IntMatrix::from_rows(rows);
        let s = smith_normal_form(&m);
        ensure(&(&s.u * &m) * &s.v == s.d, || format!("matrix {i}: u m v != d for {m}"))?;
        ensure(s.u.determinant().abs().is_one() && s.v.determinant().abs().is_one(), || format!("matrix {i}: transforms not unimodular"))?;
        let diag = s.diagonal();
        for a in 0..r {
            for b in 0..c {
                let off = a != b || a >= diag.len();
                ensure(!off || s.d.get(a, b).is_zero(), || format!("matrix {i}: d not diagonal"))?;
            }
        }
        ensure(diag.iter().all(|x| x.is_positive()), || format!("matrix {i}: nonpositive invariant factor"))?;
        ensure(diag.windows(2).all(|w| w[1].is_multiple_of(&w[0])), || format!("matrix {i}: divisibility chain broken"))?;
        let k = integer_kernel(&m);
        ensure((&m * &k).is_zero(), || format!("matrix {i}: m k != 0"))?;
        ensure(k.cols() == c - rational_rank(&m), || format!("matrix {i}: kernel dimension {}", k.cols()))?;
    }
    Ok(format!("{count} matrices: factorization, divisibility, unimodularity, kernels"))
}

fn main() -> ExitCode {
    let start = Instant::now();
    let mut seen = Seen::default();
    let instances = complement_instances();
    let mut results: Vec<(usize, &str, Outcome)> = Vec::new();
    let mut run = |id: usize, name: &'static str, f: &mut dyn FnMut() -> Outcome| {
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(format!("panicked: {msg}"))
        });
        results.push((id, name, outcome));
    };
    run(1, "lattice quotient and pi1 of the three corpus types", &mut criterion_1);
    run(2, "simply connected iff the template graph is a tree", &mut || criterion_2(&mut seen));
    run(3, "four-dimensional Betti numbers", &mut || criterion_3(&mut seen));
    run(4, "complement ranks against the closed-form table", &mut || criterion_4(&instances));
    run(5, "truncated cube complement", &mut criterion_5);
    run(6, "fold component identification", &mut criterion_6);
    run(7, "graded ranks equal the h-vector", &mut criterion_7);
    run(8, "Euler additivity of complements", &mut || criterion_8(&instances));
    run(9, "six-dimensional constraint run", &mut criterion_9);
    run(10, "Euler characteristic is never one", &mut || criterion_10(&mut seen));
    run(11, "lattice core properties", &mut criterion_11);

    let mut failed = 0;
    for (id, name, outcome) in &results {
        match outcome {
            Ok(detail) => println!("PASS criterion {id:>2}: {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {id:>2}: {name}: {detail}");
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed in {:.1}s",
        results.len() - failed,
        start.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
