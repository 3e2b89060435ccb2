//! Seeded random Delzant polytopes, fold sets and origami templates for
//! property tests.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::Rng;

use origami_core::lattice::IntMatrix;
use origami_core::polytope::{build_polytope, DelzantPolytope, Halfspace};
use origami_core::template::{RawEdge, RawEnd, RawPolytope, RawTemplate};

fn unit(n: usize, i: usize, sign: i64) -> Vec<BigInt> {
    (0..n).map(|j| BigInt::from(if i == j { sign } else { 0 })).collect()
}

fn int(c: i64) -> BigRational {
    BigRational::from_integer(c.into())
}

/// `{x ≥ 0, Σx ≤ size}`
pub fn simplex(n: usize, size: i64) -> Vec<Halfspace> {
    let mut h: Vec<Halfspace> = (0..n).map(|i| Halfspace::new(unit(n, i, -1), int(0))).collect();
    h.push(Halfspace::new(vec![BigInt::from(1); n], int(size)));
    h
}

/// `∏ [0, sides[i]]`
pub fn cube(sides: &[i64]) -> Vec<Halfspace> {
    let n = sides.len();
    let mut h = Vec::new();
    for (i, &a) in sides.iter().enumerate() {
        h.push(Halfspace::new(unit(n, i, -1), int(0)));
        h.push(Halfspace::new(unit(n, i, 1), int(a)));
    }
    h
}

/// A box whose facet `x_0 ≤ a` is tilted to `x_0 + k·x_1 ≤ a`; in the plane
/// this is a Hirzebruch trapezoid.
pub fn tilted_box(sides: &[i64], k: i64) -> Vec<Halfspace> {
    let mut h = cube(sides);
    h[1].normal[1] = BigInt::from(k);
    h
}

/// `Q × [0, length]`, with the two caps appended as the last two facets.
pub fn prism(q: &[Halfspace], length: i64) -> Vec<Halfspace> {
    let m = q.first().map_or(0, |h| h.normal.len());
    let n = m + 1;
    let mut h: Vec<Halfspace> = q
        .iter()
        .map(|f| {
            let mut normal = f.normal.clone();
            normal.push(BigInt::zero());
            Halfspace::new(normal, f.offset.clone())
        })
        .collect();
    h.push(Halfspace::new(unit(n, m, -1), int(0)));
    h.push(Halfspace::new(unit(n, m, 1), int(length)));
    h
}

/// A random unimodular matrix built from elementary operations.
pub fn random_unimodular<R: Rng>(rng: &mut R, n: usize) -> IntMatrix {
    let mut g = IntMatrix::identity(n);
    if n < 2 {
        if rng.gen_bool(0.5) {
            g.set(0, 0, BigInt::from(-1));
        }
        return g;
    }
    for _ in 0..2 * n {
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        let m: i64 = rng.gen_range(-2..=2);
        let row_j = g.row(j).to_vec();
        for (c, x) in row_j.iter().enumerate() {
            let v = g.get(i, c) + x * m;
            g.set(i, c, v);
        }
    }
    g
}

/// Image of `{⟨u, x⟩ ≤ c}` under `x ↦ G^{−T}x + t`: normals `G·u`, offsets
/// `c + ⟨G·u, t⟩`.
pub fn transform(halfspaces: &[Halfspace], g: &IntMatrix, t: &[BigInt]) -> Vec<Halfspace> {
    halfspaces
        .iter()
        .map(|h| {
            let normal = g.mul_vec(&h.normal);
            let shift: BigInt = normal.iter().zip(t).map(|(a, b)| a * b).sum();
            Halfspace::new(normal, &h.offset + BigRational::from_integer(shift))
        })
        .collect()
}

pub fn random_transform<R: Rng>(rng: &mut R, halfspaces: &[Halfspace]) -> Vec<Halfspace> {
    let n = halfspaces[0].normal.len();
    let g = random_unimodular(rng, n);
    let t: Vec<BigInt> = (0..n).map(|_| BigInt::from(rng.gen_range(-3..=3))).collect();
    transform(halfspaces, &g, &t)
}

/// Cuts a small corner off a random face of codimension at least 2 that
/// stays away from the facets in `avoid`; the new facet is appended, so
/// existing facet indices are kept. `None` if no admissible cut was found.
pub fn blow_up<R: Rng>(rng: &mut R, p: &DelzantPolytope, avoid: &[usize]) -> Option<DelzantPolytope> {
    let faces: Vec<&Vec<usize>> = p
        .faces()
        .iter()
        .map(|f| &f.facets)
        .filter(|f| f.len() >= 2)
        .filter(|f| {
            avoid.iter().all(|a| {
                let mut with = (*f).clone();
                with.push(*a);
                !f.contains(a) && !p.is_face(&with)
            })
        })
        .collect();
    let face = faces.choose(rng)?;
    let n = p.dim();
    let mut normal = vec![BigInt::zero(); n];
    let mut offset = BigRational::zero();
    for &i in face.iter() {
        for (x, y) in normal.iter_mut().zip(&p.facet(i).normal) {
            *x += y;
        }
        offset += &p.facet(i).offset;
    }
    let mut halfspaces = p.facets().to_vec();
    halfspaces.push(Halfspace::new(normal, offset - int(1)));
    let q = build_polytope(halfspaces).ok()?;
    let unchanged = avoid
        .iter()
        .all(|&a| q.local_fan_at_facet(a).ok() == p.local_fan_at_facet(a).ok());
    unchanged.then_some(q)
}

/// A random Delzant polytope: a scaled simplex, box or tilted box with up to
/// `max_blowups` corner cuts, in random lattice coordinates.
pub fn random_delzant<R: Rng>(rng: &mut R, n: usize, max_blowups: usize) -> DelzantPolytope {
    let base = match (n, rng.gen_range(0..3)) {
        (1, _) => cube(&[rng.gen_range(1..=4)]),
        (_, 0) => simplex(n, rng.gen_range(3..=6)),
        (_, 1) => cube(&(0..n).map(|_| rng.gen_range(2..=5)).collect::<Vec<_>>()),
        _ => {
            let sides: Vec<i64> = (0..n).map(|_| rng.gen_range(2..=4)).collect();
            let k: i64 = rng.gen_range(-2..=2);
            let first = sides[0] + k.abs() * sides[1] + 2;
            let mut sides = sides;
            sides[0] = first;
            tilted_box(&sides, k)
        }
    };
    let mut p = build_polytope(base).expect("base shapes are Delzant");
    if n >= 2 {
        for _ in 0..rng.gen_range(0..=max_blowups) {
            if let Some(q) = blow_up(rng, &p, &[]) {
                p = q;
            }
        }
    }
    build_polytope(random_transform(rng, p.facets())).expect("lattice transforms preserve Delzant")
}

/// A random nonempty set of pairwise disjoint facets.
pub fn random_fold_set<R: Rng>(rng: &mut R, p: &DelzantPolytope) -> Vec<usize> {
    let mut order: Vec<usize> = (0..p.facet_count()).collect();
    order.shuffle(rng);
    let wanted = rng.gen_range(1..=p.facet_count());
    let mut chosen: Vec<usize> = Vec::new();
    for f in order {
        if chosen.len() == wanted {
            break;
        }
        if chosen.iter().all(|&g| !p.is_face(&[f, g])) {
            chosen.push(f);
        }
    }
    chosen.sort();
    chosen
}

/// A prism over a random polytope with both caps folded; the complement of
/// the caps is prismatic.
pub fn random_prism_with_caps<R: Rng>(rng: &mut R, n: usize) -> (DelzantPolytope, Vec<usize>) {
    let q = random_delzant(rng, n - 1, 2);
    let raw = prism(q.facets(), rng.gen_range(1..=3));
    let d = raw.len();
    let p = build_polytope(random_transform(rng, &raw)).expect("prisms over Delzant polytopes are Delzant");
    (p, vec![d - 2, d - 1])
}

fn raw_template(dim: usize, polytopes: Vec<Vec<Halfspace>>, edges: Vec<(usize, usize, usize, usize)>) -> RawTemplate {
    RawTemplate {
        dim,
        polytopes: polytopes
            .into_iter()
            .enumerate()
            .map(|(i, halfspaces)| RawPolytope {
                id: format!("P{i}"),
                halfspaces,
            })
            .collect(),
        edges: edges
            .into_iter()
            .enumerate()
            .map(|(k, (u, fu, v, fv))| RawEdge {
                id: format!("e{k}"),
                ends: vec![RawEnd::new(format!("P{u}"), fu), RawEnd::new(format!("P{v}"), fv)],
            })
            .collect(),
    }
}

/// Options for [`random_template`].
#[derive(Clone, Copy, Debug)]
pub struct TemplateShape {
    pub dim: usize,
    pub max_vertices: usize,
    pub extra_edges: usize,
    /// Keep the graph bipartite (orientable manifold).
    pub bipartite: bool,
}

/// Copies of one random polytope (some with corner cuts away from their
/// folds) glued along a random connected multigraph. Every edge of a given
/// colour uses the same facet, so neighbouring polytopes agree near it.
pub fn random_template<R: Rng>(rng: &mut R, shape: TemplateShape) -> RawTemplate {
    let n = shape.dim;
    let p = random_delzant(rng, n, 2);
    let mut colours: Vec<usize> = Vec::new();
    let mut order: Vec<usize> = (0..p.facet_count()).collect();
    order.shuffle(rng);
    for f in order {
        if colours.iter().all(|&g| !p.is_face(&[f, g])) {
            colours.push(f);
        }
    }
    let target = rng.gen_range(1..=shape.max_vertices);
    let mut used: Vec<Vec<usize>> = vec![Vec::new()];
    let mut parity = vec![0usize];
    let mut edges = Vec::new();
    while used.len() < target {
        let v = used.len();
        let options: Vec<(usize, usize)> = (0..v)
            .flat_map(|u| colours.iter().map(move |&c| (u, c)))
            .filter(|(u, c)| !used[*u].contains(c))
            .collect();
        let Some(&(u, c)) = options.choose(rng) else { break };
        used[u].push(c);
        used.push(vec![c]);
        parity.push(1 - parity[u]);
        edges.push((u, c, v, c));
    }
    let l = used.len();
    for _ in 0..shape.extra_edges {
        if l < 2 {
            break;
        }
        let u = rng.gen_range(0..l);
        let v = rng.gen_range(0..l);
        if u == v || (shape.bipartite && parity[u] == parity[v]) {
            continue;
        }
        let free: Vec<usize> = colours
            .iter()
            .copied()
            .filter(|c| !used[u].contains(c) && !used[v].contains(c))
            .collect();
        let Some(&c) = free.choose(rng) else { continue };
        used[u].push(c);
        used[v].push(c);
        edges.push((u, c, v, c));
    }
    let polytopes = used
        .iter()
        .map(|folds| {
            let mut q = p.clone();
            if n >= 2 && rng.gen_bool(0.5) {
                if let Some(cut) = blow_up(rng, &q, folds) {
                    q = cut;
                }
            }
            q.facets().to_vec()
        })
        .collect();
    raw_template(n, polytopes, edges)
}

/// An even cycle of prisms glued cap to cap; the result is prismatic.
pub fn random_prism_template<R: Rng>(rng: &mut R, dim: usize) -> RawTemplate {
    let base = if dim == 1 {
        cube(&[rng.gen_range(1..=4)])
    } else {
        let q = random_delzant(rng, dim - 1, 2);
        prism(q.facets(), rng.gen_range(1..=3))
    };
    let raw = random_transform(rng, &base);
    let d = raw.len();
    let caps = [d - 2, d - 1];
    let len = 2 * rng.gen_range(1..=3);
    let edges = (0..len)
        .map(|i| (i, caps[i % 2], (i + 1) % len, caps[i % 2]))
        .collect();
    raw_template(dim, vec![raw; len], edges)
}
