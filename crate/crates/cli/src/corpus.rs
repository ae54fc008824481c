//! Test corpus: small named actions plus seeded random transitive actions.

use num_bigint::BigUint;
use permendo_core::{GeneratedGroup, Perm};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{CliError, Result};
use crate::formats::GroupFile;

/// A transitive action of `G` on `0..degree` with `H` the stabilizer of `base`.
#[derive(Debug, Clone)]
pub struct CorpusInstance {
    pub name: String,
    pub family: String,
    pub degree: usize,
    pub g: Vec<Perm>,
    pub h: Vec<Perm>,
    pub base: u32,
    pub g_order: BigUint,
    pub h_order: BigUint,
}

#[derive(Debug, Clone, Serialize)]
pub struct ManifestEntry {
    pub name: String,
    pub family: String,
    pub degree: usize,
    pub g_order: String,
    pub h_order: String,
    pub group: GroupFile,
    pub base: u32,
}

impl CorpusInstance {
    /// `H` is computed as the full stabilizer of `base`.
    pub fn new(name: impl Into<String>, family: impl Into<String>, g: Vec<Perm>, base: u32) -> Result<Self> {
        let degree = g.first().map(Perm::degree).ok_or_else(|| CliError::Input("no generators".into()))?;
        let grp = GeneratedGroup::new(degree, g.clone()).map_err(CliError::input)?.build_chain();
        if grp.orbit(base).len() != degree {
            return Err(CliError::Input("action is not transitive".into()));
        }
        let stab = grp.stabilizer(base).map_err(CliError::input)?;
        let mut h = stab.generators().to_vec();
        if h.is_empty() {
            h.push(Perm::identity(degree));
        }
        Ok(CorpusInstance {
            name: name.into(),
            family: family.into(),
            degree,
            g_order: grp.order().map_err(CliError::input)?,
            h_order: stab.order().map_err(CliError::input)?,
            g,
            h,
            base,
        })
    }

    /// A given subgroup `H` fixing `base`; `G` is restricted to the orbit of `base`,
    /// which is relabelled so that `base` becomes 0.
    pub fn with_subgroup(name: impl Into<String>, g: &[Perm], h: &[Perm], base: u32) -> Result<Self> {
        let degree = g.first().map(Perm::degree).ok_or_else(|| CliError::Input("no generators".into()))?;
        let orbit = permendo_core::permgrp::orbit(g, degree, base);
        let mut pos = vec![u32::MAX; degree];
        for (i, &x) in orbit.iter().enumerate() {
            pos[x as usize] = i as u32;
        }
        let restrict = |p: &Perm| Perm::from_images(orbit.iter().map(|&x| pos[p.image(x) as usize]).collect()).map_err(CliError::input);
        let g: Vec<Perm> = g.iter().map(restrict).collect::<Result<_>>()?;
        let mut h: Vec<Perm> = h.iter().map(restrict).collect::<Result<_>>()?;
        let n = orbit.len();
        if h.is_empty() {
            h.push(Perm::identity(n));
        }
        let grp = GeneratedGroup::new(n, g.clone()).map_err(CliError::input)?.build_chain();
        let hgrp = GeneratedGroup::new(n, h.clone()).map_err(CliError::input)?.build_chain();
        let (g_order, h_order) = (grp.order().map_err(CliError::input)?, hgrp.order().map_err(CliError::input)?);
        if &h_order * BigUint::from(n) != g_order {
            return Err(CliError::Input(format!("H has order {h_order}, not the stabilizer order {}", &g_order / BigUint::from(n))));
        }
        Ok(CorpusInstance { name: name.into(), family: "scenario".into(), degree: n, g, h, base: 0, g_order, h_order })
    }

    /// Primes dividing `|G|`.
    pub fn primes(&self) -> Vec<u64> {
        let mut n = self.g_order.clone();
        let mut out = Vec::new();
        let mut q = 2u64;
        while n > BigUint::from(1u32) {
            if (&n % q) == BigUint::from(0u32) {
                out.push(q);
                while (&n % q) == BigUint::from(0u32) {
                    n /= q;
                }
            }
            q += 1;
        }
        out
    }

    pub fn manifest(&self) -> ManifestEntry {
        ManifestEntry {
            name: self.name.clone(),
            family: self.family.clone(),
            degree: self.degree,
            g_order: self.g_order.to_string(),
            h_order: self.h_order.to_string(),
            group: GroupFile::from_perms(&self.g),
            base: self.base + 1,
        }
    }
}

fn cycles(n: usize, cs: &[&[u32]]) -> Perm {
    Perm::from_cycles(n, cs).expect("valid cycles")
}

fn shifted(n: usize, cs: &[&[u32]]) -> Perm {
    let zero: Vec<Vec<u32>> = cs.iter().map(|c| c.iter().map(|x| x - 1).collect()).collect();
    let refs: Vec<&[u32]> = zero.iter().map(Vec::as_slice).collect();
    cycles(n, &refs)
}

fn symmetric_gens(n: usize) -> Vec<Perm> {
    let all: Vec<u32> = (0..n as u32).collect();
    vec![cycles(n, &[&[0, 1]]), cycles(n, &[&all])]
}

/// The six named actions, each with the expected `|G|`.
pub fn named() -> Result<Vec<CorpusInstance>> {
    let specs: Vec<(&str, Vec<Perm>, u64)> = vec![
        ("S4/S3", symmetric_gens(4), 24),
        ("S5/S4", symmetric_gens(5), 120),
        ("S6/S5", symmetric_gens(6), 720),
        ("L2(7)/S4", vec![shifted(7, &[&[1, 2, 3, 4, 5, 6, 7]]), shifted(7, &[&[1, 2], &[3, 6]])], 168),
        ("L2(11)/A5", vec![cycles(11, &[&[1, 9], &[2, 3], &[4, 8], &[5, 6]]), cycles(11, &[&[0, 1, 10], &[2, 4, 9], &[5, 7, 8]])], 660),
        ("M11/M10", vec![shifted(11, &[&[1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11]]), shifted(11, &[&[3, 7, 11, 8], &[4, 10, 5, 6]])], 7920),
    ];
    specs
        .into_iter()
        .map(|(name, g, order)| {
            let inst = CorpusInstance::new(name, "named", g, 0)?;
            if inst.g_order != BigUint::from(order) {
                return Err(CliError::Invariant(format!("{name}: |G| = {}, expected {order}", inst.g_order)));
            }
            Ok(inst)
        })
        .collect()
}

fn subsets(n: usize, k: usize) -> Vec<Vec<u32>> {
    fn go(start: u32, n: u32, k: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for x in start..n {
            cur.push(x);
            go(x + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n as u32, k, &mut Vec::new(), &mut out);
    out
}

/// `S_n` on `k`-subsets.
fn on_subsets(n: usize, k: usize) -> Vec<Perm> {
    let sets = subsets(n, k);
    symmetric_gens(n)
        .iter()
        .map(|g| {
            let img = sets
                .iter()
                .map(|s| {
                    let mut t: Vec<u32> = s.iter().map(|&x| g.image(x)).collect();
                    t.sort_unstable();
                    sets.binary_search(&t).expect("image is a subset") as u32
                })
                .collect();
            Perm::from_images(img).expect("bijection")
        })
        .collect()
}

/// `S_a ≀ S_b` on `a·b` points, point `(i, j)` at `j·a + i`.
fn wreath(a: usize, b: usize) -> Vec<Perm> {
    let n = a * b;
    let inner: Vec<Perm> = symmetric_gens(a)
        .iter()
        .map(|g| Perm::from_images((0..n as u32).map(|x| if (x as usize) < a { g.image(x) } else { x }).collect()).expect("bijection"))
        .collect();
    let outer: Vec<Perm> = symmetric_gens(b)
        .iter()
        .map(|g| Perm::from_images((0..n).map(|x| (g.image((x / a) as u32) as usize * a + x % a) as u32).collect()).expect("bijection"))
        .collect();
    inner.into_iter().chain(outer).collect()
}

/// `S_a × S_b` on `a·b` points.
fn product(a: usize, b: usize) -> Vec<Perm> {
    let n = a * b;
    let left = symmetric_gens(a).into_iter().map(|g| Perm::from_images((0..n).map(|x| (g.image((x % a) as u32) as usize + (x / a) * a) as u32).collect()).expect("bijection"));
    let right = symmetric_gens(b).into_iter().map(|g| Perm::from_images((0..n).map(|x| (x % a + g.image((x / a) as u32) as usize * a) as u32).collect()).expect("bijection"));
    left.chain(right).collect()
}

fn dihedral(n: usize) -> Vec<Perm> {
    let rot = Perm::from_images((0..n as u32).map(|x| (x + 1) % n as u32).collect()).expect("bijection");
    let refl = Perm::from_images((0..n as u32).map(|x| (n as u32 - x) % n as u32).collect()).expect("bijection");
    vec![rot, refl]
}

/// Families with rational or real quadratic character fields.
fn families() -> Vec<(String, Vec<Perm>)> {
    let mut out = Vec::new();
    for (n, k) in [(5, 2), (6, 2), (6, 3), (7, 2), (7, 3), (8, 2), (8, 3), (9, 2), (10, 2), (11, 2)] {
        out.push((format!("S{n} on {k}-sets"), on_subsets(n, k)));
    }
    for (a, b) in [(2, 3), (3, 2), (2, 4), (3, 3), (4, 2), (2, 5), (3, 4), (4, 3), (5, 2)] {
        out.push((format!("S{a} wr S{b}"), wreath(a, b)));
    }
    for (a, b) in [(2, 3), (3, 3), (3, 4), (4, 4), (3, 5), (4, 5)] {
        out.push((format!("S{a} x S{b}"), product(a, b)));
    }
    for n in [5, 6, 8, 10, 12] {
        out.push((format!("D{n}"), dihedral(n)));
    }
    out
}

/// `count` random transitive actions of degree at most 60: a family member
/// relabelled at random and regenerated by random elements.
pub fn random(seed: u64, count: usize) -> Result<Vec<CorpusInstance>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fams = families();
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let (fam, gens) = &fams[rng.gen_range(0..fams.len())];
        let n = gens[0].degree();
        let grp = GeneratedGroup::new(n, gens.clone()).map_err(CliError::input)?.build_chain();
        let order = grp.order().map_err(CliError::input)?;
        let chain = grp.chain().map_err(CliError::input)?;
        let mut labels: Vec<u32> = (0..n as u32).collect();
        labels.shuffle(&mut rng);
        let sigma = Perm::from_images(labels).map_err(CliError::input)?;
        let new_gens = loop {
            let k = rng.gen_range(2..=3);
            let cand: Vec<Perm> = (0..k).map(|_| chain.uniform_element(&mut rng).relabel(&sigma)).collect();
            let sub = GeneratedGroup::new(n, cand.clone()).map_err(CliError::input)?.build_chain();
            if sub.order().map_err(CliError::input)? == order {
                break cand;
            }
        };
        out.push(CorpusInstance::new(format!("random-{:02} ({fam})", i + 1), fam.clone(), new_gens, 0)?);
    }
    Ok(out)
}

pub const RANDOM_SEED: u64 = 20_260_101;
pub const RANDOM_COUNT: usize = 10;

/// Named actions followed by the seeded random ones.
pub fn full(seed: u64) -> Result<Vec<CorpusInstance>> {
    let mut v = named()?;
    v.extend(random(seed, RANDOM_COUNT)?);
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn named_orders_and_stabilizers() {
        let v = named().unwrap();
        let h: Vec<u64> = v.iter().map(|i| i.h_order.to_string().parse().unwrap()).collect();
        assert_eq!(h, [6, 24, 120, 24, 60, 720]);
        assert_eq!(v[5].primes(), [2, 3, 5, 11]);
    }

    #[test]
    fn family_degrees_and_orders() {
        for (name, g) in families() {
            let n = g[0].degree();
            assert!(n <= 60, "{name}");
            let grp = GeneratedGroup::new(n, g).unwrap().build_chain();
            assert_eq!(grp.orbit(0).len(), n, "{name} not transitive");
        }
        let g = GeneratedGroup::new(12, wreath(3, 4)).unwrap().build_chain();
        assert_eq!(g.order().unwrap(), BigUint::from(6u64.pow(4) * 24));
        let g = GeneratedGroup::new(15, product(3, 5)).unwrap().build_chain();
        assert_eq!(g.order().unwrap(), BigUint::from(720u32));
    }

    #[test]
    fn random_corpus_is_reproducible() {
        let a = random(7, 3).unwrap();
        let b = random(7, 3).unwrap();
        assert_eq!(a.iter().map(|i| i.g.clone()).collect::<Vec<_>>(), b.iter().map(|i| i.g.clone()).collect::<Vec<_>>());
        for i in &a {
            assert!(i.degree <= 60);
            assert_eq!(&i.h_order * BigUint::from(i.degree), i.g_order);
        }
    }
}
