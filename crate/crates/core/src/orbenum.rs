//! Orbit-by-suborbit enumeration.
//!
//! `H` acts on a large implicit set `O = v1·G`. A helper subgroup `K ≤ H` and a
//! `K`-equivariant map `π: O → Q` into a small helper set let each `H`-orbit be
//! stored through the distinguished points of its `K`-orbits: points `x` with
//! `π(x)` the minimal point of its `K`-orbit on `Q`.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Debug;
use core::hash::Hash;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;

use crate::gfmat::{FqMatrix, FqVec};
use crate::hashing::{new_map, HashMap};
use crate::perm::{evaluate_word, Acts, GroupElem, Perm, Program, Word};
use crate::permgrp::{GeneratedGroup, GroupError, RandomStream};
use crate::quadratic::Rational;

/// Points of the large set and of the helper set.
pub trait Point: Clone + Eq + Hash + Ord + Debug {}
impl<X: Clone + Eq + Hash + Ord + Debug> Point for X {}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OrbitError {
    #[error("base point is moved by H-generator {0}")]
    BaseNotFixed(usize),
    #[error("order of H unknown: supply it or a faithful action")]
    UnknownOrder,
    #[error("faithful action has {found} generators, expected {expected}")]
    FaithfulMismatch { expected: usize, found: usize },
    #[error("helper map is not K-equivariant at generator {0}")]
    NotEquivariant(usize),
    #[error("memory budget of {budget} stored points exceeded ({covered} points covered)")]
    MemoryBudget { budget: usize, covered: u64 },
    #[error("point lies in the known orbit {0}")]
    Duplicate(usize),
    #[error("orbit data inconsistent: {0}")]
    Inconsistent(&'static str),
    #[error("probe budget exhausted with {residual} points unaccounted for")]
    ProbeBudget { residual: u64, partition: Box<PartitionSummary> },
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// The action of `G` on `O`, the subgroup `H` fixing the base point, and its order.
#[derive(Debug, Clone)]
pub struct ActionContext<P, T> {
    pub g_gens: Vec<T>,
    pub h_gens: Vec<T>,
    pub base: P,
    /// `H` acting faithfully on a small domain, generators in the order of `h_gens`.
    pub faithful: Option<GeneratedGroup>,
    pub h_order: BigUint,
    /// `[G:H] = |O|`.
    pub index: u64,
    pub point_bits: u64,
}

impl<P: Point, T: GroupElem + Acts<P>> ActionContext<P, T> {
    pub fn new(
        g_gens: Vec<T>,
        h_gens: Vec<T>,
        base: P,
        faithful: Option<Vec<Perm>>,
        h_order: Option<BigUint>,
        index: u64,
        point_bits: u64,
    ) -> Result<Self, OrbitError> {
        if let Some(i) = h_gens.iter().position(|h| h.act(&base) != base) {
            return Err(OrbitError::BaseNotFixed(i));
        }
        let faithful = match faithful {
            None => None,
            Some(f) => {
                if f.len() != h_gens.len() {
                    return Err(OrbitError::FaithfulMismatch { expected: h_gens.len(), found: f.len() });
                }
                let deg = f.first().map(|p| p.degree()).unwrap_or(1);
                Some(GeneratedGroup::new(deg, f)?.build_chain())
            }
        };
        let h_order = match (h_order, &faithful) {
            (Some(o), _) => o,
            (None, Some(f)) => f.order()?,
            (None, None) => return Err(OrbitError::UnknownOrder),
        };
        Ok(ActionContext { g_gens, h_gens, base, faithful, h_order, index, point_bits })
    }

    fn faithful_gens(&self) -> Option<&[Perm]> {
        self.faithful.as_ref().map(|f| f.generators())
    }
}

/// `K`-equivariant map from the large set to the helper set.
pub trait Quotient<P> {
    type Q: Point;
    fn project(&self, x: &P) -> Self::Q;
}

/// `Q = O` itself.
#[derive(Debug, Clone, Copy, Default)]
pub struct IdentityQuotient;

impl<P: Point> Quotient<P> for IdentityQuotient {
    type Q = P;
    fn project(&self, x: &P) -> P {
        x.clone()
    }
}

/// Projection onto a quotient module, `v ↦ v·M`.
#[derive(Debug, Clone)]
pub struct LinearQuotient(pub FqMatrix);

impl Quotient<FqVec> for LinearQuotient {
    type Q = FqVec;
    fn project(&self, x: &FqVec) -> FqVec {
        self.0.apply(x)
    }
}

#[derive(Debug, Clone, Copy)]
struct QEntry {
    orbit: u32,
    // generator index leading here from the parent; u32::MAX at the root
    gen: u32,
}

#[derive(Debug, Clone)]
struct QOrbit<T> {
    size: u64,
    stab_on_p: Vec<T>,
    stab_words: Vec<Word>,
}

/// Result of moving a point to its distinguished form: `point = x·k` with
/// `k = Π k_path[i]⁻¹`.
#[derive(Debug, Clone)]
pub struct Canonical<P> {
    pub point: P,
    pub q_orbit: u32,
    pub path: Vec<u32>,
}

/// Helper subgroup `K`, its action on `Q` and the table of `K`-orbits on `Q`.
pub struct Helper<P, T, M: Quotient<P>, U> {
    k_words: Vec<Word>,
    k_on_p: Vec<T>,
    k_inv_p: Vec<T>,
    k_on_q: Vec<U>,
    k_inv_q: Vec<U>,
    k_faithful: Option<Vec<Perm>>,
    k_order: Option<BigUint>,
    map: M,
    table: HashMap<M::Q, QEntry>,
    orbits: Vec<QOrbit<T>>,
    _p: core::marker::PhantomData<P>,
}

impl<P, T, M, U> Helper<P, T, M, U>
where
    P: Point,
    T: GroupElem + Acts<P>,
    M: Quotient<P>,
    U: GroupElem + Acts<M::Q>,
{
    /// `k_words` are words in the `H`-generators; `k_on_q` is `K` acting on `Q`.
    /// Equivariance is checked on `samples`.
    pub fn new<Pt>(ctx: &ActionContext<P, T>, k_words: Vec<Word>, k_on_q: Vec<U>, map: M, samples: &[Pt]) -> Result<Self, OrbitError>
    where
        Pt: core::borrow::Borrow<P>,
    {
        if k_words.len() != k_on_q.len() {
            return Err(OrbitError::Inconsistent("K generators on O and on Q differ in number"));
        }
        let eval = |w: &Word| evaluate_word(w, &ctx.h_gens).map_err(|_| OrbitError::Inconsistent("bad K word"));
        let k_on_p = k_words.iter().map(eval).collect::<Result<Vec<T>, _>>()?;
        let k_faithful = match ctx.faithful_gens() {
            Some(f) => Some(k_words.iter().map(|w| evaluate_word(w, f)).collect::<Result<Vec<Perm>, _>>().map_err(|_| OrbitError::Inconsistent("bad K word"))?),
            None => None,
        };
        let k_order = match &k_faithful {
            Some(f) if !f.is_empty() => Some(GeneratedGroup::new(f[0].degree(), f.clone())?.build_chain().order()?),
            Some(_) => Some(BigUint::one()),
            None => None,
        };
        let mut base_samples: Vec<&P> = vec![&ctx.base];
        base_samples.extend(samples.iter().map(|s| s.borrow()));
        for x in base_samples {
            for (i, (kp, kq)) in k_on_p.iter().zip(&k_on_q).enumerate() {
                if map.project(&kp.act(x)) != kq.act(&map.project(x)) {
                    return Err(OrbitError::NotEquivariant(i));
                }
            }
        }
        Ok(Helper {
            k_inv_p: k_on_p.iter().map(|k| k.inv()).collect(),
            k_inv_q: k_on_q.iter().map(|k| k.inv()).collect(),
            k_words,
            k_on_p,
            k_on_q,
            k_faithful,
            k_order,
            map,
            table: new_map(),
            orbits: Vec::new(),
            _p: core::marker::PhantomData,
        })
    }

    pub fn k_order(&self) -> Option<&BigUint> {
        self.k_order.as_ref()
    }

    pub fn k_gens(&self) -> &[T] {
        &self.k_on_p
    }

    /// Number of `K`-orbits on `Q` tabulated so far.
    pub fn tabulated_orbits(&self) -> usize {
        self.orbits.len()
    }

    fn ensure_orbit(&mut self, q: &M::Q) -> u32 {
        if let Some(e) = self.table.get(q) {
            return e.orbit;
        }
        // full orbit, distinguished point = its minimum
        let mut seen = crate::hashing::new_set();
        seen.insert(q.clone());
        let mut list = vec![q.clone()];
        let mut pos = 0;
        while pos < list.len() {
            let x = list[pos].clone();
            for k in &self.k_on_q {
                let y = k.act(&x);
                if seen.insert(y.clone()) {
                    list.push(y);
                }
            }
            pos += 1;
        }
        let dist = list.iter().min().cloned().expect("nonempty");
        let id = self.orbits.len() as u32;
        // BFS tree from the distinguished point, recording words d → x
        let mut order = vec![dist.clone()];
        let mut words: HashMap<M::Q, Word> = new_map();
        words.insert(dist.clone(), Word::empty());
        self.table.insert(dist.clone(), QEntry { orbit: id, gen: u32::MAX });
        let mut pos = 0;
        while pos < order.len() {
            let x = order[pos].clone();
            let wx = words[&x].clone();
            for (g, k) in self.k_on_q.iter().enumerate() {
                let y = k.act(&x);
                if !words.contains_key(&y) {
                    let mut w = wx.clone();
                    w.push(g, false);
                    words.insert(y.clone(), w);
                    self.table.insert(y.clone(), QEntry { orbit: id, gen: g as u32 });
                    order.push(y);
                }
            }
            pos += 1;
        }
        // Schreier generators of Stab_K(d), thinned by a faithful chain when available
        let mut stab_on_p: Vec<T> = Vec::new();
        let mut stab_words: Vec<Word> = Vec::new();
        let mut kept_faithful: Vec<Perm> = Vec::new();
        let mut chain: Option<GeneratedGroup> = None;
        for x in &order {
            for (g, k) in self.k_on_q.iter().enumerate() {
                let y = k.act(x);
                let mut w = words[x].clone();
                w.push(g, false);
                let w = w.concat(&words[&y].inverse()).reduced();
                if w.is_empty() {
                    continue;
                }
                if let Some(kf) = &self.k_faithful {
                    let f = evaluate_word(&w, kf).expect("valid word");
                    if f.is_identity() || chain.as_ref().map(|c| c.contains(&f).unwrap_or(false)).unwrap_or(false) {
                        continue;
                    }
                    kept_faithful.push(f);
                    chain = Some(GeneratedGroup::new(kept_faithful[0].degree(), kept_faithful.clone()).expect("same degree").build_chain());
                }
                let e = evaluate_word(&w, &self.k_on_p).expect("valid word");
                if e.is_identity() || stab_on_p.contains(&e) {
                    continue;
                }
                stab_on_p.push(e);
                stab_words.push(w);
            }
        }
        self.orbits.push(QOrbit { size: order.len() as u64, stab_on_p, stab_words });
        id
    }

    /// Moves `x` to a point over the distinguished point of `π(x)`'s `K`-orbit.
    pub fn canonicalize(&mut self, x: &P) -> Canonical<P> {
        let mut q = self.map.project(x);
        let orbit = self.ensure_orbit(&q);
        let mut p = x.clone();
        let mut path = Vec::new();
        loop {
            let e = self.table[&q];
            if e.gen == u32::MAX {
                break;
            }
            let g = e.gen as usize;
            q = self.k_inv_q[g].act(&q);
            p = self.k_inv_p[g].act(&p);
            path.push(e.gen);
        }
        Canonical { point: p, q_orbit: orbit, path }
    }

    /// `K`-word `k` with `x·k` canonical, from a canonicalization path.
    fn path_word(path: &[u32]) -> Word {
        let mut w = Word::empty();
        for &g in path {
            w.push(g as usize, true);
        }
        w
    }

    /// Breadth-first traversal of `x·K` on the large set: `(point, parent, generator)`.
    fn k_orbit(&self, x: &P) -> Vec<(P, u32, u32)> {
        let mut seen: HashMap<P, ()> = new_map();
        seen.insert(x.clone(), ());
        let mut out = vec![(x.clone(), u32::MAX, u32::MAX)];
        let mut pos = 0;
        while pos < out.len() {
            let z = out[pos].0.clone();
            for (g, k) in self.k_on_p.iter().enumerate() {
                let y = k.act(&z);
                if seen.insert(y.clone(), ()).is_none() {
                    out.push((y, pos as u32, g as u32));
                }
            }
            pos += 1;
        }
        out
    }

    fn k_orbit_word(bfs: &[(P, u32, u32)], mut pos: usize) -> Word {
        let mut letters = Vec::new();
        while bfs[pos].1 != u32::MAX {
            letters.push(bfs[pos].2 as usize);
            pos = bfs[pos].1 as usize;
        }
        let mut w = Word::empty();
        for g in letters.into_iter().rev() {
            w.push(g, false);
        }
        w
    }

    fn k_to_h(&self, w: &Word) -> Word {
        w.substitute(&self.k_words).expect("K words index H generators")
    }

    fn k_faithful_of_path(&self, path: &[u32]) -> Option<Perm> {
        let kf = self.k_faithful.as_ref()?;
        let deg = kf.first().map(|p| p.degree())?;
        let mut acc = Perm::identity(deg);
        for &g in path {
            acc = acc.mul(&kf[g as usize].inv());
        }
        Some(acc)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Back {
    Root,
    /// `canon(pred·κ·h)` with `κ` at position `kpos` of the `K`-traversal of `pred`.
    HEdge { pred: u32, kpos: u32, hgen: u32 },
    /// `pred·s` for a stabilizer generator `s` of the distinguished helper point.
    Stab { pred: u32, s: u32 },
}

#[derive(Debug, Clone)]
struct Entry<P> {
    point: P,
    back: Back,
}

/// One `H`-orbit, stored through distinguished points.
#[derive(Debug, Clone)]
pub struct OrbitRecord<P, T> {
    pub index: usize,
    pub rep: P,
    /// `base·reach = rep`.
    pub reach: T,
    pub program: Program,
    pub length: u64,
    pub stab_order: BigUint,
    /// `|H_j|` certified through the faithful action.
    pub certified: bool,
    /// Every point of the orbit is covered.
    pub complete: bool,
    pub paired: Option<usize>,
    pub covered: u64,
    entries: Vec<Entry<P>>,
    lookup: HashMap<P, u32>,
}

impl<P: Point, T> OrbitRecord<P, T> {
    pub fn stored(&self) -> usize {
        self.entries.len()
    }

    pub fn contains_stored(&self, x: &P) -> bool {
        self.lookup.contains_key(x)
    }

    pub fn min_stored(&self) -> Option<&P> {
        self.entries.iter().map(|e| &e.point).min()
    }

    pub fn stored_points(&self) -> impl Iterator<Item = &P> {
        self.entries.iter().map(|e| &e.point)
    }

    /// Covered points per stored point.
    pub fn saving_factor(&self) -> Rational {
        Rational::new(self.covered.into(), (self.entries.len().max(1) as u64).into())
    }
}

/// Options for enumeration and classification.
#[derive(Debug, Clone)]
pub struct EnumConfig {
    pub memory_budget: usize,
    /// Orbits up to this length are enumerated completely.
    pub complete_up_to: u64,
    pub probe_budget: u64,
    /// Membership walks take this many steps per expected `K`-orbit.
    pub walk_factor: u64,
    pub seed: u64,
}

impl Default for EnumConfig {
    fn default() -> Self {
        EnumConfig { memory_budget: 1 << 26, complete_up_to: 1 << 20, probe_budget: 1_000_000, walk_factor: 200, seed: 1 }
    }
}

struct Certifier {
    gens: Vec<Perm>,
    group: Option<GeneratedGroup>,
    order: BigUint,
}

impl Certifier {
    fn new() -> Self {
        Certifier { gens: Vec::new(), group: None, order: BigUint::one() }
    }

    fn offer(&mut self, g: Perm) {
        if g.is_identity() {
            return;
        }
        if let Some(grp) = &self.group {
            if grp.contains(&g).unwrap_or(false) {
                return;
            }
        }
        self.gens.push(g);
        let grp = GeneratedGroup::new(self.gens[0].degree(), self.gens.clone()).expect("same degree").build_chain();
        self.order = grp.order().expect("chain built");
        self.group = Some(grp);
    }
}

/// Enumerates the `H`-orbit of `base·reach`, stopping once more than half of it
/// is covered and the stabilizer is certified (or at completion for short orbits).
///
/// Fails with [`OrbitError::Duplicate`] as soon as a distinguished point of one of
/// `known` is met.
pub fn enumerate_suborbit<P, T, M, U>(
    ctx: &ActionContext<P, T>,
    helper: &mut Helper<P, T, M, U>,
    reach: T,
    program: Program,
    known: &[OrbitRecord<P, T>],
    cfg: &EnumConfig,
) -> Result<OrbitRecord<P, T>, OrbitError>
where
    P: Point,
    T: GroupElem + Acts<P>,
    M: Quotient<P>,
    U: GroupElem + Acts<M::Q>,
{
    let v = reach.act(&ctx.base);
    let faithful = ctx.faithful_gens().map(|f| f.to_vec());
    let mut rec = OrbitRecord {
        index: known.len(),
        rep: v.clone(),
        reach,
        program,
        length: 0,
        stab_order: BigUint::zero(),
        certified: false,
        complete: false,
        paired: None,
        covered: 0,
        entries: Vec::new(),
        lookup: new_map(),
    };
    let mut elts: Vec<Option<Perm>> = Vec::new();
    let mut cert = Certifier::new();
    let mut sealed = false;

    let start = helper.canonicalize(&v);
    for (i, other) in known.iter().enumerate() {
        if other.lookup.contains_key(&start.point) {
            return Err(OrbitError::Duplicate(i));
        }
    }
    let root_elt = match (&faithful, helper.k_faithful_of_path(&start.path)) {
        (Some(_), Some(k)) => Some(k),
        _ => None,
    };
    let mut queue: Vec<u32> = Vec::new();
    add_k_orbit(helper, &mut rec, &mut elts, start.point, start.q_orbit, Back::Root, root_elt, &mut queue, cfg)?;
    let mut qpos = 0;
    let h_order = ctx.h_order.clone();
    let mut need_cert = faithful.is_some();
    let mut stopped = false;
    while qpos < queue.len() {
        let xi = queue[qpos];
        qpos += 1;
        let x = rec.entries[xi as usize].point.clone();
        let bfs = helper.k_orbit(&x);
        for (kpos, (z, _, _)) in bfs.iter().enumerate() {
            // transversal element of z is w(canon z)·k_z⁻¹
            let zc = if need_cert { Some(helper.canonicalize(z)) } else { None };
            for (hg, h) in ctx.h_gens.iter().enumerate() {
                let y = h.act(z);
                let yc = helper.canonicalize(&y);
                let hit = rec.lookup.get(&yc.point).copied();
                let target = match hit {
                    Some(t) => t,
                    None => {
                        for (i, other) in known.iter().enumerate() {
                            if other.lookup.contains_key(&yc.point) {
                                return Err(OrbitError::Duplicate(i));
                            }
                        }
                        let elt = if need_cert {
                            // w(y') = w(x)·κ·h·k_y, with κ·... evaluated through z's transversal
                            let zc = zc.as_ref().expect("computed");
                            let wz = elts[*rec.lookup.get(&zc.point).expect("covered") as usize].clone();
                            match (wz, helper.k_faithful_of_path(&zc.path), helper.k_faithful_of_path(&yc.path)) {
                                (Some(wz), Some(kz), Some(ky)) => Some(wz.mul(&kz.inv()).mul(&faithful.as_ref().unwrap()[hg]).mul(&ky)),
                                _ => None,
                            }
                        } else {
                            None
                        };
                        let back = Back::HEdge { pred: xi, kpos: kpos as u32, hgen: hg as u32 };
                        add_k_orbit(helper, &mut rec, &mut elts, yc.point.clone(), yc.q_orbit, back, elt, &mut queue, cfg)?;
                        continue;
                    }
                };
                if need_cert {
                    let zc = zc.as_ref().expect("computed");
                    let wz = elts[*rec.lookup.get(&zc.point).expect("covered") as usize].clone();
                    let wy = elts[target as usize].clone();
                    if let (Some(wz), Some(wy), Some(kz), Some(ky)) =
                        (wz, wy, helper.k_faithful_of_path(&zc.path), helper.k_faithful_of_path(&yc.path))
                    {
                        let s = wz.mul(&kz.inv()).mul(&faithful.as_ref().unwrap()[hg]).mul(&ky).mul(&wy.inv());
                        cert.offer(s);
                    }
                }
            }
            if need_cert && BigUint::from(rec.covered) * 2u32 * &cert.order > h_order {
                sealed = true;
                need_cert = false;
                elts.clear();
            }
            if sealed {
                let len = rec_length_bound(&h_order, &cert.order);
                if len > cfg.complete_up_to || rec.covered >= len {
                    stopped = true;
                    break;
                }
            }
        }
        if stopped {
            break;
        }
    }
    let exhausted = !stopped;
    if sealed {
        let (len, rem) = h_order.div_rem(&cert.order);
        if !rem.is_zero() {
            return Err(OrbitError::Inconsistent("stabilizer order does not divide |H|"));
        }
        rec.length = len.to_u64().ok_or(OrbitError::Inconsistent("orbit length overflow"))?;
        rec.stab_order = cert.order.clone();
        rec.certified = true;
        rec.complete = rec.covered == rec.length;
        if exhausted && !rec.complete && rec.covered < rec.length {
            return Err(OrbitError::Inconsistent("orbit closed before reaching its certified length"));
        }
    } else {
        if !exhausted {
            return Err(OrbitError::Inconsistent("enumeration stopped early"));
        }
        let (ord, rem) = h_order.div_rem(&BigUint::from(rec.covered));
        if !rem.is_zero() {
            return Err(OrbitError::Inconsistent("orbit length does not divide |H|"));
        }
        rec.length = rec.covered;
        rec.stab_order = ord;
        rec.certified = false;
        rec.complete = true;
    }
    if let Some(k) = &helper.k_order {
        if rec.saving_factor() > Rational::from_integer(k.clone().into()) {
            return Err(OrbitError::Inconsistent("saving factor above |K|"));
        }
    }
    Ok(rec)
}

fn rec_length_bound(h_order: &BigUint, s: &BigUint) -> u64 {
    (h_order / s).to_u64().unwrap_or(u64::MAX)
}

#[allow(clippy::too_many_arguments)]
fn add_k_orbit<P, T, M, U>(
    helper: &mut Helper<P, T, M, U>,
    rec: &mut OrbitRecord<P, T>,
    elts: &mut Vec<Option<Perm>>,
    x: P,
    q_orbit: u32,
    back: Back,
    elt: Option<Perm>,
    queue: &mut Vec<u32>,
    cfg: &EnumConfig,
) -> Result<(), OrbitError>
where
    P: Point,
    T: GroupElem + Acts<P>,
    M: Quotient<P>,
    U: GroupElem + Acts<M::Q>,
{
    let orbit = &helper.orbits[q_orbit as usize];
    let first = rec.entries.len() as u32;
    let push = |rec: &mut OrbitRecord<P, T>, elts: &mut Vec<Option<Perm>>, p: P, back: Back, e: Option<Perm>| -> Result<u32, OrbitError> {
        if rec.entries.len() >= cfg.memory_budget {
            return Err(OrbitError::MemoryBudget { budget: cfg.memory_budget, covered: rec.covered });
        }
        let id = rec.entries.len() as u32;
        rec.lookup.insert(p.clone(), id);
        rec.entries.push(Entry { point: p, back });
        elts.push(e);
        Ok(id)
    };
    push(rec, elts, x, back, elt)?;
    let kf = helper.k_faithful.clone();
    let mut pos = first as usize;
    while pos < rec.entries.len() {
        let p = rec.entries[pos].point.clone();
        for (s, g) in orbit.stab_on_p.iter().enumerate() {
            let y = g.act(&p);
            if !rec.lookup.contains_key(&y) {
                let e = match (&elts[pos], &kf) {
                    (Some(w), Some(kf)) => Some(w.mul(&evaluate_word(&orbit.stab_words[s], kf).expect("valid word"))),
                    _ => None,
                };
                push(rec, elts, y, Back::Stab { pred: pos as u32, s: s as u32 }, e)?;
            }
        }
        pos += 1;
    }
    let s = rec.entries.len() as u64 - first as u64;
    rec.covered += s * orbit.size;
    queue.push(first);
    Ok(())
}

/// Outcome of a randomized membership test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Membership {
    Member,
    NotMember,
    Unknown,
}

/// Where a point was found: `x·walk·k = stored point`, with `k = Π path⁻¹`.
#[derive(Debug, Clone)]
pub struct Located {
    pub entry: u32,
    pub walk: Vec<usize>,
    pub path: Vec<u32>,
}

/// Random `H`-walk from `x` until it meets a stored distinguished point.
pub fn locate<P, T, M, U, R>(
    ctx: &ActionContext<P, T>,
    helper: &mut Helper<P, T, M, U>,
    rec: &OrbitRecord<P, T>,
    x: &P,
    steps: u64,
    rng: &mut R,
) -> Option<Located>
where
    P: Point,
    T: GroupElem + Acts<P>,
    M: Quotient<P>,
    U: GroupElem + Acts<M::Q>,
    R: Rng + ?Sized,
{
    let mut cur = x.clone();
    let mut walk = Vec::new();
    let c = helper.canonicalize(&cur);
    if let Some(&e) = rec.lookup.get(&c.point) {
        return Some(Located { entry: e, walk, path: c.path });
    }
    if rec.complete {
        return None;
    }
    for _ in 0..steps {
        let g = rng.gen_range(0..ctx.h_gens.len());
        cur = ctx.h_gens[g].act(&cur);
        walk.push(g);
        let c = helper.canonicalize(&cur);
        if let Some(&e) = rec.lookup.get(&c.point) {
            return Some(Located { entry: e, walk, path: c.path });
        }
    }
    None
}

/// Walk length for membership: `walk_factor` per expected `K`-orbit in the record.
pub fn walk_budget<P: Point, T>(rec: &OrbitRecord<P, T>, cfg: &EnumConfig) -> u64 {
    let expected = (rec.length as u128 * rec.entries.len() as u128).div_ceil(rec.covered.max(1) as u128).max(1);
    (expected as u64).saturating_mul(cfg.walk_factor)
}

/// Randomized membership; "member" is certain, complete records also answer "not member".
pub fn membership<P, T, M, U, R>(
    ctx: &ActionContext<P, T>,
    helper: &mut Helper<P, T, M, U>,
    rec: &OrbitRecord<P, T>,
    x: &P,
    steps: u64,
    rng: &mut R,
) -> Membership
where
    P: Point,
    T: GroupElem + Acts<P>,
    M: Quotient<P>,
    U: GroupElem + Acts<M::Q>,
    R: Rng + ?Sized,
{
    match locate(ctx, helper, rec, x, steps, rng) {
        Some(_) => Membership::Member,
        None if rec.complete => Membership::NotMember,
        None => Membership::Unknown,
    }
}

/// Exact disjointness: no distinguished point is stored in two records.
pub fn disjoint<P: Point, T>(records: &[OrbitRecord<P, T>]) -> bool {
    for (i, a) in records.iter().enumerate() {
        for b in &records[i + 1..] {
            let (small, large) = if a.entries.len() <= b.entries.len() { (a, b) } else { (b, a) };
            if small.entries.iter().any(|e| large.lookup.contains_key(&e.point)) {
                return false;
            }
        }
    }
    true
}

/// `H`-word from the record's representative to a stored point.
fn entry_word<P, T, M, U>(helper: &mut Helper<P, T, M, U>, rec: &OrbitRecord<P, T>, ctx: &ActionContext<P, T>, mut idx: u32) -> Word
where
    P: Point,
    T: GroupElem + Acts<P>,
    M: Quotient<P>,
    U: GroupElem + Acts<M::Q>,
{
    let mut pieces: Vec<Word> = Vec::new();
    loop {
        match rec.entries[idx as usize].back {
            Back::Root => {
                // rep·k_root = first entry
                let c = helper.canonicalize(&rec.rep);
                pieces.push(helper.k_to_h(&Helper::<P, T, M, U>::path_word(&c.path)));
                break;
            }
            Back::Stab { pred, s } => {
                let q = helper.map.project(&rec.entries[pred as usize].point);
                let o = helper.table[&q].orbit;
                let w = helper.orbits[o as usize].stab_words[s as usize].clone();
                pieces.push(helper.k_to_h(&w));
                idx = pred;
            }
            Back::HEdge { pred, kpos, hgen } => {
                let x = rec.entries[pred as usize].point.clone();
                let bfs = helper.k_orbit(&x);
                let kappa = Helper::<P, T, M, U>::k_orbit_word(&bfs, kpos as usize);
                let y = ctx.h_gens[hgen as usize].act(&bfs[kpos as usize].0);
                let c = helper.canonicalize(&y);
                let mut w = helper.k_to_h(&kappa);
                w.push(hgen as usize, false);
                let w = w.concat(&helper.k_to_h(&Helper::<P, T, M, U>::path_word(&c.path)));
                pieces.push(w);
                idx = pred;
            }
        }
    }
    pieces.into_iter().rev().fold(Word::empty(), |acc, w| acc.concat(&w))
}

/// `H`-word `w` with `rep·w = x`, for `x` in the record's orbit.
pub fn trace_word<P, T, M, U, R>(
    ctx: &ActionContext<P, T>,
    helper: &mut Helper<P, T, M, U>,
    rec: &OrbitRecord<P, T>,
    x: &P,
    steps: u64,
    rng: &mut R,
) -> Option<Word>
where
    P: Point,
    T: GroupElem + Acts<P>,
    M: Quotient<P>,
    U: GroupElem + Acts<M::Q>,
    R: Rng + ?Sized,
{
    if *x == rec.rep {
        return Some(Word::empty());
    }
    let loc = locate(ctx, helper, rec, x, steps, rng)?;
    let to_entry = entry_word(helper, rec, ctx, loc.entry);
    // x·walk·k = entry  ⇒  x = rep·to_entry·k⁻¹·walk⁻¹
    let k = helper.k_to_h(&Helper::<P, T, M, U>::path_word(&loc.path));
    let mut walk = Word::empty();
    for &g in &loc.walk {
        walk.push(g, false);
    }
    Some(to_entry.concat(&k.inverse()).concat(&walk.inverse()).reduced())
}

/// Sealed records covering all of `O`.
#[derive(Debug, Clone)]
pub struct OrbitPartition<P, T> {
    pub records: Vec<OrbitRecord<P, T>>,
    pub total: u64,
    pub target: u64,
    pub probes: u64,
}

/// Per-orbit data of a partition, without the point stores.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionSummary {
    pub lengths: Vec<u64>,
    pub stab_orders: Vec<BigUint>,
    pub paired: Vec<Option<usize>>,
    pub certified: Vec<bool>,
    pub stored: Vec<usize>,
    pub covered: Vec<u64>,
    pub target: u64,
    pub probes: u64,
}

impl<P: Point, T> OrbitPartition<P, T> {
    pub fn summary(&self) -> PartitionSummary {
        PartitionSummary {
            lengths: self.records.iter().map(|r| r.length).collect(),
            stab_orders: self.records.iter().map(|r| r.stab_order.clone()).collect(),
            paired: self.records.iter().map(|r| r.paired).collect(),
            certified: self.records.iter().map(|r| r.certified).collect(),
            stored: self.records.iter().map(|r| r.stored()).collect(),
            covered: self.records.iter().map(|r| r.covered).collect(),
            target: self.target,
            probes: self.probes,
        }
    }

    pub fn rank(&self) -> usize {
        self.records.len()
    }
}

/// Which record holds `x`, trying every record with its walk budget.
pub fn find_orbit<P, T, M, U, R>(
    ctx: &ActionContext<P, T>,
    helper: &mut Helper<P, T, M, U>,
    records: &[OrbitRecord<P, T>],
    x: &P,
    cfg: &EnumConfig,
    rng: &mut R,
) -> Option<usize>
where
    P: Point,
    T: GroupElem + Acts<P>,
    M: Quotient<P>,
    U: GroupElem + Acts<M::Q>,
    R: Rng + ?Sized,
{
    // cheap exact lookups first
    let c = helper.canonicalize(x);
    if let Some(i) = records.iter().position(|r| r.lookup.contains_key(&c.point)) {
        return Some(i);
    }
    records
        .iter()
        .position(|r| !r.complete && locate(ctx, helper, r, x, walk_budget(r, cfg), rng).is_some())
}

/// Splits `O` into `H`-orbits by random probes `base·g`, also probing
/// `base·g⁻¹` for each new orbit to find its paired orbit.
///
/// Records come out ordered by length, then by minimal stored point.
pub fn classify<P, T, M, U>(
    ctx: &ActionContext<P, T>,
    helper: &mut Helper<P, T, M, U>,
    cfg: &EnumConfig,
) -> Result<OrbitPartition<P, T>, OrbitError>
where
    P: Point,
    T: GroupElem + Acts<P>,
    M: Quotient<P>,
    U: GroupElem + Acts<M::Q>,
{
    let part = classify_partial(ctx, helper, cfg)?;
    if part.total != ctx.index {
        return Err(OrbitError::ProbeBudget { residual: ctx.index.saturating_sub(part.total), partition: Box::new(part.summary()) });
    }
    Ok(part)
}

/// As [`classify`], but returns the records found when the probe budget runs out.
pub fn classify_partial<P, T, M, U>(
    ctx: &ActionContext<P, T>,
    helper: &mut Helper<P, T, M, U>,
    cfg: &EnumConfig,
) -> Result<OrbitPartition<P, T>, OrbitError>
where
    P: Point,
    T: GroupElem + Acts<P>,
    M: Quotient<P>,
    U: GroupElem + Acts<M::Q>,
{
    let mut stream = RandomStream::new(&ctx.g_gens, cfg.seed)?;
    let one = ctx.g_gens[0].identity_like();
    let mut records: Vec<OrbitRecord<P, T>> = Vec::new();
    let mut first = enumerate_suborbit(ctx, helper, one, Program::identity(), &records, cfg)?;
    first.paired = Some(0);
    let mut total = first.length;
    records.push(first);
    let mut probes = 0u64;
    while total < ctx.index && probes < cfg.probe_budget {
        let (g, handle) = stream.next_element();
        probes += 1;
        let x = g.act(&ctx.base);
        if find_orbit(ctx, helper, &records, &x, cfg, stream.rng()).is_some() {
            continue;
        }
        let program = stream.program_for(handle);
        let j = match enumerate_suborbit(ctx, helper, g.clone(), program.clone(), &records, cfg) {
            Ok(rec) => {
                total += rec.length;
                records.push(rec);
                records.len() - 1
            }
            Err(OrbitError::Duplicate(_)) => continue,
            Err(e) => return Err(e),
        };
        // paired orbit contains base·g⁻¹
        let gi = g.inv();
        let y = gi.act(&ctx.base);
        let pair = match find_orbit(ctx, helper, &records, &y, cfg, stream.rng()) {
            Some(k) => k,
            None => match enumerate_suborbit(ctx, helper, gi, program.inverse(), &records, cfg) {
                Ok(rec) => {
                    total += rec.length;
                    records.push(rec);
                    records.len() - 1
                }
                Err(OrbitError::Duplicate(k)) => k,
                Err(e) => return Err(e),
            },
        };
        records[j].paired = Some(pair);
        records[pair].paired = Some(j);
    }
    canonical_order(&mut records);
    Ok(OrbitPartition { records, total, target: ctx.index, probes })
}

/// Sorts by `(length, minimal stored point)` and renumbers the pairing.
pub fn canonical_order<P: Point, T>(records: &mut Vec<OrbitRecord<P, T>>) {
    let mut order: Vec<usize> = (0..records.len()).collect();
    order.sort_by(|&a, &b| {
        let (ra, rb) = (&records[a], &records[b]);
        (ra.length, ra.min_stored()).cmp(&(rb.length, rb.min_stored()))
    });
    let mut new_index = vec![0usize; records.len()];
    for (new, &old) in order.iter().enumerate() {
        new_index[old] = new;
    }
    let mut taken: Vec<Option<OrbitRecord<P, T>>> = core::mem::take(records).into_iter().map(Some).collect();
    for (new, &old) in order.iter().enumerate() {
        let mut r = taken[old].take().expect("each record once");
        r.index = new;
        r.paired = r.paired.map(|p| new_index[p]);
        records.push(r);
    }
}

/// Candidate points fixed by a set of group elements.
pub trait FixedPoints<P> {
    fn fixed_points(gens: &[Self], limit: usize) -> Vec<P>
    where
        Self: Sized;
}

impl FixedPoints<u32> for Perm {
    fn fixed_points(gens: &[Perm], limit: usize) -> Vec<u32> {
        let n = gens.first().map(|g| g.degree()).unwrap_or(0) as u32;
        (0..n).filter(|&x| gens.iter().all(|g| g.image(x) == x)).take(limit).collect()
    }
}

impl FixedPoints<FqVec> for FqMatrix {
    /// Nonzero vectors of the fixed space, in lexicographic order of coordinates.
    fn fixed_points(gens: &[FqMatrix], limit: usize) -> Vec<FqVec> {
        let Some(g0) = gens.first() else { return Vec::new() };
        let (p, n) = (g0.p(), g0.nrows());
        let m = crate::gfmat::ModuleRep::new(p as u64, n, gens.to_vec()).expect("square matrices");
        let basis = m.fixed_space();
        let mut out = Vec::new();
        let mut coeffs = vec![0u8; basis.len()];
        loop {
            // next coefficient vector in base p
            let mut i = 0;
            while i < coeffs.len() {
                coeffs[i] += 1;
                if coeffs[i] < p {
                    break;
                }
                coeffs[i] = 0;
                i += 1;
            }
            if i == coeffs.len() || out.len() >= limit {
                break;
            }
            let mut v = FqVec::zero(p, n);
            for (c, b) in coeffs.iter().zip(&basis) {
                if *c != 0 {
                    v.add_scaled(b, *c);
                }
            }
            out.push(v);
        }
        out
    }
}

/// A new orbit representative found through a fixed space.
#[derive(Debug, Clone)]
pub struct FixedProbe<P, T> {
    pub point: P,
    /// `base·element = point`.
    pub element: T,
}

/// A fixed-space probe together with the record of the orbit it found.
pub type ProbeHit<P, T> = (FixedProbe<P, T>, OrbitRecord<P, T>);

/// Looks for a point fixed by `s_gens` whose `H`-orbit is new and has the
/// target length. Each candidate `v` is moved into a known orbit by random
/// `g`, traced as `rep_j·h = v·g`, and reached as `base·g_j·h·g⁻¹`.
#[allow(clippy::too_many_arguments)]
pub fn probe_fixed_space<P, T, M, U, R>(
    ctx: &ActionContext<P, T>,
    helper: &mut Helper<P, T, M, U>,
    partition: &OrbitPartition<P, T>,
    s_gens: &[T],
    target_length: u64,
    tries: usize,
    cfg: &EnumConfig,
    rng: &mut R,
) -> Result<Option<ProbeHit<P, T>>, OrbitError>
where
    P: Point,
    T: GroupElem + Acts<P> + FixedPoints<P>,
    M: Quotient<P>,
    U: GroupElem + Acts<M::Q>,
    R: Rng + ?Sized,
{
    let mut stream = RandomStream::new(&ctx.g_gens, rng.gen())?;
    for v in T::fixed_points(s_gens, 1 << 16) {
        if find_orbit(ctx, helper, &partition.records, &v, cfg, rng).is_some() {
            continue;
        }
        for _ in 0..tries {
            let (g, _) = stream.next_element();
            let vg = g.act(&v);
            let Some(j) = find_orbit(ctx, helper, &partition.records, &vg, cfg, rng) else { continue };
            let rec = &partition.records[j];
            let Some(h) = trace_word(ctx, helper, rec, &vg, walk_budget(rec, cfg), rng) else { continue };
            let hw = evaluate_word(&h, &ctx.h_gens).map_err(|_| OrbitError::Inconsistent("trace word"))?;
            let element = rec.reach.mul(&hw).mul(&g.inv());
            if element.act(&ctx.base) != v {
                return Err(OrbitError::Inconsistent("fixed-space probe word does not reach the vector"));
            }
            // v itself is in a known orbit only if that orbit was found above; try it as new
            match enumerate_suborbit(ctx, helper, element.clone(), Program::identity(), &partition.records, cfg) {
                Ok(r) if r.length == target_length => return Ok(Some((FixedProbe { point: v, element }, r))),
                Ok(_) | Err(OrbitError::Duplicate(_)) => break,
                Err(e) => return Err(e),
            }
        }
    }
    Ok(None)
}

/// Bytes to store `index` points of `bits` bits each plus a 4-byte back-reference.
pub fn memory_estimate(bits: u64, index: u64) -> u128 {
    (bits.div_ceil(8) as u128 + 4) * index as u128
}

impl<P: Point, T: GroupElem + Acts<P>> ActionContext<P, T> {
    pub fn memory_estimate(&self) -> u128 {
        memory_estimate(self.point_bits, self.index)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::Perm;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cyc(n: usize, cycles: &[&[u32]]) -> Perm {
        Perm::from_cycles(n, cycles).unwrap()
    }

    /// S5 on 5 points with H = Stab(0) = S4 on {1,2,3,4}.
    fn s5_context() -> ActionContext<u32, Perm> {
        let g = vec![cyc(5, &[&[0, 1]]), cyc(5, &[&[0, 1, 2, 3, 4]])];
        let h = vec![cyc(5, &[&[1, 2]]), cyc(5, &[&[1, 2, 3, 4]])];
        let faithful = h.clone();
        ActionContext::new(g, h, 0u32, Some(faithful), None, 5, 32).unwrap()
    }

    type PermHelper = Helper<u32, Perm, IdentityQuotient, Perm>;

    fn helper(ctx: &ActionContext<u32, Perm>, k_words: Vec<Word>) -> PermHelper {
        let k_on_q: Vec<Perm> = k_words.iter().map(|w| evaluate_word(w, &ctx.h_gens).unwrap()).collect();
        Helper::new::<u32>(ctx, k_words, k_on_q, IdentityQuotient, &[1, 2, 3]).unwrap()
    }

    #[test]
    fn base_orbit_is_a_point() {
        let ctx = s5_context();
        let mut hp = helper(&ctx, vec![Word::gen(0)]);
        let rec = enumerate_suborbit(&ctx, &mut hp, Perm::identity(5), Program::identity(), &[], &EnumConfig::default()).unwrap();
        assert_eq!(rec.length, 1);
        assert_eq!(rec.stab_order, BigUint::from(24u32));
        assert!(rec.certified);
    }

    #[test]
    fn s5_on_five_points_with_c2_helper() {
        let ctx = s5_context();
        let mut hp = helper(&ctx, vec![Word::gen(0)]);
        let part = classify(&ctx, &mut hp, &EnumConfig::default()).unwrap();
        let lengths: Vec<u64> = part.records.iter().map(|r| r.length).collect();
        assert_eq!(lengths, vec![1, 4]);
        assert_eq!(part.records[1].stab_order, BigUint::from(6u32));
        assert!(disjoint(&part.records));
        assert_eq!(part.records[1].paired, Some(1));
        // K = C2 has orbits {1,2},{3},{4} on the long orbit: 3 stored points
        assert_eq!(part.records[1].stored(), 3);
        assert!(part.records[1].saving_factor() <= Rational::from_integer(2.into()));
    }

    #[test]
    fn trivial_helper_has_saving_factor_one() {
        let ctx = s5_context();
        let mut hp = helper(&ctx, vec![]);
        let part = classify(&ctx, &mut hp, &EnumConfig::default()).unwrap();
        for r in &part.records {
            assert_eq!(r.saving_factor(), Rational::one());
        }
    }

    #[test]
    fn half_coverage_seals_large_orbits() {
        // S7 on 2-subsets as 21 points would be heavy; use S6 on 6 points with H = S5
        let g = vec![cyc(6, &[&[0, 1]]), cyc(6, &[&[0, 1, 2, 3, 4, 5]])];
        let h = vec![cyc(6, &[&[1, 2]]), cyc(6, &[&[1, 2, 3, 4, 5]])];
        let ctx = ActionContext::new(g, h.clone(), 0u32, Some(h), None, 6, 32).unwrap();
        let mut hp = helper(&ctx, vec![Word::gen(0)]);
        let cfg = EnumConfig { complete_up_to: 0, ..EnumConfig::default() };
        let part = classify(&ctx, &mut hp, &cfg).unwrap();
        let long = &part.records[1];
        assert_eq!(long.length, 5);
        assert!(long.covered * 2 > long.length);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for x in 1..6u32 {
            let w = trace_word(&ctx, &mut hp, long, &x, 10_000, &mut rng).unwrap();
            let e = evaluate_word(&w, &ctx.h_gens).unwrap();
            assert_eq!(e.act(&long.rep), x);
        }
        assert_eq!(membership(&ctx, &mut hp, &part.records[0], &3, 100, &mut rng), Membership::NotMember);
    }

    #[test]
    fn duplicate_start_is_detected() {
        let ctx = s5_context();
        let mut hp = helper(&ctx, vec![Word::gen(0)]);
        let part = classify(&ctx, &mut hp, &EnumConfig::default()).unwrap();
        let g = cyc(5, &[&[0, 3]]);
        let err = enumerate_suborbit(&ctx, &mut hp, g, Program::identity(), &part.records, &EnumConfig::default()).unwrap_err();
        assert_eq!(err, OrbitError::Duplicate(1));
    }

    #[test]
    fn rejects_non_equivariant_map() {
        struct Parity;
        impl Quotient<u32> for Parity {
            type Q = u32;
            fn project(&self, x: &u32) -> u32 {
                x % 2
            }
        }
        let ctx = s5_context();
        let k = vec![Word::gen(0)];
        let kq = vec![Perm::identity(5)];
        let r = Helper::<u32, Perm, Parity, Perm>::new::<u32>(&ctx, k, kq, Parity, &[1, 2]);
        assert!(matches!(r, Err(OrbitError::NotEquivariant(0))));
    }

    #[test]
    fn weight_two_vectors_with_linear_quotient() {
        let p = 2u8;
        let perms_g = [cyc(6, &[&[0, 1]]), cyc(6, &[&[0, 1, 2, 3, 4, 5]])];
        let perms_h = vec![cyc(6, &[&[0, 1]]), cyc(6, &[&[2, 3]]), cyc(6, &[&[2, 3, 4, 5]])];
        let g: Vec<FqMatrix> = perms_g.iter().map(|x| FqMatrix::permutation(p, x)).collect();
        let h: Vec<FqMatrix> = perms_h.iter().map(|x| FqMatrix::permutation(p, x)).collect();
        let base = FqVec::from_entries(p, &[1, 1, 0, 0, 0, 0]);
        let ctx = ActionContext::new(g, h, base, Some(perms_h.clone()), None, 15, 6).unwrap();
        // π: coordinates 2..5, K = <(2,3,4,5)>
        let proj = FqMatrix::from_i64(p, 6, 4, &[0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1]).unwrap();
        let kq = vec![FqMatrix::permutation(p, &cyc(4, &[&[0, 1, 2, 3]]))];
        let mut hp = Helper::new::<FqVec>(&ctx, vec![Word::gen(2)], kq, LinearQuotient(proj), &[]).unwrap();
        let part = classify(&ctx, &mut hp, &EnumConfig::default()).unwrap();
        let lengths: Vec<u64> = part.records.iter().map(|r| r.length).collect();
        assert_eq!(lengths, vec![1, 6, 8]);
        let stabs: Vec<u32> = part.records.iter().map(|r| r.stab_order.to_u32().unwrap()).collect();
        assert_eq!(stabs, vec![48, 8, 6]);
        assert!(disjoint(&part.records));
        for r in &part.records {
            assert_eq!(r.paired, Some(r.index));
            assert!(r.saving_factor() <= Rational::from_integer(4.into()));
        }
    }

    #[test]
    fn j4_memory_estimate() {
        assert_eq!(memory_estimate(112, 8_474_719_242), 152_544_946_356);
    }
}
