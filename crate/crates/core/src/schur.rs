//! Schur basis of the endomorphism ring: orbit counting numbers, intersection
//! matrices and generation of `E_ℚ` by a few of them.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::hashing::new_set;
use crate::orbenum::{find_orbit, ActionContext, EnumConfig, Helper, OrbitPartition, Point, Quotient};
use crate::perm::{Acts, GroupElem, Word};
use crate::qmat::{IntMatrix, QMatrix, RowSpace};
use crate::quadratic::Rational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SchurError {
    #[error("P_{j}: entry ({i},{k}) is not integral")]
    NotIntegral { j: usize, i: usize, k: usize },
    #[error("P_{j}: first row is not the unit vector")]
    FirstRow { j: usize },
    #[error("P_{j}: weighted sum of row {i} is not n_i·n_j")]
    RowSum { j: usize, i: usize },
    #[error("orbit {j} has {len} points, above the enumeration cutoff {cutoff}")]
    TooLong { j: usize, len: u64, cutoff: u64 },
    #[error("counts for P_{j}, row {i}, are partial: {unknown} points unresolved")]
    PartialCounts { j: usize, i: usize, unknown: u64 },
    #[error("paired orbits {j} and {js} differ in length")]
    Pairing { j: usize, js: usize },
    #[error("closure has dimension {got}, rank is {rank}")]
    Incomplete { got: usize, rank: usize },
    #[error("shape mismatch: {0}")]
    Shape(&'static str),
}

/// Orbit lengths and pairing of a rank-`r` action.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchurContext {
    pub lengths: Vec<u64>,
    /// `pairing[j] = j*`, 0-based.
    pub pairing: Vec<usize>,
}

impl SchurContext {
    pub fn new(lengths: Vec<u64>, pairing: Vec<usize>) -> Result<Self, SchurError> {
        if lengths.len() != pairing.len() {
            return Err(SchurError::Shape("lengths and pairing"));
        }
        for (j, &js) in pairing.iter().enumerate() {
            if js >= lengths.len() || pairing[js] != j || lengths[j] != lengths[js] {
                return Err(SchurError::Pairing { j, js });
            }
        }
        Ok(SchurContext { lengths, pairing })
    }

    pub fn rank(&self) -> usize {
        self.lengths.len()
    }

    pub fn degree(&self) -> u64 {
        self.lengths.iter().sum()
    }

    pub fn from_partition<P: Point, T>(part: &OrbitPartition<P, T>) -> Result<Self, SchurError> {
        let lengths = part.records.iter().map(|r| r.length).collect();
        let pairing = part.records.iter().enumerate().map(|(j, r)| r.paired.unwrap_or(j)).collect();
        SchurContext::new(lengths, pairing)
    }
}

/// Explicit list of the points of orbit `j`.
pub fn orbit_points<P, T>(ctx: &ActionContext<P, T>, rep: &P, cutoff: u64) -> Option<Vec<P>>
where
    P: Point,
    T: GroupElem + Acts<P>,
{
    let mut seen = new_set();
    seen.insert(rep.clone());
    let mut out = vec![rep.clone()];
    let mut pos = 0;
    while pos < out.len() {
        let x = out[pos].clone();
        for h in &ctx.h_gens {
            let y = h.act(&x);
            if seen.insert(y.clone()) {
                if out.len() as u64 >= cutoff {
                    return None;
                }
                out.push(y);
            }
        }
        pos += 1;
    }
    Some(out)
}

/// `c_jk(g_i)` for all `k`, by mapping every point of `O_j` with `g_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountRow {
    pub counts: Vec<u64>,
    pub unknown: u64,
}

#[allow(clippy::too_many_arguments)]
pub fn count_row<P, T, M, U>(
    ctx: &ActionContext<P, T>,
    helper: &mut Helper<P, T, M, U>,
    part: &OrbitPartition<P, T>,
    points_j: &[P],
    i: usize,
    cfg: &EnumConfig,
) -> CountRow
where
    P: Point,
    T: GroupElem + Acts<P>,
    M: Quotient<P>,
    U: GroupElem + Acts<M::Q>,
{
    let r = part.records.len();
    let g = &part.records[i].reach;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ (i as u64).wrapping_mul(0x9e37_79b9));
    let mut counts = vec![0u64; r];
    let mut unknown = 0;
    for x in points_j {
        let y = g.act(x);
        match find_orbit(ctx, helper, &part.records, &y, cfg, &mut rng) {
            Some(k) => counts[k] += 1,
            None => unknown += 1,
        }
    }
    CountRow { counts, unknown }
}

/// `c_jk(g_i) = |O_j·g_i ∩ O_k|`.
#[allow(clippy::too_many_arguments)]
pub fn orbit_counting<P, T, M, U>(
    ctx: &ActionContext<P, T>,
    helper: &mut Helper<P, T, M, U>,
    part: &OrbitPartition<P, T>,
    j: usize,
    k: usize,
    i: usize,
    cfg: &EnumConfig,
    cutoff: u64,
) -> Result<u64, SchurError>
where
    P: Point,
    T: GroupElem + Acts<P>,
    M: Quotient<P>,
    U: GroupElem + Acts<M::Q>,
{
    let rec = &part.records[j];
    let pts = orbit_points(ctx, &rec.rep, cutoff).ok_or(SchurError::TooLong { j, len: rec.length, cutoff })?;
    let row = count_row(ctx, helper, part, &pts, i, cfg);
    if row.unknown > 0 {
        return Err(SchurError::PartialCounts { j, i, unknown: row.unknown });
    }
    Ok(row.counts[k])
}

/// `P_j` from counts: `p_ijk = n_i/n_k · c_jk(g_i)`, checked for integrality,
/// unit first row and weighted row sums.
pub fn intersection_matrix(ctx: &SchurContext, j: usize, counts: &[Vec<u64>]) -> Result<IntMatrix, SchurError> {
    let r = ctx.rank();
    if counts.len() != r || counts.iter().any(|c| c.len() != r) {
        return Err(SchurError::Shape("counts"));
    }
    let mut m = IntMatrix::zeros(r, r);
    for i in 0..r {
        for k in 0..r {
            let num = BigInt::from(ctx.lengths[i]) * BigInt::from(counts[i][k]);
            let den = BigInt::from(ctx.lengths[k]);
            if !(&num % &den).is_zero() {
                return Err(SchurError::NotIntegral { j, i, k });
            }
            m.set(i, k, num / den);
        }
    }
    check_intersection_matrix(ctx, j, &m)?;
    Ok(m)
}

pub fn check_intersection_matrix(ctx: &SchurContext, j: usize, m: &IntMatrix) -> Result<(), SchurError> {
    let r = ctx.rank();
    if m.nrows() != r || m.ncols() != r {
        return Err(SchurError::Shape("intersection matrix"));
    }
    for k in 0..r {
        let want = if k == j { BigInt::one() } else { BigInt::zero() };
        if *m.get(0, k) != want {
            return Err(SchurError::FirstRow { j });
        }
    }
    for i in 0..r {
        let s: BigInt = (0..r).map(|k| m.get(i, k) * BigInt::from(ctx.lengths[k])).sum();
        if s != BigInt::from(ctx.lengths[i]) * BigInt::from(ctx.lengths[j]) {
            return Err(SchurError::RowSum { j, i });
        }
    }
    Ok(())
}

/// Counts `P_j` directly.
pub fn count_intersection_matrix<P, T, M, U>(
    ctx: &ActionContext<P, T>,
    helper: &mut Helper<P, T, M, U>,
    part: &OrbitPartition<P, T>,
    sctx: &SchurContext,
    j: usize,
    cfg: &EnumConfig,
    cutoff: u64,
) -> Result<IntMatrix, SchurError>
where
    P: Point,
    T: GroupElem + Acts<P>,
    M: Quotient<P>,
    U: GroupElem + Acts<M::Q>,
{
    let rec = &part.records[j];
    let pts = orbit_points(ctx, &rec.rep, cutoff).ok_or(SchurError::TooLong { j, len: rec.length, cutoff })?;
    let mut counts = Vec::with_capacity(sctx.rank());
    for i in 0..sctx.rank() {
        let row = count_row(ctx, helper, part, &pts, i, cfg);
        if row.unknown > 0 {
            return Err(SchurError::PartialCounts { j, i, unknown: row.unknown });
        }
        if row.counts.iter().sum::<u64>() != rec.length {
            return Err(SchurError::PartialCounts { j, i, unknown: rec.length - row.counts.iter().sum::<u64>() });
        }
        counts.push(row.counts);
    }
    intersection_matrix(sctx, j, &counts)
}

/// Spin of the first unit vector under right multiplication by the generators.
#[derive(Debug, Clone)]
pub struct Closure {
    /// Standard basis vectors in the order found.
    pub vectors: Vec<Vec<Rational>>,
    /// Words in the generators producing each vector from `e_1`.
    pub words: Vec<Word>,
    /// Matrices of the corresponding algebra elements.
    pub elements: Vec<IntMatrix>,
    pub gens: Vec<IntMatrix>,
}

impl Closure {
    pub fn dimension(&self) -> usize {
        self.vectors.len()
    }
}

/// Standard basis of the unital algebra generated by `mats`.
pub fn algebra_closure(mats: &[IntMatrix]) -> Result<Closure, SchurError> {
    let r = mats.first().map(|m| m.nrows()).ok_or(SchurError::Shape("no generators"))?;
    let mut e1 = vec![Rational::zero(); r];
    e1[0] = Rational::one();
    let mut space = RowSpace::new(r);
    space.insert(e1.clone());
    let mut cl = Closure { vectors: vec![e1], words: vec![Word::empty()], elements: vec![IntMatrix::identity(r)], gens: mats.to_vec() };
    let mut pos = 0;
    while pos < cl.vectors.len() {
        for (g, m) in mats.iter().enumerate() {
            let w = m.to_rational().apply(&cl.vectors[pos]);
            if space.insert(w.clone()) {
                let mut word = cl.words[pos].clone();
                word.push(g, false);
                let elt = cl.elements[pos].mul(m).map_err(|_| SchurError::Shape("generator size"))?;
                cl.vectors.push(w);
                cl.words.push(word);
                cl.elements.push(elt);
            }
        }
        pos += 1;
    }
    Ok(cl)
}

/// `P_j` from its first row `e_j` expressed in the standard basis.
pub fn recover_matrix(cl: &Closure, j: usize) -> Result<IntMatrix, SchurError> {
    let r = cl.vectors.first().map(|v| v.len()).unwrap_or(0);
    let d = cl.dimension();
    if d != r {
        return Err(SchurError::Incomplete { got: d, rank: r });
    }
    let b = QMatrix::from_rows(cl.vectors.clone()).map_err(|_| SchurError::Shape("basis"))?;
    let inv = b.inverse().map_err(|_| SchurError::Incomplete { got: d, rank: r })?;
    // c·B = e_j  ⇒  c = e_j·B⁻¹
    let c = inv.row(j).to_vec();
    let mut acc = QMatrix::zeros(r, r);
    for (ck, w) in c.iter().zip(&cl.elements) {
        if !ck.is_zero() {
            acc = acc.add(&w.to_rational().scale(ck)).expect("square");
        }
    }
    let mut out = IntMatrix::zeros(r, r);
    for i in 0..r {
        for k in 0..r {
            let x = acc.get(i, k);
            if !x.is_integer() {
                return Err(SchurError::NotIntegral { j, i, k });
            }
            out.set(i, k, x.to_integer());
        }
    }
    Ok(out)
}

/// How each intersection matrix was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    Counted,
    Recovered,
}

/// All intersection matrices: counted in order of increasing orbit length
/// until they generate `E_ℚ`, the rest recovered from the closure.
pub fn all_intersection_matrices<P, T, M, U>(
    ctx: &ActionContext<P, T>,
    helper: &mut Helper<P, T, M, U>,
    part: &OrbitPartition<P, T>,
    cfg: &EnumConfig,
    cutoff: u64,
) -> Result<(SchurContext, Vec<IntMatrix>, Vec<Source>), SchurError>
where
    P: Point,
    T: GroupElem + Acts<P>,
    M: Quotient<P>,
    U: GroupElem + Acts<M::Q>,
{
    let sctx = SchurContext::from_partition(part)?;
    let r = sctx.rank();
    let mut order: Vec<usize> = (1..r).collect();
    order.sort_by_key(|&j| (sctx.lengths[j], j));
    let mut counted: Vec<(usize, IntMatrix)> = Vec::new();
    let mut closure = algebra_closure(&[IntMatrix::identity(r)])?;
    for &j in &order {
        if closure.dimension() == r {
            break;
        }
        if sctx.lengths[j] > cutoff {
            return Err(SchurError::TooLong { j, len: sctx.lengths[j], cutoff });
        }
        let m = count_intersection_matrix(ctx, helper, part, &sctx, j, cfg, cutoff)?;
        counted.push((j, m));
        let gens: Vec<IntMatrix> = counted.iter().map(|(_, m)| m.clone()).collect();
        closure = algebra_closure(&gens)?;
    }
    if closure.dimension() != r {
        return Err(SchurError::Incomplete { got: closure.dimension(), rank: r });
    }
    let mut mats = Vec::with_capacity(r);
    let mut sources = Vec::with_capacity(r);
    for j in 0..r {
        if let Some((_, m)) = counted.iter().find(|(jj, _)| *jj == j) {
            mats.push(m.clone());
            sources.push(Source::Counted);
        } else {
            let m = recover_matrix(&closure, j)?;
            check_intersection_matrix(&sctx, j, &m)?;
            mats.push(m);
            sources.push(Source::Recovered);
        }
    }
    Ok((sctx, mats, sources))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orbenum::{classify, IdentityQuotient};
    use crate::perm::{evaluate_word, Perm};

    fn im(rows: &[Vec<i64>]) -> IntMatrix {
        IntMatrix::from_i64(rows).unwrap()
    }

    #[test]
    fn rank_two_from_counts() {
        let ctx = SchurContext::new(vec![1, 4], vec![0, 1]).unwrap();
        let p2 = intersection_matrix(&ctx, 1, &[vec![0, 4], vec![1, 3]]).unwrap();
        assert_eq!(p2, im(&[vec![0, 1], vec![4, 3]]));
        assert!(matches!(intersection_matrix(&ctx, 1, &[vec![0, 4], vec![1, 2]]), Err(SchurError::RowSum { .. })));
    }

    #[test]
    fn closure_and_recovery() {
        let p2 = im(&[vec![0, 1], vec![4, 3]]);
        assert_eq!(algebra_closure(&[IntMatrix::identity(2)]).unwrap().dimension(), 1);
        let cl = algebra_closure(core::slice::from_ref(&p2)).unwrap();
        assert_eq!(cl.dimension(), 2);
        assert_eq!(recover_matrix(&cl, 0).unwrap(), IntMatrix::identity(2));
        assert_eq!(recover_matrix(&cl, 1).unwrap(), p2);
    }

    #[test]
    fn counted_matrices_for_s5_on_two_subsets() {
        // S5 on the 10 two-subsets, H = Stab({0,1}): rank 3, lengths 1, 6, 3
        let pairs: Vec<(u32, u32)> = (0..5).flat_map(|a| (a + 1..5).map(move |b| (a, b))).collect();
        let idx = |a: u32, b: u32| pairs.iter().position(|&(x, y)| (x, y) == (a.min(b), a.max(b))).unwrap() as u32;
        let induce = |p: &Perm| Perm::from_images(pairs.iter().map(|&(a, b)| idx(p.image(a), p.image(b))).collect()).unwrap();
        let g5 = [Perm::from_cycles(5, &[&[0, 1]]).unwrap(), Perm::from_cycles(5, &[&[0, 1, 2, 3, 4]]).unwrap()];
        let h5 = vec![
            Perm::from_cycles(5, &[&[0, 1]]).unwrap(),
            Perm::from_cycles(5, &[&[2, 3]]).unwrap(),
            Perm::from_cycles(5, &[&[2, 3, 4]]).unwrap(),
        ];
        let g: Vec<Perm> = g5.iter().map(induce).collect();
        let h: Vec<Perm> = h5.iter().map(induce).collect();
        let ctx = ActionContext::new(g, h, 0u32, Some(h5), None, 10, 32).unwrap();
        let kw = vec![Word::gen(1)];
        let kq: Vec<Perm> = kw.iter().map(|w| evaluate_word(w, &ctx.h_gens).unwrap()).collect();
        let mut hp = Helper::new::<u32>(&ctx, kw, kq, IdentityQuotient, &[]).unwrap();
        let cfg = EnumConfig::default();
        let part = classify(&ctx, &mut hp, &cfg).unwrap();
        let (sctx, mats, sources) = all_intersection_matrices(&ctx, &mut hp, &part, &cfg, 1 << 20).unwrap();
        assert_eq!(sctx.lengths, vec![1, 3, 6]);
        assert_eq!(sources[1], Source::Counted);
        for j in 0..3 {
            let direct = count_intersection_matrix(&ctx, &mut hp, &part, &sctx, j, &cfg, 1 << 20).unwrap();
            assert_eq!(direct, mats[j]);
        }
        // O_1 is the self-paired orbit of disjoint pairs, so base·g_1⁻¹ lies in it
        assert_eq!(orbit_counting(&ctx, &mut hp, &part, 1, 0, 1, &cfg, 1 << 20).unwrap(), 1);
    }
}
