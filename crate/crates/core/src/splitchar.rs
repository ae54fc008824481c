//! Splitting the endomorphism algebra over ℚ and quadratic fields: homogeneous
//! components, the character table of `E` and Fitting-correspondent degrees.
//!
//! Intersection matrices act on row vectors by right multiplication, so the
//! coordinates of `x·A_j` are `x·P_j`.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::qmat::{IntMatrix, MatrixError, QMatrix, RowSpace};
use crate::quadratic::{square_split, QuadError, QuadraticNumber, Rational};
use crate::zpoly::{factor_over_z, FactoredPoly, PolynomialZ, ZPolyError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SplitError {
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Poly(#[from] ZPolyError),
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error("unsupported component: dimension {dim}, central factor {factor}")]
    UnsupportedShape { dim: usize, factor: String },
    #[error("component dimensions sum to {got}, expected {expected}")]
    DimensionMismatch { got: usize, expected: usize },
    #[error("no generic central element found after {0} attempts")]
    NoGenericElement(usize),
    #[error("value at A_{index} is not integral after dividing the trace by {divisor}")]
    NonIntegralTrace { index: usize, divisor: usize },
    #[error("fitting degree is not a positive integer: {0}")]
    BadFittingDegree(String),
    #[error("expected {expected} intersection matrices of size {expected}")]
    BadInput { expected: usize },
}

/// Characteristic polynomial of an integer matrix.
pub fn char_poly(m: &IntMatrix) -> PolynomialZ {
    m.char_poly()
}

/// A homogeneous component of `E_ℚ` (a simple two-sided ideal).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomogeneousComponent {
    /// Factorization of each labelling generator's characteristic polynomial restricted to the component.
    pub labels: Vec<FactoredPoly>,
    /// Minimal polynomial of the generic central element on this component.
    pub central_factor: PolynomialZ,
    /// The generic central element acting on the block.
    pub central: QMatrix,
    pub basis: RowSpace,
    pub dim: usize,
    /// Squarefree `n` of the splitting field `ℚ(√n)`, 0 when rational.
    pub field: i64,
    pub mult: usize,
}

/// A choice of factor and exponent for each generator.
pub type FactorChoice = Vec<(PolynomialZ, usize)>;

/// Simultaneous generalized kernels `∩_g ker f_g^{m_g}(P_g)` over all factor choices.
///
/// Returns `(factor choices, subspace)` for every nonzero intersection.
pub fn simultaneous_eigenspaces(gens: &[IntMatrix]) -> Result<Vec<(FactorChoice, RowSpace)>, SplitError> {
    let Some(first) = gens.first() else {
        return Ok(Vec::new());
    };
    let r = first.nrows();
    let mut acc: Vec<(Vec<(PolynomialZ, usize)>, RowSpace)> = vec![(Vec::new(), full_space(r))];
    for g in gens {
        let fac = factor_over_z(&g.char_poly())?;
        let kernels: Vec<((PolynomialZ, usize), RowSpace)> = fac
            .factors
            .iter()
            .map(|(f, e)| {
                let k = g.eval_poly(&f.pow(*e)).to_rational().left_kernel();
                ((f.clone(), *e), RowSpace::from_vectors(r, k).to_rref())
            })
            .collect();
        let mut next = Vec::new();
        for (label, space) in &acc {
            for (fe, k) in &kernels {
                let meet = space.intersect(k);
                if meet.dim() > 0 {
                    let mut l = label.clone();
                    l.push(fe.clone());
                    next.push((l, meet));
                }
            }
        }
        acc = next;
    }
    Ok(acc)
}

fn full_space(r: usize) -> RowSpace {
    let mut s = RowSpace::new(r);
    for i in 0..r {
        let mut v = vec![Rational::zero(); r];
        v[i] = Rational::one();
        s.insert(v);
    }
    s
}

/// Left multiplication matrices: `L_j[i][k] = p_jik`, the coordinates of `A_j·A_i`.
fn left_matrices(mats: &[IntMatrix]) -> Vec<IntMatrix> {
    let r = mats.len();
    (0..r)
        .map(|j| {
            let mut l = IntMatrix::zeros(r, r);
            for (i, pi) in mats.iter().enumerate() {
                for k in 0..r {
                    l.set(i, k, pi.get(j, k).clone());
                }
            }
            l
        })
        .collect()
}

/// Coordinates of the centre of `E` in the Schur basis.
pub fn center_basis(mats: &[IntMatrix]) -> Result<Vec<Vec<Rational>>, SplitError> {
    let r = check_shape(mats)?;
    let lefts = left_matrices(mats);
    let mut big = QMatrix::zeros(r, r * r);
    for (j, (p, l)) in mats.iter().zip(&lefts).enumerate() {
        for i in 0..r {
            for k in 0..r {
                big.set(i, j * r + k, Rational::from_integer(p.get(i, k) - l.get(i, k)));
            }
        }
    }
    Ok(big.left_kernel())
}

fn check_shape(mats: &[IntMatrix]) -> Result<usize, SplitError> {
    let r = mats.len();
    if mats.iter().any(|m| m.nrows() != r || m.ncols() != r) {
        return Err(SplitError::BadInput { expected: r });
    }
    Ok(r)
}

fn integral_combination(coeffs: &[Vec<Rational>], weights: &[i64]) -> Vec<BigInt> {
    let r = coeffs.first().map(|v| v.len()).unwrap_or(0);
    let mut v = vec![Rational::zero(); r];
    for (c, &w) in coeffs.iter().zip(weights) {
        let w = Rational::from_integer(w.into());
        for (x, y) in v.iter_mut().zip(c) {
            *x += &w * y;
        }
    }
    let den = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    v.iter().map(|x| (x * Rational::from_integer(den.clone())).to_integer()).collect()
}

fn combine(mats: &[IntMatrix], coeffs: &[BigInt]) -> IntMatrix {
    let r = mats.len();
    let mut out = IntMatrix::zeros(r, r);
    for (m, c) in mats.iter().zip(coeffs) {
        if !c.is_zero() {
            out = out.add(&m.scale(c)).expect("square");
        }
    }
    out
}

const CENTRAL_ATTEMPTS: usize = 64;

/// Homogeneous components of `E_ℚ` from all intersection matrices.
///
/// The blocks are the kernels of the irreducible factors of a generic central
/// element; each block is labelled by the factored characteristic polynomials
/// of `label_gens` (indices into `mats`) restricted to it.
pub fn homogeneous_components(mats: &[IntMatrix], label_gens: &[usize]) -> Result<Vec<HomogeneousComponent>, SplitError> {
    let r = check_shape(mats)?;
    let center = center_basis(mats)?;
    let zdim = center.len();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for attempt in 0..CENTRAL_ATTEMPTS {
        let bound = 3 + attempt as i64 * 4;
        let weights: Vec<i64> = (0..zdim).map(|_| rng.gen_range(-bound..=bound)).collect();
        let z = integral_combination(&center, &weights);
        let pz = combine(mats, &z);
        let fac = factor_over_z(&pz.char_poly())?;
        let total: usize = fac.factors.iter().map(|(f, _)| f.degree().unwrap_or(0)).sum();
        if total != zdim {
            continue;
        }
        let pzq = pz.to_rational();
        let mut comps = Vec::with_capacity(fac.factors.len());
        let mut dsum = 0;
        for (f, _) in &fac.factors {
            let space = RowSpace::from_vectors(r, pzq.eval_poly(f).left_kernel()).to_rref();
            dsum += space.dim();
            comps.push(build_component(mats, label_gens, f, space, &pzq)?);
        }
        if dsum != r {
            return Err(SplitError::DimensionMismatch { got: dsum, expected: r });
        }
        comps.sort_by(compare_components);
        return Ok(comps);
    }
    Err(SplitError::NoGenericElement(CENTRAL_ATTEMPTS))
}

fn compare_components(a: &HomogeneousComponent, b: &HomogeneousComponent) -> Ordering {
    let key = |c: &HomogeneousComponent| (c.dim, c.central_factor.degree(), c.central_factor.leading_first());
    key(a).cmp(&key(b))
}

fn build_component(mats: &[IntMatrix], label_gens: &[usize], f: &PolynomialZ, basis: RowSpace, pz: &QMatrix) -> Result<HomogeneousComponent, SplitError> {
    let dim = basis.dim();
    let k = f.degree().unwrap_or(0);
    let unsupported = || SplitError::UnsupportedShape { dim, factor: alloc::format!("{f}") };
    if k == 0 || k > 2 || !dim.is_multiple_of(k) {
        return Err(unsupported());
    }
    let msq = dim / k;
    let mult = msq.sqrt();
    if mult * mult != msq {
        return Err(unsupported());
    }
    let field = if k == 1 {
        0
    } else {
        let c = f.coeffs();
        let disc = &c[1] * &c[1] - BigInt::from(4) * &c[0] * &c[2];
        square_split(&disc).ok_or_else(unsupported)?.1
    };
    let mut labels = Vec::with_capacity(label_gens.len());
    for &g in label_gens {
        let restricted = basis.restrict(&mats[g].to_rational())?;
        labels.push(factor_over_z(&rational_char_poly(&restricted)?)?);
    }
    let central = basis.restrict(pz)?;
    Ok(HomogeneousComponent { labels, central_factor: f.clone(), central, basis, dim, field, mult })
}

/// Characteristic polynomial of a rational matrix whose entries are integers.
fn rational_char_poly(m: &QMatrix) -> Result<PolynomialZ, SplitError> {
    if m.to_rows().iter().flatten().any(|x| !x.is_integer()) {
        return Err(SplitError::Matrix(MatrixError::Shape("restricted matrix is not integral")));
    }
    Ok(m.map(|x| x.to_integer()).char_poly())
}

/// One row of the character table of `E`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CharRow {
    pub values: Vec<QuadraticNumber>,
    pub mult: usize,
    pub degree: Option<u64>,
    /// Index (0-based) of the Galois-conjugate row.
    pub conjugate_of: Option<usize>,
    pub fitting: Option<String>,
}

impl CharRow {
    /// Square root of the field of values (1 when rational).
    pub fn field(&self) -> i64 {
        self.values.iter().find(|v| !v.is_rational()).map(|v| v.n()).unwrap_or(1)
    }

    pub fn is_rational(&self) -> bool {
        self.values.iter().all(|v| v.is_rational())
    }

    /// Labels like `38/39` mark an unresolved Fitting correspondent.
    pub fn fitting_is_ambiguous(&self) -> bool {
        self.fitting.as_deref().map(|s| s.contains('/')).unwrap_or(false)
    }

    pub fn conj(&self) -> Vec<QuadraticNumber> {
        self.values.iter().map(|v| v.conj()).collect()
    }
}

/// Character table of `E_ℂ` with Schur-basis columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EndoCharTable {
    pub rows: Vec<CharRow>,
}

/// Character rows of one homogeneous component.
pub fn split_component(c: &HomogeneousComponent, mats: &[IntMatrix]) -> Result<Vec<CharRow>, SplitError> {
    let m = c.mult;
    let qmats: Vec<QMatrix> = mats.iter().map(|p| p.to_rational()).collect();
    if c.field == 0 {
        let values = qmats
            .iter()
            .enumerate()
            .map(|(j, p)| {
                let t = restricted_trace(&c.basis, p);
                let v = t / Rational::from_integer(m.into());
                if !v.is_integer() {
                    return Err(SplitError::NonIntegralTrace { index: j + 1, divisor: m });
                }
                Ok(QuadraticNumber::rational(v))
            })
            .collect::<Result<Vec<_>, _>>()?;
        return Ok(vec![CharRow { values, mult: m, degree: None, conjugate_of: None, fitting: None }]);
    }
    // σ = (2·R_z + b)/t acts as √n, where the central factor is X² + bX + c with b² − 4c = t²n
    let f = &c.central_factor;
    let co = f.coeffs();
    let disc = &co[1] * &co[1] - BigInt::from(4) * &co[0] * &co[2];
    let (t, n) = square_split(&disc).ok_or(SplitError::UnsupportedShape { dim: c.dim, factor: alloc::format!("{f}") })?;
    let d = c.dim;
    let mut sigma = c.central.scale(&Rational::from_integer(BigInt::from(2)));
    for i in 0..d {
        let v = sigma.get(i, i) + Rational::from_integer(co[1].clone());
        sigma.set(i, i, v);
    }
    let sigma = sigma.scale(&Rational::new(BigInt::one(), t));
    let two_m = Rational::from_integer(BigInt::from(2 * m));
    let two_mn = &two_m * Rational::from_integer(BigInt::from(n));
    let mut plus = Vec::with_capacity(mats.len());
    for (j, p) in qmats.iter().enumerate() {
        let rj = c.basis.restrict(p)?;
        let alpha = rj.trace() / &two_m;
        let beta = trace_of_product(&rj, &sigma) / &two_mn;
        let v = QuadraticNumber::new(alpha, beta, n)?;
        if !v.is_algebraic_integer() {
            return Err(SplitError::NonIntegralTrace { index: j + 1, divisor: 2 * m });
        }
        plus.push(v);
    }
    let minus: Vec<QuadraticNumber> = plus.iter().map(|v| v.conj()).collect();
    let (first, second) = if leading_beta_positive(&plus) { (plus, minus) } else { (minus, plus) };
    Ok(vec![
        CharRow { values: first, mult: m, degree: None, conjugate_of: None, fitting: None },
        CharRow { values: second, mult: m, degree: None, conjugate_of: None, fitting: None },
    ])
}

fn leading_beta_positive(values: &[QuadraticNumber]) -> bool {
    values.iter().find(|v| !v.b().is_zero()).map(|v| v.b().is_positive()).unwrap_or(true)
}

fn restricted_trace(basis: &RowSpace, p: &QMatrix) -> Rational {
    basis
        .rows()
        .iter()
        .zip(basis.pivots())
        .map(|(b, &piv)| {
            let img = p.apply(b);
            img[piv].clone()
        })
        .fold(Rational::zero(), |a, x| a + x)
}

fn trace_of_product(a: &QMatrix, b: &QMatrix) -> Rational {
    let d = a.nrows();
    let mut t = Rational::zero();
    for i in 0..d {
        for k in 0..d {
            let x = a.get(i, k);
            if !x.is_zero() {
                t += x * b.get(k, i);
            }
        }
    }
    t
}

/// `χ_φ(1) = m·n / Σ_j |φ(A_j)|²/n_j`.
pub fn fitting_degree(row: &CharRow, lengths: &[u64], n: u64) -> Result<u64, SplitError> {
    let s = self_inner(&row.values, lengths)?;
    let q = s.as_rational().cloned().ok_or_else(|| SplitError::BadFittingDegree(alloc::format!("{s}")))?;
    if !q.is_positive() {
        return Err(SplitError::BadFittingDegree(alloc::format!("{q}")));
    }
    let deg = Rational::from_integer(BigInt::from(row.mult) * BigInt::from(n)) / q;
    if !deg.is_integer() {
        return Err(SplitError::BadFittingDegree(alloc::format!("{deg}")));
    }
    deg.to_integer().to_u64().filter(|&d| d > 0).ok_or_else(|| SplitError::BadFittingDegree(alloc::format!("{deg}")))
}

fn self_inner(values: &[QuadraticNumber], lengths: &[u64]) -> Result<QuadraticNumber, SplitError> {
    let mut s = QuadraticNumber::zero();
    for (v, &nj) in values.iter().zip(lengths) {
        let t = v.abs_sq().scale(&Rational::new(BigInt::one(), BigInt::from(nj)));
        s = s.add(&t)?;
    }
    Ok(s)
}

/// `Σ_j conj(φ(A_j))·φ'(A_j)/n_j`, or `None` if the rows live in different
/// quadratic fields and the sum is nonzero.
pub fn inner_product(phi: &[QuadraticNumber], psi: &[QuadraticNumber], lengths: &[u64]) -> Option<QuadraticNumber> {
    let fa = phi.iter().find(|v| !v.is_rational()).map(|v| v.n());
    let fb = psi.iter().find(|v| !v.is_rational()).map(|v| v.n());
    let same = match (fa, fb) {
        (Some(a), Some(b)) => a == b,
        _ => true,
    };
    if same {
        let mut s = QuadraticNumber::zero();
        for ((x, y), &nj) in phi.iter().zip(psi).zip(lengths) {
            let t = x.complex_conj().mul(y).ok()?.scale(&Rational::new(BigInt::one(), BigInt::from(nj)));
            s = s.add(&t).ok()?;
        }
        return Some(s);
    }
    // basis 1, √n, √n', √(nn') is ℚ-independent; every coordinate must vanish
    let mut sums = [Rational::zero(), Rational::zero(), Rational::zero(), Rational::zero()];
    for ((x, y), &nj) in phi.iter().zip(psi).zip(lengths) {
        let x = x.complex_conj();
        let w = Rational::new(BigInt::one(), BigInt::from(nj));
        let (a, b) = (x.a(), x.b());
        let (c, d) = (y.a(), y.b());
        sums[0] += a * c * &w;
        sums[1] += b * c * &w;
        sums[2] += a * d * &w;
        sums[3] += b * d * &w;
    }
    sums.iter().all(|s| s.is_zero()).then(QuadraticNumber::zero)
}

/// Outcome of [`verify_table`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TableReport {
    /// Pairs of rows (0-based) violating orthogonality or the norm relation.
    pub orthogonality: Vec<(usize, usize)>,
    /// Rows violating `φ(A_{j*}) = conj φ(A_j)`.
    pub pairing: Vec<usize>,
    /// Rows whose recorded Galois partner does not match.
    pub galois: Vec<usize>,
    /// Rows other than the first with only nonnegative rational values.
    pub nonnegative: Vec<usize>,
    /// Rows whose stored degree disagrees with the orthogonality relation.
    pub degrees: Vec<usize>,
    /// `Σ m·χ(1)` over rows with known degree.
    pub dimension_sum: u128,
    pub expected_dimension: u64,
}

impl TableReport {
    pub fn is_ok(&self) -> bool {
        self.orthogonality.is_empty()
            && self.pairing.is_empty()
            && self.galois.is_empty()
            && self.nonnegative.is_empty()
            && self.degrees.is_empty()
            && self.dimension_sum == self.expected_dimension as u128
    }
}

/// Checks orthogonality, conjugate pairing, Galois partners, uniqueness of
/// the nonnegative row and the dimension count `Σ m·χ(1) = n`.
///
/// `pairing` is 0-based (`pairing[j] = j*`).
pub fn verify_table(table: &EndoCharTable, lengths: &[u64], pairing: &[usize]) -> TableReport {
    let n: u64 = lengths.iter().sum();
    let mut rep = TableReport { expected_dimension: n, ..TableReport::default() };
    let rows = &table.rows;
    let nq = Rational::from_integer(BigInt::from(n));
    for (a, ra) in rows.iter().enumerate() {
        for (b, rb) in rows.iter().enumerate().skip(a) {
            let ip = inner_product(&ra.values, &rb.values, lengths);
            let ok = match (&ip, a == b) {
                (None, _) => false,
                (Some(v), false) => v.is_zero(),
                (Some(v), true) => match (v.as_rational(), ra.degree) {
                    (Some(q), Some(d)) => {
                        q / &nq == Rational::new(BigInt::from(ra.mult), BigInt::from(d))
                    }
                    (Some(q), None) => q.is_positive(),
                    (None, _) => false,
                },
            };
            if !ok {
                rep.orthogonality.push((a, b));
            }
        }
        let paired = pairing.iter().enumerate().all(|(j, &js)| ra.values.get(js).map(|v| *v == ra.values[j].complex_conj()).unwrap_or(false));
        if !paired {
            rep.pairing.push(a);
        }
        if let Some(c) = ra.conjugate_of {
            let ok = rows.get(c).map(|rc| rc.values == ra.conj() && rc.conjugate_of == Some(a)).unwrap_or(false);
            if !ok {
                rep.galois.push(a);
            }
        } else if !ra.is_rational() && !rows.iter().any(|rc| rc.values == ra.conj()) {
            rep.galois.push(a);
        }
        if a > 0 && ra.values.iter().all(|v| v.is_rational() && !v.a().is_negative()) {
            rep.nonnegative.push(a);
        }
        match (ra.degree, fitting_degree(ra, lengths, n)) {
            (Some(d), Ok(e)) if d == e => {}
            (None, Ok(_)) => {}
            _ => rep.degrees.push(a),
        }
        let d = ra.degree.or_else(|| fitting_degree(ra, lengths, n).ok()).unwrap_or(0);
        rep.dimension_sum += ra.mult as u128 * d as u128;
    }
    rep
}

fn compare_values(a: &[QuadraticNumber], b: &[QuadraticNumber]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        let kx = (x.a().clone(), x.b().clone());
        let ky = (y.a().clone(), y.b().clone());
        match kx.cmp(&ky) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    Ordering::Equal
}

impl EndoCharTable {
    /// Splits every component and computes degrees; rows in canonical order.
    pub fn from_components(comps: &[HomogeneousComponent], mats: &[IntMatrix], lengths: &[u64]) -> Result<Self, SplitError> {
        let n: u64 = lengths.iter().sum();
        let mut rows = Vec::new();
        for c in comps {
            for mut row in split_component(c, mats)? {
                row.degree = Some(fitting_degree(&row, lengths, n)?);
                rows.push(row);
            }
        }
        let mut t = EndoCharTable { rows };
        t.canonicalize(lengths);
        Ok(t)
    }

    /// Trivial row first, then rational rows, then quadratic pairs (positive
    /// `b` first) ordered by field, multiplicity, degree and values.
    pub fn canonicalize(&mut self, lengths: &[u64]) {
        let trivial: Vec<QuadraticNumber> = lengths.iter().map(|&l| QuadraticNumber::rational(Rational::from_integer(l.into()))).collect();
        let key_class = |r: &CharRow| -> (u8, i64) {
            if r.values == trivial {
                (0, 0)
            } else if r.is_rational() {
                (1, 0)
            } else {
                (2, r.field())
            }
        };
        let mut rows = core::mem::take(&mut self.rows);
        // order pairs by their positive representative
        rows.sort_by(|a, b| {
            let rep = |r: &CharRow| if leading_beta_positive(&r.values) { r.values.clone() } else { r.conj() };
            key_class(a)
                .cmp(&key_class(b))
                .then(a.mult.cmp(&b.mult))
                .then(a.degree.cmp(&b.degree))
                .then_with(|| compare_values(&rep(a), &rep(b)))
                .then_with(|| leading_beta_positive(&b.values).cmp(&leading_beta_positive(&a.values)))
        });
        for i in 0..rows.len() {
            rows[i].conjugate_of = None;
        }
        for i in 0..rows.len() {
            if rows[i].is_rational() {
                continue;
            }
            let c = rows[i].conj();
            if let Some(k) = rows.iter().position(|r| r.values == c) {
                rows[i].conjugate_of = Some(k);
            }
        }
        self.rows = rows;
    }

    /// Multiplicity-weighted degree sum.
    pub fn dimension(&self) -> u128 {
        self.rows.iter().map(|r| r.mult as u128 * r.degree.unwrap_or(0) as u128).sum()
    }
}

/// Full table from all intersection matrices.
pub fn character_table(mats: &[IntMatrix], lengths: &[u64]) -> Result<EndoCharTable, SplitError> {
    let comps = homogeneous_components(mats, &[])?;
    EndoCharTable::from_components(&comps, mats, lengths)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn im(rows: &[Vec<i64>]) -> IntMatrix {
        IntMatrix::from_i64(rows).unwrap()
    }

    /// Intersection matrices of the 5-cycle graph scheme (C5 acting on itself
    /// with dihedral pairing merged): orbitals {0}, {±1}, {±2}.
    fn pentagon() -> (Vec<IntMatrix>, Vec<u64>) {
        let p1 = IntMatrix::identity(3);
        let p2 = im(&[vec![0, 1, 0], vec![2, 0, 1], vec![0, 1, 1]]);
        let p3 = im(&[vec![0, 0, 1], vec![0, 1, 1], vec![2, 1, 0]]);
        (vec![p1, p2, p3], vec![1, 2, 2])
    }

    /// Regular action of C3: E is the group algebra ℚC3 with an imaginary pair.
    fn cyclic3() -> (Vec<IntMatrix>, Vec<u64>) {
        let p1 = IntMatrix::identity(3);
        let p2 = im(&[vec![0, 1, 0], vec![0, 0, 1], vec![1, 0, 0]]);
        let p3 = im(&[vec![0, 0, 1], vec![1, 0, 0], vec![0, 1, 0]]);
        (vec![p1, p2, p3], vec![1, 1, 1])
    }

    #[test]
    fn rank_two_scheme() {
        let mats = vec![IntMatrix::identity(2), im(&[vec![0, 1], vec![4, 3]])];
        let comps = homogeneous_components(&mats, &[1]).unwrap();
        assert_eq!(comps.len(), 2);
        assert!(comps.iter().all(|c| c.dim == 1 && c.field == 0));
        let t = character_table(&mats, &[1, 4]).unwrap();
        assert_eq!(t.rows.len(), 2);
        assert_eq!(t.rows[0].values, vec![QuadraticNumber::from_int(1), QuadraticNumber::from_int(4)]);
        assert_eq!(t.rows[0].degree, Some(1));
        assert_eq!(t.rows[1].values, vec![QuadraticNumber::from_int(1), QuadraticNumber::from_int(-1)]);
        assert_eq!(t.rows[1].degree, Some(4));
        assert!(verify_table(&t, &[1, 4], &[0, 1]).is_ok());
    }

    #[test]
    fn pentagon_splits_over_root_five() {
        let (mats, lengths) = pentagon();
        let t = character_table(&mats, &lengths).unwrap();
        assert_eq!(t.rows.len(), 3);
        let r5 = QuadraticNumber::sqrt(5).unwrap();
        let half = Rational::new(1.into(), 2.into());
        // 2cos(2π/5) = (−1+√5)/2
        let c1 = QuadraticNumber::from_int(-1).add(&r5).unwrap().scale(&half);
        let c2 = QuadraticNumber::from_int(-1).sub(&r5).unwrap().scale(&half);
        assert_eq!(t.rows[1].values, vec![QuadraticNumber::one(), c1.clone(), c2.clone()]);
        assert_eq!(t.rows[2].values, vec![QuadraticNumber::one(), c2, c1]);
        assert_eq!(t.rows[1].degree, Some(2));
        assert_eq!(t.rows[1].conjugate_of, Some(2));
        assert!(verify_table(&t, &lengths, &[0, 1, 2]).is_ok());
    }

    #[test]
    fn imaginary_pair_for_regular_c3() {
        let (mats, lengths) = cyclic3();
        let t = character_table(&mats, &lengths).unwrap();
        assert_eq!(t.rows.len(), 3);
        assert_eq!(t.rows[1].field(), -3);
        assert!(verify_table(&t, &lengths, &[0, 2, 1]).is_ok());
        assert!(!verify_table(&t, &lengths, &[0, 1, 2]).is_ok());
    }

    #[test]
    fn perturbation_breaks_orthogonality() {
        let (mats, lengths) = pentagon();
        let mut t = character_table(&mats, &lengths).unwrap();
        t.rows[0].values[1] = QuadraticNumber::from_int(3);
        assert!(!verify_table(&t, &lengths, &[0, 1, 2]).orthogonality.is_empty());
    }

    #[test]
    fn simultaneous_kernels_of_commuting_generators() {
        let (mats, _) = pentagon();
        let sp = simultaneous_eigenspaces(&mats[1..2]).unwrap();
        let dims: Vec<usize> = sp.iter().map(|(_, s)| s.dim()).collect();
        assert_eq!(dims.iter().sum::<usize>(), 3);
        assert_eq!(sp.len(), 2);
    }

    #[test]
    fn fitting_degree_of_trivial_row() {
        let row = CharRow { values: vec![QuadraticNumber::from_int(1), QuadraticNumber::from_int(4)], mult: 1, degree: None, conjugate_of: None, fitting: None };
        assert_eq!(fitting_degree(&row, &[1, 4], 5).unwrap(), 1);
        assert!(row.fitting.is_none());
    }
}
