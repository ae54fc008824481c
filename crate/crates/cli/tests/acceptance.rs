//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness so the lines are always printed.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use permendo::corpus::{self, CorpusInstance};
use permendo::crosscheck::{self, PrimeStatus};
use permendo::fixtures;
use permendo::pipeline;
use permendo_core::candfilter::partition_search;
use permendo_core::gfmat::{self, FqMatrix, ModuleRep};
use permendo_core::oracle;
use permendo_core::orbenum::{self, EnumConfig, Membership};
use permendo_core::perm::GroupElem;
use permendo_core::{GeneratedGroup, Perm};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    passed: bool,
    lines: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Outcome { passed: true, lines: Vec::new() }
    }

    fn check(&mut self, ok: bool, line: String) {
        self.passed &= ok;
        self.lines.push(format!("{} {line}", if ok { "ok  " } else { "FAIL" }));
    }
}

fn j4_fixtures() -> Outcome {
    let mut out = Outcome::new();
    match fixtures::run_suite() {
        Ok(r) => {
            for c in r.checks {
                out.check(c.passed, format!("({}) {}: {}", c.id, c.name, c.detail));
            }
        }
        Err(e) => out.check(false, format!("fixtures failed to load: {e}")),
    }
    out
}

fn corpus_vs_oracle() -> Outcome {
    let mut out = Outcome::new();
    let all = match corpus::full(corpus::RANDOM_SEED) {
        Ok(c) => c,
        Err(e) => {
            out.check(false, format!("corpus: {e}"));
            return out;
        }
    };
    for r in crosscheck::check_corpus(&all, 1) {
        let primes: Vec<String> = r
            .primes
            .iter()
            .map(|p| match p.status {
                PrimeStatus::Match => format!("{}:{}", p.p, if p.local == Some(true) { "local" } else { "split" }),
                PrimeStatus::Skipped => format!("{}:skipped ({})", p.p, p.detail),
                PrimeStatus::Mismatch => format!("{}:MISMATCH ({})", p.p, p.detail),
            })
            .collect();
        out.check(r.passed, format!("{} degree {} rank {}: primes [{}] {}", r.name, r.degree, r.rank, primes.join(", "), r.errors.join("; ")));
    }
    out
}

/// `S_16` on 3-subsets: 560 points, rank 4.
fn orbit_instance() -> CorpusInstance {
    let n = 16u32;
    let mut sets = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                sets.push([a, b, c]);
            }
        }
    }
    let gens = [Perm::from_cycles(n as usize, &[&[0, 1]]).unwrap(), Perm::from_images((0..n).map(|x| (x + 1) % n).collect()).unwrap()];
    let g: Vec<Perm> = gens
        .iter()
        .map(|g| {
            let img = sets
                .iter()
                .map(|s| {
                    let mut t = s.map(|x| g.image(x));
                    t.sort_unstable();
                    sets.binary_search(&t).unwrap() as u32
                })
                .collect();
            Perm::from_images(img).unwrap()
        })
        .collect();
    CorpusInstance::new("S16 on 3-sets", "subsets", g, 0).unwrap()
}

fn orbit_engine() -> Outcome {
    let mut out = Outcome::new();
    let inst = orbit_instance();
    let b = oracle::commutant_basis(&inst.g, &inst.h, inst.base).unwrap();
    let mut partitions = Vec::new();
    let mut saving_ok = true;
    let mut stab_ok = true;
    for seed in [1u64, 2, 3, 17, 2026] {
        let cfg = EnumConfig { seed, ..EnumConfig::default() };
        let mut prep = pipeline::prepare_perm(inst.g.clone(), inst.h.clone(), inst.base, inst.h_order.clone(), 2, cfg).unwrap();
        let part = match pipeline::orbits(&mut prep) {
            Ok(p) => p,
            Err(e) => {
                out.check(false, format!("seed {seed}: {e}"));
                return out;
            }
        };
        let k = prep.helper.k_order().cloned().unwrap_or_default();
        for r in &part.records {
            stab_ok &= BigUint::from(r.length) * &r.stab_order == inst.h_order;
            let sf = r.saving_factor();
            saving_ok &= sf.numer().to_biguint().map(|n| n <= &k * sf.denom().to_biguint().unwrap()).unwrap_or(false);
        }
        // canonical partition: the oracle orbit of each representative, in record order
        partitions.push(part.records.iter().map(|r| (r.length, b.orbit_of[r.rep as usize])).collect::<Vec<_>>());
    }
    let same = partitions.windows(2).all(|w| w[0] == w[1]);
    let covers = partitions[0].len() == b.rank();
    out.check(same && covers, format!("5 seeds give the same canonical partition {:?}", partitions[0].iter().map(|x| x.0).collect::<Vec<_>>()));
    out.check(stab_ok, "n_j * |H_j| = |H| for every orbit and seed".into());
    out.check(saving_ok, "saving factor at most |K| for every orbit and seed".into());

    // with complete_up_to 0 every record beyond the trivial orbit stays partial
    let cfg = EnumConfig { complete_up_to: 0, seed: 5, ..EnumConfig::default() };
    let mut prep = pipeline::prepare_perm(inst.g.clone(), inst.h.clone(), inst.base, inst.h_order.clone(), 2, cfg.clone()).unwrap();
    let part = orbenum::classify(&prep.ctx, &mut prep.helper, &cfg).unwrap();
    let partial = part.records.iter().filter(|r| !r.complete).count();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let (mut false_pos, mut true_pos, mut members_probed) = (0u64, 0u64, 0u64);
    let probes = 100_000;
    for i in 0..probes {
        let rec = &part.records[rng.gen_range(0..part.records.len())];
        let own = b.orbit_of[rec.rep as usize];
        // every tenth probe is a genuine member, the rest come from other orbits
        let x = loop {
            let x = rng.gen_range(0..inst.degree as u32);
            if (b.orbit_of[x as usize] == own) == (i % 10 == 0) {
                break x;
            }
        };
        let is_member = b.orbit_of[x as usize] == own;
        members_probed += is_member as u64;
        match orbenum::membership(&prep.ctx, &mut prep.helper, rec, &x, 40, &mut rng) {
            Membership::Member if !is_member => false_pos += 1,
            Membership::Member => true_pos += 1,
            _ => {}
        }
    }
    out.check(
        false_pos == 0 && partial > 0,
        format!("{probes} probes against {partial} partial records: {false_pos} false positives, {true_pos}/{members_probed} genuine members confirmed"),
    );
    out
}

fn random_matrix<R: Rng>(p: u8, n: usize, rng: &mut R) -> FqMatrix {
    let e: Vec<i64> = (0..n * n).map(|_| rng.gen_range(0..p as i64)).collect();
    FqMatrix::from_i64(p, n, n, &e).unwrap()
}

fn random_invertible<R: Rng>(p: u8, n: usize, rng: &mut R) -> FqMatrix {
    loop {
        let m = random_matrix(p, n, rng);
        if m.rank() == n {
            return m;
        }
    }
}

fn conjugate(m: &ModuleRep, x: &FqMatrix) -> ModuleRep {
    let xi = x.inverse().unwrap();
    ModuleRep::new(m.p() as u64, m.dim(), m.actions().iter().map(|a| x.mul_mat(a).mul_mat(&xi)).collect()).unwrap()
}

/// Block upper-triangular module with random diagonal blocks, hidden by a change of basis.
fn layered_module<R: Rng>(p: u8, dims: &[usize], rng: &mut R) -> ModuleRep {
    let n: usize = dims.iter().sum();
    let mut actions = Vec::new();
    for _ in 0..2 {
        let mut m = FqMatrix::zero(p, n, n);
        let mut off = 0;
        for &d in dims {
            let blk = random_matrix(p, d, rng);
            for i in 0..d {
                for j in 0..d {
                    m.set(off + i, off + j, blk.get(i, j));
                }
                for j in off + d..n {
                    m.set(off + i, j, rng.gen_range(0..p));
                }
            }
            off += d;
        }
        actions.push(m);
    }
    let m = ModuleRep::new(p as u64, n, actions).unwrap();
    conjugate(&m, &random_invertible(p, n, rng))
}

fn random_irreducible<R: Rng>(p: u8, n: usize, rng: &mut R) -> ModuleRep {
    loop {
        let m = ModuleRep::new(p as u64, n, vec![random_matrix(p, n, rng), random_matrix(p, n, rng)]).unwrap();
        if gfmat::is_irreducible(&m, rng).map(|c| c.is_irreducible()).unwrap_or(false) {
            return m;
        }
    }
}

fn regular_module(p: u8, gens: &[Perm]) -> ModuleRep {
    let grp = GeneratedGroup::new(gens[0].degree(), gens.to_vec()).unwrap().build_chain();
    let mut elts = grp.elements().unwrap();
    elts.sort_by(|a, b| a.images().cmp(b.images()));
    let index = |x: &Perm| elts.binary_search_by(|e| e.images().cmp(x.images())).unwrap() as u32;
    let actions = gens.iter().map(|g| FqMatrix::permutation(p, &Perm::from_images(elts.iter().map(|x| index(&x.mul(g))).collect()).unwrap())).collect();
    ModuleRep::new(p as u64, elts.len(), actions).unwrap()
}

fn gfmat_checks() -> Outcome {
    let mut out = Outcome::new();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let primes = [2u8, 3, 5, 11];
    let mut accounted = 0;
    let mut certified = true;
    for i in 0..100 {
        let p = primes[i % 4];
        let total = rng.gen_range(1..=30);
        let mut dims = Vec::new();
        let mut left = total;
        while left > 0 {
            let d = rng.gen_range(1..=left.min(12));
            dims.push(d);
            left -= d;
        }
        let m = layered_module(p, &dims, &mut rng);
        let cs = gfmat::chop(&m, &mut rng).unwrap();
        let sum: usize = cs.iter().map(|c| c.dim() * c.multiplicity).sum();
        let count: usize = cs.iter().map(|c| c.multiplicity).sum();
        accounted += (sum == total && count >= dims.len()) as usize;
        certified &= cs.iter().all(|c| gfmat::is_irreducible(&c.rep, &mut rng).map(|r| r.is_irreducible()).unwrap_or(false));
    }
    out.check(accounted == 100 && certified, format!("chop accounts for the full dimension on {accounted}/100 random modules of dim <= 30, constituents irreducible: {certified}"));

    let (mut iso, mut noniso, mut noniso_total) = (0, 0, 0);
    for i in 0..50 {
        let p = primes[i % 4];
        let n = rng.gen_range(2..=12);
        let m = random_irreducible(p, n, &mut rng);
        let c = conjugate(&m, &random_invertible(p, n, &mut rng));
        iso += gfmat::isomorphic_indecomposables(&m, &c).unwrap() as usize;
        let other = random_irreducible(p, n, &mut rng);
        // differing characteristic polynomials certify non-isomorphism independently
        if m.actions()[0].char_poly() != other.actions()[0].char_poly() {
            noniso_total += 1;
            noniso += !gfmat::isomorphic_indecomposables(&m, &other).unwrap() as usize;
        }
    }
    out.check(iso == 50 && noniso == noniso_total, format!("{iso}/50 conjugated pairs recognized as isomorphic, {noniso}/{noniso_total} certified non-isomorphic pairs rejected"));

    let cyc = |n: usize, c: &[u32]| Perm::from_cycles(n, &[c]).unwrap();
    let s3 = vec![cyc(3, &[0, 1]), cyc(3, &[0, 1, 2])];
    let s4 = vec![cyc(4, &[0, 1]), cyc(4, &[0, 1, 2, 3])];
    let d8 = vec![cyc(4, &[0, 1, 2, 3]), cyc(4, &[1, 3])];
    let a4 = vec![cyc(4, &[0, 1, 2]), Perm::from_cycles(4, &[&[0, 1], &[2, 3]]).unwrap()];
    for (name, gens, p) in [("S3", &s3, 2u8), ("S3", &s3, 3), ("S4", &s4, 2), ("S4", &s4, 3), ("D8", &d8, 2), ("A4", &a4, 3)] {
        let reg = regular_module(p, gens);
        match gfmat::cartan_matrix(&reg, None, &mut rng) {
            Ok(c) => out.check(
                c.is_symmetric() && c.projective_dims_match(),
                format!("{name} over F_{p}: Cartan {:?}, projective dims {:?}", c.matrix, c.projective_dims),
            ),
            Err(e) => out.check(false, format!("{name} over F_{p}: {e}")),
        }
    }
    out
}

fn full_scale_surrogates() -> Outcome {
    let mut out = Outcome::new();
    out.lines.push("     the full J4 orbit enumeration (8474719242 points of 112 bits) is not reproducible here; surrogates:".into());
    let bytes = orbenum::memory_estimate(112, fixtures::J4_INDEX);
    out.check((150_000_000_000..155_000_000_000).contains(&bytes), format!("memory estimate {bytes} bytes (about {} GB)", bytes / 1_000_000_000));
    // every index of a subgroup divides |H|, so the divisors form a superset of the true list
    let h_order = fixtures::J4::load().unwrap().orbits.group_order_h;
    let allowed: Vec<u64> = (1..=27_001).filter(|d| h_order.is_multiple_of(*d)).collect();
    let found = partition_search(27_001, &allowed, 3);
    let want = [vec![31, 930, 26040], vec![465, 496, 26040], vec![31, 7440, 19530]];
    let contained = want.iter().all(|w| found.contains(w));
    out.check(contained, format!("3-term index sums to 27001 over {} divisors of |H|: {} solutions, the three expected among them: {contained}", allowed.len(), found.len()));
    out
}

type Criterion = (&'static str, Duration, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 5] = [
        ("J4 table identities", Duration::from_secs(10), j4_fixtures),
        ("corpus pipeline agrees with the oracle", Duration::from_secs(300), corpus_vs_oracle),
        ("orbit engine", Duration::from_secs(120), orbit_engine),
        ("finite-field module routines", Duration::from_secs(120), gfmat_checks),
        ("full-scale J4 run (surrogate checks)", Duration::from_secs(60), full_scale_surrogates),
    ];
    let mut all = true;
    for (i, (name, limit, f)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let o = f();
        let t = start.elapsed();
        let ok = o.passed && t <= limit;
        all &= ok;
        let status = match (ok, i) {
            (true, 4) => "PASS (not reproducible at full scale)",
            (true, _) => "PASS",
            (false, _) => "FAIL",
        };
        println!("criterion {}: {status}: {name} in {:.2}s (limit {}s)", i + 1, t.as_secs_f64(), limit.as_secs());
        for l in o.lines {
            println!("    {l}");
        }
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
