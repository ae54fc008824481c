use num_bigint::BigUint;
use permendo_core::modular::{self, SqrtConvention};
use permendo_core::oracle;
use permendo_core::orbenum::{classify, ActionContext, EnumConfig, Helper, IdentityQuotient};
use permendo_core::schur;
use permendo_core::splitchar;
use permendo_core::{GeneratedGroup, Perm, Word};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// `S_n` acting on `k`-subsets, with the stabilizer of the first subset.
fn on_subsets(n: u32, k: usize) -> (Vec<Perm>, Vec<Perm>, BigUint) {
    let mut sets: Vec<Vec<u32>> = vec![vec![]];
    for _ in 0..k {
        sets = sets.into_iter().flat_map(|s| (s.last().map_or(0, |&l| l + 1)..n).map(move |x| [s.clone(), vec![x]].concat())).collect();
    }
    let all: Vec<u32> = (0..n).collect();
    let base = [Perm::from_cycles(n as usize, &[&[0, 1]]).unwrap(), Perm::from_cycles(n as usize, &[&all]).unwrap()];
    let induced = |g: &Perm| {
        Perm::from_images(
            sets.iter()
                .map(|s| {
                    let mut t: Vec<u32> = s.iter().map(|&x| g.image(x)).collect();
                    t.sort_unstable();
                    sets.binary_search(&t).unwrap() as u32
                })
                .collect(),
        )
        .unwrap()
    };
    let g: Vec<Perm> = base.iter().map(induced).collect();
    let grp = GeneratedGroup::new(sets.len(), g.clone()).unwrap().build_chain();
    let stab = grp.stabilizer(0).unwrap();
    (g, stab.generators().to_vec(), stab.order().unwrap())
}

fn primes_up_to(n: u32) -> Vec<u64> {
    (2..=n as u64).filter(|&q| (2..q).all(|d| q % d != 0)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn pipeline_agrees_with_exhaustive_constructions(n in 4u32..9, k in 1usize..3, seed in any::<u64>()) {
        prop_assume!(2 * k <= n as usize);
        let (g, h, h_order) = on_subsets(n, k);
        let degree = g[0].degree();
        let ctx = ActionContext::new(g.clone(), h.clone(), 0u32, Some(h.clone()), Some(h_order.clone()), degree as u64, 32).unwrap();
        let kw = vec![Word::gen(0)];
        let kq = vec![h[0].clone()];
        let mut helper = Helper::new::<u32>(&ctx, kw, kq, IdentityQuotient, &[]).unwrap();
        let cfg = EnumConfig { seed, ..EnumConfig::default() };
        let part = classify(&ctx, &mut helper, &cfg).unwrap();

        let exhaustive = oracle::exhaustive_orbits(&g, &h, &0u32);
        let mut mine: Vec<u64> = part.records.iter().map(|r| r.length).collect();
        mine.sort_unstable();
        prop_assert_eq!(mine, exhaustive.lengths());
        for r in &part.records {
            prop_assert_eq!(BigUint::from(r.length) * &r.stab_order, h_order.clone());
        }

        let (sctx, mats, _) = schur::all_intersection_matrices(&ctx, &mut helper, &part, &cfg, 1 << 20).unwrap();
        for (j, m) in mats.iter().enumerate() {
            prop_assert!(schur::check_intersection_matrix(&sctx, j, m).is_ok());
        }

        let table = splitchar::character_table(&mats, &sctx.lengths).unwrap();
        let report = splitchar::verify_table(&table, &sctx.lengths, &sctx.pairing);
        prop_assert!(report.is_ok(), "{:?}", report);
        prop_assert_eq!(report.dimension_sum, degree as u128);

        // both Cartan routes must agree at every prime up to n
        for p in primes_up_to(n) {
            let conv = SqrtConvention::new(p).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ p);
            let regular = modular::cartan_from_regular(&mats, p, &mut rng).unwrap();
            let v = modular::permutation_verdict(&table, &conv, None, Some(regular));
            prop_assert!(v.is_ok(), "p = {}: {:?}", p, v.err());
        }
    }
}
