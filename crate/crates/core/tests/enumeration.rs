use std::collections::HashSet;

use revbench_core::preorder::PreorderIter;
use revbench_core::{enumerate_preorders, sample_preorder, Language, TotalPreorder};

/// Ordered set partitions of an n-set: a(n) = sum_k C(n, k) a(n - k).
fn fubini(n: usize) -> u64 {
    let mut binom = vec![vec![0u64; n + 1]; n + 1];
    for i in 0..=n {
        binom[i][0] = 1;
        for j in 1..=i {
            binom[i][j] = binom[i - 1][j - 1] + binom[i - 1][j];
        }
    }
    let mut a = vec![0u64; n + 1];
    a[0] = 1;
    for m in 1..=n {
        a[m] = (1..=m).map(|k| binom[m][k] * a[m - k]).sum();
    }
    a[n]
}

/// Every map V -> {0..|V|-1} whose image is an initial segment.
fn brute_force_rank_maps(size: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let total = (size as u64).pow(size as u32);
    for code in 0..total {
        let mut c = code;
        let ranks: Vec<u32> = (0..size)
            .map(|_| {
                let r = (c % size as u64) as u32;
                c /= size as u64;
                r
            })
            .collect();
        let top = *ranks.iter().max().unwrap();
        if (0..=top).all(|k| ranks.contains(&k)) {
            out.push(ranks);
        }
    }
    out
}

#[test]
fn counts_match_independent_oracles() {
    assert_eq!(brute_force_rank_maps(2).len(), 3);
    assert_eq!(brute_force_rank_maps(4).len(), 75);
    assert_eq!((fubini(2), fubini(4), fubini(8)), (3, 75, 545_835));

    for atoms in 1..=2 {
        let lang = Language::with_default_atoms(atoms).unwrap();
        assert_eq!(
            enumerate_preorders(&lang).count() as u64,
            fubini(1 << atoms)
        );
    }
    assert_eq!(PreorderIter::new(3).count_remaining(), 545_835);
}

#[test]
fn enumeration_is_exactly_the_brute_force_set() {
    for atoms in 1..=2 {
        let lang = Language::with_default_atoms(atoms).unwrap();
        let listed: Vec<Vec<u32>> = enumerate_preorders(&lang)
            .map(|s| s.ranks().to_vec())
            .collect();
        let unique: HashSet<_> = listed.iter().cloned().collect();
        assert_eq!(unique.len(), listed.len(), "duplicates at {atoms} atoms");
        let expected: HashSet<_> = brute_force_rank_maps(1 << atoms).into_iter().collect();
        assert_eq!(unique, expected);
    }
}

#[test]
fn enumeration_order_is_stable() {
    let lang = Language::with_default_atoms(1).unwrap();
    let shown: Vec<String> = enumerate_preorders(&lang).map(|s| s.to_string()).collect();
    assert_eq!(shown, ["{0} {1}", "{1} {0}", "{1 0}"]);

    let lang = Language::with_default_atoms(2).unwrap();
    let a: Vec<TotalPreorder> = enumerate_preorders(&lang).collect();
    let b: Vec<TotalPreorder> = enumerate_preorders(&lang).collect();
    assert_eq!(a, b);
}

#[test]
fn three_atom_states_are_well_formed() {
    let mut seen = 0u64;
    for s in PreorderIter::new(3).step_by(997) {
        let levels = s.levels();
        assert!(levels.iter().all(|l| !l.is_empty()));
        assert_eq!(levels.iter().map(|l| l.len()).sum::<usize>(), 8);
        seen += 1;
    }
    assert!(seen > 500);
}

#[test]
fn sampling_is_seeded_and_valid() {
    let lang = Language::with_default_atoms(3).unwrap();
    let mut distinct = HashSet::new();
    for seed in 0..200 {
        let s = sample_preorder(&lang, seed);
        assert_eq!(s, sample_preorder(&lang, seed));
        let ranks = s.ranks();
        let top = *ranks.iter().max().unwrap();
        assert!((0..=top).all(|k| ranks.contains(&k)));
        distinct.insert(ranks.to_vec());
    }
    assert!(distinct.len() > 150);
}
