use kcalc_core::abelian::{instantiate, normalize, ConcreteGroup, GroupExpr};
use kcalc_core::upsilon::{product, quotient, tensor, unitize, UpsilonDesc, UpsilonError};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn group_expr() -> impl Strategy<Value = GroupExpr> {
    (0u64..50, 0u64..50, 0u64..50, 0u64..50).prop_map(|(a, b, c, d)| GroupExpr::new(a, b, c, d))
}

fn small_group() -> impl Strategy<Value = ConcreteGroup> {
    (0u64..3, prop::collection::vec(2u64..13, 0..3)).prop_map(|(r, t)| ConcreteGroup::new(r, &t).unwrap())
}

/// Multiset of prime-power cyclic factors; two finite abelian groups are
/// isomorphic iff these agree.
fn elementary_divisors(torsion: &[u64]) -> Vec<u64> {
    let mut out = Vec::new();
    for &d in torsion {
        let mut d = d;
        let mut p = 2;
        while d > 1 {
            let mut pe = 1;
            while d % p == 0 {
                d /= p;
                pe *= p;
            }
            if pe > 1 {
                out.push(pe);
            }
            p += 1;
        }
    }
    out.sort_unstable();
    out
}

proptest! {
    #[test]
    fn add_is_commutative_associative_with_identity(a in group_expr(), b in group_expr(), c in group_expr()) {
        prop_assert_eq!(a + b, b + a);
        prop_assert_eq!((a + b) + c, a + (b + c));
        prop_assert_eq!(a + GroupExpr::ZERO, a);
    }

    #[test]
    fn shift_is_an_involutive_homomorphism(a in group_expr(), b in group_expr(), n in 0u64..100) {
        prop_assert_eq!(a.shift().shift(), a);
        prop_assert_eq!((a + b).shift(), a.shift() + b.shift());
        prop_assert_eq!(a.shift_by(n), if n % 2 == 0 { a } else { a.shift() });
    }

    #[test]
    fn normalize_is_idempotent_and_order_blind(mut t in prop::collection::vec(2u64..200, 0..8)) {
        let n = normalize(&t).unwrap();
        prop_assert_eq!(normalize(&n).unwrap(), n.clone());
        prop_assert!(n.windows(2).all(|w| w[1] % w[0] == 0));
        prop_assert!(n.iter().all(|&d| d >= 2));
        prop_assert_eq!(elementary_divisors(&n), elementary_divisors(&t));
        t.reverse();
        prop_assert_eq!(normalize(&t).unwrap(), n);
    }

    #[test]
    fn mod2_commutes_with_products(g in small_group(), h in small_group()) {
        prop_assert_eq!(g.product(&h).unwrap().mod2(), g.mod2().product(&h.mod2()).unwrap());
    }

    #[test]
    fn instantiate_is_additive(a in group_expr(), b in group_expr(), g0 in small_group(), g1 in small_group()) {
        let (a, b) = (
            GroupExpr::new(a.k0f % 4, a.k1f % 4, a.k0f_mod2 % 4, a.k1f_mod2 % 4),
            GroupExpr::new(b.k0f % 4, b.k1f % 4, b.k0f_mod2 % 4, b.k1f_mod2 % 4),
        );
        let sum = instantiate(&(a + b), &g0, &g1).unwrap();
        let split = instantiate(&a, &g0, &g1).unwrap().product(&instantiate(&b, &g0, &g1).unwrap()).unwrap();
        prop_assert_eq!(sum, split);
        prop_assert_eq!(instantiate(&a.shift(), &g0, &g1).unwrap(), instantiate(&a, &g1, &g0).unwrap());
    }

    #[test]
    fn product_quotient_unitize_match_direct_sums(p in 0u64..100, q in 0u64..100, r in 0u64..100, s in 0u64..100) {
        let (x, y) = (UpsilonDesc::new(p, q), UpsilonDesc::new(r, s));
        prop_assert_eq!(product(&[x, y]).indexed(), x.indexed() + y.indexed());
        prop_assert_eq!(quotient(x, y).indexed(), x.indexed() + y.indexed().shift());
        prop_assert_eq!(unitize(x), product(&[UpsilonDesc::UNIT, x]));
        prop_assert_eq!(tensor(&[x, y]).unwrap().euler(), x.euler() * y.euler());
    }
}

/// Pairwise Künneth rule, folded: an oracle independent of the half-sum form.
fn tensor_oracle(descs: &[UpsilonDesc]) -> UpsilonDesc {
    descs.iter().fold(UpsilonDesc::UNIT, |acc, d| {
        UpsilonDesc::new(acc.p * d.p + acc.q * d.q, acc.p * d.q + acc.q * d.p)
    })
}

#[test]
fn tensor_matches_pairwise_rule_exhaustively() {
    let pairs: Vec<UpsilonDesc> =
        (0..=4u64).flat_map(|p| (0..=4 - p).map(move |q| UpsilonDesc::new(p, q))).collect();
    assert_eq!(pairs.len(), 15);
    let mut checked = 0usize;
    for n in 0..=6u32 {
        let total = pairs.len().pow(n);
        for code in 0..total {
            let mut c = code;
            let list: Vec<UpsilonDesc> = (0..n)
                .map(|_| {
                    let d = pairs[c % pairs.len()];
                    c /= pairs.len();
                    d
                })
                .collect();
            assert_eq!(tensor(&list).unwrap(), tensor_oracle(&list), "{list:?}");
            checked += 1;
        }
    }
    assert_eq!(checked, (0..=6).map(|n| 15usize.pow(n)).sum::<usize>());
}

#[test]
fn tensor_half_sums_always_integral() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for _ in 0..10_000 {
        let len = rng.random_range(0..=8);
        let list: Vec<UpsilonDesc> =
            (0..len).map(|_| UpsilonDesc::new(rng.random_range(0..=20), rng.random_range(0..=20))).collect();
        match tensor(&list) {
            Ok(d) => assert_eq!(d, tensor_oracle(&list)),
            Err(UpsilonError::NonIntegral { sum, diff }) => panic!("non-integral half-sum {sum} {diff} for {list:?}"),
            Err(UpsilonError::Overflow) => {}
        }
    }
}
