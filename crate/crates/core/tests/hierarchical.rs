use hecc_core::oracle::{brute_force_decode, min_distance, DEFAULT_CAP};
use hecc_core::{BlockStatus, Elem, HierCode, HierConfig, Symbol};
use proptest::prelude::*;
use proptest::sample::subsequence;

fn example() -> HierCode {
    let cfg = HierConfig::parse(
        "m = 4\nprim_poly = 0x13\np = 2\n\
         block.1.k = 3\nblock.1.r = 3\nblock.1.delta = 1\n\
         block.1.rows = 1 2 3 4\nblock.1.cols = 8 9 10 11\n\
         block.2.k = 3\nblock.2.r = 3\nblock.2.delta = 1\n\
         block.2.rows = 1 2 3 4\nblock.2.cols = 8 9 10 11\n",
    )
    .unwrap();
    HierCode::build(&cfg).unwrap()
}

#[test]
fn sub_code_distances() {
    let code = example();
    let blk = code.block(0);
    let local = blk.local_code();
    assert_eq!((local.n(), local.dimension()), (7, 4));
    assert_eq!(min_distance(local, DEFAULT_CAP).unwrap(), blk.r() + 1);
    let global = blk.global_code();
    assert_eq!((global.n(), global.dimension()), (6, 2));
    assert_eq!(
        min_distance(global, DEFAULT_CAP).unwrap(),
        blk.r() + code.delta() - blk.delta() + 1
    );
}

#[test]
fn global_syndrome_is_the_parity_check_of_the_error() {
    let code = example();
    let f = code.field();
    let c = code
        .encode(&[
            vec![f.exp(1), Elem::ZERO, f.exp(4)],
            vec![Elem::ZERO, Elem::ONE, Elem::ZERO],
        ])
        .unwrap();
    let h = code.global_parity_check(0);
    for a in 0..6 {
        for b in 0..6 {
            let mut e = vec![Elem::ZERO; 6];
            e[a] = Elem::ONE;
            e[b] += f.exp(a as i64 + 3);
            let w: Vec<Elem> = c[0].iter().zip(&e).map(|(&x, &y)| x + y).collect();
            assert_eq!(code.global_syndrome(0, &w, &c).unwrap(), h.mul_vec(f, &e));
        }
    }
}

#[test]
fn global_decode_matches_brute_force() {
    let code = example();
    let f = code.field();
    let c = code
        .encode(&[
            vec![f.exp(1), Elem::ZERO, f.exp(4)],
            vec![Elem::ZERO, Elem::ONE, Elem::ZERO],
        ])
        .unwrap();
    let global = code.block(0).global_code();
    let zero = vec![Elem::ZERO; global.n()];
    // the error pattern is the nearest global codeword's offset from the received word
    for a in 0..6 {
        for b in a + 1..6 {
            let mut w: Vec<Symbol> = c[0].iter().map(|&x| Some(x)).collect();
            let mut e: Vec<Symbol> = zero.iter().map(|&x| Some(x)).collect();
            for (p, v) in [(a, Elem::ONE), (b, f.exp(3))] {
                w[p] = Some(c[0][p] + v);
                e[p] = Some(v);
            }
            let d = code.global_decode(0, &w, &c, &Default::default()).unwrap();
            assert_eq!(d.codeword, c[0]);
            assert_eq!(brute_force_decode(global, &e, DEFAULT_CAP).unwrap(), zero);
        }
    }
}

fn configs() -> impl Strategy<Value = HierConfig> {
    prop_oneof![
        Just(vec![(6usize, 6usize, 2usize), (5, 7, 1), (5, 5, 2)]),
        Just(vec![(8, 4, 1), (8, 4, 1)]),
        Just(vec![(5, 6, 3), (7, 3, 1), (6, 5, 2), (7, 4, 1)]),
    ]
    .prop_map(|b| HierConfig::with_default_points(6, None, &b).unwrap())
}

#[derive(Debug, Clone)]
struct Damage {
    block: usize,
    positions: Vec<usize>,
    errors: usize,
    values: Vec<u16>,
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    /// One block at the global budget, the rest within their local budgets.
    #[test]
    fn stripe_recovers_within_budgets(
        cfg in configs(),
        seed in any::<u64>(),
        heavy in any::<prop::sample::Index>(),
    ) {
        let code = HierCode::build(&cfg).unwrap();
        let f = code.field();
        let q = f.order() as u64;
        let mut x = seed;
        let mut next = |bound: u64| {
            x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (x >> 33) % bound
        };
        let messages: Vec<Vec<Elem>> = code
            .blocks()
            .iter()
            .map(|b| (0..b.k()).map(|_| Elem::from_raw(next(q) as u16)).collect())
            .collect();
        let c = code.encode(&messages).unwrap();
        let heavy = heavy.index(code.p());
        let damage: Vec<Damage> = code
            .blocks()
            .iter()
            .enumerate()
            .map(|(i, b)| {
                let budget = if i == heavy {
                    b.r() + code.delta() - b.delta()
                } else {
                    b.r() - b.delta()
                };
                let s = next(budget as u64 / 2 + 1) as usize;
                let t = next((budget - 2 * s) as u64 + 1) as usize;
                let mut pos: Vec<usize> = (0..b.n()).collect();
                for j in (1..pos.len()).rev() {
                    pos.swap(j, next(j as u64 + 1) as usize);
                }
                pos.truncate(s + t);
                Damage {
                    block: i,
                    positions: pos,
                    errors: s,
                    values: (0..s).map(|_| 1 + next(q - 1) as u16).collect(),
                }
            })
            .collect();
        let words: Vec<Vec<Symbol>> = damage
            .iter()
            .map(|d| {
                let mut w: Vec<Symbol> = c[d.block].iter().map(|&v| Some(v)).collect();
                for (n, &p) in d.positions.iter().enumerate() {
                    w[p] = if n < d.errors {
                        Some(c[d.block][p] + Elem::from_raw(d.values[n]))
                    } else {
                        None
                    };
                }
                w
            })
            .collect();
        let out = code.decode_stripe(&words).unwrap();
        prop_assert_eq!(&out.codewords, &c);
        prop_assert_eq!(out.messages(&code), messages);
        for (o, d) in out.outcomes.iter().zip(&damage) {
            let mut want = d.positions.clone();
            want.sort_unstable();
            prop_assert_eq!(&o.corrected, &want);
            prop_assert_eq!(o.status == BlockStatus::Clean, want.is_empty());
        }
    }

    #[test]
    fn clean_stripes_are_codewords(cfg in configs(), raw in subsequence((0u16..64).collect::<Vec<_>>(), 0..64)) {
        let code = HierCode::build(&cfg).unwrap();
        let mut it = raw.into_iter().cycle().map(Elem::from_raw);
        let messages: Vec<Vec<Elem>> = code
            .blocks()
            .iter()
            .map(|b| (0..b.k()).map(|_| it.next().unwrap_or(Elem::ZERO)).collect())
            .collect();
        let c = code.encode(&messages).unwrap();
        prop_assert!(code.is_codeword(&c));
        let words: Vec<Vec<Symbol>> = c.iter().map(|w| w.iter().map(|&x| Some(x)).collect()).collect();
        let out = code.decode_stripe(&words).unwrap();
        prop_assert!(out.outcomes.iter().all(|o| o.status == BlockStatus::Clean));
    }
}
