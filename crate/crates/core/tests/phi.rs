use std::cmp::Ordering;

use hthick::bounds::BoundFn;
use hthick::dyadic::Dyadic;
use hthick::geometry::{BaryPoint, Triangle};
use hthick::phi::admissible::{admissible_count, flatten, format_address};
use hthick::phi::audit::{diameter_floor, holder_audit, level_cell_count, level_chain};
use hthick::phi::geom::{ab_section, compare_lt4, delta_iota, KeySegment};
use hthick::phi::optimize::{log2_biguint, optimize_params};
use hthick::phi::{parse_address, Block, KeyMap, PhiWitness};
use hthick::tri::TriCell;
use hthick::Error;
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use proptest::prelude::*;

fn witness() -> PhiWitness {
    PhiWitness::new(3, 1).unwrap()
}

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn all_words(alphabet: &[u8], len: usize) -> Vec<Vec<u8>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|w| {
                alphabet.iter().map(move |&d| {
                    let mut v = w.clone();
                    v.push(d);
                    v
                })
            })
            .collect();
    }
    out
}

fn blocks_of(words: &[Vec<u8>]) -> Vec<Block> {
    words.iter().map(|w| Block::new(w.clone()).unwrap()).collect()
}

/// Addresses of `m` blocks drawn from `pool`.
fn addresses(pool: &[Block], m: usize) -> Vec<Vec<Block>> {
    let mut out = vec![Vec::new()];
    for _ in 0..m {
        out = out
            .into_iter()
            .flat_map(|a| {
                pool.iter().map(move |b| {
                    let mut v = a.clone();
                    v.push(b.clone());
                    v
                })
            })
            .collect();
    }
    out
}

fn mid2(s: &KeySegment) -> Dyadic {
    &s.lo + &s.hi
}

#[test]
fn admissible_set_size_and_order() {
    let w = witness();
    let names: Vec<String> = w.set().blocks().iter().map(Block::to_string).collect();
    assert_eq!(names, ["033", "233", "303", "323", "330", "332", "333"]);
    for k in 1..=7 {
        for wd in 1..=k {
            let brute = all_words(&[0, 2, 3], k).iter().filter(|b| b.iter().filter(|&&d| d != 3).count() <= wd).count();
            assert_eq!(admissible_count(k, wd), BigUint::from(brute), "k={k} w={wd}");
        }
    }
}

#[test]
fn key_maps_agree_with_triangle_sections() {
    let w = witness();
    for len in 1..=5 {
        for word in all_words(&[0, 2, 3], len) {
            let geo = ab_section(w.gens(), &word).unwrap();
            let (lo, hi) = KeyMap::of_digits(&word).unwrap().interval();
            assert_eq!((geo.lo, geo.hi), (lo, hi), "{word:?}");
        }
    }
    assert!(matches!(ab_section(w.gens(), &[2, 1]), Err(Error::Contract(_))));
}

#[test]
fn small_order_examples() {
    let w = witness();
    let g = w.gens();
    assert_eq!(compare_lt4(g, &[0], &[3]).unwrap(), Ordering::Less);
    assert_eq!(compare_lt4(g, &[0, 2, 3], &[0, 2, 3]).unwrap(), Ordering::Equal);
    // extension consistency, lengths 1 and 2
    for len in 1..=2 {
        let words = all_words(&[0, 2, 3], len);
        for a in &words {
            for b in &words {
                if compare_lt4(g, a, b).unwrap() != Ordering::Less {
                    continue;
                }
                for x in [0, 2, 3] {
                    for y in [0, 2, 3] {
                        let (mut a2, mut b2) = (a.clone(), b.clone());
                        a2.push(x);
                        b2.push(y);
                        assert_eq!(compare_lt4(g, &a2, &b2).unwrap(), Ordering::Less);
                    }
                }
            }
        }
    }
}

#[test]
fn delta_iota_triangle_counts() {
    let w = witness();
    let count = |d: &[u8]| delta_iota(w.gens(), d, 1 << 12).unwrap().len();
    assert_eq!(count(&[3, 3, 3]), 1);
    assert_eq!(count(&[2, 3, 3]), 2);
    assert_eq!(count(&[0, 0, 3]), 4);
    for word in all_words(&[0, 1, 2, 3], 3) {
        let non3 = word.iter().filter(|&&d| d != 3).count();
        assert!(count(&word) <= 1 << non3);
    }
    assert!(matches!(delta_iota(w.gens(), &[0; 10], 512), Err(Error::Budget(_))));
}

#[test]
fn rank_dp_matches_geometric_count() {
    let w = witness();
    let all = blocks_of(&all_words(&[0, 2, 3], 3));
    let adm = w.set().blocks().to_vec();
    for m in 1..=3 {
        let adm_mids: Vec<Dyadic> =
            addresses(&adm, m).iter().map(|a| mid2(&ab_section(w.gens(), &flatten(a)).unwrap())).collect();
        for addr in addresses(&all, m) {
            let mine = mid2(&ab_section(w.gens(), &flatten(&addr)).unwrap());
            let brute = adm_mids.iter().filter(|x| **x < mine).count();
            assert_eq!(w.counter().rank_count(&addr).unwrap(), BigUint::from(brute), "{}", format_address(&addr));
        }
    }
}

#[test]
fn rank_and_interval_examples() {
    let w = witness();
    let smallest = w.set().blocks()[0].clone();
    let largest = w.set().blocks()[6].clone();
    // digit 0 flips the block order, so the smallest address is 033|333,
    // while repeating the smallest block lands at the top of its cylinder
    assert!(w.counter().rank_count(&parse_address("033|333").unwrap()).unwrap().is_zero());
    assert_eq!(w.counter().rank_count(&[smallest.clone(), smallest.clone()]).unwrap(), BigUint::from(6u32));
    assert_eq!(w.counter().rank_count(&[smallest]).unwrap(), BigUint::zero());
    assert_eq!(w.counter().rank_count(&[largest]).unwrap(), BigUint::from(6u32));
    let iv = w.eval_blocks(&parse_address("233").unwrap()).unwrap();
    assert_eq!((iv.lo(), iv.hi()), (q(1, 7), q(2, 7)));
    assert_eq!(iv.endpoint_strings(), ["1/7".to_string(), "2/7".to_string()]);
    let a_chain = w.eval_blocks(&parse_address("333|333|333|333").unwrap()).unwrap();
    assert_eq!(a_chain.hi(), BigRational::one());
    let b_chain = w.eval_blocks(&parse_address("033|333|333|333").unwrap()).unwrap();
    assert!(b_chain.lo().is_zero());
    // rank grows by exactly a factor #I per appended block
    let pool = w.set().blocks().to_vec();
    for a in addresses(&pool, 2) {
        let base = w.counter().rank_count(&a).unwrap();
        let mut ranks: Vec<BigUint> = pool
            .iter()
            .map(|b| {
                let mut ext = a.clone();
                ext.push(b.clone());
                w.counter().rank_count(&ext).unwrap()
            })
            .collect();
        ranks.sort();
        let want: Vec<BigUint> = (0..7u32).map(|j| &base * 7u32 + j).collect();
        assert_eq!(ranks, want);
    }
}

#[test]
fn corner_values_are_exact() {
    let w = witness();
    assert_eq!(w.value_at_point(&BaryPoint::a()).unwrap(), BigRational::one());
    assert!(w.value_at_point(&BaryPoint::b()).unwrap().is_zero());
    assert!(w.value_at_point(&BaryPoint::c()).unwrap().is_zero());
}

#[test]
fn cylinder_images_are_rank_intervals() {
    let w = witness();
    let adm = w.set().blocks().to_vec();
    for m in 1..=3 {
        let mut addrs: Vec<(Dyadic, Vec<Block>)> = addresses(&adm, m)
            .into_iter()
            .map(|a| (mid2(&ab_section(w.gens(), &flatten(&a)).unwrap()), a))
            .collect();
        addrs.sort();
        let den = 7i64.pow(m as u32);
        for (k, (_, addr)) in addrs.iter().enumerate() {
            let want = (q(k as i64, den), q(k as i64 + 1, den));
            let digits = flatten(addr);
            assert_eq!(w.counter().range_of_digits(&digits).unwrap(), want, "{}", format_address(addr));
            if m <= 2 {
                let seg = ab_section(w.gens(), &digits).unwrap();
                let at = |key: &Dyadic| w.value_at_point(&BaryPoint::new(&Dyadic::one() - key, Dyadic::zero())).unwrap();
                assert_eq!((at(&seg.lo), at(&seg.hi)), want.clone());
                for tri in delta_iota(w.gens(), &digits, 1 << 12).unwrap() {
                    for p in &tri.vertices {
                        let v = w.value_at_point(p).unwrap();
                        assert!(v >= want.0 && v <= want.1);
                    }
                }
            }
        }
    }
}

#[test]
fn monotone_along_ab() {
    let w = witness();
    let steps = 1i64 << 10;
    let mut prev = BigRational::zero();
    for j in 0..=steps {
        let p = BaryPoint::new(Dyadic::new(steps - j, 10), Dyadic::zero());
        let v = w.value_at_point(&p).unwrap();
        assert!(v >= prev, "key {j}/1024");
        prev = v;
    }
    assert_eq!(prev, BigRational::one());
}

#[test]
fn digit_one_extension() {
    let w = witness();
    // top-level digit 1: value at the junction of Δ_(0) and Δ_(2), key 1/4
    let junction = BaryPoint::new(Dyadic::new(3, 2), Dyadic::zero());
    let v = w.counter().extend_constant(&[]).unwrap();
    assert_eq!(v, w.value_at_point(&junction).unwrap());
    assert_eq!(v, w.counter().value_of_digits(&[1, 0, 2]).unwrap());
    for len in 0..=5 {
        for prefix in all_words(&[0, 2, 3], len) {
            w.counter().extend_constant(&prefix).unwrap();
        }
    }
    assert!(w.counter().extend_constant(&[1]).is_err());
}

/// Inadmissible blocks make the witness constant on the whole cylinder.
#[test]
fn constant_on_inadmissible_cylinders() {
    let w = witness();
    let words = all_words(&[0, 2, 3], 3);
    let bad: Vec<Vec<u8>> = words.iter().filter(|b| b.iter().filter(|&&d| d != 3).count() > 1).cloned().collect();
    for lead in [vec![], vec![3, 3, 3], vec![0, 3, 3]] {
        for b in &bad {
            let mut digits = lead.clone();
            digits.extend(b);
            let mut seen = std::collections::BTreeSet::new();
            for tri in delta_iota(w.gens(), &digits, 1 << 12).unwrap() {
                for p in &tri.vertices {
                    seen.extend(w.values_at_point_all(p).unwrap());
                }
            }
            assert_eq!(seen.len(), 1, "{digits:?}");
        }
    }
}

fn gasket_vertices(level: u8) -> Vec<BaryPoint> {
    let mut cells = vec![TriCell::ROOT];
    for _ in 0..level {
        cells = cells.iter().flat_map(|c| c.children()).collect();
    }
    let mut pts: Vec<BaryPoint> = cells.iter().flat_map(|c| c.triangle().vertices).collect();
    pts.sort();
    pts.dedup();
    pts
}

#[test]
fn shared_vertices_get_one_value() {
    let w = witness();
    for p in gasket_vertices(6) {
        let vals = w.values_at_point_all(&p).unwrap();
        assert_eq!(vals.len(), 1, "{p}: {vals:?}");
    }
    let off = BaryPoint::from_parts(3, 3, 3, 3);
    assert!(matches!(w.value_at_point(&off), Err(Error::Contract(_))));
}

#[test]
fn holder_audit_within_bound() {
    let w = witness();
    let alpha = 7f64.log2() / 4.0 - 0.01;
    let rep = holder_audit(&w, alpha, 3).unwrap();
    assert_eq!(rep.conflicts, 0);
    assert!(rep.max_ratio <= (6.0 * 7.0 / 3f64.sqrt()).powf(alpha), "{rep:?}");
    assert!(rep.max_ratio > 0.0);
    assert!(matches!(holder_audit(&w, 0.75, 1), Err(Error::Parameter(_))));
    for m in 1..=3 {
        assert!(diameter_floor(&w, m).unwrap().ok);
    }
}

#[test]
fn level_cell_counts() {
    let w = witness();
    for r in [0.1234567, 0.5123, std::f64::consts::FRAC_1_PI, 0.987654] {
        for n in 1..=3 {
            let c = level_cell_count(&w, r, n).unwrap();
            assert!(c.count >= 1 && c.ok(), "{c:?}");
            assert_eq!(c.chain.len(), n);
        }
    }
    assert!(level_cell_count(&w, 0.3, 1).unwrap().count <= 2);
    assert!(matches!(level_cell_count(&w, 1.0 / 7.0, 1), Err(Error::Guard(_))));
    // the chain's cylinder interval contains r
    let r = 0.421;
    let chain = level_chain(&w, r, 3);
    let iv = w.eval_blocks(&chain).unwrap();
    assert!(iv.lo().to_f64().unwrap() < r && r < iv.hi().to_f64().unwrap());
}

#[test]
fn optimized_parameters_satisfy_constraints() {
    let mut last_ratio = 0.0;
    for i in 1..=9 {
        let alpha = i as f64 / 10.0;
        let p = optimize_params(alpha, 0.05).unwrap();
        let t = BoundFn::UpperWitness.invert(alpha, 1e-12).unwrap();
        let size = admissible_count(p.k_star, p.w);
        assert!(log2_biguint(&size) >= (p.k_star + p.w) as f64 * alpha);
        assert!(size >= BigUint::from(2u32));
        assert!(p.w as f64 / (p.k_star + p.w) as f64 <= t / (1.0 + t) + 0.05);
        assert!(p.ratio >= last_ratio - 0.05, "trend at alpha {alpha}");
        last_ratio = p.ratio;
    }
    let alpha = BoundFn::UpperWitness.eval(1.0 / 3.0).unwrap();
    assert!(optimize_params(alpha, 0.05).unwrap().ratio <= 0.30 + 1e-12);
    assert!(optimize_params(1.2, 0.05).is_err());
}

#[test]
fn triangle_cells_and_values_line_up() {
    let w = witness();
    // each piece is a grid cell; its B and C images share the value
    let root = hthick::phi::witness::Piece::root();
    for child in w.children(&root) {
        let cell = hthick::phi::witness::cell_of(&child.triangle()).unwrap();
        assert!(cell.level == 1 || cell.level == 2);
        let (_, at_bc) = w.vertex_values(&child).unwrap();
        let tri: Triangle = child.triangle();
        assert_eq!(w.value_at_point(&tri.vertices[1]).unwrap(), at_bc);
        assert_eq!(w.value_at_point(&tri.vertices[2]).unwrap(), at_bc);
    }
}

proptest! {
    #[test]
    fn values_nest_inside_cylinder_ranges(
        prefix in proptest::collection::vec(prop_oneof![Just(0u8), Just(2u8), Just(3u8)], 0..8),
        tail in proptest::collection::vec(0u8..4, 0..8),
    ) {
        let w = witness();
        let (lo, hi) = w.counter().range_of_digits(&prefix).unwrap();
        let mut full = prefix.clone();
        full.extend(&tail);
        let v = w.counter().value_of_digits(&full).unwrap();
        prop_assert!(lo <= v && v <= hi);
        prop_assert!(v >= BigRational::zero() && v <= BigRational::one());
    }
}
