use std::collections::HashSet;

use hthick::scheme::{
    cell_role, closed_form_per_root, closed_form_total, recursive_histograms, CellRole,
    ConductivityAtlas,
};
use hthick::tri::TriCell;

#[test]
fn third_level_histogram_per_root() {
    let atlas = ConductivityAtlas::expand(3, 1 << 20).unwrap();
    let h = atlas.histogram(3).unwrap();
    for root in &h.per_root {
        let counts: Vec<u128> = (0..3).map(|k| root[&k]).collect();
        assert_eq!(counts, vec![1, 12, 36]);
    }
}

#[test]
fn histograms_match_closed_form() {
    let atlas = ConductivityAtlas::expand(7, 1 << 24).unwrap();
    for n in 1..=7 {
        let h = atlas.histogram(n).unwrap();
        assert_eq!(h.total_count(), closed_form_total(n));
        for root in &h.per_root {
            for k in 0..n {
                assert_eq!(root.get(&k).copied().unwrap_or(0), closed_form_per_root(n, k), "n={n} k={k}");
            }
        }
    }
    assert_eq!(atlas.histogram(1).unwrap().total.into_iter().collect::<Vec<_>>(), vec![(0, 3)]);
}

#[test]
fn recursion_histograms_to_twenty() {
    let hs = recursive_histograms(20);
    for (idx, h) in hs.iter().enumerate() {
        let n = idx as u32 + 1;
        let total: u128 = h.iter().sum();
        assert_eq!(3 * total, closed_form_total(n));
        for (k, &c) in h.iter().enumerate() {
            assert_eq!(c, closed_form_per_root(n, k as u32));
        }
    }
}

#[test]
fn kappa_formula_holds_through_depth_six() {
    let atlas = ConductivityAtlas::expand(6, 1 << 24).unwrap();
    assert!(atlas.kappa_formula_violations().is_empty());
    // a level-8 member of the fifth scheme has conductivity 1/8
    let deep = atlas.nodes(5).unwrap().iter().find(|x| x.cell.level == 8).unwrap();
    assert_eq!(deep.k_exp, 3);
    let shallow = atlas.nodes(2).unwrap().iter().find(|x| x.cell.level == 3).unwrap();
    assert_eq!(shallow.k_exp, 1);
}

#[test]
fn cover_audit_small_levels() {
    let atlas = ConductivityAtlas::expand(6, 1 << 24).unwrap();
    for n in 1..=6 {
        let rep = atlas.cover_audit(n).unwrap();
        assert!(rep.ok(), "{rep:?}");
    }
    assert_eq!(atlas.cover_audit(2).unwrap().members, 21);
}

/// Every cell at the deepest member level has exactly one member ancestor,
/// checked by walking all cells of that level.
#[test]
fn cover_by_direct_enumeration() {
    let atlas = ConductivityAtlas::expand(4, 1 << 20).unwrap();
    for n in 1..=4 {
        let members: HashSet<TriCell> = atlas.nodes(n).unwrap().iter().map(|x| x.cell).collect();
        let depth = members.iter().map(|c| c.level).max().unwrap();
        let mut frontier = vec![TriCell::ROOT];
        for _ in 0..depth {
            frontier = frontier.iter().flat_map(|c| c.children()).collect();
        }
        for cell in frontier {
            let hits = (0..=depth).filter(|&l| members.contains(&cell.ancestor(l))).count();
            assert_eq!(hits, 1, "n={n} cell={cell}");
        }
    }
}

/// The equal-conductivity child is the unique child sharing a vertex with the
/// parent of the member.
#[test]
fn digit_rule_matches_vertex_incidence() {
    let atlas = ConductivityAtlas::expand(6, 1 << 24).unwrap();
    for n in 1..=6 {
        for node in atlas.nodes(n).unwrap() {
            let parent = node.cell.parent().unwrap().triangle();
            let touching: Vec<u8> = (0..3u8)
                .filter(|&d| node.cell.child(d).triangle().touches(&parent))
                .collect();
            assert_eq!(touching, vec![node.cell.last_digit().unwrap()]);
        }
    }
}

#[test]
fn intermediate_cells_carry_half() {
    let root = TriCell::from_digits(&[0]).unwrap();
    assert_eq!(cell_role(root.child(1)), Some(CellRole::Intermediate { k_exp: 1 }));
    assert_eq!(cell_role(root.child(0)), Some(CellRole::Member { n: 2, k_exp: 0 }));
}

#[test]
fn jsonl_export() {
    let atlas = ConductivityAtlas::expand(2, 1000).unwrap();
    let mut buf = Vec::new();
    atlas.write_jsonl(2, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert_eq!(text.lines().count(), 24);
    let first: serde_json::Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
    assert_eq!(first["address"], "0");
    assert_eq!(first["kExp"], 0);
}
