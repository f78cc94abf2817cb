use proptest::prelude::*;

use super::*;
use crate::complexity;
use crate::oracle::OracleModel;

// successive values 1..=10 as printed for the running example
const EXAMPLE: [&str; 10] = [
    "tree(_,1,_)",
    "tree(tree(_,2,_),1,_)",
    "tree(tree(_,2,_),1,tree(_,3,_))",
    "tree(tree(_,2,_),1,tree(tree(_,4,_),3,_))",
    "tree(tree(_,2,_),1,tree(tree(tree(_,5,_),4,_),3,_))",
    "tree(tree(_,2,_),1,tree(tree(tree(_,5,_),4,tree(_,6,_)),3,_))",
    "tree(tree(_,2,_),1,tree(tree(tree(_,5,_),4,tree(_,6,_)),3,tree(_,7,_)))",
    "tree(tree(_,2,_),1,tree(tree(tree(_,5,_),4,tree(_,6,_)),3,tree(tree(_,8,_),7,_)))",
    "tree(tree(_,2,_),1,tree(tree(tree(_,5,_),4,tree(_,6,_)),3,tree(tree(tree(_,9,_),8,_),7,_)))",
    "tree(tree(_,2,_),1,tree(tree(tree(_,5,_),4,tree(_,6,_)),3,tree(tree(tree(tree(_,10,_),9,_),8,_),7,_)))",
];

fn filled(config: Config, n: u64) -> OpenTree<u64> {
    let mut t = OpenTree::new(config).unwrap();
    for v in 1..=n {
        t.insert(v);
    }
    t
}

fn annotated() -> Config {
    Config::default().depth_annotated(true)
}

#[test]
fn empty_tree() {
    let t: OpenTree<u64> = OpenTree::new(Config::default()).unwrap();
    assert_eq!(t.lookup(), Err(Error::EmptyTree));
    assert_eq!(t.render(), "_");
    assert!(t.flatten().is_empty());
    assert_eq!(t.stats(), TreeStats::default());
    assert_eq!(t.validate(), Ok(()));
}

#[test]
fn zero_start_depth_rejected() {
    assert!(matches!(
        OpenTree::<u64>::new(Config::with_start_depth(0)),
        Err(Error::BadConfig(_))
    ));
}

#[test]
fn running_example_renders() {
    let mut t = OpenTree::new(Config::default()).unwrap();
    for (v, expected) in (1..=10u64).zip(EXAMPLE) {
        t.insert(v);
        assert_eq!(t.render(), expected, "after inserting {v}");
        assert_eq!(t.lookup(), Ok(&v));
        assert_eq!(t.validate(), Ok(()));
    }
    assert_eq!(t.flatten(), (1..=10).collect::<Vec<_>>());
}

#[test]
fn single_insert_visits_one_slot() {
    let mut t = OpenTree::new(Config::default()).unwrap();
    t.insert(7);
    assert_eq!(t.visits().last, 1);
    assert_eq!(t.lookup(), Ok(&7));
}

#[test]
fn undo_restores_previous_value() {
    let mut t = filled(Config::default(), 10);
    let m = t.mark();
    t.insert(11);
    assert_eq!(t.lookup(), Ok(&11));
    t.undo_to(&m).unwrap();
    assert_eq!(t.lookup(), Ok(&10));
    assert_eq!(t.render(), EXAMPLE[9]);
}

#[test]
fn flatten_after_undo() {
    let mut t = OpenTree::new(Config::default()).unwrap();
    t.insert('a');
    let m = t.mark();
    t.insert('b');
    t.undo_to(&m).unwrap();
    assert_eq!(t.flatten(), vec!['a']);
}

#[test]
fn compact_leaf_at_first_collector() {
    let t = filled(Config::default().compact_leaves(true), 2);
    assert_eq!(t.render(), "tree(leaf(2),1,_)");
    assert_eq!(t.lookup(), Ok(&2));
    assert_eq!(t.validate(), Ok(()));
}

#[test]
fn compact_variant_matches_plain_modulo_leaves() {
    let plain = filled(Config::default(), 100);
    let compact = filled(Config::default().compact_leaves(true), 100);
    assert_eq!(plain.flatten(), compact.flatten());
    // leaf(v) -> tree(_,v,_)
    let mut expected = String::new();
    let mut rest = compact.render();
    while let Some(i) = rest.find("leaf(") {
        expected.push_str(&rest[..i]);
        let tail = &rest[i + 5..];
        let close = tail.find(')').unwrap();
        expected.push_str(&format!("tree(_,{},_)", &tail[..close]));
        rest = tail[close + 1..].to_string();
    }
    expected.push_str(&rest);
    assert_ne!(expected, compact.render());
    assert_eq!(expected, plain.render());
}

#[test]
fn validate_catches_early_collector() {
    let t: OpenTree<u64> = OpenTree::from_term(Config::default(), "tree(_,1,tree(_,2,_))").unwrap();
    let v = t.validate().unwrap_err();
    assert_eq!(v.rule, Rule::Completeness);
    assert_eq!(v.path, "");
}

#[test]
fn validate_catches_depth_overflow() {
    let t: OpenTree<u64> =
        OpenTree::from_term(Config::default(), "tree(tree(tree(_,3,_),2,_),1,_)").unwrap();
    let v = t.validate().unwrap_err();
    assert_eq!(v.rule, Rule::DepthLimit);
    assert_eq!(v.path, "LL");
}

#[test]
fn validate_catches_preorder_gap() {
    let t: OpenTree<u64> = OpenTree::from_term(
        Config::with_start_depth(2),
        "tree(tree(_,2,tree(_,3,_)),1,_)",
    )
    .unwrap();
    assert_eq!(t.validate().unwrap_err().rule, Rule::PreorderPrefix);
}

#[test]
fn validate_catches_wrong_node_kind() {
    let plain: OpenTree<u64> = OpenTree::from_term(Config::default(), "tree(leaf(2),1,_)").unwrap();
    assert_eq!(plain.validate().unwrap_err().rule, Rule::NodeKind);
    let compact: OpenTree<u64> =
        OpenTree::from_term(Config::default().compact_leaves(true), "tree(tree(_,2,_),1,_)").unwrap();
    assert_eq!(compact.validate().unwrap_err().rule, Rule::NodeKind);
    let leaf_root: OpenTree<u64> =
        OpenTree::from_term(Config::default().compact_leaves(true), "leaf(1)").unwrap();
    assert_eq!(leaf_root.validate().unwrap_err().rule, Rule::NodeKind);
}

#[test]
fn from_term_round_trips_example() {
    for cfg in [Config::default(), annotated()] {
        let t: OpenTree<u64> = OpenTree::from_term(cfg, EXAMPLE[9]).unwrap();
        assert_eq!(t.render(), EXAMPLE[9]);
        assert_eq!(t.validate(), Ok(()));
        assert_eq!(t.lookup(), Ok(&10));
    }
    assert!(matches!(
        OpenTree::<u64>::from_term(Config::default(), "tree(_,1,_"),
        Err(Error::Parse { .. })
    ));
    assert!(matches!(
        OpenTree::<u64>::from_term(Config::default(), "tree(_,x,_)"),
        Err(Error::Parse { .. })
    ));
}

#[test]
fn rebase_to_last_collector() {
    let mut t = filled(annotated(), 10);
    let h = t.rebase().unwrap();
    assert_eq!(
        t.render_at(&h),
        "tree(tree(tree(tree(_,10,_),9,_),8,_),7,_)"
    );
    assert_eq!(h.effective_start(), 3);
    assert_eq!(t.lookup_at(&h), t.lookup());
    assert_eq!(t.validate_at(&h), Ok(()));

    t.insert_at(&h, 11);
    assert_eq!(t.lookup(), Ok(&11));
    assert_eq!(t.flatten(), (1..=11).collect::<Vec<_>>());
    assert_eq!(t.validate(), Ok(()));
}

#[test]
fn rebase_single_collector_is_identity() {
    let t = filled(annotated(), 2);
    let h = t.rebase().unwrap();
    assert_eq!(t.render_at(&h), t.render());
    assert_eq!(h, t.handle());
}

#[test]
fn rebase_errors() {
    let t = filled(Config::default(), 10);
    assert_eq!(t.rebase(), Err(Error::NeedsDepthAnnotation));
    let e: OpenTree<u64> = OpenTree::new(annotated()).unwrap();
    assert_eq!(e.rebase(), Err(Error::EmptyTree));
}

#[test]
fn rebase_shortens_inserts() {
    let mut t = filled(annotated(), 10000);
    let h = t.rebase().unwrap();
    let m = t.mark();
    t.insert(0);
    let full = t.visits().last;
    t.undo_to(&m).unwrap();
    t.insert_at(&h, 0);
    let short = t.visits().last;
    assert!(short < full, "{short} !< {full}");
}

#[test]
#[should_panic(expected = "different tree")]
fn foreign_handle_faults() {
    let a = filled(Config::default(), 1);
    let b = filled(Config::default(), 1);
    let _ = a.lookup_at(&b.handle());
}

#[test]
fn stats_depth_column() {
    for (m, depth) in [(10, 6), (100, 12), (1000, 18), (10000, 26)] {
        let st = filled(Config::default(), m).stats();
        assert_eq!(st.max_node_depth, depth, "m={m}");
        assert_eq!(st.update_count, m);
        assert_eq!(st.node_count, m);
    }
}

#[test]
fn stats_small() {
    let st = filled(Config::default(), 3).stats();
    assert_eq!(st.collector_count, 2);
    assert_eq!(st.max_node_depth, 2);
    assert_eq!(st.leaf_count, 1);
}

#[test]
fn lookup_visit_bounds() {
    let t = filled(Config::default(), 10000);
    t.lookup().unwrap();
    assert!(t.visits().last <= 26);
    let t = filled(Config::with_start_depth(10), 1000);
    t.lookup().unwrap();
    assert!(t.visits().last <= 11);
}

// Brute-force route: count inserts until a second collector appears.
#[test]
fn capacity_of_first_tree_by_simulation() {
    for d0 in [1u32, 2, 3, 10] {
        let mut t = OpenTree::new(Config::with_start_depth(d0)).unwrap();
        let mut held = 0u64;
        loop {
            t.insert(held + 1);
            if t.stats().collector_count == 2 {
                break;
            }
            held += 1;
        }
        assert_eq!(held, complexity::capacity_completed(d0, d0).unwrap(), "d0={d0}");
    }
}

#[test]
fn last_tree_depth_by_simulation() {
    for d0 in [1u32, 2, 3, 10] {
        let mut t = OpenTree::new(Config::with_start_depth(d0)).unwrap();
        for m in 1..=3000u64 {
            t.insert(m);
            let measured = d0 + t.stats().collector_count as u32 - 1;
            assert_eq!(complexity::depth_of_last_tree(m, d0).unwrap(), measured);
        }
    }
}

#[test]
fn tree_is_send_and_sync() {
    fn check<T: Send + Sync>() {}
    check::<OpenTree<String>>();
    check::<crate::OpenList<String>>();
}

#[derive(Debug, Clone)]
enum Op {
    Insert,
    Mark,
    Undo(usize),
    Rebase,
}

fn op() -> impl Strategy<Value = Op> {
    prop_oneof![
        6 => Just(Op::Insert),
        2 => Just(Op::Mark),
        2 => any::<usize>().prop_map(Op::Undo),
        1 => Just(Op::Rebase),
    ]
}

fn config() -> impl Strategy<Value = Config> {
    (prop::sample::select(vec![1u32, 2, 3, 10]), any::<bool>(), any::<bool>())
        .prop_map(|(d, a, c)| Config::with_start_depth(d).depth_annotated(a).compact_leaves(c))
}

proptest! {
    #[test]
    fn behaves_like_the_oracle(cfg in config(), ops in prop::collection::vec(op(), 1..400)) {
        let mut t = OpenTree::new(cfg).unwrap();
        let mut o = OracleModel::new();
        let mut marks: Vec<(Mark, String)> = Vec::new();
        let mut handles = vec![t.handle()];
        let mut next = 0u32;
        for op in ops {
            match op {
                Op::Insert => {
                    next += 1;
                    // insert through the newest handle that still has a root
                    let h = *handles.iter().rev().find(|h| t.lookup_at(h).is_ok()).unwrap_or(&handles[0]);
                    t.insert_at(&h, next);
                    o.insert(next);
                    prop_assert_eq!(t.lookup(), Ok(&next));
                    let m = o.log().len() as u64;
                    prop_assert!(t.visits().last <= complexity::visit_bound(m, cfg.start_depth).unwrap());
                }
                Op::Mark => {
                    marks.push((t.mark(), t.render()));
                    o.mark();
                }
                Op::Undo(i) => {
                    if !marks.is_empty() {
                        let k = i % marks.len();
                        let (m, snap) = marks[k].clone();
                        t.undo_to(&m).unwrap();
                        t.release(&m).unwrap();
                        marks.truncate(k);
                        while o.checkpoints() > k {
                            o.undo().unwrap();
                        }
                        prop_assert_eq!(t.render(), snap);
                    }
                }
                Op::Rebase => {
                    if cfg.depth_annotated && !t.is_empty() {
                        let h = t.rebase().unwrap();
                        prop_assert_eq!(t.lookup_at(&h), t.lookup());
                        handles.push(h);
                    }
                }
            }
            prop_assert_eq!(t.validate(), Ok(()));
            prop_assert_eq!(t.flatten(), o.log().to_vec());
            prop_assert_eq!(t.lookup().ok(), o.lookup().ok());
        }
    }

    #[test]
    fn variants_agree(d in prop::sample::select(vec![1u32, 2, 3, 10]), n in 0u64..600) {
        let base = filled(Config::with_start_depth(d), n);
        for cfg in Config::grid(&[d]) {
            let t = filled(cfg, n);
            prop_assert_eq!(t.flatten(), base.flatten());
            prop_assert_eq!(t.lookup().ok(), base.lookup().ok());
            prop_assert_eq!(t.stats(), base.stats());
            if !cfg.compact_leaves {
                prop_assert_eq!(t.render(), base.render());
            }
        }
    }

    #[test]
    fn render_parse_round_trip(cfg in config(), n in 0u64..300) {
        let t = filled(cfg, n);
        let back: OpenTree<u64> = OpenTree::from_term(cfg, &t.render()).unwrap();
        prop_assert_eq!(back.render(), t.render());
        prop_assert_eq!(back.validate(), Ok(()));
    }
}
