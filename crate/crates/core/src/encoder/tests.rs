use std::collections::HashMap;

use super::*;
use crate::model::parse_network;
use crate::term::{emit_smtlib2, Value, DEFAULT_LOGIC};
use num_bigint::BigUint;

const THREE_LOC: &str = "
clock x;
var n : [0, 1] = 0;
automaton A {
  init q0;
  location q0;
  location q1;
  location q2 inv x < 2;
  trans t1: q0 -> q2 when n = 0;
  trans t2: q0 -> q1 when x > 5 reset {x};
  trans t3: q1 -> q0 do {n := 0};
  trans t4: q2 -> q0 do {n := n + 1};
}
";

fn net(text: &str) -> Network {
    parse_network(text).unwrap().network
}

fn bv(width: u32, bits: u64) -> Value {
    Value::Bv {
        width,
        bits: BigUint::from(bits),
    }
}

#[test]
fn log2_sizes() {
    let expected = [
        (1, 0),
        (2, 1),
        (3, 2),
        (4, 2),
        (5, 3),
        (7, 3),
        (8, 3),
        (9, 4),
    ];
    for (n, bits) in expected {
        assert_eq!(ceil_log2(n), bits, "n={n}");
    }
}

#[test]
fn null_transitions_come_first() {
    let n = net(THREE_LOC);
    let tables = augment_with_null_transitions(&n);
    assert_eq!(tables[0].len(), 7);
    assert_eq!(tables[0].id_bits(), 3);
    assert_eq!(tables[0].entries[0], TransitionRef::Null(LocId(0)));
    assert_eq!(tables[0].entries[3], TransitionRef::Declared(0));
    let single = augment_with_null_transitions(&net("automaton A { location q; }"));
    assert_eq!((single[0].len(), single[0].id_bits()), (1, 0));
}

#[test]
fn alias_of_five_over_six_vectors() {
    let tb: Vec<Term> = (0..6)
        .map(|j| Term::symbol(format!("tb{j}"), Sort::BitVec(4)).unwrap())
        .collect();
    let alias = alias_from_bits(&tb, 5, 4).unwrap();
    assert_eq!(
        alias.to_smtlib(),
        "(bvand tb0 (bvnot tb1) tb2 (bvnot tb3) (bvnot tb4) (bvnot tb5))"
    );
    let zero = alias_from_bits(&tb, 0, 4).unwrap();
    assert_eq!(zero.to_smtlib().matches("bvnot").count(), 6);
}

#[test]
fn declarations_follow_sizing_rules() {
    let n = net(THREE_LOC);
    let enc = encode_network(&n, 5, EncodeOptions::default()).unwrap();
    let names: Vec<&str> = enc.script.declarations().map(|(n, _)| n).collect();
    let count = |p: &str| names.iter().filter(|n| n.starts_with(p)).count();
    assert_eq!(count("tb_0_"), 3);
    assert_eq!(count("edgeRC_"), 1);
    assert_eq!(count("vb_0_"), 2);
    assert_eq!(count("x_x_"), 7);
    assert_eq!(count("delta_"), 6);
    assert_eq!(count("loop"), 1);
    assert_eq!(names.len(), 3 + 1 + 2 + 7 + 6 + 1);
    assert_eq!(enc.script.sort_of("tb_0_0"), Some(Sort::BitVec(7)));
}

#[test]
fn small_bounds_rejected() {
    let n = net(THREE_LOC);
    for k in [0, 1] {
        assert_eq!(
            encode_network(&n, k, EncodeOptions::default()).unwrap_err(),
            EncodeError::BoundTooSmall(k)
        );
    }
}

#[test]
fn encoding_is_deterministic() {
    let n = net(THREE_LOC);
    let a = encode_network(&n, 4, EncodeOptions::default()).unwrap();
    let b = encode_network(&n, 4, EncodeOptions::default()).unwrap();
    assert_eq!(
        emit_smtlib2(&a.script, DEFAULT_LOGIC),
        emit_smtlib2(&b.script, DEFAULT_LOGIC)
    );
}

#[test]
fn guard_variants() {
    let n = net(THREE_LOC);
    let mut s = Script::new();
    let ctx = EncodingContext::new(&n, 3, &mut s).unwrap();
    let gt5 = &n.automata[0].transitions[1].clock_guard;
    let lt2 = &n.automata[0].locations[2].invariant;
    assert_eq!(
        ctx.clock_guard_term(1, gt5, GuardVariant::SigmaDelta)
            .unwrap()
            .to_smtlib(),
        "(> (+ x_x_1 delta_1) 5.0)"
    );
    assert_eq!(
        ctx.clock_guard_term(2, lt2, GuardVariant::SigmaWeak)
            .unwrap()
            .to_smtlib(),
        "(<= x_x_2 2.0)"
    );
    assert!(ctx
        .clock_guard_term(0, &ClockConstraint::top(), GuardVariant::SigmaWeakDelta)
        .unwrap()
        .is_true());
}

#[test]
fn mixed_width_comparison_sign_extends() {
    let n = net("var n : [0, 3]; var m : [-16, 15]; automaton A { location q; trans t: q -> q when n < m; }");
    let mut s = Script::new();
    let ctx = EncodingContext::new(&n, 2, &mut s).unwrap();
    let g = &n.automata[0].transitions[0].var_guard;
    assert_eq!(ctx.hook.var_widths, vec![3, 5]);
    assert_eq!(
        ctx.hook.mu(0, g).unwrap().to_smtlib(),
        "(bvslt ((_ sign_extend 2) var_0_0) var_1_0)"
    );
}

/// Every assignment of the `tb` vectors of one automaton at `k = 2`.
fn tb_models(bits: u32, width: u32) -> impl Iterator<Item = HashMap<String, Value>> {
    let total = bits * width;
    (0u64..1 << total).map(move |mask| {
        (0..bits)
            .map(|j| {
                let v = (mask >> (j * width)) & ((1 << width) - 1);
                (tb_symbol(0, j as usize), bv(width, v))
            })
            .collect()
    })
}

#[test]
fn single_move_automaton_fires_at_most_once() {
    let n = net("automaton A { location q0; location q1; trans t: q0 -> q1; }");
    let mut s = Script::new();
    let ctx = EncodingContext::new(&n, 2, &mut s).unwrap();
    let mut constraints = ctx.targets().unwrap();
    constraints.extend(ctx.well_formed().unwrap());
    constraints.push(ctx.hook.at(0, LocId(0), 0).unwrap());
    let t = ctx.tables[0].declared_id(0);
    let mut models = 0;
    for m in tb_models(2, 4) {
        let lookup = |name: &str| m.get(name).cloned();
        let holds = constraints
            .iter()
            .all(|c| s.eval_with(c, &lookup).unwrap() == Value::Bool(true));
        if !holds {
            continue;
        }
        models += 1;
        let firings = (0..=2)
            .filter(|l| {
                s.eval_with(&ctx.hook.active(0, t, *l).unwrap(), &lookup)
                    .unwrap()
                    == Value::Bool(true)
            })
            .count();
        assert!(firings <= 1);
    }
    assert!(models > 0);
}

#[test]
fn exactly_one_location_per_position() {
    let n = net(
        "automaton A { location a; location b; location c; trans t: a -> b; trans u: b -> c; }",
    );
    let mut s = Script::new();
    let ctx = EncodingContext::new(&n, 2, &mut s).unwrap();
    let wf = ctx.well_formed().unwrap();
    for m in tb_models(ctx.tables[0].id_bits(), 4) {
        let lookup = |name: &str| m.get(name).cloned();
        if !wf
            .iter()
            .all(|c| s.eval_with(c, &lookup).unwrap() == Value::Bool(true))
        {
            continue;
        }
        for l in 0..4 {
            let set = (0..3)
                .filter(|q| {
                    s.eval_with(&ctx.hook.at(0, LocId(*q), l).unwrap(), &lookup)
                        .unwrap()
                        == Value::Bool(true)
                })
                .count();
            assert_eq!(set, 1);
        }
    }
}

#[test]
fn liveness_without_declared_transitions_is_false() {
    let n = net("automaton A { location q; }");
    let mut s = Script::new();
    let ctx = EncodingContext::new(&n, 3, &mut s).unwrap();
    let live = ctx.liveness(Liveness::Strong).unwrap();
    assert_eq!(live.len(), 1);
    assert!(live[0].is_false());
    assert!(ctx.liveness(Liveness::None).unwrap().is_empty());
}

#[test]
fn assignment_uses_target_width_and_range_guard() {
    let n = net("var n : [0, 1]; automaton A { location q; trans t: q -> q do {n := n + 1}; }");
    let mut s = Script::new();
    let ctx = EncodingContext::new(&n, 2, &mut s).unwrap();
    let a = ctx.assignments().unwrap();
    let text = a[0].to_smtlib();
    assert!(text.contains("(= var_0_1 (bvadd var_0_0 #b01))"), "{text}");
    // n = 1 makes n + 1 = 2 leave the range: the implication must fail when
    // the transition is active.
    let lookup = |name: &str| -> Option<Value> {
        match name {
            "tb_0_0" => Some(bv(4, 0b1111)),
            "vb_0_0" => Some(bv(4, 0b0001)),
            "vb_0_1" => Some(bv(4, 0b0000)),
            _ => None,
        }
    };
    assert_eq!(s.eval_with(&a[0], &lookup).unwrap(), Value::Bool(false));
}
