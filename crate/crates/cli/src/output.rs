//! Text renderings of solver results.
//!
//! All numbers are written with `.` as the decimal point and without digit
//! grouping. Floats use the shortest representation that reads back to the
//! same value. Every file ends with a newline.
//!
//! `values.tsv`: `epoch  state  budget  value`
//! `policy.tsv` (aggregate): `epoch  state  budget  pay_ns  pay_s`
//! `policy.tsv` (vector): `epoch  state  budget  pay_ns  pay_s  pay`
//! `table.tsv`: `initial_state  payments_to_ns  payments_to_s`
//! `reward_curve.csv`: `initial_state,expected_reward_at_T`
//!
//! Vector states and payment vectors are bit strings with agent 0 first.

use std::fmt::Write;

use voterbudget::{AggregateAction, AllocationRow, Policy, ValueTable, VectorAction, VectorState};

pub fn values_tsv(values: &ValueTable, label: impl Fn(usize) -> String) -> String {
    let mut out = String::from("epoch\tstate\tbudget\tvalue\n");
    for (t, s, b, v) in values.iter() {
        writeln!(out, "{t}\t{}\t{b}\t{v}", label(s)).unwrap();
    }
    out
}

pub fn aggregate_policy_tsv(policy: &Policy<AggregateAction>) -> String {
    let mut out = String::from("epoch\tstate\tbudget\tpay_ns\tpay_s\n");
    for (t, s, b, a) in policy.iter() {
        writeln!(out, "{t}\t{s}\t{b}\t{}\t{}", a.ell, a.k).unwrap();
    }
    out
}

pub fn vector_policy_tsv(policy: &Policy<VectorAction>, n: usize) -> String {
    let mut out = String::from("epoch\tstate\tbudget\tpay_ns\tpay_s\tpay\n");
    for (t, bits, b, a) in policy.iter() {
        let state = VectorState::new(n, bits as u64).expect("index within 2^n");
        let split = a.split(&state);
        writeln!(out, "{t}\t{state}\t{b}\t{}\t{}\t{a}", split.ell, split.k).unwrap();
    }
    out
}

pub fn allocation_tsv(rows: &[AllocationRow]) -> String {
    let mut out = String::from("initial_state\tpayments_to_ns\tpayments_to_s\n");
    for r in rows {
        writeln!(out, "{}\t{}\t{}", r.state, r.pay_ns, r.pay_s).unwrap();
    }
    out
}

pub fn vector_allocation_tsv(rows: &[(VectorState, VectorAction)]) -> String {
    let mut out = String::from("initial_state\tpayments_to_ns\tpayments_to_s\tpay\n");
    for (state, act) in rows {
        let split = act.split(state);
        writeln!(out, "{state}\t{}\t{}\t{act}", split.ell, split.k).unwrap();
    }
    out
}

pub fn reward_curve_csv(curve: &[(usize, f64)]) -> String {
    let mut out = String::from("initial_state,expected_reward_at_T\n");
    for (s, r) in curve {
        writeln!(out, "{s},{r}").unwrap();
    }
    out
}
