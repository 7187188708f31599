//! Property tests for the dependency-graph algebra.
//!
//! The root-cause oracle here is deliberately independent of the library
//! implementation: it works on the raw edge list with a per-node DFS and
//! never touches the SCC machinery.

use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;

use hcs_core::{worst_status, DependencyGraph, HealthStatus, ServiceDescriptor};

fn ids(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("svc{i:02}")).collect()
}

fn make_graph(n: usize, edges: &[(usize, usize)]) -> DependencyGraph {
    let services = ids(n)
        .into_iter()
        .map(|id| ServiceDescriptor::new(id, "127.0.0.1:0"))
        .collect();
    let named: Vec<(String, String)> = edges
        .iter()
        .map(|&(a, b)| (format!("svc{a:02}"), format!("svc{b:02}")))
        .collect();
    DependencyGraph::build(services, &named).unwrap()
}

/// All nodes reachable from `start` along requires-edges, excluding `start`
/// unless a cycle leads back to it.
fn reachable(n: usize, edges: &[(usize, usize)], start: usize) -> BTreeSet<usize> {
    let mut out = BTreeSet::new();
    let mut stack: Vec<usize> = edges
        .iter()
        .filter(|&&(a, _)| a == start)
        .map(|&(_, b)| b)
        .collect();
    while let Some(node) = stack.pop() {
        if out.insert(node) {
            for &(a, b) in edges {
                if a == node && !out.contains(&b) {
                    stack.push(b);
                }
            }
        }
    }
    let _ = n;
    out
}

/// Brute-force root set on a DAG: a failing node with no failing node
/// reachable along requires-edges.
fn oracle_roots(
    n: usize,
    edges: &[(usize, usize)],
    statuses: &[HealthStatus],
) -> BTreeSet<usize> {
    (0..n)
        .filter(|&node| statuses[node].is_failing())
        .filter(|&node| {
            !reachable(n, edges, node)
                .iter()
                .any(|&below| below != node && statuses[below].is_failing())
        })
        .collect()
}

fn status_map(statuses: &[HealthStatus]) -> BTreeMap<String, HealthStatus> {
    statuses
        .iter()
        .enumerate()
        .map(|(i, s)| (format!("svc{i:02}"), *s))
        .collect()
}

fn any_status() -> impl Strategy<Value = HealthStatus> {
    prop_oneof![
        Just(HealthStatus::Healthy),
        Just(HealthStatus::Unknown),
        Just(HealthStatus::Degraded),
        Just(HealthStatus::Down),
    ]
}

/// Arbitrary digraph (cycles allowed) on up to `max_n` nodes.
fn arb_graph(max_n: usize) -> impl Strategy<Value = (usize, Vec<(usize, usize)>)> {
    (1..=max_n).prop_flat_map(|n| {
        if n == 1 {
            return (Just(n), Just(Vec::new())).boxed();
        }
        // b = (a + offset) % n with offset in 1..n can never equal a.
        let edge = (0..n, 1..n).prop_map(move |(a, off)| (a, (a + off) % n));
        (Just(n), proptest::collection::vec(edge, 0..=n * 2)).boxed()
    })
}

/// Arbitrary DAG: edges only from higher to lower index, so requires-edges
/// always point "down" and the graph is acyclic by construction.
fn arb_dag(max_n: usize) -> impl Strategy<Value = (usize, Vec<(usize, usize)>)> {
    (2..=max_n).prop_flat_map(|n| {
        let edge = (1..n, 0..n)
            .prop_map(|(a, b)| (a, b % a))
            .prop_filter("down edges", |(a, b)| a != b);
        (Just(n), proptest::collection::vec(edge, 0..=n * 2))
    })
}

proptest! {
    /// roots/propagated/healthy/unknown partition the node set.
    #[test]
    fn classification_partitions_the_nodes(
        (n, edges) in arb_graph(12),
        raw in proptest::collection::vec(any_status(), 12),
    ) {
        let g = make_graph(n, &edges);
        let statuses: Vec<HealthStatus> = raw[..n].to_vec();
        let report = g.classify_failures(&status_map(&statuses));

        let mut seen = BTreeSet::new();
        for set in [&report.roots, &report.propagated, &report.healthy, &report.unknown] {
            for id in set {
                prop_assert!(seen.insert(id.clone()), "{id} appears twice");
            }
        }
        prop_assert_eq!(seen.len(), n);

        let failing: BTreeSet<String> = statuses
            .iter()
            .enumerate()
            .filter(|(_, s)| s.is_failing())
            .map(|(i, _)| format!("svc{i:02}"))
            .collect();
        let union: BTreeSet<String> = report.failing().cloned().collect();
        prop_assert_eq!(union, failing);
    }

    /// On DAGs the implementation matches the brute-force definition.
    #[test]
    fn dag_roots_match_the_oracle(
        (n, edges) in arb_dag(8),
        raw in proptest::collection::vec(any_status(), 8),
    ) {
        let g = make_graph(n, &edges);
        let statuses: Vec<HealthStatus> = raw[..n].to_vec();
        let report = g.classify_failures(&status_map(&statuses));

        let want: BTreeSet<String> = oracle_roots(n, &edges, &statuses)
            .into_iter()
            .map(|i| format!("svc{i:02}"))
            .collect();
        prop_assert_eq!(report.roots, want);
    }

    /// Flipping one Healthy service to Down never removes a service from
    /// roots ∪ propagated.
    #[test]
    fn failing_set_is_monotone(
        (n, edges) in arb_graph(12),
        raw in proptest::collection::vec(any_status(), 12),
        pick in 0usize..12,
    ) {
        let g = make_graph(n, &edges);
        let mut statuses: Vec<HealthStatus> = raw[..n].to_vec();
        let victim = pick % n;
        statuses[victim] = HealthStatus::Healthy;
        let before: BTreeSet<String> = g
            .classify_failures(&status_map(&statuses))
            .failing()
            .cloned()
            .collect();

        statuses[victim] = HealthStatus::Down;
        let after: BTreeSet<String> = g
            .classify_failures(&status_map(&statuses))
            .failing()
            .cloned()
            .collect();
        prop_assert!(after.is_superset(&before));
    }

    /// impacted_by never contains the root, and membership is exactly
    /// reverse reachability.
    #[test]
    fn impact_is_reverse_reachability(
        (n, edges) in arb_graph(10),
        pick in 0usize..10,
    ) {
        let root = pick % n;
        let root_id = format!("svc{root:02}");
        let g = make_graph(n, &edges);
        let impacted = g.impacted_by(&root_id).unwrap();
        prop_assert!(!impacted.contains(&root_id));

        for other in 0..n {
            if other == root {
                continue;
            }
            let requires_root = reachable(n, &edges, other).contains(&root);
            let in_impact = impacted.contains(&format!("svc{other:02}"));
            prop_assert_eq!(in_impact, requires_root, "node {}", other);
        }
    }

    /// worst_status is a semilattice join: associative, commutative,
    /// idempotent.
    #[test]
    fn worst_status_is_a_join(a in any_status(), b in any_status(), c in any_status()) {
        let w2 = |x, y| worst_status([x, y]).unwrap();
        prop_assert_eq!(w2(a, b), w2(b, a));
        prop_assert_eq!(w2(a, a), a);
        prop_assert_eq!(w2(w2(a, b), c), w2(a, w2(b, c)));
    }

    /// SCC membership agrees with mutual reachability on the raw edges.
    #[test]
    fn scc_matches_mutual_reachability(
        (n, edges) in arb_graph(8),
        pick in 0usize..8,
    ) {
        let node = pick % n;
        let g = make_graph(n, &edges);
        let members: BTreeSet<String> = g
            .scc_members_of(&format!("svc{node:02}"))
            .unwrap()
            .into_iter()
            .map(str::to_string)
            .collect();

        for other in 0..n {
            let forward = other == node || reachable(n, &edges, node).contains(&other);
            let backward = other == node || reachable(n, &edges, other).contains(&node);
            let same_scc = members.contains(&format!("svc{other:02}"));
            prop_assert_eq!(same_scc, forward && backward, "node {}", other);
        }
    }
}
