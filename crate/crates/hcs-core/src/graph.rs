use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::{validate_service_id, CoreError, HealthStatus, ServiceDescriptor};

/// Service dependency graph: nodes are service ids, an edge (X, Y) means
/// "X requires Y". Built once and immutable afterwards; the strongly
/// connected component condensation is computed at build time so that
/// classification stays well-defined on cyclic input.
#[derive(Debug, Clone)]
pub struct DependencyGraph {
    ids: Vec<String>,
    index: HashMap<String, usize>,
    descriptors: BTreeMap<String, ServiceDescriptor>,
    /// Forward adjacency: node -> services it requires.
    requires: Vec<Vec<usize>>,
    /// Reverse adjacency: node -> services that require it.
    required_by: Vec<Vec<usize>>,
    edges: BTreeSet<(usize, usize)>,
    /// Node index -> component index.
    scc_of: Vec<usize>,
    /// Component index -> member node indexes.
    scc_members: Vec<Vec<usize>>,
    /// Condensation adjacency along "requires" edges, deduplicated.
    scc_requires: Vec<Vec<usize>>,
}

/// Outcome of one root-cause classification pass. The four sets partition
/// the node set; `roots` and `propagated` together are exactly the failing
/// (Degraded or Down) services.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootCauseReport {
    pub roots: BTreeSet<String>,
    pub propagated: BTreeSet<String>,
    pub healthy: BTreeSet<String>,
    pub unknown: BTreeSet<String>,
}

impl RootCauseReport {
    pub fn failing(&self) -> impl Iterator<Item = &String> {
        self.roots.iter().chain(self.propagated.iter())
    }
}

impl DependencyGraph {
    /// Validate and build a graph from declared services and requires-edges.
    ///
    /// Duplicate edges collapse silently; duplicate service ids, edges to
    /// undeclared services and self-dependencies are rejected.
    pub fn build(
        services: Vec<ServiceDescriptor>,
        edges: &[(String, String)],
    ) -> Result<Self, CoreError> {
        let mut ids: Vec<String> = Vec::with_capacity(services.len());
        let mut descriptors = BTreeMap::new();
        for svc in services {
            validate_service_id(&svc.id)?;
            if descriptors.contains_key(&svc.id) {
                return Err(CoreError::DuplicateServiceId(svc.id));
            }
            ids.push(svc.id.clone());
            descriptors.insert(svc.id.clone(), svc);
        }
        ids.sort();
        let index: HashMap<String, usize> =
            ids.iter().enumerate().map(|(i, id)| (id.clone(), i)).collect();

        let mut edge_set = BTreeSet::new();
        for (dependent, dependency) in edges {
            let from = *index
                .get(dependent)
                .ok_or_else(|| CoreError::UnknownService(dependent.clone()))?;
            let to = *index
                .get(dependency)
                .ok_or_else(|| CoreError::UnknownService(dependency.clone()))?;
            if from == to {
                return Err(CoreError::SelfDependency(dependent.clone()));
            }
            edge_set.insert((from, to));
        }

        let n = ids.len();
        let mut requires = vec![Vec::new(); n];
        let mut required_by = vec![Vec::new(); n];
        for &(from, to) in &edge_set {
            requires[from].push(to);
            required_by[to].push(from);
        }

        let (scc_of, scc_members) = tarjan_sccs(n, &requires);
        let scc_count = scc_members.len();
        let mut scc_edge_set = BTreeSet::new();
        for &(from, to) in &edge_set {
            let (a, b) = (scc_of[from], scc_of[to]);
            if a != b {
                scc_edge_set.insert((a, b));
            }
        }
        let mut scc_requires = vec![Vec::new(); scc_count];
        for (a, b) in scc_edge_set {
            scc_requires[a].push(b);
        }

        Ok(DependencyGraph {
            ids,
            index,
            descriptors,
            requires,
            required_by,
            edges: edge_set,
            scc_of,
            scc_members,
            scc_requires,
        })
    }

    pub fn node_count(&self) -> usize {
        self.ids.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn scc_count(&self) -> usize {
        self.scc_members.len()
    }

    pub fn contains(&self, id: &str) -> bool {
        self.index.contains_key(id)
    }

    /// Node ids in lexicographic order.
    pub fn node_ids(&self) -> impl Iterator<Item = &str> {
        self.ids.iter().map(String::as_str)
    }

    pub fn descriptor(&self, id: &str) -> Option<&ServiceDescriptor> {
        self.descriptors.get(id)
    }

    pub fn descriptors(&self) -> impl Iterator<Item = &ServiceDescriptor> {
        self.descriptors.values()
    }

    /// Requires-edges as (dependent, dependency) id pairs, sorted.
    pub fn edge_ids(&self) -> impl Iterator<Item = (&str, &str)> {
        self.edges
            .iter()
            .map(|&(a, b)| (self.ids[a].as_str(), self.ids[b].as_str()))
    }

    /// Member ids of the SCC containing `id`.
    pub fn scc_members_of(&self, id: &str) -> Result<Vec<&str>, CoreError> {
        let &node = self
            .index
            .get(id)
            .ok_or_else(|| CoreError::UnknownService(id.to_string()))?;
        Ok(self.scc_members[self.scc_of[node]]
            .iter()
            .map(|&m| self.ids[m].as_str())
            .collect())
    }

    /// Classify failing services into roots and propagated failures.
    ///
    /// Services missing from `statuses` count as Unknown. A failing service
    /// is a root iff no SCC transitively reachable from its own SCC along
    /// requires-edges contains a failing service; Unknown dependencies do
    /// not absolve a failure into "propagated".
    pub fn classify_failures(&self, statuses: &BTreeMap<String, HealthStatus>) -> RootCauseReport {
        let n = self.ids.len();
        let status_of: Vec<HealthStatus> = (0..n)
            .map(|i| {
                statuses
                    .get(&self.ids[i])
                    .copied()
                    .unwrap_or(HealthStatus::Unknown)
            })
            .collect();

        let scc_count = self.scc_members.len();
        let mut scc_failing = vec![false; scc_count];
        for (node, status) in status_of.iter().enumerate() {
            if status.is_failing() {
                scc_failing[self.scc_of[node]] = true;
            }
        }

        // reach_failing[c]: some SCC strictly below c contains a failing service.
        let mut reach_failing = vec![None::<bool>; scc_count];
        for c in 0..scc_count {
            self.resolve_reach_failing(c, &scc_failing, &mut reach_failing);
        }

        let mut report = RootCauseReport {
            roots: BTreeSet::new(),
            propagated: BTreeSet::new(),
            healthy: BTreeSet::new(),
            unknown: BTreeSet::new(),
        };
        for (node, status) in status_of.iter().enumerate() {
            let id = self.ids[node].clone();
            match status {
                HealthStatus::Healthy => {
                    report.healthy.insert(id);
                }
                HealthStatus::Unknown => {
                    report.unknown.insert(id);
                }
                HealthStatus::Degraded | HealthStatus::Down => {
                    if reach_failing[self.scc_of[node]] == Some(true) {
                        report.propagated.insert(id);
                    } else {
                        report.roots.insert(id);
                    }
                }
            }
        }
        report
    }

    fn resolve_reach_failing(
        &self,
        start: usize,
        scc_failing: &[bool],
        memo: &mut Vec<Option<bool>>,
    ) {
        if memo[start].is_some() {
            return;
        }
        // Iterative post-order over the condensation DAG.
        let mut stack = vec![(start, 0usize)];
        while let Some(&mut (c, ref mut next)) = stack.last_mut() {
            if memo[c].is_some() {
                stack.pop();
                continue;
            }
            if *next < self.scc_requires[c].len() {
                let dep = self.scc_requires[c][*next];
                *next += 1;
                if memo[dep].is_none() {
                    stack.push((dep, 0));
                }
            } else {
                let any = self.scc_requires[c]
                    .iter()
                    .any(|&dep| scc_failing[dep] || memo[dep] == Some(true));
                memo[c] = Some(any);
                stack.pop();
            }
        }
    }

    /// Services that transitively require `root`, excluding `root` itself.
    pub fn impacted_by(&self, root: &str) -> Result<BTreeSet<String>, CoreError> {
        let &start = self
            .index
            .get(root)
            .ok_or_else(|| CoreError::UnknownService(root.to_string()))?;
        let mut seen = vec![false; self.ids.len()];
        let mut stack = vec![start];
        let mut out = BTreeSet::new();
        while let Some(node) = stack.pop() {
            for &dependent in &self.required_by[node] {
                if !seen[dependent] {
                    seen[dependent] = true;
                    stack.push(dependent);
                    if dependent != start {
                        out.insert(self.ids[dependent].clone());
                    }
                }
            }
        }
        out.remove(root);
        Ok(out)
    }

    /// Transitive dependencies of `id` along requires-edges, excluding `id`.
    pub fn transitive_dependencies(&self, id: &str) -> Result<BTreeSet<String>, CoreError> {
        let &start = self
            .index
            .get(id)
            .ok_or_else(|| CoreError::UnknownService(id.to_string()))?;
        let mut seen = vec![false; self.ids.len()];
        let mut stack = vec![start];
        let mut out = BTreeSet::new();
        while let Some(node) = stack.pop() {
            for &dep in &self.requires[node] {
                if !seen[dep] {
                    seen[dep] = true;
                    stack.push(dep);
                    if dep != start {
                        out.insert(self.ids[dep].clone());
                    }
                }
            }
        }
        out.remove(id);
        Ok(out)
    }
}

/// Iterative Tarjan. Returns (component index per node, members per
/// component). Component indexes follow discovery order; only membership
/// matters to callers.
fn tarjan_sccs(n: usize, adj: &[Vec<usize>]) -> (Vec<usize>, Vec<Vec<usize>>) {
    const UNSET: usize = usize::MAX;
    let mut index = vec![UNSET; n];
    let mut lowlink = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut next_index = 0usize;
    let mut scc_of = vec![UNSET; n];
    let mut members: Vec<Vec<usize>> = Vec::new();

    // call stack frames: (node, next child position)
    let mut frames: Vec<(usize, usize)> = Vec::new();
    for root in 0..n {
        if index[root] != UNSET {
            continue;
        }
        frames.push((root, 0));
        index[root] = next_index;
        lowlink[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(&mut (v, ref mut child)) = frames.last_mut() {
            if *child < adj[v].len() {
                let w = adj[v][*child];
                *child += 1;
                if index[w] == UNSET {
                    index[w] = next_index;
                    lowlink[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    frames.push((w, 0));
                } else if on_stack[w] {
                    lowlink[v] = lowlink[v].min(index[w]);
                }
            } else {
                if lowlink[v] == index[v] {
                    let scc_id = members.len();
                    let mut group = Vec::new();
                    loop {
                        let w = stack.pop().expect("tarjan stack underflow");
                        on_stack[w] = false;
                        scc_of[w] = scc_id;
                        group.push(w);
                        if w == v {
                            break;
                        }
                    }
                    group.sort_unstable();
                    members.push(group);
                }
                frames.pop();
                if let Some(&mut (parent, _)) = frames.last_mut() {
                    lowlink[parent] = lowlink[parent].min(lowlink[v]);
                }
            }
        }
    }
    (scc_of, members)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn svc(id: &str) -> ServiceDescriptor {
        ServiceDescriptor::new(id, format!("127.0.0.1:0"))
    }

    fn edges(pairs: &[(&str, &str)]) -> Vec<(String, String)> {
        pairs
            .iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect()
    }

    fn graph(ids: &[&str], pairs: &[(&str, &str)]) -> DependencyGraph {
        DependencyGraph::build(ids.iter().map(|id| svc(id)).collect(), &edges(pairs)).unwrap()
    }

    fn statuses(pairs: &[(&str, HealthStatus)]) -> BTreeMap<String, HealthStatus> {
        pairs.iter().map(|(id, s)| (id.to_string(), *s)).collect()
    }

    #[test]
    fn chain_builds_with_singleton_sccs() {
        let g = graph(&["A", "B", "C"], &[("C", "B"), ("B", "A")]);
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.scc_count(), 3);
    }

    #[test]
    fn single_node_no_edges() {
        let g = graph(&["A"], &[]);
        assert_eq!(g.node_count(), 1);
        assert_eq!(g.edge_count(), 0);
        assert_eq!(g.scc_count(), 1);
    }

    #[test]
    fn two_cycle_forms_one_scc() {
        let g = graph(&["A", "B"], &[("A", "B"), ("B", "A")]);
        assert_eq!(g.scc_count(), 1);
        let mut members = g.scc_members_of("A").unwrap();
        members.sort();
        assert_eq!(members, vec!["A", "B"]);
    }

    #[test]
    fn duplicate_edges_collapse() {
        let g = graph(&["A", "B"], &[("B", "A"), ("B", "A")]);
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn build_rejections() {
        let err = DependencyGraph::build(vec![svc("A"), svc("A")], &[]).unwrap_err();
        assert_eq!(err, CoreError::DuplicateServiceId("A".into()));

        let err = DependencyGraph::build(vec![svc("A")], &edges(&[("A", "B")])).unwrap_err();
        assert_eq!(err, CoreError::UnknownService("B".into()));

        let err = DependencyGraph::build(vec![svc("A")], &edges(&[("A", "A")])).unwrap_err();
        assert_eq!(err, CoreError::SelfDependency("A".into()));

        let err = DependencyGraph::build(vec![svc("no spaces")], &[]).unwrap_err();
        assert_eq!(err, CoreError::InvalidServiceId("no spaces".into()));
    }

    #[test]
    fn chain_failure_blames_the_bottom() {
        let g = graph(&["A", "B", "C"], &[("C", "B"), ("B", "A")]);
        let report = g.classify_failures(&statuses(&[
            ("A", HealthStatus::Down),
            ("B", HealthStatus::Down),
            ("C", HealthStatus::Down),
        ]));
        assert_eq!(report.roots, ["A".to_string()].into());
        assert_eq!(
            report.propagated,
            ["B".to_string(), "C".to_string()].into()
        );
    }

    #[test]
    fn all_healthy_means_no_failures() {
        let g = graph(&["A", "B", "C"], &[("C", "B"), ("B", "A")]);
        let report = g.classify_failures(&statuses(&[
            ("A", HealthStatus::Healthy),
            ("B", HealthStatus::Healthy),
            ("C", HealthStatus::Healthy),
        ]));
        assert!(report.roots.is_empty());
        assert!(report.propagated.is_empty());
        assert_eq!(report.healthy.len(), 3);
    }

    #[test]
    fn diamond_with_healthy_base_has_two_roots() {
        let g = graph(
            &["A", "B", "C", "D"],
            &[("D", "B"), ("D", "C"), ("B", "A"), ("C", "A")],
        );
        let report = g.classify_failures(&statuses(&[
            ("A", HealthStatus::Healthy),
            ("B", HealthStatus::Down),
            ("C", HealthStatus::Down),
            ("D", HealthStatus::Down),
        ]));
        assert_eq!(report.roots, ["B".to_string(), "C".to_string()].into());
        assert_eq!(report.propagated, ["D".to_string()].into());
    }

    #[test]
    fn unknown_dependency_does_not_absolve() {
        let g = graph(&["A", "B"], &[("B", "A")]);
        let report = g.classify_failures(&statuses(&[
            ("A", HealthStatus::Unknown),
            ("B", HealthStatus::Down),
        ]));
        assert_eq!(report.roots, ["B".to_string()].into());
        assert_eq!(report.unknown, ["A".to_string()].into());
    }

    #[test]
    fn missing_status_counts_as_unknown() {
        let g = graph(&["A", "B"], &[("B", "A")]);
        let report = g.classify_failures(&statuses(&[("B", HealthStatus::Down)]));
        assert_eq!(report.unknown, ["A".to_string()].into());
        assert_eq!(report.roots, ["B".to_string()].into());
    }

    #[test]
    fn failing_cycle_members_are_all_roots() {
        let g = graph(&["A", "B", "C"], &[("A", "B"), ("B", "A"), ("C", "A")]);
        let report = g.classify_failures(&statuses(&[
            ("A", HealthStatus::Down),
            ("B", HealthStatus::Down),
            ("C", HealthStatus::Down),
        ]));
        assert_eq!(report.roots, ["A".to_string(), "B".to_string()].into());
        assert_eq!(report.propagated, ["C".to_string()].into());
    }

    #[test]
    fn impacted_by_chain() {
        let g = graph(&["A", "B", "C"], &[("C", "B"), ("B", "A")]);
        assert_eq!(
            g.impacted_by("A").unwrap(),
            ["B".to_string(), "C".to_string()].into()
        );
        assert_eq!(g.impacted_by("C").unwrap(), BTreeSet::new());
    }

    #[test]
    fn impacted_by_diamond() {
        let g = graph(
            &["A", "B", "C", "D"],
            &[("D", "B"), ("D", "C"), ("B", "A"), ("C", "A")],
        );
        assert_eq!(
            g.impacted_by("A").unwrap(),
            ["B".to_string(), "C".to_string(), "D".to_string()].into()
        );
    }

    #[test]
    fn impacted_by_unknown_service() {
        let g = graph(&["A"], &[]);
        assert_eq!(
            g.impacted_by("Z").unwrap_err(),
            CoreError::UnknownService("Z".into())
        );
    }

    #[test]
    fn transitive_dependencies_walk_down() {
        let g = graph(&["A", "B", "C"], &[("C", "B"), ("B", "A")]);
        assert_eq!(
            g.transitive_dependencies("C").unwrap(),
            ["A".to_string(), "B".to_string()].into()
        );
        assert_eq!(g.transitive_dependencies("A").unwrap(), BTreeSet::new());
    }
}
