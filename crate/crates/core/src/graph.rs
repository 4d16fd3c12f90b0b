//! Block-level topology queries over a switch state.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::problem::PartitionProblem;

/// Open/closed flag per switch, indexed by switch id.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SwitchState(Vec<bool>);

impl SwitchState {
    pub fn new(closed: Vec<bool>) -> Self {
        Self(closed)
    }

    pub fn all_open(n: usize) -> Self {
        Self(vec![false; n])
    }

    pub fn from_closed(n: usize, closed: &[usize]) -> Self {
        let mut v = vec![false; n];
        for &s in closed {
            v[s] = true;
        }
        Self(v)
    }

    /// Bit `s` of `mask` is the state of switch `s`.
    pub fn from_mask(n: usize, mask: u64) -> Self {
        Self((0..n).map(|s| mask >> s & 1 == 1).collect())
    }

    pub fn mask(&self) -> u64 {
        self.0.iter().enumerate().filter(|(_, &c)| c).fold(0, |m, (s, _)| m | 1 << s)
    }

    pub fn is_closed(&self, s: usize) -> bool {
        self.0[s]
    }

    pub fn set(&mut self, s: usize, closed: bool) {
        self.0[s] = closed;
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn closed(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().filter(|(_, &c)| c).map(|(s, _)| s)
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.0
    }
}

/// One maximal set of blocks linked by closed switches.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Component {
    /// Member blocks, ascending.
    pub blocks: Vec<usize>,
    /// Closed switches with both endpoints inside, ascending.
    pub internal: Vec<usize>,
    /// Open switches touching the component, ascending. Includes open switches
    /// with both endpoints inside.
    pub external: Vec<usize>,
    /// Leader-eligible providers hosted by the member blocks, by leader index.
    pub leaders: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentDecomposition {
    /// Sorted by smallest member block.
    pub components: Vec<Component>,
    component_of: Vec<usize>,
}

impl ComponentDecomposition {
    pub fn component_of(&self, block: usize) -> usize {
        self.component_of[block]
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }
}

/// Fundamental cycles of the closed-switch graph. Each cycle starts with its
/// chord and then follows the tree path back, so consecutive switches share an
/// endpoint.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CycleSet {
    pub cycles: Vec<Vec<usize>>,
}

impl CycleSet {
    pub fn is_empty(&self) -> bool {
        self.cycles.is_empty()
    }

    pub fn len(&self) -> usize {
        self.cycles.len()
    }
}

fn check_state(problem: &PartitionProblem, state: &SwitchState) -> Result<(), Error> {
    if state.len() != problem.num_switches() {
        return Err(Error::StateSize { expected: problem.num_switches(), got: state.len() });
    }
    Ok(())
}

struct DisjointSets {
    parent: Vec<usize>,
}

impl DisjointSets {
    fn new(n: usize) -> Self {
        Self { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        // smaller root wins so the representative is the lowest block
        if ra < rb {
            self.parent[rb] = ra;
        } else {
            self.parent[ra] = rb;
        }
    }
}

pub fn connected_components(problem: &PartitionProblem, state: &SwitchState) -> Result<ComponentDecomposition, Error> {
    check_state(problem, state)?;
    let n = problem.num_blocks();
    let mut sets = DisjointSets::new(n);
    for s in state.closed() {
        let sw = &problem.switches()[s];
        sets.union(sw.from, sw.to);
    }
    let mut component_of = vec![usize::MAX; n];
    let mut components: Vec<Component> = Vec::new();
    for b in 0..n {
        let root = sets.find(b);
        if component_of[root] == usize::MAX {
            component_of[root] = components.len();
            components.push(Component { blocks: Vec::new(), internal: Vec::new(), external: Vec::new(), leaders: Vec::new() });
        }
        component_of[b] = component_of[root];
        components[component_of[b]].blocks.push(b);
    }
    for sw in problem.switches() {
        let (cf, ct) = (component_of[sw.from], component_of[sw.to]);
        if state.is_closed(sw.id) {
            components[cf].internal.push(sw.id);
        } else {
            components[cf].external.push(sw.id);
            if ct != cf {
                components[ct].external.push(sw.id);
            }
        }
    }
    for l in 0..problem.num_leaders() {
        components[component_of[problem.leader_block(l)]].leaders.push(l);
    }
    Ok(ComponentDecomposition { components, component_of })
}

pub fn detect_cycles(problem: &PartitionProblem, state: &SwitchState) -> Result<CycleSet, Error> {
    check_state(problem, state)?;
    let n = problem.num_blocks();
    // parent switch and depth in a BFS forest rooted at the lowest block of each component
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; n];
    let mut depth = vec![usize::MAX; n];
    let mut tree = vec![false; problem.num_switches()];
    for root in 0..n {
        if depth[root] != usize::MAX {
            continue;
        }
        depth[root] = 0;
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            for &s in problem.incident_switches(u) {
                if !state.is_closed(s) {
                    continue;
                }
                let sw = &problem.switches()[s];
                let v = if sw.from == u { sw.to } else { sw.from };
                if depth[v] == usize::MAX {
                    depth[v] = depth[u] + 1;
                    parent[v] = Some((u, s));
                    tree[s] = true;
                    queue.push_back(v);
                }
            }
        }
    }
    let mut cycles = Vec::new();
    for s in state.closed() {
        if tree[s] {
            continue;
        }
        let sw = &problem.switches()[s];
        // walk from `to` and `from` up to their common ancestor
        let (mut a, mut b) = (sw.to, sw.from);
        let mut from_a = Vec::new();
        let mut from_b = Vec::new();
        while a != b {
            if depth[a] >= depth[b] {
                let (p, e) = parent[a].expect("non-root has a parent");
                from_a.push(e);
                a = p;
            } else {
                let (p, e) = parent[b].expect("non-root has a parent");
                from_b.push(e);
                b = p;
            }
        }
        let mut cycle = vec![s];
        cycle.extend(from_a);
        cycle.extend(from_b.into_iter().rev());
        cycles.push(cycle);
    }
    Ok(CycleSet { cycles })
}

/// True iff the closed switches form a forest.
pub fn is_radial(problem: &PartitionProblem, state: &SwitchState) -> Result<bool, Error> {
    Ok(detect_cycles(problem, state)?.is_empty())
}
