//! Hierarchical quantum internet: a router tree with hosts at the leaves,
//! per-edge Bell-pair stores, hop-by-hop teleportation, virtual links by
//! entanglement swapping and a trusted-relay key transport baseline.

use std::collections::{BTreeMap, VecDeque};

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::protocols::teleport_within;
use crate::qsim::NamedState;
use crate::QState;

pub type NodeId = usize;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TopologySpec {
    /// Router levels; level 0 routers serve hosts.
    pub levels: usize,
    /// Children per router, from the root downwards (`levels − 1` entries,
    /// or a single entry used at every level).
    pub fanouts: Vec<usize>,
    pub hosts_per_router: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeKind {
    Router,
    Host,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Node {
    pub id: NodeId,
    pub kind: NodeKind,
    /// Router level; hosts sit at −1.
    pub level: i32,
    pub parent: Option<NodeId>,
    pub children: Vec<NodeId>,
}

/// Every edge carries a classical and a quantum channel.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Edge {
    pub a: NodeId,
    pub b: NodeId,
    pub classical: bool,
    pub quantum: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Topology {
    pub spec: TopologySpec,
    pub nodes: Vec<Node>,
    pub edges: Vec<Edge>,
}

fn edge_key(a: NodeId, b: NodeId) -> (NodeId, NodeId) {
    (a.min(b), a.max(b))
}

/// Builds the tree. Routers get ids in breadth-first order from the root,
/// hosts follow in the order of their level-0 routers.
pub fn build_topology(spec: &TopologySpec) -> Result<Topology> {
    if spec.levels == 0 {
        return Err(Error::domain("at least one router level is required"));
    }
    if spec.hosts_per_router == 0 {
        return Err(Error::domain("hosts_per_router must be positive"));
    }
    let fanout_at = |depth: usize| -> Result<usize> {
        let f = match spec.fanouts.len() {
            1 => spec.fanouts[0],
            n if n == spec.levels - 1 => spec.fanouts[depth],
            n => {
                return Err(Error::domain(format!(
                    "{n} fanouts given for {} levels",
                    spec.levels
                )))
            }
        };
        if f == 0 {
            return Err(Error::domain("fanouts must be positive"));
        }
        Ok(f)
    };
    let mut nodes = vec![Node {
        id: 0,
        kind: NodeKind::Router,
        level: spec.levels as i32 - 1,
        parent: None,
        children: Vec::new(),
    }];
    let mut frontier = vec![0];
    for depth in 0..spec.levels - 1 {
        let f = fanout_at(depth)?;
        let mut next = Vec::with_capacity(frontier.len() * f);
        for &p in &frontier {
            for _ in 0..f {
                let id = nodes.len();
                nodes.push(Node {
                    id,
                    kind: NodeKind::Router,
                    level: nodes[p].level - 1,
                    parent: Some(p),
                    children: Vec::new(),
                });
                nodes[p].children.push(id);
                next.push(id);
            }
        }
        frontier = next;
    }
    for &r in &frontier {
        for _ in 0..spec.hosts_per_router {
            let id = nodes.len();
            nodes.push(Node {
                id,
                kind: NodeKind::Host,
                level: -1,
                parent: Some(r),
                children: Vec::new(),
            });
            nodes[r].children.push(id);
        }
    }
    let edges = nodes
        .iter()
        .filter_map(|n| n.parent.map(|p| Edge { a: p, b: n.id, classical: true, quantum: true }))
        .collect();
    Ok(Topology {
        spec: spec.clone(),
        nodes,
        edges,
    })
}

impl Topology {
    pub fn hosts(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes.iter().filter(|n| n.kind == NodeKind::Host).map(|n| n.id)
    }

    pub fn routers(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes.iter().filter(|n| n.kind == NodeKind::Router).map(|n| n.id)
    }

    pub fn node(&self, id: NodeId) -> Result<&Node> {
        self.nodes
            .get(id)
            .ok_or_else(|| Error::domain(format!("unknown node {id}")))
    }

    fn ancestors(&self, mut id: NodeId) -> Vec<NodeId> {
        let mut out = vec![id];
        while let Some(p) = self.nodes[id].parent {
            out.push(p);
            id = p;
        }
        out
    }

    /// Path up to the lowest common ancestor and back down. Endpoints are
    /// usually hosts but any node may originate or terminate a route.
    pub fn route_path(&self, a: NodeId, b: NodeId) -> Result<Vec<NodeId>> {
        self.node(a)?;
        self.node(b)?;
        if a == b {
            return Err(Error::domain("source and destination coincide"));
        }
        let up_a = self.ancestors(a);
        let up_b = self.ancestors(b);
        let lca = *up_a
            .iter()
            .find(|n| up_b.contains(n))
            .expect("tree has a single root");
        let mut path: Vec<NodeId> = up_a.iter().copied().take_while(|&n| n != lca).collect();
        path.push(lca);
        let down: Vec<NodeId> = up_b.iter().copied().take_while(|&n| n != lca).collect();
        path.extend(down.into_iter().rev());
        Ok(path)
    }
}

/// Ready Bell pairs per edge and established end-to-end pairs per host
/// pair.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct EntanglementStore {
    edge_pairs: BTreeMap<(NodeId, NodeId), usize>,
    /// Site 0 belongs to the first node of the key.
    virtual_pairs: BTreeMap<(NodeId, NodeId), Vec<QState>>,
}

impl EntanglementStore {
    /// `per_edge` pairs on every edge of `topology`.
    pub fn provisioned(topology: &Topology, per_edge: usize) -> Self {
        Self {
            edge_pairs: topology.edges.iter().map(|e| (edge_key(e.a, e.b), per_edge)).collect(),
            virtual_pairs: BTreeMap::new(),
        }
    }

    pub fn pairs_on(&self, a: NodeId, b: NodeId) -> usize {
        self.edge_pairs.get(&edge_key(a, b)).copied().unwrap_or(0)
    }

    pub fn set_pairs(&mut self, a: NodeId, b: NodeId, count: usize) {
        self.edge_pairs.insert(edge_key(a, b), count);
    }

    pub fn total_edge_pairs(&self) -> usize {
        self.edge_pairs.values().sum()
    }

    pub fn virtual_pairs(&self, a: NodeId, b: NodeId) -> usize {
        self.virtual_pairs.get(&(a, b)).map_or(0, Vec::len)
            + self.virtual_pairs.get(&(b, a)).map_or(0, Vec::len)
    }

    fn take_edge_pair(&mut self, a: NodeId, b: NodeId) -> Result<QState> {
        match self.edge_pairs.get_mut(&edge_key(a, b)) {
            Some(n) if *n > 0 => {
                *n -= 1;
                Ok(NamedState::Bell(0, 0).build())
            }
            _ => Err(Error::Exhausted(format!("no Bell pair left on edge {a}-{b}"))),
        }
    }

    /// End-to-end pair with site 0 at `a`.
    fn take_virtual_pair(&mut self, a: NodeId, b: NodeId) -> Result<QState> {
        if let Some(s) = self.virtual_pairs.get_mut(&(a, b)).and_then(Vec::pop) {
            return Ok(s);
        }
        if let Some(s) = self.virtual_pairs.get_mut(&(b, a)).and_then(Vec::pop) {
            return s.reorder_sites(&[1, 0]);
        }
        Err(Error::Exhausted(format!("no virtual link between {a} and {b}")))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ResourceLedger {
    pub epr_consumed: usize,
    pub classical_bits_sent: usize,
    pub teleports: usize,
    /// Nodes that held key material in the clear.
    pub exposure: Vec<NodeId>,
}

impl ResourceLedger {
    fn teleported(&mut self) {
        self.epr_consumed += 1;
        self.classical_bits_sent += 2;
        self.teleports += 1;
    }
}

/// A routed teleport that stopped early; `state` is the qubit as held by
/// `at`, the last node it reached.
#[derive(Clone, Debug, PartialEq, thiserror::Error)]
#[error("routing stopped at node {at}: {error}")]
pub struct RoutingFailure {
    pub error: Error,
    pub at: NodeId,
    pub state: QState,
}

/// Teleports a qubit hop by hop from host `a` to host `b`, consuming one
/// edge pair and two classical bits per hop.
pub fn teleport_route<R: Rng + ?Sized>(
    topology: &Topology,
    store: &mut EntanglementStore,
    psi: &QState,
    a: NodeId,
    b: NodeId,
    ledger: &mut ResourceLedger,
    rng: &mut R,
) -> std::result::Result<QState, RoutingFailure> {
    let fail = |error, at, state: &QState| RoutingFailure { error, at, state: state.clone() };
    if psi.dims() != [2] {
        return Err(fail(Error::domain("only single qubits are routed"), a, psi));
    }
    let path = topology.route_path(a, b).map_err(|e| fail(e, a, psi))?;
    let mut state = psi.clone();
    for hop in path.windows(2) {
        let pair = store
            .take_edge_pair(hop[0], hop[1])
            .map_err(|e| fail(e, hop[0], &state))?;
        state = teleport_within(&state.tensor(&pair), 0, 1, 2, rng)
            .map_err(|e| fail(e, hop[0], &state))?
            .state;
        ledger.teleported();
    }
    Ok(state)
}

/// Establishes a `|β00⟩` pair between hosts `a` and `b` by swapping along
/// the route, left to right. Needs one pair on every edge; nothing is
/// consumed if any edge is empty.
pub fn virtual_link<R: Rng + ?Sized>(
    topology: &Topology,
    store: &mut EntanglementStore,
    a: NodeId,
    b: NodeId,
    ledger: &mut ResourceLedger,
    rng: &mut R,
) -> Result<()> {
    let path = topology.route_path(a, b)?;
    if let Some(hop) = path.windows(2).find(|h| store.pairs_on(h[0], h[1]) == 0) {
        return Err(Error::Exhausted(format!("no Bell pair left on edge {}-{}", hop[0], hop[1])));
    }
    let mut state = store.take_edge_pair(path[0], path[1])?;
    ledger.epr_consumed += 1;
    for hop in path.windows(2).skip(1) {
        let next = store.take_edge_pair(hop[0], hop[1])?;
        // [a, x] ⊗ [x', next]: forward x through the next edge
        state = teleport_within(&state.tensor(&next), 1, 2, 3, rng)?.state;
        ledger.teleported();
    }
    store.virtual_pairs.entry((a, b)).or_default().push(state);
    Ok(())
}

/// Teleports over an established virtual link: one end-to-end pair and two
/// classical bits, whatever the route length.
pub fn teleport_virtual<R: Rng + ?Sized>(
    store: &mut EntanglementStore,
    psi: &QState,
    a: NodeId,
    b: NodeId,
    ledger: &mut ResourceLedger,
    rng: &mut R,
) -> Result<QState> {
    if psi.dims() != [2] {
        return Err(Error::domain("only single qubits are teleported"));
    }
    let pair = store.take_virtual_pair(a, b)?;
    let out = teleport_within(&psi.tensor(&pair), 0, 1, 2, rng)?.state;
    ledger.teleported();
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WireRecord {
    pub from: NodeId,
    pub to: NodeId,
    pub payload: Vec<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RelayTransport {
    pub delivered: Vec<bool>,
    pub wire: Vec<WireRecord>,
    /// Key material held in the clear by each interior relay.
    pub relay_memory: BTreeMap<NodeId, Vec<bool>>,
}

fn xor(a: &[bool], b: &[bool]) -> Vec<bool> {
    a.iter().zip(b).map(|(x, y)| x ^ y).collect()
}

/// Fresh pairwise keys for each hop of `path`.
pub fn random_hop_keys<R: Rng + ?Sized>(hops: usize, len: usize, rng: &mut R) -> Vec<Vec<bool>> {
    (0..hops).map(|_| (0..len).map(|_| rng.random()).collect()).collect()
}

/// One-time-pad forwarding through trusted relays: each hop encrypts with
/// its pairwise key, every interior relay decrypts and re-encrypts.
pub fn trusted_relay_key_transport(
    topology: &Topology,
    key: &[bool],
    a: NodeId,
    b: NodeId,
    hop_keys: &[Vec<bool>],
    ledger: &mut ResourceLedger,
) -> Result<RelayTransport> {
    let path = topology.route_path(a, b)?;
    let hops = path.len() - 1;
    if hop_keys.len() != hops {
        return Err(Error::domain(format!("{} hop keys for {hops} hops", hop_keys.len())));
    }
    if let Some(i) = hop_keys.iter().position(|k| k.len() < key.len()) {
        return Err(Error::domain(format!("hop {i} key shorter than the payload")));
    }
    let mut wire = Vec::with_capacity(hops);
    let mut relay_memory = BTreeMap::new();
    let mut clear = key.to_vec();
    for (i, hop) in path.windows(2).enumerate() {
        let payload = xor(&clear, &hop_keys[i]);
        wire.push(WireRecord { from: hop[0], to: hop[1], payload: payload.clone() });
        ledger.classical_bits_sent += payload.len();
        clear = xor(&payload, &hop_keys[i]);
        if hop[1] != b {
            relay_memory.insert(hop[1], clear.clone());
            ledger.exposure.push(hop[1]);
        }
    }
    Ok(RelayTransport {
        delivered: clear,
        wire,
        relay_memory,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SendMode {
    SendCopies,
    SendProgram,
}

/// Ship `k` prepared states of cost `q` each, or one program of cost `g`
/// that the receiver runs `k` times at cost `r`.
pub fn send_mode_tradeoff(q: f64, k: f64, g: f64, r: f64) -> Result<SendMode> {
    if [q, k, g, r].iter().any(|v| !(*v >= 0.0)) {
        return Err(Error::domain("costs and counts must be nonnegative"));
    }
    Ok(if k * q <= g + k * r { SendMode::SendCopies } else { SendMode::SendProgram })
}

/// Holds delivered output states; each can be handed on once and never
/// copied.
#[derive(Clone, Debug, Default)]
pub struct OutputStore {
    states: BTreeMap<u64, QState>,
}

impl OutputStore {
    pub fn deposit(&mut self, id: u64, state: QState) -> Result<()> {
        if self.states.contains_key(&id) {
            return Err(Error::State(format!("output {id} already stored")));
        }
        self.states.insert(id, state);
        Ok(())
    }

    /// Removes the state for forwarding.
    pub fn take(&mut self, id: u64) -> Result<QState> {
        self.states
            .remove(&id)
            .ok_or_else(|| Error::Lookup { kind: "output", name: id.to_string() })
    }

    /// Always refused: unknown states cannot be cloned.
    pub fn duplicate(&self, id: u64) -> Result<QState> {
        if !self.states.contains_key(&id) {
            return Err(Error::Lookup { kind: "output", name: id.to_string() });
        }
        Err(Error::Precondition(format!("output {id} cannot be duplicated (no-cloning)")))
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

/// Tree distance by breadth-first search over the edges.
pub fn bfs_distance(topology: &Topology, a: NodeId, b: NodeId) -> Option<usize> {
    let mut adj = vec![Vec::new(); topology.nodes.len()];
    for e in &topology.edges {
        adj[e.a].push(e.b);
        adj[e.b].push(e.a);
    }
    let mut dist = vec![usize::MAX; adj.len()];
    let mut queue = VecDeque::from([a]);
    dist[a] = 0;
    while let Some(u) = queue.pop_front() {
        for &v in &adj[u] {
            if dist[v] == usize::MAX {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    (dist[b] != usize::MAX).then_some(dist[b])
}
