use proptest::prelude::*;

use qnetsim::netsim::{
    bfs_distance, build_topology, random_hop_keys, send_mode_tradeoff, teleport_route,
    teleport_virtual, trusted_relay_key_transport, virtual_link, EntanglementStore, OutputStore,
    ResourceLedger, SendMode, TopologySpec,
};
use qnetsim::protocols::{teleport, teleport_within};
use qnetsim::qsim::NamedState;
use qnetsim::rng::seeded;
use qnetsim::{Error, QState};

fn spec(levels: usize, fanout: usize, hosts: usize) -> TopologySpec {
    TopologySpec { levels, fanouts: vec![fanout], hosts_per_router: hosts }
}

fn bell00() -> QState {
    NamedState::Bell(0, 0).build()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn routes_are_shortest(levels in 1usize..4, fanouts in prop::collection::vec(1usize..4, 3), hosts in 1usize..4, a in any::<usize>(), b in any::<usize>()) {
        let t = build_topology(&TopologySpec { levels, fanouts: fanouts[..levels - 1].to_vec(), hosts_per_router: hosts }).unwrap();
        let ids: Vec<usize> = t.hosts().collect();
        let (a, b) = (ids[a % ids.len()], ids[b % ids.len()]);
        prop_assume!(a != b);
        let path = t.route_path(a, b).unwrap();
        prop_assert_eq!(Some(path.len() - 1), bfs_distance(&t, a, b));
        // up to the common ancestor, then down
        let levels: Vec<i32> = path.iter().map(|&n| t.nodes[n].level).collect();
        let top = levels.iter().position(|l| l == levels.iter().max().unwrap()).unwrap();
        prop_assert!(levels[..=top].windows(2).all(|w| w[0] < w[1]));
        prop_assert!(levels[top..].windows(2).all(|w| w[0] > w[1]));
    }

    #[test]
    fn routed_teleport_conserves_pairs(seed in any::<u64>(), a in any::<usize>(), b in any::<usize>()) {
        let t = build_topology(&spec(3, 2, 2)).unwrap();
        let ids: Vec<usize> = t.hosts().collect();
        let (a, b) = (ids[a % ids.len()], ids[b % ids.len()]);
        prop_assume!(a != b);
        let mut rng = seeded(seed);
        let mut store = EntanglementStore::provisioned(&t, 3);
        let before = store.total_edge_pairs();
        let mut ledger = ResourceLedger::default();
        let psi = QState::random(&[2], &mut rng).unwrap();
        let out = teleport_route(&t, &mut store, &psi, a, b, &mut ledger, &mut rng).unwrap();
        let h = t.route_path(a, b).unwrap().len() - 1;
        prop_assert!((out.fidelity(&psi).unwrap() - 1.0).abs() < 1e-9);
        prop_assert_eq!((ledger.epr_consumed, ledger.classical_bits_sent, ledger.teleports), (h, 2 * h, h));
        prop_assert_eq!(before - store.total_edge_pairs(), ledger.teleports);
    }

    #[test]
    fn virtual_links_are_bell_pairs(seed in any::<u64>(), a in any::<usize>(), b in any::<usize>()) {
        let t = build_topology(&spec(3, 2, 2)).unwrap();
        let ids: Vec<usize> = t.hosts().collect();
        let (a, b) = (ids[a % ids.len()], ids[b % ids.len()]);
        prop_assume!(a != b);
        let mut rng = seeded(seed);
        let mut store = EntanglementStore::provisioned(&t, 1);
        let mut ledger = ResourceLedger::default();
        virtual_link(&t, &mut store, a, b, &mut ledger, &mut rng).unwrap();
        let h = t.route_path(a, b).unwrap().len() - 1;
        prop_assert_eq!((ledger.epr_consumed, ledger.classical_bits_sent), (h, 2 * (h - 1)));
        prop_assert_eq!(store.virtual_pairs(a, b), 1);
        // teleporting in the reverse direction uses the same link
        let psi = QState::random(&[2], &mut rng).unwrap();
        let out = teleport_virtual(&mut store, &psi, b, a, &mut ledger, &mut rng).unwrap();
        prop_assert!((out.fidelity(&psi).unwrap() - 1.0).abs() < 1e-9);
        prop_assert_eq!((ledger.epr_consumed, ledger.classical_bits_sent), (h + 1, 2 * h));
        prop_assert!(teleport_virtual(&mut store, &psi, a, b, &mut ledger, &mut rng).is_err());
    }
}

#[test]
fn three_hop_teleport() {
    let t = build_topology(&spec(2, 2, 2)).unwrap();
    let (host, router) = (t.hosts().next().unwrap(), 2);
    assert_eq!(t.route_path(host, router).unwrap().len(), 4);
    let mut rng = seeded(1);
    let mut store = EntanglementStore::provisioned(&t, 1);
    let mut ledger = ResourceLedger::default();
    let psi = QState::random(&[2], &mut rng).unwrap();
    let out = teleport_route(&t, &mut store, &psi, host, router, &mut ledger, &mut rng).unwrap();
    assert!((out.fidelity(&psi).unwrap() - 1.0).abs() < 1e-9);
    assert_eq!((ledger.epr_consumed, ledger.classical_bits_sent), (3, 6));
}

#[test]
fn one_hop_is_plain_teleportation() {
    let t = build_topology(&spec(1, 1, 2)).unwrap();
    let host = t.hosts().next().unwrap();
    let psi = QState::random(&[2], &mut seeded(2)).unwrap();
    let mut store = EntanglementStore::provisioned(&t, 1);
    let mut ledger = ResourceLedger::default();
    let routed = teleport_route(&t, &mut store, &psi, host, 0, &mut ledger, &mut seeded(5)).unwrap();
    let direct = teleport(&psi, &bell00(), &mut seeded(5)).unwrap();
    assert!(routed.same_ray(&direct.state));
    assert_eq!(ledger.teleports, 1);
}

#[test]
fn exhausted_hop_stops_with_the_state() {
    let t = build_topology(&spec(2, 2, 1)).unwrap();
    let hosts: Vec<usize> = t.hosts().collect();
    let mut store = EntanglementStore::provisioned(&t, 1);
    let path = t.route_path(hosts[0], hosts[1]).unwrap();
    store.set_pairs(path[1], path[2], 0);
    let mut rng = seeded(3);
    let psi = QState::random(&[2], &mut rng).unwrap();
    let mut ledger = ResourceLedger::default();
    let fail = teleport_route(&t, &mut store, &psi, hosts[0], hosts[1], &mut ledger, &mut rng).unwrap_err();
    assert!(matches!(fail.error, Error::Exhausted(_)));
    assert_eq!(fail.at, path[1]);
    assert!((fail.state.fidelity(&psi).unwrap() - 1.0).abs() < 1e-9);
    // virtual links refuse up front and consume nothing
    let left = store.total_edge_pairs();
    assert!(matches!(virtual_link(&t, &mut store, hosts[0], hosts[1], &mut ledger, &mut rng), Err(Error::Exhausted(_))));
    assert_eq!(store.total_edge_pairs(), left);
}

#[test]
fn swap_order_does_not_matter() {
    // right-to-left swaps over four links give the same pair
    let mut rng = seeded(4);
    let mut state = bell00();
    for _ in 1..4 {
        // [prev, y] ⊗ [x, b]: forward x backwards through the new link
        let joint = bell00().tensor(&state);
        state = teleport_within(&joint, 2, 1, 0, &mut rng).unwrap().state;
    }
    assert!((state.fidelity(&bell00()).unwrap() - 1.0).abs() < 1e-9);
}

#[test]
fn relay_secrecy_boundary() {
    let t = build_topology(&spec(3, 2, 2)).unwrap();
    let hosts: Vec<usize> = t.hosts().collect();
    let (a, b) = (hosts[0], *hosts.last().unwrap());
    let path = t.route_path(a, b).unwrap();
    let mut rng = seeded(6);
    let key: Vec<bool> = random_hop_keys(1, 128, &mut rng).remove(0);
    let hop_keys = random_hop_keys(path.len() - 1, 128, &mut rng);
    let mut ledger = ResourceLedger::default();
    let r = trusted_relay_key_transport(&t, &key, a, b, &hop_keys, &mut ledger).unwrap();
    assert_eq!(r.delivered, key);
    assert!(r.wire.iter().all(|w| w.payload != key));
    assert_eq!(ledger.exposure, path[1..path.len() - 1].to_vec());
    assert!(r.relay_memory.values().all(|m| *m == key));
    assert_eq!(r.relay_memory.len(), path.len() - 2);

    let mut direct = ResourceLedger::default();
    let host = hosts[0];
    let one = trusted_relay_key_transport(&t, &key, host, path[1], &hop_keys[..1], &mut direct).unwrap();
    assert!(direct.exposure.is_empty() && one.delivered == key);
}

#[test]
fn tradeoff_and_no_cloning_guard() {
    assert_eq!(send_mode_tradeoff(2.0, 3.0, 10.0, 1.0).unwrap(), SendMode::SendCopies);
    assert_eq!(send_mode_tradeoff(2.0, 30.0, 10.0, 1.0).unwrap(), SendMode::SendProgram);
    assert!(send_mode_tradeoff(-1.0, 1.0, 1.0, 1.0).is_err());
    let mut out = OutputStore::default();
    out.deposit(1, bell00()).unwrap();
    assert!(out.deposit(1, bell00()).is_err());
    assert!(matches!(out.duplicate(1), Err(Error::Precondition(_))));
    assert_eq!(out.take(1).unwrap(), bell00());
    assert!(out.is_empty());
}

#[test]
fn topology_shape() {
    let t = build_topology(&TopologySpec { levels: 3, fanouts: vec![3, 2], hosts_per_router: 4 }).unwrap();
    assert_eq!(t.routers().count(), 1 + 3 + 6);
    assert_eq!(t.hosts().count(), 24);
    assert_eq!(t.edges.len(), t.nodes.len() - 1);
}
