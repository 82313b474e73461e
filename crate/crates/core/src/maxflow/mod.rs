//! s-t maximum flow and the minimum cut it certifies.

mod bfs;
mod bk;
mod network;

pub use network::FlowNetwork;

use crate::scalar::Scalar;
use crate::set::Subset;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FlowAlgorithm {
    /// Reusable search trees; the default for grid-like graphs.
    #[default]
    BoykovKolmogorov,
    /// Breadth-first augmenting paths.
    EdmondsKarp,
}

/// Flow on every edge and the net outflow it induces at every node.
#[derive(Debug, Clone)]
pub struct FlowCertificate<T> {
    /// Net flow along each edge's forward direction, indexed like the edges.
    pub edge_flows: Vec<T>,
    /// Net outflow over inner edges, per node.
    pub net_outflow: Vec<T>,
}

#[derive(Debug, Clone)]
pub struct MaxFlow<T> {
    pub flow_value: T,
    /// Inner nodes reachable from the source in the final residual graph:
    /// the inclusion-minimal source side of a minimum cut.
    pub source_side: Subset,
    pub certificate: FlowCertificate<T>,
}

/// Solves the network in place (residuals are left in `net`).
pub fn max_flow<T: Scalar>(net: &mut FlowNetwork<T>, algorithm: FlowAlgorithm) -> MaxFlow<T> {
    net.ensure_adjacency();
    let tol = net.tolerance();
    let pushed = match algorithm {
        FlowAlgorithm::BoykovKolmogorov => bk::solve(net, tol),
        FlowAlgorithm::EdmondsKarp => bfs::solve(net, tol),
    };
    let source_side = Subset::from_members(net.source_side(tol));
    let edge_flows = net.edge_flows();
    let mut net_outflow = vec![T::zero(); net.n];
    for (k, &f) in edge_flows.iter().enumerate() {
        let p = net.head[2 * k + 1] as usize;
        let q = net.head[2 * k] as usize;
        net_outflow[p] = net_outflow[p] + f;
        net_outflow[q] = net_outflow[q] - f;
    }
    MaxFlow {
        flow_value: net.offset_flow + pushed,
        source_side,
        certificate: FlowCertificate { edge_flows, net_outflow },
    }
}

/// Capacity of the cut separating `source_side` (plus the source) from the rest.
pub fn cut_capacity<T: Scalar>(net: &FlowNetwork<T>, source_side: &Subset) -> T {
    let mut total = net.offset_flow;
    for i in 0..net.n {
        let c = net.tr_cap_initial(i);
        if source_side.contains(i) {
            total = total + c.1;
        } else {
            total = total + c.0;
        }
    }
    for a in 0..net.head.len() {
        let p = net.tail(a);
        let q = net.head[a] as usize;
        if source_side.contains(p) && !source_side.contains(q) {
            total = total + net.cap[a];
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    fn both(build: impl Fn() -> FlowNetwork<f64>) -> [MaxFlow<f64>; 2] {
        let mut a = build();
        let mut b = build();
        [max_flow(&mut a, FlowAlgorithm::BoykovKolmogorov), max_flow(&mut b, FlowAlgorithm::EdmondsKarp)]
    }

    #[test]
    fn single_path() {
        // source -> 0 cap 2, 0 -> sink cap 1
        for r in both(|| {
            let mut net = FlowNetwork::new(1);
            net.add_terminal(0, 2.0, 0.0);
            net.add_terminal(0, 0.0, 1.0);
            net
        }) {
            assert_eq!(r.flow_value, 1.0);
            assert_eq!(r.source_side.indices(), vec![0]);
        }
    }

    #[test]
    fn single_path_through_edge() {
        // source -> 0 cap 2, 0 -> 1 cap 5, 1 -> sink cap 1
        for r in both(|| {
            let mut net = FlowNetwork::new(2);
            net.add_terminal(0, 2.0, 0.0);
            net.add_edge(0, 1, 5.0, 0.0);
            net.add_terminal(1, 0.0, 1.0);
            net
        }) {
            assert_eq!(r.flow_value, 1.0);
            assert_eq!(r.source_side.indices(), vec![0, 1]);
            assert_eq!(r.certificate.edge_flows, vec![1.0]);
        }
    }

    #[test]
    fn zero_capacity_network() {
        for r in both(|| {
            let mut net = FlowNetwork::new(3);
            net.add_edge(0, 1, 0.0, 0.0);
            net
        }) {
            assert_eq!(r.flow_value, 0.0);
            assert!(r.source_side.is_empty());
        }
    }

    #[test]
    fn diamond() {
        // s->a, s->b, a->t, b->t, all unit
        for r in both(|| {
            let mut net = FlowNetwork::new(2);
            net.add_terminal(0, 1.0, 1.0);
            net.add_terminal(1, 1.0, 1.0);
            net
        }) {
            assert_eq!(r.flow_value, 2.0);
        }
        // same diamond with explicit middle nodes: s->0->2->t, s->1->3->t
        for r in both(|| {
            let mut net = FlowNetwork::new(4);
            net.add_terminal(0, 1.0, 0.0);
            net.add_terminal(1, 1.0, 0.0);
            net.add_edge(0, 2, 1.0, 0.0);
            net.add_edge(1, 3, 1.0, 0.0);
            net.add_terminal(2, 0.0, 1.0);
            net.add_terminal(3, 0.0, 1.0);
            net
        }) {
            assert_eq!(r.flow_value, 2.0);
            assert!(r.source_side.is_empty());
        }
    }

    #[test]
    fn flow_equals_cut_on_random_networks() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..300 {
            let n = rng.gen_range(2..30);
            let m = rng.gen_range(0..4 * n);
            let mut edges = Vec::new();
            for _ in 0..m {
                let p = rng.gen_range(0..n);
                let q = rng.gen_range(0..n);
                if p != q {
                    edges.push((p, q, rng.gen_range(0.0..3.0), rng.gen_range(0.0..1.0) * 0.5));
                }
            }
            let terms: Vec<(f64, f64)> = (0..n)
                .map(|_| (rng.gen_range(0.0..2.0) * rng.gen_range(0..2) as f64, rng.gen_range(0.0..2.0)))
                .collect();
            let build = || {
                let mut net = FlowNetwork::new(n);
                for &(p, q, c, d) in &edges {
                    net.add_edge(p, q, c, d);
                }
                for (i, &(cs, ct)) in terms.iter().enumerate() {
                    net.add_terminal(i, cs, ct);
                }
                net
            };
            let [bk, ek] = both(build);
            let fresh = build();
            assert!((bk.flow_value - ek.flow_value).abs() < 1e-9);
            assert!((cut_capacity(&fresh, &bk.source_side) - bk.flow_value).abs() < 1e-9);
            assert_eq!(bk.source_side, ek.source_side);
            // conservation: net outflow of inner edges is balanced by terminals
            for (k, &f) in bk.certificate.edge_flows.iter().enumerate() {
                let (c, d) = (edges[k].2, edges[k].3);
                assert!(f <= c + 1e-12 && f >= -d - 1e-12);
            }
        }
    }
}
