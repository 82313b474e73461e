//! Shortest augmenting paths (Edmonds–Karp). Slow but simple; kept as a
//! reference for cross-checking the tree-reusing solver.

use std::collections::VecDeque;

use super::network::FlowNetwork;
use crate::scalar::Scalar;

const NO_ARC: u32 = u32::MAX;
const FROM_SOURCE: u32 = u32::MAX - 1;

pub(crate) fn solve<T: Scalar>(net: &mut FlowNetwork<T>, tol: T) -> T {
    let n = net.n;
    let mut flow = T::zero();
    let mut pred = vec![NO_ARC; n];
    let mut queue = VecDeque::with_capacity(n);
    loop {
        pred.iter_mut().for_each(|p| *p = NO_ARC);
        queue.clear();
        for i in 0..n {
            if net.tr_cap[i] > tol {
                pred[i] = FROM_SOURCE;
                queue.push_back(i);
            }
        }
        let mut end = None;
        'bfs: while let Some(i) = queue.pop_front() {
            if net.tr_cap[i] < -tol {
                end = Some(i);
                break;
            }
            for &a in net.arcs(i) {
                let a = a as usize;
                let j = net.head[a] as usize;
                if pred[j] == NO_ARC && net.r_cap[a] > tol {
                    pred[j] = a as u32;
                    if net.tr_cap[j] < -tol {
                        end = Some(j);
                        break 'bfs;
                    }
                    queue.push_back(j);
                }
            }
        }
        let Some(end) = end else { break };

        let mut bottleneck = -net.tr_cap[end];
        let mut i = end;
        while pred[i] != FROM_SOURCE {
            let a = pred[i] as usize;
            bottleneck = bottleneck.min(net.r_cap[a]);
            i = net.tail(a);
        }
        bottleneck = bottleneck.min(net.tr_cap[i]);

        net.tr_cap[end] = net.tr_cap[end] + bottleneck;
        let mut i = end;
        while pred[i] != FROM_SOURCE {
            let a = pred[i] as usize;
            net.r_cap[a] = net.r_cap[a] - bottleneck;
            net.r_cap[a ^ 1] = net.r_cap[a ^ 1] + bottleneck;
            i = net.tail(a);
        }
        net.tr_cap[i] = net.tr_cap[i] - bottleneck;
        flow = flow + bottleneck;
    }
    flow
}
