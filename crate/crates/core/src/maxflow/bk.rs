//! Augmenting paths on two search trees that are kept between augmentations
//! (Boykov–Kolmogorov). Trees grow from the source and the sink; when they
//! touch, the path is augmented and the nodes cut off from their tree become
//! orphans that look for a new parent before being freed.

use std::collections::VecDeque;

use super::network::FlowNetwork;
use crate::scalar::Scalar;

const NONE: u32 = u32::MAX;
const TERMINAL: u32 = u32::MAX - 1;
const ORPHAN: u32 = u32::MAX - 2;
const INFINITE_D: u32 = u32::MAX;

struct Search<'a, T> {
    net: &'a mut FlowNetwork<T>,
    parent: Vec<u32>,
    is_sink: Vec<bool>,
    ts: Vec<u64>,
    dist: Vec<u32>,
    queued: Vec<bool>,
    active: VecDeque<u32>,
    orphans: VecDeque<u32>,
    time: u64,
    tol: T,
    flow: T,
}

/// Runs to completion and returns the value pushed by augmentations.
pub(crate) fn solve<T: Scalar>(net: &mut FlowNetwork<T>, tol: T) -> T {
    let n = net.n;
    let mut search = Search {
        net,
        parent: vec![NONE; n],
        is_sink: vec![false; n],
        ts: vec![0; n],
        dist: vec![0; n],
        queued: vec![false; n],
        active: VecDeque::new(),
        orphans: VecDeque::new(),
        time: 0,
        tol,
        flow: T::zero(),
    };
    search.run();
    search.flow
}

impl<T: Scalar> Search<'_, T> {
    fn activate(&mut self, i: usize) {
        if !self.queued[i] {
            self.queued[i] = true;
            self.active.push_back(i as u32);
        }
    }

    fn next_active(&mut self) -> Option<usize> {
        while let Some(i) = self.active.pop_front() {
            let i = i as usize;
            self.queued[i] = false;
            if self.parent[i] != NONE {
                return Some(i);
            }
        }
        None
    }

    fn run(&mut self) {
        for i in 0..self.net.n {
            let c = self.net.tr_cap[i];
            if c > self.tol {
                self.parent[i] = TERMINAL;
                self.is_sink[i] = false;
                self.dist[i] = 1;
                self.activate(i);
            } else if c < -self.tol {
                self.parent[i] = TERMINAL;
                self.is_sink[i] = true;
                self.dist[i] = 1;
                self.activate(i);
            }
        }

        while let Some(i) = self.next_active() {
            if let Some(mid) = self.grow(i) {
                self.time += 1;
                self.augment(mid);
                self.adopt_orphans();
                if self.parent[i] != NONE && !self.queued[i] {
                    self.queued[i] = true;
                    self.active.push_front(i as u32);
                }
            }
        }
    }

    /// Expands the tree of `i` by one layer. Returns a source-to-sink arc
    /// joining the two trees if one is found.
    fn grow(&mut self, i: usize) -> Option<usize> {
        let (lo, hi) = (self.net.adj_start[i], self.net.adj_start[i + 1]);
        let sink_tree = self.is_sink[i];
        for idx in lo..hi {
            let a = self.net.adj[idx] as usize;
            // residual in the direction the tree grows
            let r = if sink_tree { self.net.r_cap[a ^ 1] } else { self.net.r_cap[a] };
            if r <= self.tol {
                continue;
            }
            let j = self.net.head[a] as usize;
            if self.parent[j] == NONE {
                self.is_sink[j] = sink_tree;
                self.parent[j] = (a ^ 1) as u32;
                self.ts[j] = self.ts[i];
                self.dist[j] = self.dist[i] + 1;
                self.activate(j);
            } else if self.is_sink[j] != sink_tree {
                return Some(if sink_tree { a ^ 1 } else { a });
            } else if self.ts[j] <= self.ts[i] && self.dist[j] > self.dist[i] {
                self.parent[j] = (a ^ 1) as u32;
                self.ts[j] = self.ts[i];
                self.dist[j] = self.dist[i] + 1;
            }
        }
        None
    }

    fn make_orphan(&mut self, i: usize) {
        self.parent[i] = ORPHAN;
        self.orphans.push_front(i as u32);
    }

    fn augment(&mut self, mid: usize) {
        let net = &mut *self.net;
        let mut bottleneck = net.r_cap[mid];

        let mut i = net.tail(mid);
        loop {
            let a = self.parent[i];
            if a == TERMINAL {
                break;
            }
            let a = a as usize;
            bottleneck = bottleneck.min(net.r_cap[a ^ 1]);
            i = net.head[a] as usize;
        }
        bottleneck = bottleneck.min(net.tr_cap[i]);

        let mut i = net.head[mid] as usize;
        loop {
            let a = self.parent[i];
            if a == TERMINAL {
                break;
            }
            let a = a as usize;
            bottleneck = bottleneck.min(net.r_cap[a]);
            i = net.head[a] as usize;
        }
        bottleneck = bottleneck.min(-net.tr_cap[i]);

        net.r_cap[mid ^ 1] = net.r_cap[mid ^ 1] + bottleneck;
        net.r_cap[mid] = net.r_cap[mid] - bottleneck;

        let tol = self.tol;
        let mut i = self.net.tail(mid);
        loop {
            let a = self.parent[i];
            if a == TERMINAL {
                break;
            }
            let a = a as usize;
            let net = &mut *self.net;
            net.r_cap[a] = net.r_cap[a] + bottleneck;
            net.r_cap[a ^ 1] = net.r_cap[a ^ 1] - bottleneck;
            let saturated = net.r_cap[a ^ 1] <= tol;
            let next = net.head[a] as usize;
            if saturated {
                self.make_orphan(i);
            }
            i = next;
        }
        self.net.tr_cap[i] = self.net.tr_cap[i] - bottleneck;
        if self.net.tr_cap[i] <= tol {
            self.make_orphan(i);
        }

        let mut i = self.net.head[mid] as usize;
        loop {
            let a = self.parent[i];
            if a == TERMINAL {
                break;
            }
            let a = a as usize;
            let net = &mut *self.net;
            net.r_cap[a ^ 1] = net.r_cap[a ^ 1] + bottleneck;
            net.r_cap[a] = net.r_cap[a] - bottleneck;
            let saturated = net.r_cap[a] <= tol;
            let next = net.head[a] as usize;
            if saturated {
                self.make_orphan(i);
            }
            i = next;
        }
        self.net.tr_cap[i] = self.net.tr_cap[i] + bottleneck;
        if self.net.tr_cap[i] >= -tol {
            self.make_orphan(i);
        }

        self.flow = self.flow + bottleneck;
    }

    /// Distance from `j` to its terminal, or `None` if its chain ends at an
    /// orphan. Marks the walked chain with the current timestamp.
    fn origin_distance(&mut self, j: usize) -> Option<u32> {
        let mut d: u32 = 0;
        let mut k = j;
        loop {
            if self.ts[k] == self.time {
                d += self.dist[k];
                break;
            }
            let a = self.parent[k];
            d += 1;
            if a == TERMINAL {
                self.ts[k] = self.time;
                self.dist[k] = 1;
                break;
            }
            if a == ORPHAN || a == NONE {
                return None;
            }
            k = self.net.head[a as usize] as usize;
        }
        let total = d;
        let mut k = j;
        while self.ts[k] != self.time {
            self.ts[k] = self.time;
            self.dist[k] = d;
            d -= 1;
            k = self.net.head[self.parent[k] as usize] as usize;
        }
        Some(total)
    }

    fn adopt_orphans(&mut self) {
        while let Some(i) = self.orphans.pop_front() {
            let i = i as usize;
            let sink_tree = self.is_sink[i];
            let (lo, hi) = (self.net.adj_start[i], self.net.adj_start[i + 1]);
            let mut best: Option<(usize, u32)> = None;
            for idx in lo..hi {
                let a0 = self.net.adj[idx] as usize;
                // residual from the candidate parent towards i (source tree)
                // or from i towards it (sink tree)
                let r = if sink_tree { self.net.r_cap[a0] } else { self.net.r_cap[a0 ^ 1] };
                if r <= self.tol {
                    continue;
                }
                let j = self.net.head[a0] as usize;
                if self.parent[j] == NONE || self.is_sink[j] != sink_tree {
                    continue;
                }
                if let Some(d) = self.origin_distance(j) {
                    if d < best.map_or(INFINITE_D, |(_, bd)| bd) {
                        best = Some((a0, d));
                    }
                }
            }

            if let Some((a0, d)) = best {
                self.parent[i] = a0 as u32;
                self.ts[i] = self.time;
                self.dist[i] = d + 1;
                continue;
            }

            for idx in lo..hi {
                let a0 = self.net.adj[idx] as usize;
                let j = self.net.head[a0] as usize;
                let pj = self.parent[j];
                if pj == NONE || self.is_sink[j] != sink_tree {
                    continue;
                }
                let r = if sink_tree { self.net.r_cap[a0] } else { self.net.r_cap[a0 ^ 1] };
                if r > self.tol {
                    self.activate(j);
                }
                if pj != TERMINAL && pj != ORPHAN && self.net.head[pj as usize] as usize == i {
                    self.parent[j] = ORPHAN;
                    self.orphans.push_back(j as u32);
                }
            }
            self.parent[i] = NONE;
        }
    }
}
