use crate::scalar::Scalar;

/// Directed flow network on `n` inner nodes plus implicit source and sink.
///
/// Edges are stored as arc pairs: arc `2k` runs `p -> q`, arc `2k + 1` runs
/// `q -> p`, and `a ^ 1` is the sister of `a`. Terminal capacities are
/// folded into one signed residual per node: positive means residual
/// capacity from the source, negative means residual capacity to the sink.
#[derive(Debug, Clone)]
pub struct FlowNetwork<T> {
    pub(crate) n: usize,
    pub(crate) head: Vec<u32>,
    pub(crate) cap: Vec<T>,
    pub(crate) r_cap: Vec<T>,
    pub(crate) tr_cap: Vec<T>,
    tr_init: Vec<T>,
    /// Flow routed directly source -> i -> sink when a node carries both
    /// terminal capacities.
    pub(crate) offset_flow: T,
    pub(crate) adj_start: Vec<usize>,
    pub(crate) adj: Vec<u32>,
    adj_dirty: bool,
}

impl<T: Scalar> FlowNetwork<T> {
    pub fn new(n: usize) -> Self {
        FlowNetwork {
            n,
            head: Vec::new(),
            cap: Vec::new(),
            r_cap: Vec::new(),
            tr_cap: vec![T::zero(); n],
            tr_init: vec![T::zero(); n],
            offset_flow: T::zero(),
            adj_start: vec![0; n + 1],
            adj: Vec::new(),
            adj_dirty: false,
        }
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.head.len() / 2
    }

    /// Adds an edge with capacity `cap_pq` from `p` to `q` and `cap_qp` back.
    /// Returns the edge index.
    pub fn add_edge(&mut self, p: usize, q: usize, cap_pq: T, cap_qp: T) -> usize {
        assert!(p < self.n && q < self.n && p != q, "bad edge {p} -> {q}");
        assert!(cap_pq >= T::zero() && cap_qp >= T::zero(), "negative capacity");
        let k = self.head.len() / 2;
        self.head.push(q as u32);
        self.head.push(p as u32);
        self.cap.push(cap_pq);
        self.cap.push(cap_qp);
        self.r_cap.push(cap_pq);
        self.r_cap.push(cap_qp);
        self.adj_dirty = true;
        k
    }

    /// Adds source -> i and i -> sink capacities.
    pub fn add_terminal(&mut self, i: usize, cap_source: T, cap_sink: T) {
        assert!(cap_source >= T::zero() && cap_sink >= T::zero(), "negative capacity");
        let (mut cs, mut ct) =
            if self.tr_cap[i] > T::zero() { (self.tr_cap[i], T::zero()) } else { (T::zero(), -self.tr_cap[i]) };
        cs = cs + cap_source;
        ct = ct + cap_sink;
        self.offset_flow = self.offset_flow + cs.min(ct);
        self.tr_cap[i] = cs - ct;
        self.tr_init[i] = cs - ct;
    }

    /// Terminal capacities `(source -> i, i -> sink)` as set before solving,
    /// after cancelling the part routed straight through `i`.
    pub fn tr_cap_initial(&self, i: usize) -> (T, T) {
        let c = self.tr_init[i];
        if c > T::zero() {
            (c, T::zero())
        } else {
            (T::zero(), -c)
        }
    }

    /// Resets residuals and terminal capacities, keeping the edge set.
    pub fn reset(&mut self) {
        self.r_cap.clone_from(&self.cap);
        self.tr_cap.iter_mut().for_each(|x| *x = T::zero());
        self.tr_init.iter_mut().for_each(|x| *x = T::zero());
        self.offset_flow = T::zero();
    }

    pub(crate) fn ensure_adjacency(&mut self) {
        if !self.adj_dirty && self.adj.len() == self.head.len() {
            return;
        }
        let mut degree = vec![0usize; self.n + 1];
        for a in 0..self.head.len() {
            degree[self.tail(a)] += 1;
        }
        self.adj_start = vec![0; self.n + 1];
        for i in 0..self.n {
            self.adj_start[i + 1] = self.adj_start[i] + degree[i];
        }
        let mut fill = self.adj_start.clone();
        self.adj = vec![0; self.head.len()];
        for a in 0..self.head.len() {
            let t = self.tail(a);
            self.adj[fill[t]] = a as u32;
            fill[t] += 1;
        }
        self.adj_dirty = false;
    }

    #[inline]
    pub(crate) fn tail(&self, a: usize) -> usize {
        self.head[a ^ 1] as usize
    }

    #[inline]
    pub(crate) fn arcs(&self, i: usize) -> &[u32] {
        &self.adj[self.adj_start[i]..self.adj_start[i + 1]]
    }

    /// Residuals at or below this are treated as saturated.
    pub(crate) fn tolerance(&self) -> T {
        let scale = self.cap.iter().chain(self.tr_cap.iter()).fold(T::one(), |m, &c| m.max(c.abs()));
        T::epsilon() * T::lit(64.0) * scale
    }

    /// Net flow on each edge in its forward direction.
    pub fn edge_flows(&self) -> Vec<T> {
        (0..self.edge_count()).map(|k| self.cap[2 * k] - self.r_cap[2 * k]).collect()
    }

    /// Nodes reachable from the source through residual arcs.
    pub fn source_side(&self, tol: T) -> Vec<bool> {
        let mut seen = vec![false; self.n];
        let mut stack: Vec<usize> = (0..self.n).filter(|&i| self.tr_cap[i] > tol).collect();
        for &i in &stack {
            seen[i] = true;
        }
        while let Some(i) = stack.pop() {
            for &a in self.arcs(i) {
                let a = a as usize;
                let j = self.head[a] as usize;
                if !seen[j] && self.r_cap[a] > tol {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        seen
    }
}
