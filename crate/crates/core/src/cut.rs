//! Cut functions and their max-flow minimization oracle.

use std::collections::HashMap;

use crate::error::{check_len, Error, Result};
use crate::maxflow::{max_flow, FlowAlgorithm, FlowNetwork};
use crate::oracle::{BasePoint, DiscreteMinimum, Provenance, SetFunctionOracle};
use crate::scalar::Scalar;
use crate::set::{modular_value, Subset};

/// A directed arc `(p, q, c)`: pay `c` when `p` is in the set and `q` is not.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arc<T> {
    pub from: usize,
    pub to: usize,
    pub capacity: T,
}

/// `F(A) = Σ_{p∈A, q∉A} c_pq + m(A)`, submodular for nonnegative capacities.
#[derive(Debug, Clone)]
pub struct CutFunction<T> {
    n: usize,
    arcs: Vec<Arc<T>>,
    modular: Vec<T>,
    name: String,
    algorithm: FlowAlgorithm,
    out_start: Vec<usize>,
    out_arcs: Vec<u32>,
    in_start: Vec<usize>,
    in_arcs: Vec<u32>,
    /// Edge set with zero terminal capacities, cloned for every solve.
    template: FlowNetwork<T>,
}

impl<T: Scalar> CutFunction<T> {
    pub fn new(n: usize, arcs: Vec<Arc<T>>, modular: Vec<T>) -> Result<Self> {
        check_len(n, modular.len())?;
        for a in &arcs {
            if a.from >= n || a.to >= n {
                return Err(Error::InvalidArgument(format!("arc {} -> {} outside ground set of {n}", a.from, a.to)));
            }
            if a.from == a.to {
                return Err(Error::InvalidArgument(format!("self-loop on element {}", a.from)));
            }
            if !(a.capacity >= T::zero()) || !a.capacity.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "arc capacity must be finite and nonnegative, got {}",
                    a.capacity
                )));
            }
        }
        if modular.iter().any(|m| !m.is_finite()) {
            return Err(Error::InvalidArgument("modular weights must be finite".into()));
        }

        let (out_start, out_arcs) = csr(n, arcs.iter().map(|a| a.from));
        let (in_start, in_arcs) = csr(n, arcs.iter().map(|a| a.to));

        // one edge pair per unordered node pair
        let mut template = FlowNetwork::new(n);
        let mut pairs: HashMap<(usize, usize), usize> = HashMap::new();
        let mut merged: Vec<(usize, usize, T, T)> = Vec::new();
        for a in &arcs {
            let key = (a.from.min(a.to), a.from.max(a.to));
            let idx = *pairs.entry(key).or_insert_with(|| {
                merged.push((key.0, key.1, T::zero(), T::zero()));
                merged.len() - 1
            });
            if a.from == key.0 {
                merged[idx].2 = merged[idx].2 + a.capacity;
            } else {
                merged[idx].3 = merged[idx].3 + a.capacity;
            }
        }
        for (p, q, c, d) in merged {
            template.add_edge(p, q, c, d);
        }
        template.ensure_adjacency();

        Ok(CutFunction {
            n,
            arcs,
            modular,
            name: "cut".into(),
            algorithm: FlowAlgorithm::default(),
            out_start,
            out_arcs,
            in_start,
            in_arcs,
            template,
        })
    }

    /// Symmetric edges `{p, q}` of weight `w`, i.e. arcs both ways.
    pub fn undirected(n: usize, edges: &[(usize, usize, T)], modular: Vec<T>) -> Result<Self> {
        let arcs = edges
            .iter()
            .flat_map(|&(p, q, w)| [Arc { from: p, to: q, capacity: w }, Arc { from: q, to: p, capacity: w }])
            .collect();
        Self::new(n, arcs, modular)
    }

    /// Path graph `0 - 1 - .. - k` with the given edge weights, no unary term.
    pub fn chain(weights: &[T]) -> Self {
        let n = weights.len() + 1;
        let edges: Vec<_> = weights.iter().enumerate().map(|(k, &w)| (k, k + 1, w)).collect();
        Self::undirected(n, &edges, vec![T::zero(); n]).expect("valid chain").with_name("chain")
    }

    /// A purely modular function `F(A) = m(A)`.
    pub fn modular(m: Vec<T>) -> Result<Self> {
        Ok(Self::new(m.len(), Vec::new(), m)?.with_name("modular"))
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn with_algorithm(mut self, algorithm: FlowAlgorithm) -> Self {
        self.algorithm = algorithm;
        self
    }

    pub fn arcs(&self) -> &[Arc<T>] {
        &self.arcs
    }

    pub fn modular_part(&self) -> &[T] {
        &self.modular
    }

    /// `Σ c + Σ |m_j|`, an upper bound on the spread of `F`.
    pub fn total_weight(&self) -> T {
        self.arcs.iter().map(|a| a.capacity).sum::<T>() + self.modular.iter().map(|m| m.abs()).sum::<T>()
    }

    /// Flow network whose min cut, plus the returned constant, is
    /// `min_A F(A) - u(A)`.
    pub fn network(&self, u: &[T]) -> (FlowNetwork<T>, T) {
        let mut net = self.template.clone();
        let mut constant = T::zero();
        for j in 0..self.n {
            let theta = self.modular[j] - u[j];
            if theta >= T::zero() {
                net.add_terminal(j, T::zero(), theta);
            } else {
                net.add_terminal(j, -theta, T::zero());
                constant = constant + theta;
            }
        }
        (net, constant)
    }
}

fn csr(n: usize, keys: impl Iterator<Item = usize> + Clone) -> (Vec<usize>, Vec<u32>) {
    let mut start = vec![0usize; n + 1];
    for k in keys.clone() {
        start[k + 1] += 1;
    }
    for i in 0..n {
        start[i + 1] += start[i];
    }
    let mut fill = start.clone();
    let mut items = vec![0u32; start[n]];
    for (idx, k) in keys.enumerate() {
        items[fill[k]] = idx as u32;
        fill[k] += 1;
    }
    (start, items)
}

impl<T: Scalar> SetFunctionOracle<T> for CutFunction<T> {
    fn ground_size(&self) -> usize {
        self.n
    }

    fn eval(&self, set: &Subset) -> T {
        let cut: T = self.arcs.iter().filter(|a| set.contains(a.from) && !set.contains(a.to)).map(|a| a.capacity).sum();
        cut + modular_value(&self.modular, set)
    }

    fn prefix_values(&self, order: &[usize]) -> Vec<T> {
        let mut inside = vec![false; self.n];
        let mut out = Vec::with_capacity(order.len() + 1);
        let mut value = T::zero();
        out.push(value);
        for &j in order {
            let mut delta = self.modular[j];
            for &a in &self.out_arcs[self.out_start[j]..self.out_start[j + 1]] {
                let a = &self.arcs[a as usize];
                if !inside[a.to] {
                    delta = delta + a.capacity;
                }
            }
            for &a in &self.in_arcs[self.in_start[j]..self.in_start[j + 1]] {
                let a = &self.arcs[a as usize];
                if inside[a.from] {
                    delta = delta - a.capacity;
                }
            }
            inside[j] = true;
            value = value + delta;
            out.push(value);
        }
        out
    }

    fn minimize(&self, u: &[T]) -> Result<DiscreteMinimum<T>> {
        check_len(self.n, u.len())?;
        if u.iter().any(|x| !x.is_finite()) {
            return Err(Error::Numerical("non-finite modular term passed to the cut oracle".into()));
        }
        let (mut net, _) = self.network(u);
        let flow = max_flow(&mut net, self.algorithm);
        let s: Vec<T> = (0..self.n).map(|j| self.modular[j] + flow.certificate.net_outflow[j]).collect();
        let set = flow.source_side;
        let value = self.eval(&set) - modular_value(u, &set);
        Ok(DiscreteMinimum { set, value, certificate: BasePoint::new(s, Provenance::Flow) })
    }

    fn restrict(&self, anchor: &Subset, domain: &Subset) -> Result<Self> {
        check_len(self.n, anchor.ground_size())?;
        check_len(self.n, domain.ground_size())?;
        if !anchor.is_disjoint(domain) {
            return Err(Error::InvalidArgument("anchor and domain must be disjoint".into()));
        }
        let mut local = vec![usize::MAX; self.n];
        let mut m = 0;
        for j in domain.iter() {
            local[j] = m;
            m += 1;
        }
        let mut modular: Vec<T> = domain.iter().map(|j| self.modular[j]).collect();
        let mut arcs = Vec::new();
        for a in &self.arcs {
            let (p_in, q_in) = (domain.contains(a.from), domain.contains(a.to));
            match (p_in, q_in) {
                (true, true) => arcs.push(Arc { from: local[a.from], to: local[a.to], capacity: a.capacity }),
                // paid unless q joins
                (false, true) if anchor.contains(a.from) => {
                    modular[local[a.to]] = modular[local[a.to]] - a.capacity;
                }
                // q forced out: paid whenever p joins
                (true, false) if !anchor.contains(a.to) => {
                    modular[local[a.from]] = modular[local[a.from]] + a.capacity;
                }
                _ => {}
            }
        }
        Ok(CutFunction::new(m, arcs, modular)?.with_name(restricted_name(&self.name)).with_algorithm(self.algorithm))
    }

    fn name(&self) -> &str {
        &self.name
    }

    fn boundary_terms(&self) -> Vec<T> {
        // F({j}) + F(V∖{j}) - F(V) is the total capacity touching j
        let mut out = vec![T::zero(); self.n];
        for a in &self.arcs {
            out[a.from] = out[a.from] + a.capacity;
            out[a.to] = out[a.to] + a.capacity;
        }
        out
    }
}

fn restricted_name(name: &str) -> String {
    if name.ends_with("|restricted") {
        name.to_string()
    } else {
        format!("{name}|restricted")
    }
}
