//! Circuits as ordered gate lists, and the interaction graphs derived from them.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A gate acting on one or more distinct logical qubits.
///
/// Only the qubit tuple matters for mapping; the order inside the tuple is
/// kept as written (control/target convention of the source) but ignored for
/// identity, see [`Gate::key`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Gate {
    qubits: Vec<usize>,
}

impl Gate {
    /// Builds a gate without range checks; duplicates are still rejected.
    pub fn new(qubits: Vec<usize>) -> Result<Self> {
        if qubits.is_empty() {
            return Err(Error::EmptyGate { gate: 0 });
        }
        let mut seen = BTreeSet::new();
        for &q in &qubits {
            if !seen.insert(q) {
                return Err(Error::DuplicateQubit { gate: 0, qubit: q });
            }
        }
        Ok(Self { qubits })
    }

    pub fn pair(a: usize, b: usize) -> Self {
        assert_ne!(a, b, "two-qubit gate on a single qubit");
        Self { qubits: vec![a, b] }
    }

    pub fn qubits(&self) -> &[usize] {
        &self.qubits
    }

    pub fn width(&self) -> usize {
        self.qubits.len()
    }

    pub fn is_multi_qubit(&self) -> bool {
        self.qubits.len() >= 2
    }

    /// Sorted qubit set; two gates are the same interaction iff keys match.
    pub fn key(&self) -> Vec<usize> {
        let mut k = self.qubits.clone();
        k.sort_unstable();
        k
    }

    pub fn same_qubits(&self, other: &Gate) -> bool {
        self.width() == other.width() && self.key() == other.key()
    }
}

/// Ordered gate sequence over `n` logical qubits.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "CircuitDoc", into = "CircuitDoc")]
pub struct Circuit {
    n: usize,
    gates: Vec<Gate>,
}

#[derive(Serialize, Deserialize)]
struct CircuitDoc {
    n: usize,
    gates: Vec<Vec<usize>>,
}

impl TryFrom<CircuitDoc> for Circuit {
    type Error = Error;

    fn try_from(doc: CircuitDoc) -> Result<Self> {
        Circuit::from_tuples(doc.n, doc.gates)
    }
}

impl From<Circuit> for CircuitDoc {
    fn from(c: Circuit) -> Self {
        CircuitDoc {
            n: c.n,
            gates: c.gates.into_iter().map(|g| g.qubits).collect(),
        }
    }
}

impl Circuit {
    pub fn new(n: usize, gates: Vec<Gate>) -> Result<Self> {
        if n == 0 {
            return Err(Error::NoQubits);
        }
        for (idx, g) in gates.iter().enumerate() {
            if let Some(&q) = g.qubits.iter().find(|&&q| q >= n) {
                return Err(Error::QubitOutOfRange { gate: idx, qubit: q, n });
            }
        }
        Ok(Self { n, gates })
    }

    pub fn from_tuples(n: usize, tuples: Vec<Vec<usize>>) -> Result<Self> {
        let gates = tuples
            .into_iter()
            .enumerate()
            .map(|(idx, qs)| {
                Gate::new(qs).map_err(|e| match e {
                    Error::EmptyGate { .. } => Error::EmptyGate { gate: idx },
                    Error::DuplicateQubit { qubit, .. } => Error::DuplicateQubit { gate: idx, qubit },
                    other => other,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(n, gates)
    }

    /// Parses the circuit JSON document `{"n": <int>, "gates": [[<int>,...], ...]}`.
    pub fn parse(source: &str) -> Result<Self> {
        let doc: CircuitDoc =
            serde_json::from_str(source).map_err(|e| Error::Malformed(e.to_string()))?;
        doc.try_into()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&CircuitDoc::from(self.clone())).expect("circuit serializes")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn multi_qubit_gates(&self) -> impl Iterator<Item = &Gate> {
        self.gates.iter().filter(|g| g.is_multi_qubit())
    }

    pub fn two_qubit_count(&self) -> usize {
        self.gates.iter().filter(|g| g.width() == 2).count()
    }

    pub fn multi_qubit_count(&self) -> usize {
        self.multi_qubit_gates().count()
    }

    /// ASAP depth over all gates, single-qubit ones included.
    pub fn depth(&self) -> usize {
        let mut level = vec![0usize; self.n];
        let mut depth = 0;
        for g in &self.gates {
            let d = g.qubits.iter().map(|&q| level[q]).max().unwrap_or(0) + 1;
            for &q in &g.qubits {
                level[q] = d;
            }
            depth = depth.max(d);
        }
        depth
    }

    /// Two-qubit gates per unit of depth.
    pub fn density(&self) -> f64 {
        match self.depth() {
            0 => 0.0,
            d => self.two_qubit_count() as f64 / d as f64,
        }
    }
}

/// Simple undirected graph over qubits; an edge means at least one gate
/// between its endpoints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InteractionGraph {
    n: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl InteractionGraph {
    pub fn empty(n: usize) -> Self {
        Self { n, edges: BTreeSet::new() }
    }

    /// Clique expansion of every multi-qubit gate; single-qubit gates add nothing.
    pub fn from_gates<'a>(n: usize, gates: impl IntoIterator<Item = &'a Gate>) -> Self {
        let mut g = Self::empty(n);
        for gate in gates {
            let qs = gate.qubits();
            for (a, &u) in qs.iter().enumerate() {
                for &v in &qs[a + 1..] {
                    g.add_edge(u, v);
                }
            }
        }
        g
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        assert!(u < self.n && v < self.n, "edge endpoint out of range");
        if u != v {
            self.edges.insert((u.min(v), u.max(v)));
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Edges as `(low, high)` pairs in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.contains(&(u.min(v), u.max(v)))
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for &(u, v) in &self.edges {
            deg[u] += 1;
            deg[v] += 1;
        }
        deg
    }

    /// Connected components, each sorted, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut parent: Vec<usize> = (0..self.n).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut c = x;
            while p[c] != r {
                let next = p[c];
                p[c] = r;
                c = next;
            }
            r
        }
        for &(u, v) in &self.edges {
            let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
            if ru != rv {
                parent[ru.max(rv)] = ru.min(rv);
            }
        }
        let mut groups: Vec<Vec<usize>> = Vec::new();
        let mut slot = vec![usize::MAX; self.n];
        for q in 0..self.n {
            let r = find(&mut parent, q);
            if slot[r] == usize::MAX {
                slot[r] = groups.len();
                groups.push(Vec::new());
            }
            groups[slot[r]].push(q);
        }
        groups
    }

    pub fn laplacian(&self) -> Laplacian {
        Laplacian::of(self)
    }
}

/// Graph Laplacian `L = D - A`, stored as degrees plus the edge list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Laplacian {
    degree: Vec<usize>,
    edges: Vec<(usize, usize)>,
}

impl Laplacian {
    pub fn of(g: &InteractionGraph) -> Self {
        Self {
            degree: g.degrees(),
            edges: g.edges().collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.degree.len()
    }

    pub fn degree(&self, i: usize) -> usize {
        self.degree[i]
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        if i == j {
            self.degree[i] as i64
        } else if self.edges.binary_search(&(i.min(j), i.max(j))).is_ok() {
            -1
        } else {
            0
        }
    }

    pub fn to_dense(&self) -> Vec<Vec<i64>> {
        let n = self.n();
        let mut m = vec![vec![0i64; n]; n];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = self.degree[i] as i64;
        }
        for &(u, v) in &self.edges {
            m[u][v] = -1;
            m[v][u] = -1;
        }
        m
    }

    /// `zᵀ L z` for a 0/1 indicator vector.
    pub fn quadratic_form(&self, z: &[bool]) -> i64 {
        let diag: i64 = self
            .degree
            .iter()
            .zip(z)
            .filter(|(_, &on)| on)
            .map(|(&d, _)| d as i64)
            .sum();
        let off: i64 = self.edges.iter().filter(|&&(u, v)| z[u] && z[v]).count() as i64;
        diag - 2 * off
    }
}
