//! Multi-core topologies and their hop-distance matrices.

use std::collections::{BTreeSet, VecDeque};
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Cores with per-core qubit capacities and undirected inter-core links.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "TopologyDoc", into = "TopologyDoc")]
pub struct CoreTopology {
    capacities: Vec<usize>,
    links: BTreeSet<(usize, usize)>,
}

#[derive(Serialize, Deserialize)]
struct TopologyDoc {
    cores: usize,
    capacities: Vec<usize>,
    links: Vec<[usize; 2]>,
}

impl TryFrom<TopologyDoc> for CoreTopology {
    type Error = Error;

    fn try_from(doc: TopologyDoc) -> Result<Self> {
        if doc.capacities.len() != doc.cores {
            return Err(Error::InvalidTopology(format!(
                "{} cores but {} capacities",
                doc.cores,
                doc.capacities.len()
            )));
        }
        CoreTopology::new(doc.capacities, doc.links.into_iter().map(|[a, b]| (a, b)))
    }
}

impl From<CoreTopology> for TopologyDoc {
    fn from(t: CoreTopology) -> Self {
        TopologyDoc {
            cores: t.capacities.len(),
            links: t.links.iter().map(|&(a, b)| [a, b]).collect(),
            capacities: t.capacities,
        }
    }
}

impl CoreTopology {
    pub fn new(capacities: Vec<usize>, links: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let k = capacities.len();
        if k == 0 {
            return Err(Error::InvalidTopology("at least one core is required".into()));
        }
        if let Some(j) = capacities.iter().position(|&c| c == 0) {
            return Err(Error::InvalidTopology(format!("core {j} has zero capacity")));
        }
        let mut set = BTreeSet::new();
        for (a, b) in links {
            if a >= k || b >= k {
                return Err(Error::InvalidTopology(format!("link ({a},{b}) references a missing core")));
            }
            if a == b {
                return Err(Error::InvalidTopology(format!("self-link on core {a}")));
            }
            set.insert((a.min(b), a.max(b)));
        }
        Ok(Self { capacities, links: set })
    }

    /// Every pair of cores linked directly.
    pub fn all_to_all(k: usize, capacity: usize) -> Result<Self> {
        let links = (0..k).flat_map(|a| (a + 1..k).map(move |b| (a, b)));
        Self::new(vec![capacity; k], links)
    }

    /// 4-neighbour grid; core `r * cols + c` sits at row `r`, column `c`.
    pub fn grid(rows: usize, cols: usize, capacity: usize) -> Result<Self> {
        let mut links = Vec::new();
        for r in 0..rows {
            for c in 0..cols {
                let id = r * cols + c;
                if c + 1 < cols {
                    links.push((id, id + 1));
                }
                if r + 1 < rows {
                    links.push((id, id + cols));
                }
            }
        }
        Self::new(vec![capacity; rows * cols], links)
    }

    pub fn parse(source: &str) -> Result<Self> {
        let doc: TopologyDoc =
            serde_json::from_str(source).map_err(|e| Error::Malformed(e.to_string()))?;
        doc.try_into()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&TopologyDoc::from(self.clone())).expect("topology serializes")
    }

    pub fn cores(&self) -> usize {
        self.capacities.len()
    }

    pub fn capacities(&self) -> &[usize] {
        &self.capacities
    }

    pub fn capacity(&self, core: usize) -> usize {
        self.capacities[core]
    }

    pub fn total_capacity(&self) -> usize {
        self.capacities.iter().sum()
    }

    pub fn max_capacity(&self) -> usize {
        self.capacities.iter().copied().max().unwrap_or(0)
    }

    pub fn is_uniform(&self) -> bool {
        self.capacities.windows(2).all(|w| w[0] == w[1])
    }

    pub fn links(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.links.iter().copied()
    }

    pub fn neighbors(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.cores()];
        for &(a, b) in &self.links {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }

    /// All-pairs hop counts by BFS from every core.
    pub fn hop_matrix(&self) -> Result<DistanceMatrix> {
        let k = self.cores();
        let adj = self.neighbors();
        let mut d = vec![u32::MAX; k * k];
        for src in 0..k {
            let row = &mut d[src * k..(src + 1) * k];
            row[src] = 0;
            let mut queue = VecDeque::from([src]);
            while let Some(u) = queue.pop_front() {
                for &v in &adj[u] {
                    if row[v] == u32::MAX {
                        row[v] = row[u] + 1;
                        queue.push_back(v);
                    }
                }
            }
            if let Some(to) = row.iter().position(|&h| h == u32::MAX) {
                return Err(Error::Disconnected { from: src, to });
            }
        }
        Ok(DistanceMatrix { k, d })
    }
}

/// Symmetric hop counts between cores.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceMatrix {
    k: usize,
    d: Vec<u32>,
}

impl DistanceMatrix {
    pub fn from_rows(rows: Vec<Vec<u32>>) -> Self {
        let k = rows.len();
        assert!(rows.iter().all(|r| r.len() == k), "distance matrix must be square");
        Self { k, d: rows.into_iter().flatten().collect() }
    }

    pub fn cores(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn get(&self, from: usize, to: usize) -> u32 {
        self.d[from * self.k + to]
    }

    pub fn rows(&self) -> Vec<Vec<u32>> {
        self.d.chunks(self.k.max(1)).map(|r| r.to_vec()).collect()
    }

    /// True when every pair of distinct cores is the same distance apart.
    pub fn is_uniform(&self) -> bool {
        let mut off = (0..self.k)
            .flat_map(|a| (0..self.k).filter(move |&b| b != a).map(move |b| (a, b)))
            .map(|(a, b)| self.get(a, b));
        match off.next() {
            None => true,
            Some(first) => off.all(|h| h == first),
        }
    }

    pub fn max(&self) -> u32 {
        self.d.iter().copied().max().unwrap_or(0)
    }
}

/// Topology selector: `all2all:k,c`, `grid:rows,cols,cap` or `file:<path>`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TopologySpec {
    AllToAll { cores: usize, capacity: usize },
    Grid { rows: usize, cols: usize, capacity: usize },
    File(PathBuf),
}

impl FromStr for TopologySpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, rest) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("topology `{s}` lacks a `kind:` prefix")))?;
        let nums = || -> Result<Vec<usize>> {
            rest.split(',')
                .map(|p| {
                    p.trim()
                        .parse::<usize>()
                        .map_err(|_| Error::Parse(format!("bad number `{p}` in topology `{s}`")))
                })
                .collect()
        };
        match kind {
            "all2all" => match nums()?.as_slice() {
                &[cores, capacity] => Ok(Self::AllToAll { cores, capacity }),
                _ => Err(Error::Parse(format!("expected all2all:k,c, got `{s}`"))),
            },
            "grid" => match nums()?.as_slice() {
                &[rows, cols, capacity] => Ok(Self::Grid { rows, cols, capacity }),
                _ => Err(Error::Parse(format!("expected grid:rows,cols,cap, got `{s}`"))),
            },
            "file" => Ok(Self::File(PathBuf::from(rest))),
            other => Err(Error::Parse(format!("unknown topology kind `{other}`"))),
        }
    }
}

impl std::fmt::Display for TopologySpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::AllToAll { cores, capacity } => write!(f, "all2all:{cores},{capacity}"),
            Self::Grid { rows, cols, capacity } => write!(f, "grid:{rows},{cols},{capacity}"),
            Self::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}

impl TopologySpec {
    pub fn resolve(&self) -> Result<CoreTopology> {
        match self {
            Self::AllToAll { cores, capacity } => CoreTopology::all_to_all(*cores, *capacity),
            Self::Grid { rows, cols, capacity } => CoreTopology::grid(*rows, *cols, *capacity),
            Self::File(p) => CoreTopology::parse(&std::fs::read_to_string(p)?),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn all_to_all_links() {
        let t = CoreTopology::all_to_all(2, 3).unwrap();
        assert_eq!(t.links().collect::<Vec<_>>(), vec![(0, 1)]);
        let t = CoreTopology::all_to_all(10, 10).unwrap();
        assert_eq!(t.links().count(), 45);
        assert_eq!(t.total_capacity(), 100);
        let t = CoreTopology::all_to_all(1, 4).unwrap();
        assert_eq!(t.links().count(), 0);
        assert_eq!(t.hop_matrix().unwrap().rows(), vec![vec![0]]);
    }

    #[test]
    fn grid_layouts() {
        let g = CoreTopology::grid(2, 5, 10).unwrap();
        assert_eq!(g.cores(), 10);
        assert_eq!(g.links().count(), 13);
        let d = g.hop_matrix().unwrap();
        assert_eq!(d.get(0, 9), 5);
        assert_eq!(
            CoreTopology::grid(1, 2, 3).unwrap(),
            CoreTopology::all_to_all(2, 3).unwrap()
        );
        let sq = CoreTopology::grid(2, 2, 1).unwrap();
        assert_eq!(sq.links().collect::<Vec<_>>(), vec![(0, 1), (0, 2), (1, 3), (2, 3)]);
    }

    #[test]
    fn all_to_all_hops_are_one() {
        let d = CoreTopology::all_to_all(3, 1).unwrap().hop_matrix().unwrap();
        assert_eq!(d.rows(), vec![vec![0, 1, 1], vec![1, 0, 1], vec![1, 1, 0]]);
        assert!(d.is_uniform());
    }

    #[test]
    fn disconnected_reports_pair() {
        let t = CoreTopology::new(vec![1, 1, 1], [(0, 1)]).unwrap();
        assert!(matches!(t.hop_matrix(), Err(Error::Disconnected { from: 0, to: 2 })));
    }

    #[test]
    fn invalid_topologies() {
        assert!(CoreTopology::new(vec![], []).is_err());
        assert!(CoreTopology::new(vec![1, 0], [(0, 1)]).is_err());
        assert!(CoreTopology::new(vec![1, 1], [(0, 2)]).is_err());
        assert!(CoreTopology::new(vec![1, 1], [(1, 1)]).is_err());
        assert!(CoreTopology::parse(r#"{"cores":2,"capacities":[1],"links":[]}"#).is_err());
    }

    #[test]
    fn topology_json_and_specs() {
        let t = CoreTopology::parse(r#"{"cores":3,"capacities":[2,3,4],"links":[[0,1],[2,1]]}"#).unwrap();
        assert_eq!(t.capacities(), &[2, 3, 4]);
        assert_eq!(t.hop_matrix().unwrap().get(0, 2), 2);
        assert_eq!(CoreTopology::parse(&t.to_json()).unwrap(), t);

        assert_eq!(
            "all2all:3,2".parse::<TopologySpec>().unwrap(),
            TopologySpec::AllToAll { cores: 3, capacity: 2 }
        );
        assert_eq!(
            "grid:2,5,10".parse::<TopologySpec>().unwrap().resolve().unwrap(),
            CoreTopology::grid(2, 5, 10).unwrap()
        );
        assert!("grid:2,5".parse::<TopologySpec>().is_err());
        assert!("ring:4".parse::<TopologySpec>().is_err());
        assert!("all2all:x,2".parse::<TopologySpec>().is_err());
        assert_eq!("file:/tmp/t.json".parse::<TopologySpec>().unwrap().to_string(), "file:/tmp/t.json");
    }

    fn arb_connected() -> impl Strategy<Value = CoreTopology> {
        (1usize..9).prop_flat_map(|k| {
            let tree = proptest::collection::vec(any::<prop::sample::Index>(), k.saturating_sub(1));
            let extra = proptest::collection::vec((0..k, 0..k), 0..10);
            (tree, extra).prop_map(move |(parents, extra)| {
                let mut links: Vec<(usize, usize)> =
                    parents.iter().enumerate().map(|(i, p)| (p.index(i + 1), i + 1)).collect();
                links.extend(extra.into_iter().filter(|(a, b)| a != b));
                CoreTopology::new(vec![1; k], links).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn hop_matrix_is_a_metric(t in arb_connected()) {
            let d = t.hop_matrix().unwrap();
            let k = t.cores();
            for a in 0..k {
                prop_assert_eq!(d.get(a, a), 0);
                for b in 0..k {
                    prop_assert_eq!(d.get(a, b), d.get(b, a));
                    if a != b {
                        prop_assert!(d.get(a, b) >= 1);
                    }
                    for c in 0..k {
                        prop_assert!(d.get(a, c) <= d.get(a, b) + d.get(b, c));
                    }
                }
            }
            for (a, b) in t.links() {
                prop_assert_eq!(d.get(a, b), 1);
            }
        }
    }
}
