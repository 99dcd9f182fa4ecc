//! Relation-constrained dictionaries via maximum bipartite matching.

use super::{BoySet, DictError, GirlSet, ParameterPack};
use crate::shiftspace::symbols_to_digits;
use std::collections::{HashMap, VecDeque};

/// Largest `|boys|·|girls|` accepted when materializing a relation.
pub const MAX_RELATION_CELLS: u128 = 100_000_000;

/// Explicit bipartite relation between boys and girls.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Relation {
    pub boys: Vec<Vec<u8>>,
    pub girls: Vec<Vec<u8>>,
    /// Per boy: `(girl index, witness index)` sorted by girl index.
    pub edges: Vec<Vec<(usize, usize)>>,
}

impl Relation {
    /// Relation from explicit index pairs; the witness of an edge is its position in `pairs`.
    pub fn from_pairs(boys: Vec<Vec<u8>>, girls: Vec<Vec<u8>>, pairs: &[(usize, usize)]) -> Self {
        let mut edges = vec![Vec::new(); boys.len()];
        for (w, &(b, g)) in pairs.iter().enumerate() {
            let row: &mut Vec<(usize, usize)> = &mut edges[b];
            if !row.iter().any(|&(h, _)| h == g) {
                row.push((g, w));
            }
        }
        for row in &mut edges {
            row.sort_unstable();
        }
        Relation { boys, girls, edges }
    }

    pub fn edge_count(&self) -> usize {
        self.edges.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.edge_count() == 0
    }

    pub fn contains(&self, boy: usize, girl: usize) -> bool {
        self.edges
            .get(boy)
            .is_some_and(|row| row.binary_search_by_key(&girl, |&(g, _)| g).is_ok())
    }

    /// Sample index that witnessed the edge.
    pub fn witness(&self, boy: usize, girl: usize) -> Option<usize> {
        let row = self.edges.get(boy)?;
        let i = row.binary_search_by_key(&girl, |&(g, _)| g).ok()?;
        Some(row[i].1)
    }

    fn girl_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.girls.len()];
        for row in &self.edges {
            for &(g, _) in row {
                deg[g] += 1;
            }
        }
        deg
    }
}

/// `ln K = ln(1/2) + N(h_joint − h_source − 2Δ)`.
pub fn marriage_bound(pack: &ParameterPack, h_joint: f64, h_source: f64) -> f64 {
    0.5f64.ln() + pack.n as f64 * (h_joint - h_source - 2.0 * pack.entropy_margin)
}

/// Relate boy `B` to girl `g` when a sample pair `(u, v)` starts with `B` and
/// has `g` on the window `[M, N − 10M)` of `v`.
pub fn build_relation(
    boys: &BoySet,
    girls: &GirlSet,
    samples: &[(Vec<u8>, Vec<u8>)],
    pack: &ParameterPack,
) -> Result<Relation, DictError> {
    let (n, m) = (pack.n, pack.m);
    if boys.block_len() != n || girls.word_len() != pack.girl_len() {
        return Err(DictError::Precondition(format!(
            "block lengths ({}, {}) do not match N={n}, N-11M={}",
            boys.block_len(),
            girls.word_len(),
            pack.girl_len()
        )));
    }
    let cells = u128::try_from(boys.count() * girls.count()).unwrap_or(u128::MAX);
    if cells > MAX_RELATION_CELLS {
        return Err(DictError::TooLarge(format!(
            "{cells} boy/girl cells exceed {MAX_RELATION_CELLS}"
        )));
    }
    let limit = MAX_RELATION_CELLS as usize;
    let boy_list = boys
        .members(limit)
        .ok_or_else(|| DictError::TooLarge("boy set cannot be listed".into()))?;
    let girl_list = girls
        .members(limit)?
        .ok_or_else(|| DictError::TooLarge("girl set cannot be listed".into()))?;
    let boy_index: HashMap<&[u8], usize> =
        boy_list.iter().enumerate().map(|(i, w)| (w.as_slice(), i)).collect();
    let girl_index: HashMap<&[u8], usize> =
        girl_list.iter().enumerate().map(|(i, w)| (w.as_slice(), i)).collect();
    let mut pairs = Vec::new();
    let mut witnesses = Vec::new();
    for (s, (u, v)) in samples.iter().enumerate() {
        if u.len() < n || v.len() < n {
            continue;
        }
        let (Some(&b), Some(&g)) = (boy_index.get(&u[..n]), girl_index.get(&v[m..n - 10 * m]))
        else {
            continue;
        };
        pairs.push((b, g));
        witnesses.push(s);
    }
    let mut rel = Relation::from_pairs(boy_list, girl_list, &pairs);
    for row in &mut rel.edges {
        for edge in row.iter_mut() {
            edge.1 = witnesses[edge.1];
        }
    }
    Ok(rel)
}

/// Injection `boys → girls` inside the relation, given boy degrees `≥ k` and
/// girl degrees `≤ k`. Entry `i` is the girl index assigned to boy `i`.
pub fn hall_match(relation: &Relation, k: usize) -> Result<Vec<usize>, DictError> {
    if k == 0 && !relation.boys.is_empty() {
        return Err(DictError::Precondition("K must be at least 1".into()));
    }
    for (b, row) in relation.edges.iter().enumerate() {
        if row.len() < k {
            return Err(DictError::BoyDegree {
                boy: symbols_to_digits(&relation.boys[b]),
                degree: row.len(),
                k,
            });
        }
    }
    for (g, &d) in relation.girl_degrees().iter().enumerate() {
        if d > k {
            return Err(DictError::GirlDegree {
                girl: symbols_to_digits(&relation.girls[g]),
                degree: d,
                k,
            });
        }
    }
    let matched = maximum_matching(relation);
    matched
        .iter()
        .enumerate()
        .map(|(b, g)| {
            g.ok_or_else(|| {
                DictError::Internal(format!(
                    "boy {} unmatched despite the degree conditions",
                    symbols_to_digits(&relation.boys[b])
                ))
            })
        })
        .collect()
}

/// Hopcroft–Karp maximum matching; entry `i` is the girl matched to boy `i`.
pub(crate) fn maximum_matching(relation: &Relation) -> Vec<Option<usize>> {
    const FREE: usize = usize::MAX;
    let nb = relation.boys.len();
    let adj: Vec<Vec<usize>> = relation
        .edges
        .iter()
        .map(|row| row.iter().map(|&(g, _)| g).collect())
        .collect();
    let mut boy_mate = vec![FREE; nb];
    let mut girl_mate = vec![FREE; relation.girls.len()];
    let mut dist = vec![usize::MAX; nb];
    loop {
        let mut queue = VecDeque::new();
        for b in 0..nb {
            if boy_mate[b] == FREE {
                dist[b] = 0;
                queue.push_back(b);
            } else {
                dist[b] = usize::MAX;
            }
        }
        let mut found = false;
        while let Some(b) = queue.pop_front() {
            for &g in &adj[b] {
                let next = girl_mate[g];
                if next == FREE {
                    found = true;
                } else if dist[next] == usize::MAX {
                    dist[next] = dist[b] + 1;
                    queue.push_back(next);
                }
            }
        }
        if !found {
            break;
        }
        let mut cursor = vec![0usize; nb];
        for b in 0..nb {
            if boy_mate[b] == FREE {
                augment(b, &adj, &mut boy_mate, &mut girl_mate, &mut dist, &mut cursor);
            }
        }
    }
    boy_mate
        .into_iter()
        .map(|g| (g != FREE).then_some(g))
        .collect()
}

fn augment(
    b: usize,
    adj: &[Vec<usize>],
    boy_mate: &mut [usize],
    girl_mate: &mut [usize],
    dist: &mut [usize],
    cursor: &mut [usize],
) -> bool {
    while cursor[b] < adj[b].len() {
        let g = adj[b][cursor[b]];
        cursor[b] += 1;
        let next = girl_mate[g];
        let ok = next == usize::MAX
            || (dist[next] == dist[b] + 1
                && augment(next, adj, boy_mate, girl_mate, dist, cursor));
        if ok {
            boy_mate[b] = g;
            girl_mate[g] = b;
            return true;
        }
    }
    dist[b] = usize::MAX;
    false
}
