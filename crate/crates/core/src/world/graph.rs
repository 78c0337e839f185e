//! Radio connectivity and minimum-hop routing.

use super::{Position, Uid, UidSet};

const UNREACHABLE: u8 = u8::MAX;

/// Undirected unit-disk graph over drone positions with an all-pairs
/// hop-distance table, rebuilt whenever positions change.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RadioGraph {
    adjacency: Vec<UidSet>,
    dist: Vec<Vec<u8>>,
}

/// A loop-free path from source to destination, both inclusive.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Route {
    pub hops: Vec<Uid>,
}

impl Route {
    pub fn hop_count(&self) -> usize {
        self.hops.len() - 1
    }

    pub fn source(&self) -> Uid {
        self.hops[0]
    }

    pub fn destination(&self) -> Uid {
        *self.hops.last().expect("route has at least two hops")
    }
}

impl RadioGraph {
    /// Edge (i, j) exists iff the euclidean distance is at most `radius`.
    pub fn from_positions(positions: &[Position], radius: f64) -> Self {
        assert!(positions.len() <= UidSet::CAPACITY, "too many drones");
        let n = positions.len();
        let mut adjacency = vec![UidSet::empty(); n];
        for i in 0..n {
            for j in (i + 1)..n {
                if positions[i].distance(&positions[j]) <= radius {
                    adjacency[i].insert(j);
                    adjacency[j].insert(i);
                }
            }
        }
        Self::from_adjacency(adjacency)
    }

    pub fn from_adjacency(adjacency: Vec<UidSet>) -> Self {
        let dist = (0..adjacency.len())
            .map(|src| bfs_distances(&adjacency, src))
            .collect();
        Self { adjacency, dist }
    }

    pub fn len(&self) -> usize {
        self.adjacency.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adjacency.is_empty()
    }

    pub fn neighbours(&self, uid: Uid) -> UidSet {
        self.adjacency[uid]
    }

    pub fn has_edge(&self, a: Uid, b: Uid) -> bool {
        self.adjacency[a].contains(b)
    }

    /// Hop distance, or `None` when `b` is unreachable from `a`.
    pub fn hop_distance(&self, a: Uid, b: Uid) -> Option<usize> {
        match self.dist[a][b] {
            UNREACHABLE => None,
            d => Some(d as usize),
        }
    }

    pub fn is_reachable(&self, a: Uid, b: Uid) -> bool {
        self.dist[a][b] != UNREACHABLE
    }

    /// Minimum-hop route from `src` to `dst`. Among equal-length routes the
    /// lexicographically smallest UID sequence wins.
    ///
    /// Panics if `src == dst`.
    pub fn shortest_route(&self, src: Uid, dst: Uid) -> Option<Route> {
        assert_ne!(src, dst, "route source and destination must differ");
        let to_dst = &self.dist[dst];
        if to_dst[src] == UNREACHABLE {
            return None;
        }
        let mut hops = Vec::with_capacity(to_dst[src] as usize + 1);
        let mut here = src;
        hops.push(here);
        while here != dst {
            let want = to_dst[here] - 1;
            // UidSet iterates in ascending order, so the first match is the
            // smallest UID one hop closer to the destination.
            here = self.adjacency[here]
                .iter()
                .find(|&n| to_dst[n] == want)
                .expect("distance table is consistent with adjacency");
            hops.push(here);
        }
        Some(Route { hops })
    }
}

fn bfs_distances(adjacency: &[UidSet], src: Uid) -> Vec<u8> {
    let mut dist = vec![UNREACHABLE; adjacency.len()];
    dist[src] = 0;
    let mut frontier = UidSet::single(src);
    let mut seen = frontier;
    let mut depth = 0u8;
    while !frontier.is_empty() {
        depth += 1;
        let mut next = UidSet::empty();
        for u in frontier.iter() {
            next = next.union(adjacency[u]);
        }
        next = next.difference(seen);
        for v in next.iter() {
            dist[v] = depth;
        }
        seen = seen.union(next);
        frontier = next;
    }
    dist
}
