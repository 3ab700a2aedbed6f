/// One successful union: the edge that caused it and its merge time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Merge {
    pub edge: usize,
    pub time: f64,
}

/// Disjoint-set union with union by size and path halving. Optionally logs
/// each successful merge with its time (the length of the merging edge),
/// which traces the evolution of the threshold graph as the threshold grows.
#[derive(Debug, Clone)]
pub struct DisjointSet {
    parent: Vec<u32>,
    size: Vec<u32>,
    components: usize,
    log: Vec<Merge>,
}

impl DisjointSet {
    pub fn new(n: usize) -> Self {
        DisjointSet {
            parent: (0..n as u32).collect(),
            size: vec![1; n],
            components: n,
            log: Vec::new(),
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] as usize != x {
            let gp = self.parent[self.parent[x] as usize];
            self.parent[x] = gp;
            x = gp as usize;
        }
        x
    }

    pub fn same(&mut self, a: usize, b: usize) -> bool {
        self.find(a) == self.find(b)
    }

    /// Merges the sets of `a` and `b`. Returns the new root, or `None` if
    /// they were already together.
    pub fn union(&mut self, a: usize, b: usize) -> Option<usize> {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return None;
        }
        if self.size[ra] < self.size[rb] || (self.size[ra] == self.size[rb] && rb < ra) {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra as u32;
        self.size[ra] += self.size[rb];
        self.components -= 1;
        Some(ra)
    }

    /// `union` that records `(edge, time)` in the merge log on success.
    pub fn union_logged(&mut self, a: usize, b: usize, edge: usize, time: f64) -> bool {
        let merged = self.union(a, b).is_some();
        if merged {
            self.log.push(Merge { edge, time });
        }
        merged
    }

    pub fn n_components(&self) -> usize {
        self.components
    }

    pub fn set_size(&mut self, x: usize) -> usize {
        let r = self.find(x);
        self.size[r] as usize
    }

    pub fn merge_log(&self) -> &[Merge] {
        &self.log
    }
}
