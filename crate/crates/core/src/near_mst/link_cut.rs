//! Link-cut tree over a dynamic forest with a per-node value and path
//! maximum queries. Edges of the represented forest are modelled as nodes
//! so that edge weights become node values.

const NIL: u32 = u32::MAX;

#[derive(Debug, Clone)]
pub(crate) struct LinkCutTree {
    ch: Vec<[u32; 2]>,
    par: Vec<u32>,
    flip: Vec<bool>,
    val: Vec<f64>,
    best: Vec<(f64, u32)>,
}

impl LinkCutTree {
    pub(crate) fn new(values: Vec<f64>) -> Self {
        let n = values.len();
        LinkCutTree {
            ch: vec![[NIL; 2]; n],
            par: vec![NIL; n],
            flip: vec![false; n],
            best: values.iter().enumerate().map(|(i, &v)| (v, i as u32)).collect(),
            val: values,
        }
    }

    #[cfg(test)]
    pub(crate) fn set_value(&mut self, x: usize, v: f64) {
        self.access(x);
        self.splay(x);
        self.val[x] = v;
        self.pull(x);
    }

    fn is_root(&self, x: usize) -> bool {
        let p = self.par[x];
        p == NIL || (self.ch[p as usize][0] != x as u32 && self.ch[p as usize][1] != x as u32)
    }

    fn pull(&mut self, x: usize) {
        let mut b = (self.val[x], x as u32);
        for c in self.ch[x] {
            if c != NIL && self.best[c as usize].0 > b.0 {
                b = self.best[c as usize];
            }
        }
        self.best[x] = b;
    }

    fn push(&mut self, x: usize) {
        if self.flip[x] {
            self.ch[x].swap(0, 1);
            for c in self.ch[x] {
                if c != NIL {
                    self.flip[c as usize] ^= true;
                }
            }
            self.flip[x] = false;
        }
    }

    fn rotate(&mut self, x: usize) {
        let p = self.par[x] as usize;
        let g = self.par[p];
        let dir = (self.ch[p][1] == x as u32) as usize;
        let b = self.ch[x][1 - dir];
        if !self.is_root(p) {
            let gi = g as usize;
            let side = (self.ch[gi][1] == p as u32) as usize;
            self.ch[gi][side] = x as u32;
        }
        self.par[x] = g;
        self.ch[x][1 - dir] = p as u32;
        self.par[p] = x as u32;
        self.ch[p][dir] = b;
        if b != NIL {
            self.par[b as usize] = p as u32;
        }
        self.pull(p);
        self.pull(x);
    }

    fn splay(&mut self, x: usize) {
        let mut path = vec![x];
        let mut y = x;
        while !self.is_root(y) {
            y = self.par[y] as usize;
            path.push(y);
        }
        for &z in path.iter().rev() {
            self.push(z);
        }
        while !self.is_root(x) {
            let p = self.par[x] as usize;
            if !self.is_root(p) {
                let g = self.par[p] as usize;
                let zigzig = (self.ch[g][0] == p as u32) == (self.ch[p][0] == x as u32);
                self.rotate(if zigzig { p } else { x });
            }
            self.rotate(x);
        }
    }

    fn access(&mut self, x: usize) {
        let mut last = NIL;
        let mut y = x;
        loop {
            self.splay(y);
            self.ch[y][1] = last;
            self.pull(y);
            last = y as u32;
            match self.par[y] {
                NIL => break,
                p => y = p as usize,
            }
        }
        self.splay(x);
    }

    fn make_root(&mut self, x: usize) {
        self.access(x);
        self.flip[x] ^= true;
        self.push(x);
    }

    /// Joins two trees; `u` and `v` must be in different trees.
    pub(crate) fn link(&mut self, u: usize, v: usize) {
        self.make_root(u);
        self.par[u] = v as u32;
    }

    /// Removes the forest edge `u`-`v`, which must exist.
    pub(crate) fn cut(&mut self, u: usize, v: usize) {
        self.make_root(u);
        self.access(v);
        debug_assert_eq!(self.ch[v][0], u as u32);
        self.ch[v][0] = NIL;
        self.par[u] = NIL;
        self.pull(v);
    }

    /// Largest value on the path `u`..`v` and the node holding it.
    pub(crate) fn path_max(&mut self, u: usize, v: usize) -> (f64, usize) {
        self.make_root(u);
        self.access(v);
        let (val, node) = self.best[v];
        (val, node as usize)
    }

    #[cfg(test)]
    pub(crate) fn connected(&mut self, u: usize, v: usize) -> bool {
        if u == v {
            return true;
        }
        self.make_root(u);
        self.access(v);
        // u is now in v's splay tree iff they are connected
        let mut x = u;
        while !self.is_root(x) {
            x = self.par[x] as usize;
        }
        x == v
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream_rng, Stream};
    use rand::Rng;

    /// Naive forest with explicit adjacency, for cross-checking.
    struct Naive {
        adj: Vec<Vec<usize>>,
        val: Vec<f64>,
    }

    impl Naive {
        fn path(&self, u: usize, v: usize) -> Option<Vec<usize>> {
            let mut prev = vec![usize::MAX; self.adj.len()];
            let mut stack = vec![u];
            prev[u] = u;
            while let Some(x) = stack.pop() {
                for &y in &self.adj[x] {
                    if prev[y] == usize::MAX {
                        prev[y] = x;
                        stack.push(y);
                    }
                }
            }
            if prev[v] == usize::MAX {
                return None;
            }
            let mut out = vec![v];
            let mut x = v;
            while x != u {
                x = prev[x];
                out.push(x);
            }
            Some(out)
        }
    }

    #[test]
    fn random_operations_match_naive_forest() {
        let mut rng = stream_rng(3, Stream::Oracle, 99);
        let n = 40;
        let values: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        let mut lct = LinkCutTree::new(values.clone());
        let mut naive = Naive { adj: vec![Vec::new(); n], val: values };
        let mut edges: Vec<(usize, usize)> = Vec::new();
        for _ in 0..3000 {
            let u = rng.random_range(0..n);
            let v = rng.random_range(0..n);
            match rng.random_range(0..4) {
                0 if u != v && naive.path(u, v).is_none() => {
                    lct.link(u, v);
                    naive.adj[u].push(v);
                    naive.adj[v].push(u);
                    edges.push((u, v));
                }
                1 if !edges.is_empty() => {
                    let (a, b) = edges.swap_remove(rng.random_range(0..edges.len()));
                    lct.cut(a, b);
                    naive.adj[a].retain(|&x| x != b);
                    naive.adj[b].retain(|&x| x != a);
                }
                2 => {
                    let x: f64 = rng.random();
                    lct.set_value(u, x);
                    naive.val[u] = x;
                }
                _ => {
                    let p = naive.path(u, v);
                    assert_eq!(lct.connected(u, v), p.is_some());
                    if let Some(p) = p {
                        let want = p.iter().copied().max_by(|&a, &b| naive.val[a].total_cmp(&naive.val[b])).unwrap();
                        let (got_v, got) = lct.path_max(u, v);
                        assert_eq!(got, want);
                        assert_eq!(got_v, naive.val[want]);
                    }
                }
            }
        }
    }
}
