/// Union-find with path halving and union by size.
#[derive(Debug, Clone, Default)]
pub(crate) struct DisjointSet {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl DisjointSet {
    pub fn with_capacity(n: usize) -> Self {
        Self { parent: Vec::with_capacity(n), size: Vec::with_capacity(n) }
    }

    pub fn make_set(&mut self) -> usize {
        let id = self.parent.len();
        self.parent.push(id);
        self.size.push(1);
        id
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            let gp = self.parent[self.parent[x]];
            self.parent[x] = gp;
            x = gp;
        }
        x
    }

    /// Returns the new root, or `None` if already joined.
    pub fn union(&mut self, a: usize, b: usize) -> Option<usize> {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return None;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        Some(ra)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn joins() {
        let mut d = DisjointSet::with_capacity(4);
        let ids: Vec<_> = (0..4).map(|_| d.make_set()).collect();
        assert!(d.union(ids[0], ids[1]).is_some());
        assert!(d.union(ids[1], ids[0]).is_none());
        assert!(d.union(ids[2], ids[3]).is_some());
        assert_ne!(d.find(0), d.find(3));
        d.union(1, 2);
        assert_eq!(d.find(0), d.find(3));
    }
}
