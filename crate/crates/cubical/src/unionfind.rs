/// Union-find with path halving. Used by edge-class partitioning,
/// development folding, and fiber-product component analysis.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<u32>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n as u32).collect(),
        }
    }

    pub fn push(&mut self) -> u32 {
        let id = self.parent.len() as u32;
        self.parent.push(id);
        id
    }

    pub fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let gp = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = gp;
            x = gp;
        }
        x
    }

    /// Unions the classes; returns false if they were already equal.
    /// The smaller id wins, which keeps canonical representatives stable.
    pub fn union(&mut self, a: u32, b: u32) -> bool {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi as usize] = lo;
        true
    }
}

/// Union-find with a parity bit per element, for two-sidedness labelings.
/// `union` returns Err(()) when the requested relation contradicts an
/// established one (an odd cycle).
#[derive(Debug, Clone)]
pub struct ParityUnionFind {
    parent: Vec<u32>,
    // parity relative to parent
    parity: Vec<u8>,
}

impl ParityUnionFind {
    pub fn new(n: usize) -> Self {
        ParityUnionFind {
            parent: (0..n as u32).collect(),
            parity: vec![0; n],
        }
    }

    pub fn find(&mut self, x: u32) -> (u32, u8) {
        let p = self.parent[x as usize];
        if p == x {
            return (x, 0);
        }
        let (root, par) = self.find(p);
        self.parent[x as usize] = root;
        self.parity[x as usize] ^= par;
        (root, self.parity[x as usize])
    }

    /// Declares parity(a) xor parity(b) == rel.
    pub fn union(&mut self, a: u32, b: u32, rel: u8) -> std::result::Result<(), ()> {
        let (ra, pa) = self.find(a);
        let (rb, pb) = self.find(b);
        if ra == rb {
            if pa ^ pb != rel {
                return Err(());
            }
            return Ok(());
        }
        let (lo, hi, phi) = if ra < rb {
            (ra, rb, pa ^ pb ^ rel)
        } else {
            (rb, ra, pa ^ pb ^ rel)
        };
        self.parent[hi as usize] = lo;
        self.parity[hi as usize] = phi;
        Ok(())
    }
}
