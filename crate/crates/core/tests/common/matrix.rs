//! Path semantics as relation algebra over boolean matrices.

use pathtriple_core::topology::PathExpr;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitMatrix {
    n: usize,
    w: usize,
    bits: Vec<u64>,
}

impl BitMatrix {
    pub fn new(n: usize) -> Self {
        let w = n.div_ceil(64).max(1);
        BitMatrix { n, w, bits: vec![0; n * w] }
    }

    pub fn diagonal(mask: &[bool]) -> Self {
        let mut m = BitMatrix::new(mask.len());
        for (i, &on) in mask.iter().enumerate() {
            if on {
                m.set(i, i);
            }
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.w + j / 64] >> (j % 64) & 1 == 1
    }

    pub fn set(&mut self, i: usize, j: usize) {
        self.bits[i * self.w + j / 64] |= 1 << (j % 64);
    }

    fn row(&self, i: usize) -> &[u64] {
        &self.bits[i * self.w..(i + 1) * self.w]
    }

    fn or_row(&mut self, dst: usize, src: &[u64]) {
        for (d, s) in self.bits[dst * self.w..(dst + 1) * self.w].iter_mut().zip(src) {
            *d |= s;
        }
    }

    pub fn union(&self, other: &Self) -> Self {
        let mut m = self.clone();
        for (a, b) in m.bits.iter_mut().zip(&other.bits) {
            *a |= b;
        }
        m
    }

    pub fn transpose(&self) -> Self {
        let mut m = BitMatrix::new(self.n);
        for (i, j) in self.pairs() {
            m.set(j, i);
        }
        m
    }

    pub fn product(&self, other: &Self) -> Self {
        let mut m = BitMatrix::new(self.n);
        for (i, k) in self.pairs() {
            let src = other.row(k).to_vec();
            m.or_row(i, &src);
        }
        m
    }

    /// Transitive closure (Warshall).
    pub fn closure(&self) -> Self {
        let mut m = self.clone();
        for k in 0..self.n {
            let src = m.row(k).to_vec();
            for i in 0..self.n {
                if m.get(i, k) {
                    m.or_row(i, &src);
                }
            }
        }
        m
    }

    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.n {
            for (wi, &word) in self.row(i).iter().enumerate() {
                let mut b = word;
                while b != 0 {
                    let j = wi * 64 + b.trailing_zeros() as usize;
                    out.push((i, j));
                    b &= b - 1;
                }
            }
        }
        out
    }
}

/// Relation denoted by `expr`. `adj[p]` is the edge matrix of predicate
/// `p`, a `None` link is the empty relation, and `ident` is what a
/// zero-length path may relate.
pub fn path_relation(expr: &PathExpr<Option<usize>>, adj: &[BitMatrix], ident: &BitMatrix) -> BitMatrix {
    let rec = |e: &PathExpr<Option<usize>>| path_relation(e, adj, ident);
    match expr {
        PathExpr::Link(None) => BitMatrix::new(ident.n()),
        PathExpr::Link(Some(p)) => adj[*p].clone(),
        PathExpr::Inverse(e) => rec(e).transpose(),
        PathExpr::Sequence(a, b) => rec(a).product(&rec(b)),
        PathExpr::Alternation(a, b) => rec(a).union(&rec(b)),
        PathExpr::ZeroOrMore(e) => ident.union(&rec(e).closure()),
        PathExpr::OneOrMore(e) => rec(e).closure(),
        PathExpr::ZeroOrOne(e) => ident.union(&rec(e)),
    }
}

/// Every operator tree with at most `height` levels; a bare link is one level.
pub fn shapes(height: usize) -> Vec<PathExpr<()>> {
    if height == 0 {
        return Vec::new();
    }
    let sub = shapes(height - 1);
    let mut out = vec![PathExpr::link(())];
    for s in &sub {
        out.push(PathExpr::inverse(s.clone()));
        out.push(PathExpr::star(s.clone()));
        out.push(PathExpr::plus(s.clone()));
        out.push(PathExpr::opt(s.clone()));
    }
    for a in &sub {
        for b in &sub {
            out.push(PathExpr::seq(a.clone(), b.clone()));
            out.push(PathExpr::alt(a.clone(), b.clone()));
        }
    }
    out
}
