//! Which cells are coloured: digit-expansion membership, enumeration and
//! counting for sponge-type (base 3) and simplex-type (base 2) fractals.
//!
//! A sponge cell anchor `a` is coloured at level `m` iff, writing every
//! `a_s - 1` in base 3 with `m` digits, no digit position has the digit 1
//! in more than one coordinate. A simplex anchor is coloured iff, in base 2,
//! every bit position is set in at most one coordinate.

use std::fmt;
use std::ops::Deref;
use std::str::FromStr;

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::lattice::LatticeIndex;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    /// Carpet (n=2), Menger sponge (n=3) and their n-dimensional analogues.
    Sponge,
    /// Triangle (n=2), pyramid (n=3) and the n-simplex analogues.
    Simplex,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Sponge => "sponge",
            Family::Simplex => "simplex",
        }
    }

    /// Subdivision base: 3 for sponges, 2 for simplices.
    pub fn base(self) -> usize {
        match self {
            Family::Sponge => 3,
            Family::Simplex => 2,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Family> {
        match s {
            "sponge" => Ok(Family::Sponge),
            "simplex" => Ok(Family::Simplex),
            other => Err(Error::Domain(format!("unknown fractal kind '{other}'"))),
        }
    }
}

/// Fractal family, lattice dimension `n >= 2` and recursion level `m >= 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FractalKind {
    family: Family,
    n: usize,
    m: usize,
}

impl FractalKind {
    pub fn new(family: Family, n: usize, m: usize) -> Result<FractalKind> {
        if n < 2 {
            return Err(Error::Domain(format!("dimension n must be >= 2, got {n}")));
        }
        if m < 1 {
            return Err(Error::Domain(format!("level m must be >= 1, got {m}")));
        }
        Ok(FractalKind { family, n, m })
    }

    pub fn sponge(n: usize, m: usize) -> Result<FractalKind> {
        FractalKind::new(Family::Sponge, n, m)
    }

    pub fn simplex(n: usize, m: usize) -> Result<FractalKind> {
        FractalKind::new(Family::Simplex, n, m)
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Number of cells per axis: `3^m` or `2^m`.
    pub fn side(&self) -> usize {
        self.family.base().pow(self.m as u32)
    }

    /// Number of lattice points per axis needed to hold every cell.
    pub fn point_extent(&self) -> usize {
        self.side() + 1
    }

    /// Vertices per cell: `2^n` parallelotope corners or `n+1` simplex corners.
    pub fn cell_vertex_count(&self) -> usize {
        match self.family {
            Family::Sponge => 1 << self.n,
            Family::Simplex => self.n + 1,
        }
    }
}

/// Anchor `(a_1, ..., a_n)` of a cell: its minimal corner.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CellIndex(LatticeIndex);

impl CellIndex {
    pub fn new(coords: Vec<usize>) -> Result<CellIndex> {
        LatticeIndex::new(coords).map(CellIndex)
    }

    pub fn lattice_index(&self) -> &LatticeIndex {
        &self.0
    }
}

impl Deref for CellIndex {
    type Target = [usize];

    fn deref(&self) -> &[usize] {
        self.0.coords()
    }
}

impl fmt::Display for CellIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

fn check_anchor(a: &[usize], n: usize, m: usize, base: usize) -> Result<()> {
    if a.len() != n {
        return Err(Error::Structure(format!(
            "cell index has {} coordinates, expected {n}",
            a.len()
        )));
    }
    let side = base.pow(m as u32);
    if let Some(&c) = a.iter().find(|&&c| c < 1 || c > side) {
        return Err(Error::Domain(format!(
            "cell coordinate {c} outside [1, {side}] at level {m}"
        )));
    }
    Ok(())
}

/// Sponge membership by base-3 digits: at most one coordinate has digit
/// 1 at any position.
pub fn sponge_member(a: &[usize], n: usize, m: usize) -> Result<bool> {
    check_anchor(a, n, m, 3)?;
    let mut rest: Vec<usize> = a.iter().map(|c| c - 1).collect();
    for _ in 0..m {
        let ones = rest.iter().filter(|&&v| v % 3 == 1).count();
        if ones > 1 {
            return Ok(false);
        }
        rest.iter_mut().for_each(|v| *v /= 3);
    }
    Ok(true)
}

/// Simplex membership: the bit patterns of `a_s - 1` are pairwise disjoint.
pub fn simplex_member(a: &[usize], n: usize, m: usize) -> Result<bool> {
    check_anchor(a, n, m, 2)?;
    let mut seen = 0usize;
    for &c in a {
        let bits = c - 1;
        if seen & bits != 0 {
            return Ok(false);
        }
        seen |= bits;
    }
    Ok(true)
}

pub fn is_member(kind: &FractalKind, a: &[usize]) -> Result<bool> {
    match kind.family {
        Family::Sponge => sponge_member(a, kind.n, kind.m),
        Family::Simplex => simplex_member(a, kind.n, kind.m),
    }
}

/// The digit tuples allowed at one position.
fn digit_choices(kind: &FractalKind) -> Vec<Vec<usize>> {
    let n = kind.n;
    match kind.family {
        Family::Sponge => {
            let mut out = Vec::new();
            let total = 3usize.pow(n as u32);
            for code in 0..total {
                let mut t = Vec::with_capacity(n);
                let mut c = code;
                for _ in 0..n {
                    t.push(c % 3);
                    c /= 3;
                }
                if t.iter().filter(|&&d| d == 1).count() <= 1 {
                    out.push(t);
                }
            }
            out
        }
        Family::Simplex => {
            let mut out = vec![vec![0; n]];
            for s in 0..n {
                let mut t = vec![0; n];
                t[s] = 1;
                out.push(t);
            }
            out
        }
    }
}

/// The coloured cells `S_m` in lexicographic anchor order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellSet {
    kind: FractalKind,
    members: Vec<CellIndex>,
}

impl CellSet {
    pub fn kind(&self) -> &FractalKind {
        &self.kind
    }

    pub fn members(&self) -> &[CellIndex] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, a: &[usize]) -> bool {
        self.members
            .binary_search_by(|probe| probe.deref().cmp(a))
            .is_ok()
    }
}

/// Enumerates `S_m` as the Cartesian product of allowed digit tuples, one
/// per base-`b` position, then sorts lexicographically.
pub fn enumerate_cells(kind: &FractalKind) -> CellSet {
    let choices = digit_choices(kind);
    let base = kind.family.base();
    let mut anchors: Vec<Vec<usize>> = vec![vec![1; kind.n]];
    let mut place = 1usize;
    for _ in 0..kind.m {
        let mut next = Vec::with_capacity(anchors.len() * choices.len());
        for a in &anchors {
            for t in &choices {
                next.push(a.iter().zip(t).map(|(x, d)| x + d * place).collect());
            }
        }
        anchors = next;
        place *= base;
    }
    anchors.sort_unstable();
    let members = anchors
        .into_iter()
        .map(|a| CellIndex(LatticeIndex::new(a).expect("anchors start at 1")))
        .collect();
    CellSet { kind: *kind, members }
}

/// `(2^n + n 2^{n-1})^m` for sponges, `(n+1)^m` for simplices.
pub fn count_closed_form(kind: &FractalKind) -> BigUint {
    let per_level = match kind.family {
        Family::Sponge => {
            (BigUint::from(1u32) << kind.n) + BigUint::from(kind.n) * (BigUint::from(1u32) << (kind.n - 1))
        }
        Family::Simplex => BigUint::from(kind.n + 1),
    };
    per_level.pow(kind.m as u32)
}

/// `A_m` from `A_1 = [[1,1],[1,0]]` and `A_{k+1} = [[A_k, A_k], [A_k, 0]]`.
pub fn triangle_block_matrix(m: usize) -> Result<Vec<Vec<u8>>> {
    if m < 1 {
        return Err(Error::Domain("block matrix level must be >= 1".into()));
    }
    let mut a = vec![vec![1u8, 1], vec![1, 0]];
    for _ in 1..m {
        let s = a.len();
        let mut next = vec![vec![0u8; 2 * s]; 2 * s];
        for i in 0..s {
            for j in 0..s {
                next[i][j] = a[i][j];
                next[i][j + s] = a[i][j];
                next[i + s][j] = a[i][j];
            }
        }
        a = next;
    }
    Ok(a)
}
