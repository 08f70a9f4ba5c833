//! Pillars, cut-points, spines and increments.
//!
//! The pillar of a base face x is the star-connected plus component of the
//! cell just above x (above a reference height h0), with its bounding faces
//! above h0. A cut-point is a cell that is alone at its level. The spine is
//! everything from the lowest cut-point up; it splits into increments between
//! consecutive cut-points and a remainder above the last one.

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{IsiError, Result};
use crate::interface::Interface;
use crate::lattice::{c3, cell_faces, cell_star_neighbors, face_cells, project, Coord, Region};
use crate::spins::SpinConfig;
use crate::walls::{ceiling_of_collection, restrict, StandardWallCollection};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pillar {
    /// Height-0 face the pillar stands on.
    pub root: Coord,
    /// Reference height in lattice units.
    pub h0: i32,
    pub cells: BTreeSet<Coord>,
    pub faces: BTreeSet<Coord>,
}

/// Bounding faces of a cell set: faces between a member and a non-member.
pub fn bounding_faces(cells: &BTreeSet<Coord>) -> BTreeSet<Coord> {
    let mut out = BTreeSet::new();
    for &c in cells {
        for f in cell_faces(c) {
            let [a, b] = face_cells(f);
            let other = if a == c { b } else { a };
            if !cells.contains(&other) {
                out.insert(f);
            }
        }
    }
    out
}

impl Pillar {
    pub fn empty(root: Coord, h0: i32) -> Pillar {
        Pillar { root: project(root), h0, cells: BTreeSet::new(), faces: BTreeSet::new() }
    }

    /// Pillar read off a spin configuration.
    pub fn from_spins(s: &SpinConfig, x: Coord, h0: i32) -> Pillar {
        let x = project(x);
        let start = c3(x.x, x.y, 2 * h0 + 1);
        let mut p = Pillar::empty(x, h0);
        if s.get(start) < 0 {
            return p;
        }
        let mut q = VecDeque::from([start]);
        p.cells.insert(start);
        while let Some(c) = q.pop_front() {
            for nb in cell_star_neighbors(c) {
                if nb.z > 2 * h0 && s.dims.contains_cell(nb) && s.get(nb) > 0 && p.cells.insert(nb) {
                    q.push_back(nb);
                }
            }
        }
        p.faces = bounding_faces(&p.cells).into_iter().filter(|f| f.z > 2 * h0).collect();
        p
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Largest face height (absolute, lattice units); h0 when empty.
    pub fn top(&self) -> i32 {
        self.faces.iter().map(|f| f.z).max().map_or(self.h0, |z| z / 2)
    }

    /// hgt(P): top minus the reference height.
    pub fn hgt(&self) -> i32 {
        self.top() - self.h0
    }

    /// Same pillar lifted by dz.
    pub fn shifted(&self, dz: i32) -> Pillar {
        Pillar {
            root: self.root,
            h0: self.h0 + dz,
            cells: self.cells.iter().map(|c| c.shift(0, 0, 2 * dz)).collect(),
            faces: self.faces.iter().map(|c| c.shift(0, 0, 2 * dz)).collect(),
        }
    }

    /// Cells grouped by level (z2).
    pub fn levels(&self) -> BTreeMap<i32, Vec<Coord>> {
        let mut m: BTreeMap<i32, Vec<Coord>> = BTreeMap::new();
        for &c in &self.cells {
            m.entry(c.z).or_default().push(c);
        }
        m
    }

    /// Cells that are alone at their level, bottom to top.
    pub fn cut_points(&self) -> Vec<Coord> {
        self.levels().into_values().filter(|v| v.len() == 1).map(|v| v[0]).collect()
    }

    pub fn split(&self) -> Split {
        let cuts = self.cut_points();
        let Some(&v1) = cuts.first() else {
            return Split {
                base_cells: self.cells.clone(),
                base_faces: self.faces.clone(),
                spine: Spine::default(),
            };
        };
        let spine_cells: BTreeSet<Coord> = self.cells.iter().copied().filter(|c| c.z >= v1.z).collect();
        let spine_faces: BTreeSet<Coord> = self.faces.iter().copied().filter(|f| f.z > v1.z - 1).collect();
        Split {
            base_cells: self.cells.iter().copied().filter(|c| c.z < v1.z).collect(),
            base_faces: self.faces.iter().copied().filter(|f| f.z < v1.z).collect(),
            spine: Spine { cells: spine_cells, faces: spine_faces, cut_points: cuts },
        }
    }

    pub fn has_empty_base(&self) -> bool {
        let s = self.split();
        s.base_cells.is_empty() && (s.spine.cells.is_empty() || s.spine.cut_points[0].z == 2 * self.h0 + 1)
    }
}

/// Pillar of x in I with reference height 0.
pub fn pillar(i: &Interface, x: Coord) -> Result<Pillar> {
    Ok(Pillar::from_spins(&i.spins_of()?, x, 0))
}

/// Restricted pillar: the pillar of I restricted to S, lifted by hgt(C_W).
pub fn restricted_pillar(
    i: &Interface,
    x: Coord,
    s: &Region,
    w: &StandardWallCollection,
) -> Result<Pillar> {
    let rep = crate::walls::represent(i)?;
    if !crate::walls::in_event(&rep, s, w) {
        return Err(IsiError::Precondition("interface is not in the event I_W".into()));
    }
    let (_, _, hc) = ceiling_of_collection(w, s)?;
    let ir = restrict(&rep, s)?;
    Ok(pillar(&ir, x)?.shifted(hc))
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Spine {
    pub cells: BTreeSet<Coord>,
    pub faces: BTreeSet<Coord>,
    pub cut_points: Vec<Coord>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Split {
    pub base_cells: BTreeSet<Coord>,
    pub base_faces: BTreeSet<Coord>,
    pub spine: Spine,
}

/// An increment (or remainder) as a cell set, rooted at its bottom cut-point.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Increment {
    /// Sorted cells, translated so that the bottom cell is (1,1,1).
    pub cells: Vec<Coord>,
    pub remainder: bool,
}

pub const ORIGIN_CELL: Coord = c3(1, 1, 1);

impl Increment {
    /// Canonical form of a cell set whose unique lowest cell is `bottom`.
    pub fn from_cells(cells: impl IntoIterator<Item = Coord>, bottom: Coord, remainder: bool) -> Increment {
        let d = ORIGIN_CELL.sub(bottom);
        let mut v: Vec<Coord> = cells.into_iter().map(|c| c.add(d)).collect();
        v.sort();
        Increment { cells: v, remainder }
    }

    /// The trivial increment: two stacked cells.
    pub fn trivial() -> Increment {
        Increment { cells: vec![ORIGIN_CELL, ORIGIN_CELL.shift(0, 0, 2)], remainder: false }
    }

    pub fn is_trivial(&self) -> bool {
        !self.remainder && self.cells == Increment::trivial().cells
    }

    pub fn top_cell(&self) -> Coord {
        let zmax = self.cells.iter().map(|c| c.z).max().unwrap();
        *self.cells.iter().find(|c| c.z == zmax).unwrap()
    }

    /// Height span hgt(top) - hgt(bottom) in lattice units. For a remainder
    /// the top is taken half a unit below its highest face.
    pub fn span(&self) -> i32 {
        let zmax = self.cells.iter().map(|c| c.z).max().unwrap();
        (zmax - ORIGIN_CELL.z) / 2
    }

    /// Faces of the increment: bounding faces without the lowest and the
    /// highest horizontal ones.
    pub fn faces(&self) -> BTreeSet<Coord> {
        let set: BTreeSet<Coord> = self.cells.iter().copied().collect();
        let zmax = self.cells.iter().map(|c| c.z).max().unwrap();
        bounding_faces(&set)
            .into_iter()
            .filter(|f| !(f.is_horizontal() && (f.z == ORIGIN_CELL.z - 1 || f.z == zmax + 1)))
            .collect()
    }

    /// m(X) = |F(X)| - 4 (span + 1).
    pub fn excess(&self) -> i64 {
        self.faces().len() as i64 - 4 * (self.span() as i64 + 1)
    }

    /// Shape check: star-connected, a single cell at the bottom level, every
    /// level up to the top present, and single cells only at the bottom and
    /// (for increments) the top.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(IsiError::Precondition(format!("not an increment: {m}")));
        if self.cells.is_empty() || (!self.remainder && self.cells.len() < 2) {
            return bad("too few cells");
        }
        let mut levels: BTreeMap<i32, usize> = BTreeMap::new();
        for c in &self.cells {
            if !c.is_cell() {
                return bad("member is not a cell");
            }
            *levels.entry(c.z).or_default() += 1;
        }
        let (&zmin, _) = levels.iter().next().unwrap();
        let (&zmax, _) = levels.iter().next_back().unwrap();
        if zmin != ORIGIN_CELL.z || !self.cells.contains(&ORIGIN_CELL) || levels[&zmin] != 1 {
            return bad("bottom is not a single origin cell");
        }
        for z in (zmin..=zmax).step_by(2) {
            let k = levels.get(&z).copied().unwrap_or(0);
            let inner = z != zmin && (self.remainder || z != zmax);
            if k == 0 || (inner && k == 1) {
                return bad("intermediate level with fewer than two cells");
            }
        }
        if !self.remainder && levels[&zmax] != 1 {
            return bad("top is not a single cell");
        }
        let set: HashSet<Coord> = self.cells.iter().copied().collect();
        let mut seen: HashSet<Coord> = [ORIGIN_CELL].into_iter().collect();
        let mut q = VecDeque::from([ORIGIN_CELL]);
        while let Some(c) = q.pop_front() {
            for nb in cell_star_neighbors(c) {
                if set.contains(&nb) && seen.insert(nb) {
                    q.push_back(nb);
                }
            }
        }
        if seen.len() != set.len() {
            return bad("not star-connected");
        }
        Ok(())
    }
}

/// Increments X_1..X_T and the remainder of a spine.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IncrementSeq {
    pub v1: Coord,
    pub increments: Vec<Increment>,
    pub remainder: Increment,
}

impl IncrementSeq {
    pub fn t(&self) -> usize {
        self.increments.len()
    }
}

/// Splits a nonempty spine at its cut-points.
pub fn increments(spine: &Spine) -> Option<IncrementSeq> {
    let cuts = &spine.cut_points;
    let &v1 = cuts.first()?;
    let mut incs = Vec::new();
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let cells = spine.cells.iter().copied().filter(|c| c.z >= a.z && c.z <= b.z);
        incs.push(Increment::from_cells(cells, a, false));
    }
    let last = *cuts.last().unwrap();
    let rem = Increment::from_cells(spine.cells.iter().copied().filter(|c| c.z >= last.z), last, true);
    Some(IncrementSeq { v1, increments: incs, remainder: rem })
}

/// Stacks increments from v1, identifying each bottom cut-point with the top
/// of the previous increment, and finishes with the remainder.
pub fn spine_from_increments(seq: &IncrementSeq) -> Spine {
    let mut cells = BTreeSet::new();
    let mut cuts = vec![seq.v1];
    let mut anchor = seq.v1;
    for x in &seq.increments {
        let d = anchor.sub(ORIGIN_CELL);
        cells.extend(x.cells.iter().map(|c| c.add(d)));
        anchor = x.top_cell().add(d);
        cuts.push(anchor);
    }
    let d = anchor.sub(ORIGIN_CELL);
    cells.extend(seq.remainder.cells.iter().map(|c| c.add(d)));
    // cut-points of the remainder above its bottom would contradict its shape
    let faces = bounding_faces(&cells).into_iter().filter(|f| f.z > seq.v1.z - 1).collect();
    Spine { cells, faces, cut_points: cuts }
}

/// Faces of increment i placed in the pillar (translated back from the
/// canonical form).
pub fn placed_faces(seq: &IncrementSeq) -> Vec<BTreeSet<Coord>> {
    let mut out = Vec::new();
    let mut anchor = seq.v1;
    for x in seq.increments.iter().chain(std::iter::once(&seq.remainder)) {
        let d = anchor.sub(ORIGIN_CELL);
        out.push(x.faces().into_iter().map(|f| f.add(d)).collect());
        if !x.remainder {
            anchor = x.top_cell().add(d);
        }
    }
    out
}

/// All increments (or remainders) with at most `k` cells.
pub fn enumerate_increments(k: usize, remainder: bool) -> Vec<Increment> {
    let mut frontier: BTreeSet<Vec<Coord>> = [vec![ORIGIN_CELL]].into_iter().collect();
    let mut all: BTreeSet<Vec<Coord>> = frontier.clone();
    for _ in 1..k {
        let mut next = BTreeSet::new();
        for set in &frontier {
            for &c in set {
                for nb in cell_star_neighbors(c) {
                    if nb.z <= ORIGIN_CELL.z || set.contains(&nb) {
                        continue;
                    }
                    let mut v = set.clone();
                    v.push(nb);
                    v.sort();
                    next.insert(v);
                }
            }
        }
        all.extend(next.iter().cloned());
        frontier = next;
    }
    all.into_iter()
        .map(|cells| Increment { cells, remainder })
        .filter(|x| x.validate().is_ok())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::BoxDims;

    fn column(d: BoxDims, x: Coord, h: i32) -> Interface {
        let mut s = SpinConfig::ground(d);
        for k in 0..h {
            s.set(c3(x.x, x.y, 2 * k + 1), 1).unwrap();
        }
        Interface::extract(&s).unwrap()
    }

    #[test]
    fn flat_pillar_is_empty() {
        let d = BoxDims::new(3, 3, 3);
        let p = pillar(&Interface::flat(d), c3(1, 1, 0)).unwrap();
        assert!(p.is_empty());
        assert_eq!(p.hgt(), 0);
    }

    #[test]
    fn column_of_three() {
        let d = BoxDims::new(3, 3, 5);
        let i = column(d, c3(1, 1, 0), 3);
        let p = pillar(&i, c3(1, 1, 0)).unwrap();
        assert_eq!(p.cells.len(), 3);
        assert_eq!(p.faces.len(), 13);
        assert_eq!(p.hgt(), 3);
        let s = p.split();
        assert!(s.base_cells.is_empty());
        assert_eq!(s.spine.cut_points.len(), 3);
        let seq = increments(&s.spine).unwrap();
        assert_eq!(seq.t(), 2);
        assert!(seq.increments.iter().all(|x| x.is_trivial() && x.excess() == 0));
        assert_eq!(seq.remainder.excess(), 0);
        assert_eq!(spine_from_increments(&seq), s.spine);
    }

    #[test]
    fn trivial_increment_faces() {
        let x = Increment::trivial();
        assert_eq!(x.faces().len(), 8);
        assert!(x.faces().iter().all(|f| !f.is_horizontal()));
        assert_eq!(x.excess(), 0);
    }

    #[test]
    fn bulge_increment() {
        let d = BoxDims::new(3, 3, 5);
        let mut s = SpinConfig::ground(d);
        for c in [c3(1, 1, 1), c3(1, 1, 3), c3(3, 1, 3), c3(1, 1, 5)] {
            s.set(c, 1).unwrap();
        }
        let i = Interface::extract(&s).unwrap();
        let p = pillar(&i, c3(1, 1, 0)).unwrap();
        let seq = increments(&p.split().spine).unwrap();
        assert_eq!(seq.t(), 1);
        let x = &seq.increments[0];
        assert!(!x.is_trivial());
        assert!(x.excess() >= 2);
        assert!(x.faces().len() as i64 <= 3 * x.excess() + 4);
    }

    #[test]
    fn no_cut_points() {
        let d = BoxDims::new(3, 3, 5);
        let mut s = SpinConfig::ground(d);
        s.set(c3(1, 1, 1), 1).unwrap();
        s.set(c3(3, 1, 1), 1).unwrap();
        let i = Interface::extract(&s).unwrap();
        let p = pillar(&i, c3(1, 1, 0)).unwrap();
        let sp = p.split();
        assert!(sp.spine.cells.is_empty());
        assert_eq!(sp.base_cells.len(), 2);
        assert!(increments(&sp.spine).is_none());
        assert!(!p.has_empty_base());
    }

    #[test]
    fn small_increment_counts() {
        let incs = enumerate_increments(4, false);
        let by_size = |k: usize| incs.iter().filter(|x| x.cells.len() == k).count();
        assert_eq!(by_size(2), 9);
        assert_eq!(by_size(3), 0);
        assert!(by_size(4) > 0);
        for x in &incs {
            let seq = IncrementSeq {
                v1: c3(5, -3, 7),
                increments: vec![x.clone()],
                remainder: Increment { cells: vec![ORIGIN_CELL], remainder: true },
            };
            let sp = spine_from_increments(&seq);
            assert_eq!(increments(&sp).unwrap(), seq);
        }
    }
}
