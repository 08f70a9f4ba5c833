//! Interface extraction and the canonical spin configuration of an interface.
//!
//! F(sigma) is the set of faces separating disagreeing spins (boundary spins
//! included). The interface is the star-connected component of F(sigma) that
//! contains the height-0 faces outside the box, restricted to the faces of the
//! box. The infinite outer plane is replaced by a virtual ring: a face of F
//! belongs to the seed set when it touches a height-0 vertex on or beyond the
//! side of the box.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::io::{Read, Write};

use crate::error::{IsiError, Result};
use crate::lattice::{c3, cell_faces, face_cells, face_star_neighbors, project, BoxDims, Coord};
use crate::spins::{boundary_spin, SpinConfig};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interface {
    pub dims: BoxDims,
    pub faces: BTreeSet<Coord>,
}

/// Dense indexing of faces of the closed box in doubled coordinates.
#[derive(Clone, Copy, Debug)]
pub(crate) struct FaceGrid {
    pub n: i32,
    pub m: i32,
    pub h: i32,
    sx: usize,
    sy: usize,
    sz: usize,
}

impl FaceGrid {
    pub fn new(d: BoxDims) -> FaceGrid {
        FaceGrid {
            n: d.n,
            m: d.m,
            h: d.h,
            sx: (4 * d.n + 1) as usize,
            sy: (4 * d.m + 1) as usize,
            sz: (4 * d.h + 1) as usize,
        }
    }
    pub fn len(&self) -> usize {
        self.sx * self.sy * self.sz
    }
    pub fn inside(&self, f: Coord) -> bool {
        f.x.abs() <= 2 * self.n && f.y.abs() <= 2 * self.m && f.z.abs() <= 2 * self.h
    }
    pub fn idx(&self, f: Coord) -> usize {
        (f.x + 2 * self.n) as usize
            + self.sx * ((f.y + 2 * self.m) as usize + self.sy * (f.z + 2 * self.h) as usize)
    }
}

/// A face touches the virtual ring when one of its vertices lies at height 0
/// on or beyond the side of the box.
fn touches_ring(d: &BoxDims, f: Coord) -> bool {
    // vertical range of the face closure must include 0
    let zlo = if f.z & 1 != 0 { f.z - 1 } else { f.z };
    let zhi = if f.z & 1 != 0 { f.z + 1 } else { f.z };
    if zlo > 0 || zhi < 0 {
        return false;
    }
    let xmax = if f.x & 1 != 0 { f.x.abs() + 1 } else { f.x.abs() };
    let ymax = if f.y & 1 != 0 { f.y.abs() + 1 } else { f.y.abs() };
    xmax >= 2 * d.n || ymax >= 2 * d.m
}

/// The faces of F(Lambda) separating disagreeing spins, as a dense bitmap.
pub(crate) fn disagreement_faces(cfg: &SpinConfig, grid: &FaceGrid) -> Vec<bool> {
    let d = cfg.dims;
    let mut f_set = vec![false; grid.len()];
    for (i, c) in d.cells().enumerate() {
        let s = cfg.spins[i];
        for f in cell_faces(c) {
            let [a, b] = face_cells(f);
            let other = if a == c { b } else { a };
            if d.contains_cell(other) {
                if other < c {
                    continue;
                }
                if cfg.spins[d.cell_index(other)] != s {
                    f_set[grid.idx(f)] = true;
                }
            } else if boundary_spin(other) != s {
                f_set[grid.idx(f)] = true;
            }
        }
    }
    f_set
}

/// Star-component of the seeds inside a dense face set.
pub(crate) fn ring_component(d: &BoxDims, grid: &FaceGrid, f_set: &[bool]) -> BTreeSet<Coord> {
    let mut seen = vec![false; grid.len()];
    let mut q = VecDeque::new();
    let mut out = BTreeSet::new();
    // seeds lie on the side walls near height 0
    for z in -1..=1 {
        for x in -2 * d.n..=2 * d.n {
            for y in -2 * d.m..=2 * d.m {
                if x.abs() < 2 * d.n - 1 && y.abs() < 2 * d.m - 1 {
                    continue;
                }
                let f = c3(x, y, z);
                if !f.is_face() || !grid.inside(f) {
                    continue;
                }
                let i = grid.idx(f);
                if f_set[i] && !seen[i] && touches_ring(d, f) {
                    seen[i] = true;
                    q.push_back(f);
                }
            }
        }
    }
    while let Some(f) = q.pop_front() {
        out.insert(f);
        for nb in face_star_neighbors(f) {
            if !grid.inside(nb) {
                continue;
            }
            let i = grid.idx(nb);
            if f_set[i] && !seen[i] {
                seen[i] = true;
                q.push_back(nb);
            }
        }
    }
    out
}

impl Interface {
    /// The flat interface: every base face at height 0.
    pub fn flat(dims: BoxDims) -> Interface {
        Interface { dims, faces: dims.base_faces().into_iter().collect() }
    }

    pub fn len(&self) -> usize {
        self.faces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.faces.is_empty()
    }

    pub fn contains(&self, f: Coord) -> bool {
        self.faces.contains(&f)
    }

    /// Extraction without the truncation check.
    pub fn extract_unchecked(cfg: &SpinConfig) -> Interface {
        let grid = FaceGrid::new(cfg.dims);
        let f_set = disagreement_faces(cfg, &grid);
        Interface { dims: cfg.dims, faces: ring_component(&cfg.dims, &grid, &f_set) }
    }

    pub fn extract(cfg: &SpinConfig) -> Result<Interface> {
        let i = Interface::extract_unchecked(cfg);
        if i.touches_lid() {
            return Err(IsiError::Truncated);
        }
        Ok(i)
    }

    /// Any face within the top or bottom layer of the box.
    pub fn touches_lid(&self) -> bool {
        let lim = 2 * self.dims.h - 1;
        self.faces.iter().any(|f| f.z.abs() >= lim)
    }

    /// Canonical spins: breadth-first from the boundary shell, flipping the
    /// spin each time a face of the interface is crossed.
    pub fn spins_of(&self) -> Result<SpinConfig> {
        self.assign_spins(false)
    }

    /// Same as `spins_of`, but also runs a depth-first assignment and checks
    /// that both orders agree.
    pub fn spins_of_checked(&self) -> Result<SpinConfig> {
        let a = self.assign_spins(false)?;
        let b = self.assign_spins(true)?;
        if a != b {
            return Err(IsiError::Bug("spin assignment depends on the sweep order".into()));
        }
        Ok(a)
    }

    fn assign_spins(&self, depth_first: bool) -> Result<SpinConfig> {
        let d = self.dims;
        for f in &self.faces {
            if !f.is_face() || !d.contains_face(*f) {
                return Err(IsiError::InvalidInterface(format!("{f} is not a face of the box")));
            }
        }
        let mut spins = vec![0i8; d.num_cells()];
        let mut dq: VecDeque<Coord> = VecDeque::new();
        // boundary shell: every in-box cell with an outside neighbour
        for (i, c) in d.cells().enumerate() {
            for f in cell_faces(c) {
                let [a, b] = face_cells(f);
                let other = if a == c { b } else { a };
                if d.contains_cell(other) {
                    continue;
                }
                let s = boundary_spin(other) * if self.faces.contains(&f) { -1 } else { 1 };
                if spins[i] == 0 {
                    spins[i] = s;
                    dq.push_back(c);
                } else if spins[i] != s {
                    return Err(IsiError::InvalidInterface(format!(
                        "boundary conflict at cell {c}"
                    )));
                }
            }
        }
        while let Some(c) = if depth_first { dq.pop_back() } else { dq.pop_front() } {
            let s = spins[d.cell_index(c)];
            for f in cell_faces(c) {
                let [a, b] = face_cells(f);
                let other = if a == c { b } else { a };
                if !d.contains_cell(other) {
                    continue;
                }
                let t = s * if self.faces.contains(&f) { -1 } else { 1 };
                let j = d.cell_index(other);
                if spins[j] == 0 {
                    spins[j] = t;
                    dq.push_back(other);
                } else if spins[j] != t {
                    return Err(IsiError::InvalidInterface(format!(
                        "inconsistent crossing at face {f}"
                    )));
                }
            }
        }
        Ok(SpinConfig { dims: d, spins })
    }

    /// Full validity check: the face set is the interface of its own
    /// canonical configuration.
    pub fn validate(&self) -> Result<()> {
        let s = self.spins_of()?;
        let back = Interface::extract_unchecked(&s);
        if back.faces != self.faces {
            return Err(IsiError::InvalidInterface("not the interface of its spin configuration".into()));
        }
        Ok(())
    }

    /// Flip the given cells to minus in the canonical configuration and
    /// extract again.
    pub fn with_cells_minus(&self, cells: &[Coord]) -> Result<Interface> {
        let mut s = self.spins_of()?;
        for &c in cells {
            s.set(c, -1)?;
        }
        Ok(Interface::extract_unchecked(&s))
    }

    /// Flip the given cells to plus in the canonical configuration and
    /// extract again.
    pub fn with_cells_plus(&self, cells: &[Coord]) -> Result<Interface> {
        let mut s = self.spins_of()?;
        for &c in cells {
            s.set(c, 1)?;
        }
        Ok(Interface::extract_unchecked(&s))
    }

    /// Horizontal faces per column (height-0 face -> sorted heights z2).
    pub fn columns(&self) -> HashMap<Coord, Vec<i32>> {
        let mut m: HashMap<Coord, Vec<i32>> = HashMap::new();
        for f in &self.faces {
            if f.is_horizontal() {
                m.entry(project(*f)).or_default().push(f.z);
            }
        }
        for v in m.values_mut() {
            v.sort_unstable();
        }
        m
    }

    /// Largest height reached by a horizontal face (in lattice units).
    pub fn max_height(&self) -> i32 {
        self.faces.iter().filter(|f| f.is_horizontal()).map(|f| f.z / 2).max().unwrap_or(0)
    }

    /// Binary form: u64 count, then each face as three little-endian i32.
    pub fn write_binary<W: Write>(&self, w: &mut W) -> Result<()> {
        w.write_all(&(self.faces.len() as u64).to_le_bytes())?;
        for f in &self.faces {
            for v in [f.x, f.y, f.z] {
                w.write_all(&v.to_le_bytes())?;
            }
        }
        Ok(())
    }

    pub fn read_binary<R: Read>(r: &mut R, dims: BoxDims) -> Result<Interface> {
        let mut b8 = [0u8; 8];
        r.read_exact(&mut b8)?;
        let k = u64::from_le_bytes(b8) as usize;
        let mut faces = BTreeSet::new();
        let mut b4 = [0u8; 4];
        for _ in 0..k {
            let mut v = [0i32; 3];
            for x in v.iter_mut() {
                r.read_exact(&mut b4)?;
                *x = i32::from_le_bytes(b4);
            }
            let f = c3(v[0], v[1], v[2]);
            if !f.is_face() {
                return Err(IsiError::InvalidInterface(format!("{f} is not a face")));
            }
            faces.insert(f);
        }
        Ok(Interface { dims, faces })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_from_ground() {
        let d = BoxDims::new(1, 1, 2);
        let i = Interface::extract(&SpinConfig::ground(d)).unwrap();
        assert_eq!(i, Interface::flat(d));
        assert_eq!(i.len(), 4);
    }

    #[test]
    fn single_bump() {
        let d = BoxDims::new(3, 3, 3);
        let mut s = SpinConfig::ground(d);
        s.set(c3(1, 1, 1), 1).unwrap();
        let i = Interface::extract(&s).unwrap();
        assert_eq!(i.len(), 36 + 4);
        assert!(!i.contains(c3(1, 1, 0)));
        assert!(i.contains(c3(1, 1, 2)));
        assert_eq!(i.spins_of_checked().unwrap(), s);
    }

    #[test]
    fn bubble_excluded() {
        let d = BoxDims::new(3, 3, 4);
        let mut s = SpinConfig::ground(d);
        s.set(c3(1, 1, 5), 1).unwrap();
        let i = Interface::extract(&s).unwrap();
        assert_eq!(i, Interface::flat(d));
        assert_eq!(i.spins_of().unwrap(), SpinConfig::ground(d));
    }

    #[test]
    fn truncation_flag() {
        let d = BoxDims::new(2, 2, 2);
        let mut s = SpinConfig::ground(d);
        s.set(c3(1, 1, 1), 1).unwrap();
        s.set(c3(1, 1, 3), 1).unwrap();
        assert!(matches!(Interface::extract(&s), Err(IsiError::Truncated)));
    }

    #[test]
    fn binary_roundtrip() {
        let d = BoxDims::new(2, 2, 2);
        let i = Interface::flat(d);
        let mut buf = Vec::new();
        i.write_binary(&mut buf).unwrap();
        assert_eq!(buf.len(), 8 + 16 * 12);
        assert_eq!(Interface::read_binary(&mut buf.as_slice(), d).unwrap(), i);
    }

    #[test]
    fn invalid_face_set_rejected() {
        let d = BoxDims::new(2, 2, 2);
        let mut i = Interface::flat(d);
        i.faces.remove(&c3(1, 1, 0));
        assert!(i.validate().is_err());
    }
}
