//! Geometry of Z^3 in doubled coordinates.
//!
//! Every cell, face, edge and vertex is identified with its midpoint; doubling
//! the midpoint gives an integer triple whose parity pattern tells the kinds
//! apart. A cell is all-odd, a face has one even coordinate (its normal axis),
//! an edge two, a vertex three.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Coord {
    pub x: i32,
    pub y: i32,
    pub z: i32,
}

pub const fn c3(x: i32, y: i32, z: i32) -> Coord {
    Coord { x, y, z }
}

impl Coord {
    pub fn get(&self, axis: usize) -> i32 {
        match axis {
            0 => self.x,
            1 => self.y,
            _ => self.z,
        }
    }

    pub fn with(mut self, axis: usize, v: i32) -> Coord {
        match axis {
            0 => self.x = v,
            1 => self.y = v,
            _ => self.z = v,
        }
        self
    }

    pub fn shift(self, dx: i32, dy: i32, dz: i32) -> Coord {
        c3(self.x + dx, self.y + dy, self.z + dz)
    }

    pub fn add(self, o: Coord) -> Coord {
        self.shift(o.x, o.y, o.z)
    }

    pub fn sub(self, o: Coord) -> Coord {
        c3(self.x - o.x, self.y - o.y, self.z - o.z)
    }

    pub fn kind(&self) -> Kind {
        classify(*self)
    }

    pub fn is_cell(&self) -> bool {
        self.x & 1 != 0 && self.y & 1 != 0 && self.z & 1 != 0
    }

    pub fn is_face(&self) -> bool {
        matches!(classify(*self), Kind::Face(_))
    }

    pub fn is_edge(&self) -> bool {
        matches!(classify(*self), Kind::Edge(_))
    }

    /// Horizontal face: normal along the third axis.
    pub fn is_horizontal(&self) -> bool {
        self.z & 1 == 0 && self.x & 1 != 0 && self.y & 1 != 0
    }

    /// True midpoint.
    pub fn midpoint(&self) -> [f64; 3] {
        [self.x as f64 / 2.0, self.y as f64 / 2.0, self.z as f64 / 2.0]
    }
}

impl std::fmt::Display for Coord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{},{})", self.x, self.y, self.z)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Kind {
    Cell,
    /// Face with the given normal axis (0, 1, 2).
    Face(usize),
    /// Edge running along the given axis.
    Edge(usize),
    Vertex,
}

pub fn classify(c: Coord) -> Kind {
    let odd = [c.x & 1 != 0, c.y & 1 != 0, c.z & 1 != 0];
    match odd.iter().filter(|&&o| o).count() {
        3 => Kind::Cell,
        2 => Kind::Face(odd.iter().position(|&o| !o).unwrap()),
        1 => Kind::Edge(odd.iter().position(|&o| o).unwrap()),
        _ => Kind::Vertex,
    }
}

/// The projection rho onto the plane at height 0.
pub fn project(c: Coord) -> Coord {
    c3(c.x, c.y, 0)
}

fn axis_overlap(a: i32, b: i32) -> i32 {
    // vertices of an element along one axis: {a-1, a+1} if odd, {a} if even
    match (a & 1 != 0, b & 1 != 0) {
        (false, false) => (a == b) as i32,
        (true, true) => match (a - b).abs() {
            0 => 2,
            2 => 1,
            _ => 0,
        },
        _ => ((a - b).abs() == 1) as i32,
    }
}

/// Number of lattice vertices shared by the closures of two elements.
pub fn shared_vertices(a: Coord, b: Coord) -> i32 {
    axis_overlap(a.x, b.x) * axis_overlap(a.y, b.y) * axis_overlap(a.z, b.z)
}

/// Nearest-neighbour adjacency for same-kind elements: cells sharing a face,
/// faces sharing an edge, edges sharing a vertex, vertices joined by an edge.
pub fn adjacent(a: Coord, b: Coord) -> bool {
    if a == b {
        return false;
    }
    let k = classify(a);
    debug_assert_eq!(
        std::mem::discriminant(&k),
        std::mem::discriminant(&classify(b))
    );
    let s = shared_vertices(a, b);
    match k {
        Kind::Cell => s == 4,
        Kind::Face(_) => s == 2,
        Kind::Edge(_) => s == 1,
        Kind::Vertex => dist2(a, b) == 4,
    }
}

/// Two distinct elements whose closures share at least one vertex.
pub fn star_adjacent(a: Coord, b: Coord) -> bool {
    a != b && shared_vertices(a, b) > 0
}

/// Squared Euclidean distance between midpoints, in doubled units.
/// `d(a,b) <= r` iff `dist2(a,b) <= 4 r^2`.
pub fn dist2(a: Coord, b: Coord) -> i64 {
    let dx = (a.x - b.x) as i64;
    let dy = (a.y - b.y) as i64;
    let dz = (a.z - b.z) as i64;
    dx * dx + dy * dy + dz * dz
}

pub fn within(a: Coord, b: Coord, r: i64) -> bool {
    dist2(a, b) <= 4 * r * r
}

/// Real-valued distance in lattice units.
pub fn dist(a: Coord, b: Coord) -> f64 {
    (dist2(a, b) as f64).sqrt() / 2.0
}

/// Smallest squared doubled distance between two finite sets.
pub fn set_dist2<'a>(
    a: impl IntoIterator<Item = &'a Coord>,
    b: &[Coord],
) -> Option<i64> {
    let mut best: Option<i64> = None;
    for &p in a {
        for &q in b {
            let d = dist2(p, q);
            if best.is_none_or(|v| d < v) {
                best = Some(d);
            }
        }
    }
    best
}

/// Vertices of the closure of an element.
pub fn vertices(c: Coord) -> Vec<Coord> {
    let opts = |v: i32| -> Vec<i32> {
        if v & 1 != 0 {
            vec![v - 1, v + 1]
        } else {
            vec![v]
        }
    };
    let mut out = Vec::with_capacity(8);
    for x in opts(c.x) {
        for y in opts(c.y) {
            for z in opts(c.z) {
                out.push(c3(x, y, z));
            }
        }
    }
    out
}

/// The six faces bounding a cell.
pub fn cell_faces(c: Coord) -> [Coord; 6] {
    [
        c.shift(-1, 0, 0),
        c.shift(1, 0, 0),
        c.shift(0, -1, 0),
        c.shift(0, 1, 0),
        c.shift(0, 0, -1),
        c.shift(0, 0, 1),
    ]
}

/// The two cells separated by a face.
pub fn face_cells(f: Coord) -> [Coord; 2] {
    match classify(f) {
        Kind::Face(0) => [f.shift(-1, 0, 0), f.shift(1, 0, 0)],
        Kind::Face(1) => [f.shift(0, -1, 0), f.shift(0, 1, 0)],
        _ => [f.shift(0, 0, -1), f.shift(0, 0, 1)],
    }
}

/// The six face-neighbours of a cell.
pub fn cell_neighbors(c: Coord) -> [Coord; 6] {
    [
        c.shift(-2, 0, 0),
        c.shift(2, 0, 0),
        c.shift(0, -2, 0),
        c.shift(0, 2, 0),
        c.shift(0, 0, -2),
        c.shift(0, 0, 2),
    ]
}

/// The 26 cells sharing a vertex with `c`.
pub fn cell_star_neighbors(c: Coord) -> impl Iterator<Item = Coord> {
    (-1..=1).flat_map(move |dx| {
        (-1..=1).flat_map(move |dy| {
            (-1..=1).filter_map(move |dz| {
                if dx == 0 && dy == 0 && dz == 0 {
                    None
                } else {
                    Some(c.shift(2 * dx, 2 * dy, 2 * dz))
                }
            })
        })
    })
}

/// Parity pattern key: bit k set when coordinate k is odd.
fn parity_key(c: Coord) -> usize {
    ((c.x & 1 != 0) as usize) | (((c.y & 1 != 0) as usize) << 1) | (((c.z & 1 != 0) as usize) << 2)
}

struct OffsetTables {
    adj: Vec<Vec<Coord>>,
    star: Vec<Vec<Coord>>,
}

fn offset_tables() -> &'static OffsetTables {
    static T: OnceLock<OffsetTables> = OnceLock::new();
    T.get_or_init(|| {
        let mut adj = vec![Vec::new(); 8];
        let mut star = vec![Vec::new(); 8];
        for key in 0..8usize {
            let base = c3((key & 1) as i32, ((key >> 1) & 1) as i32, ((key >> 2) & 1) as i32);
            for dx in -2..=2 {
                for dy in -2..=2 {
                    for dz in -2..=2 {
                        if (dx & 1) != 0 || (dy & 1) != 0 || (dz & 1) != 0 {
                            continue;
                        }
                        let o = base.shift(dx, dy, dz);
                        if o == base {
                            continue;
                        }
                        if star_adjacent(base, o) {
                            star[key].push(c3(dx, dy, dz));
                        }
                        if adjacent(base, o) {
                            adj[key].push(c3(dx, dy, dz));
                        }
                    }
                }
            }
        }
        OffsetTables { adj, star }
    })
}

/// Offsets of all same-kind elements adjacent to `c`.
///
/// Only same-parity offsets are listed; faces of other orientations that share
/// an edge are reached through the mixed table below.
pub fn same_kind_offsets(c: Coord, star: bool) -> &'static [Coord] {
    let t = offset_tables();
    let k = parity_key(c);
    if star {
        &t.star[k]
    } else {
        &t.adj[k]
    }
}

struct FaceTables {
    // indexed by normal axis
    adj: [Vec<Coord>; 3],
    star: [Vec<Coord>; 3],
}

fn face_tables() -> &'static FaceTables {
    static T: OnceLock<FaceTables> = OnceLock::new();
    T.get_or_init(|| {
        let mut adj: [Vec<Coord>; 3] = Default::default();
        let mut star: [Vec<Coord>; 3] = Default::default();
        for k in 0..3 {
            let base = c3(1, 1, 1).with(k, 0);
            for dx in -2..=2 {
                for dy in -2..=2 {
                    for dz in -2..=2 {
                        let o = base.shift(dx, dy, dz);
                        if o == base || !o.is_face() {
                            continue;
                        }
                        if star_adjacent(base, o) {
                            star[k].push(c3(dx, dy, dz));
                        }
                        if adjacent(base, o) {
                            adj[k].push(c3(dx, dy, dz));
                        }
                    }
                }
            }
        }
        FaceTables { adj, star }
    })
}

fn normal(f: Coord) -> usize {
    match classify(f) {
        Kind::Face(k) => k,
        _ => panic!("{f} is not a face"),
    }
}

/// All faces sharing an edge with the face `f` (12 of them).
pub fn face_neighbors(f: Coord) -> impl Iterator<Item = Coord> {
    face_tables().adj[normal(f)].iter().map(move |&o| f.add(o))
}

/// All faces sharing a vertex with the face `f`.
pub fn face_star_neighbors(f: Coord) -> impl Iterator<Item = Coord> {
    face_tables().star[normal(f)].iter().map(move |&o| f.add(o))
}

/// Neighbours of `c` among elements of its own kind (all orientations for faces).
pub fn neighbors(c: Coord, star: bool) -> Vec<Coord> {
    match classify(c) {
        Kind::Face(_) => {
            if star {
                face_star_neighbors(c).collect()
            } else {
                face_neighbors(c).collect()
            }
        }
        Kind::Edge(_) => {
            let mut out = Vec::new();
            for dx in -2..=2 {
                for dy in -2..=2 {
                    for dz in -2..=2 {
                        let o = c.shift(dx, dy, dz);
                        if o.is_edge() && (if star { star_adjacent(c, o) } else { adjacent(c, o) }) {
                            out.push(o);
                        }
                    }
                }
            }
            out
        }
        _ => same_kind_offsets(c, star).iter().map(|&o| c.add(o)).collect(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Adjacent,
    Star,
}

/// Maximal connected parts of `elems` under the chosen relation.
///
/// Each part is sorted; parts are ordered by their minimal element.
pub fn components(elems: &[Coord], mode: Mode) -> Vec<Vec<Coord>> {
    let set: HashSet<Coord> = elems.iter().copied().collect();
    let mut seen: HashSet<Coord> = HashSet::with_capacity(set.len());
    let mut sorted: Vec<Coord> = set.iter().copied().collect();
    sorted.sort();
    let mut out = Vec::new();
    for &s in &sorted {
        if !seen.insert(s) {
            continue;
        }
        let mut part = vec![s];
        let mut q = VecDeque::from([s]);
        while let Some(c) = q.pop_front() {
            for nb in neighbors(c, mode == Mode::Star) {
                if set.contains(&nb) && seen.insert(nb) {
                    part.push(nb);
                    q.push_back(nb);
                }
            }
        }
        part.sort();
        out.push(part);
    }
    out
}

/// Finite box of `2n x 2m x 2H` cells centred at the origin.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BoxDims {
    pub n: i32,
    pub m: i32,
    pub h: i32,
}

impl BoxDims {
    pub fn new(n: i32, m: i32, h: i32) -> BoxDims {
        assert!(n >= 1 && m >= 1 && h >= 1, "box dimensions must be positive");
        BoxDims { n, m, h }
    }

    pub fn cube(n: i32) -> BoxDims {
        BoxDims::new(n, n, n)
    }

    pub fn nx(&self) -> usize {
        2 * self.n as usize
    }
    pub fn ny(&self) -> usize {
        2 * self.m as usize
    }
    pub fn nz(&self) -> usize {
        2 * self.h as usize
    }

    pub fn num_cells(&self) -> usize {
        self.nx() * self.ny() * self.nz()
    }

    pub fn contains_cell(&self, c: Coord) -> bool {
        c.x.abs() < 2 * self.n && c.y.abs() < 2 * self.m && c.z.abs() < 2 * self.h
    }

    /// Column over the base: strictly inside the horizontal extent.
    pub fn contains_column(&self, c: Coord) -> bool {
        c.x.abs() < 2 * self.n && c.y.abs() < 2 * self.m
    }

    /// A face belongs to F(Lambda) when it bounds some cell of the box.
    pub fn contains_face(&self, f: Coord) -> bool {
        let [a, b] = face_cells(f);
        self.contains_cell(a) || self.contains_cell(b)
    }

    /// Linear index of an in-box cell, x fastest, then y, then z.
    pub fn cell_index(&self, c: Coord) -> usize {
        let ix = ((c.x + 2 * self.n - 1) / 2) as usize;
        let iy = ((c.y + 2 * self.m - 1) / 2) as usize;
        let iz = ((c.z + 2 * self.h - 1) / 2) as usize;
        ix + self.nx() * (iy + self.ny() * iz)
    }

    pub fn cell_at(&self, idx: usize) -> Coord {
        let ix = idx % self.nx();
        let iy = (idx / self.nx()) % self.ny();
        let iz = idx / (self.nx() * self.ny());
        c3(
            2 * ix as i32 - 2 * self.n + 1,
            2 * iy as i32 - 2 * self.m + 1,
            2 * iz as i32 - 2 * self.h + 1,
        )
    }

    pub fn cells(&self) -> impl Iterator<Item = Coord> + '_ {
        (0..self.num_cells()).map(move |i| self.cell_at(i))
    }

    /// Horizontal faces of L_{0,n}: height 0, inside the base.
    pub fn base_faces(&self) -> Vec<Coord> {
        let mut out = Vec::with_capacity(self.nx() * self.ny());
        for iy in 0..self.ny() as i32 {
            for ix in 0..self.nx() as i32 {
                out.push(c3(2 * ix - 2 * self.n + 1, 2 * iy - 2 * self.m + 1, 0));
            }
        }
        out
    }

    pub fn base_contains(&self, f: Coord) -> bool {
        f.z == 0 && f.x.abs() < 2 * self.n && f.y.abs() < 2 * self.m
    }
}

/// A set of height-0 horizontal faces.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Region {
    pub faces: BTreeSet<Coord>,
}

impl Region {
    pub fn new(faces: impl IntoIterator<Item = Coord>) -> Region {
        let faces: BTreeSet<Coord> = faces.into_iter().map(project).collect();
        assert!(faces.iter().all(|f| f.is_horizontal()), "region members must be horizontal faces");
        Region { faces }
    }

    /// The whole base L_{0,n}.
    pub fn base(b: &BoxDims) -> Region {
        Region::new(b.base_faces())
    }

    /// Base faces at lattice distance >= k (in columns) from the box side.
    pub fn inset(b: &BoxDims, k: i32) -> Region {
        Region::new(b.base_faces().into_iter().filter(|f| {
            f.x.abs() < 2 * (b.n - k) && f.y.abs() < 2 * (b.m - k)
        }))
    }

    pub fn contains(&self, f: Coord) -> bool {
        self.faces.contains(&project(f))
    }

    pub fn len(&self) -> usize {
        self.faces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.faces.is_empty()
    }

    /// Number of unit edges separating the region from its complement.
    pub fn boundary_len(&self) -> usize {
        let mut k = 0;
        for f in &self.faces {
            for nb in [f.shift(2, 0, 0), f.shift(-2, 0, 0), f.shift(0, 2, 0), f.shift(0, -2, 0)] {
                if !self.faces.contains(&nb) {
                    k += 1;
                }
            }
        }
        k
    }

    /// Connected with no holes: edge-connected, and the complement within a
    /// padded bounding box is a single star-connected piece.
    pub fn is_simply_connected(&self) -> bool {
        if self.faces.is_empty() {
            return true;
        }
        let v: Vec<Coord> = self.faces.iter().copied().collect();
        if components(&v, Mode::Adjacent).len() != 1 {
            return false;
        }
        let (x0, x1, y0, y1) = bbox2(&v);
        let mut comp = Vec::new();
        let mut x = x0 - 2;
        while x <= x1 + 2 {
            let mut y = y0 - 2;
            while y <= y1 + 2 {
                let f = c3(x, y, 0);
                if !self.faces.contains(&f) {
                    comp.push(f);
                }
                y += 2;
            }
            x += 2;
        }
        components(&comp, Mode::Star).len() == 1
    }
}

/// Bounding box (x0, x1, y0, y1) of a set of height-0 elements.
pub fn bbox2(v: &[Coord]) -> (i32, i32, i32, i32) {
    let mut b = (i32::MAX, i32::MIN, i32::MAX, i32::MIN);
    for c in v {
        b.0 = b.0.min(c.x);
        b.1 = b.1.max(c.x);
        b.2 = b.2.min(c.y);
        b.3 = b.3.max(c.y);
    }
    b
}

/// Connected components of the complement of a planar set.
///
/// `blocked` holds height-0 faces and edges. The free nodes are the height-0
/// faces and edges not in `blocked` (vertices never block or connect); two
/// nodes are joined when they are a face and one of its bounding edges. The
/// analysis runs in the bounding box of `blocked` padded by one face, and
/// everything reachable from the padding is the infinite component.
#[derive(Clone, Debug)]
pub struct PlaneComplement {
    x0: i32,
    y0: i32,
    w: usize,
    h: usize,
    /// 0 = blocked or vertex, 1 = infinite component, k >= 2 = finite component k-1
    label: Vec<u32>,
    pub finite: Vec<Vec<Coord>>,
}

impl PlaneComplement {
    pub fn new(blocked: &HashSet<Coord>) -> PlaneComplement {
        let v: Vec<Coord> = blocked.iter().copied().collect();
        let (mut x0, mut x1, mut y0, mut y1) = if v.is_empty() {
            (0, 0, 0, 0)
        } else {
            bbox2(&v)
        };
        // pad to an even coordinate two faces out, so the border is free
        x0 = (x0 - 4) & !1;
        y0 = (y0 - 4) & !1;
        x1 += 4;
        y1 += 4;
        let w = (x1 - x0 + 1) as usize;
        let h = (y1 - y0 + 1) as usize;
        let mut label = vec![0u32; w * h];
        let idx = |x: i32, y: i32| (x - x0) as usize + w * (y - y0) as usize;
        // an edge between two blocked faces lies in the closed projection
        let covered = |x: i32, y: i32| -> bool {
            if x & 1 == 0 {
                blocked.contains(&c3(x - 1, y, 0)) && blocked.contains(&c3(x + 1, y, 0))
            } else if y & 1 == 0 {
                blocked.contains(&c3(x, y - 1, 0)) && blocked.contains(&c3(x, y + 1, 0))
            } else {
                false
            }
        };
        let free = |x: i32, y: i32| -> bool {
            !((x & 1 == 0) && (y & 1 == 0)) && !blocked.contains(&c3(x, y, 0)) && !covered(x, y)
        };
        let mut next = 2u32;
        let mut finite = Vec::new();
        // border first, so the infinite component gets label 1
        let mut order: Vec<(i32, i32)> = Vec::new();
        for x in x0..=x1 {
            order.push((x, y0));
            order.push((x, y1));
        }
        for y in y0..=y1 {
            order.push((x0, y));
            order.push((x1, y));
        }
        let mut inner: Vec<(i32, i32)> = Vec::new();
        for y in y0..=y1 {
            for x in x0..=x1 {
                inner.push((x, y));
            }
        }
        for (pass, list) in [order, inner].into_iter().enumerate() {
            for (sx, sy) in list {
                if !free(sx, sy) || label[idx(sx, sy)] != 0 {
                    continue;
                }
                let lab = if pass == 0 {
                    1
                } else {
                    next += 1;
                    next - 1
                };
                let mut part = Vec::new();
                label[idx(sx, sy)] = lab;
                let mut q = VecDeque::from([(sx, sy)]);
                while let Some((x, y)) = q.pop_front() {
                    if lab > 1 {
                        part.push(c3(x, y, 0));
                    }
                    for (nx, ny) in [(x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1)] {
                        if nx < x0 || nx > x1 || ny < y0 || ny > y1 {
                            continue;
                        }
                        if free(nx, ny) && label[idx(nx, ny)] == 0 {
                            label[idx(nx, ny)] = lab;
                            q.push_back((nx, ny));
                        }
                    }
                }
                if lab > 1 {
                    part.sort();
                    finite.push(part);
                }
            }
        }
        let mut pc = PlaneComplement { x0, y0, w, h, label, finite };
        pc.canonicalize();
        pc
    }

    fn canonicalize(&mut self) {
        // order finite components by minimal element and relabel
        let mut order: Vec<usize> = (0..self.finite.len()).collect();
        order.sort_by_key(|&i| self.finite[i][0]);
        let mut remap = vec![0u32; self.finite.len() + 2];
        remap[1] = 1;
        for (new, &old) in order.iter().enumerate() {
            remap[old + 2] = new as u32 + 2;
        }
        for l in self.label.iter_mut() {
            if *l > 0 {
                *l = remap[*l as usize];
            }
        }
        let old = std::mem::take(&mut self.finite);
        self.finite = order.into_iter().map(|i| old[i].clone()).collect();
    }

    /// `None` for blocked elements and vertices, `Some(0)` for the infinite
    /// component, `Some(k)` for finite component `k-1`.
    pub fn component_of(&self, c: Coord) -> Option<usize> {
        let (x, y) = (c.x, c.y);
        if x < self.x0 || y < self.y0 || x >= self.x0 + self.w as i32 || y >= self.y0 + self.h as i32 {
            if (x & 1 == 0) && (y & 1 == 0) {
                return None;
            }
            return Some(0);
        }
        match self.label[(x - self.x0) as usize + self.w * (y - self.y0) as usize] {
            0 => None,
            l => Some(l as usize - 1),
        }
    }

    pub fn is_finite(&self, c: Coord) -> bool {
        matches!(self.component_of(c), Some(k) if k > 0)
    }

    /// Faces (not edges) of each finite component.
    pub fn finite_faces(&self) -> Vec<Vec<Coord>> {
        self.finite
            .iter()
            .map(|p| p.iter().copied().filter(|c| c.is_horizontal()).collect())
            .collect()
    }
}

/// Map from height-0 element to the list of items projecting onto it.
pub fn projection_index(faces: impl IntoIterator<Item = Coord>) -> HashMap<Coord, Vec<Coord>> {
    let mut m: HashMap<Coord, Vec<Coord>> = HashMap::new();
    for f in faces {
        m.entry(project(f)).or_default().push(f);
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classify_examples() {
        assert_eq!(classify(c3(1, 1, 1)), Kind::Cell);
        assert_eq!(classify(c3(1, 1, 0)), Kind::Face(2));
        assert_eq!(classify(c3(0, 1, 0)), Kind::Edge(1));
        assert_eq!(classify(c3(0, 0, 0)), Kind::Vertex);
        assert!(c3(1, 1, 0).is_horizontal());
        assert!(!c3(0, 1, 1).is_horizontal());
    }

    #[test]
    fn projection() {
        assert_eq!(project(c3(1, 1, 6)), c3(1, 1, 0));
        assert_eq!(project(c3(0, 1, 5)), c3(0, 1, 0));
        assert!(project(c3(0, 1, 5)).is_edge());
        let f = c3(3, -1, 4);
        assert_eq!(project(project(f)), project(f));
    }

    #[test]
    fn face_adjacency_examples() {
        assert!(adjacent(c3(1, 1, 0), c3(3, 1, 0)));
        assert!(!adjacent(c3(1, 1, 0), c3(3, 3, 0)));
        assert!(star_adjacent(c3(1, 1, 0), c3(3, 3, 0)));
        assert!(!adjacent(c3(1, 1, 0), c3(1, 1, 0)));
        assert!(!star_adjacent(c3(1, 1, 0), c3(1, 1, 0)));
        // perpendicular faces sharing an edge
        assert!(adjacent(c3(1, 1, 0), c3(2, 1, 1)));
    }

    #[test]
    fn neighbour_counts() {
        assert_eq!(face_neighbors(c3(1, 1, 0)).count(), 12);
        assert_eq!(face_star_neighbors(c3(1, 1, 0)).count(), 32);
        assert_eq!(face_star_neighbors(c3(0, 1, 1)).count(), 32);
        assert_eq!(same_kind_offsets(c3(1, 1, 1), false).len(), 6);
        assert_eq!(same_kind_offsets(c3(1, 1, 1), true).len(), 26);
        assert_eq!(neighbors(c3(0, 1, 0), false).len(), 6 + 4);
    }

    #[test]
    fn components_modes() {
        let two = [c3(1, 1, 0), c3(3, 3, 0)];
        assert_eq!(components(&two, Mode::Star).len(), 1);
        assert_eq!(components(&two, Mode::Adjacent).len(), 2);
        let four = [c3(-1, -1, 0), c3(1, -1, 0), c3(-1, 1, 0), c3(1, 1, 0)];
        let parts = components(&four, Mode::Adjacent);
        assert_eq!(parts.len(), 1);
        assert_eq!(parts[0].len(), 4);
    }

    #[test]
    fn box_indexing() {
        let b = BoxDims::new(2, 3, 1);
        assert_eq!(b.num_cells(), 4 * 6 * 2);
        for (i, c) in b.cells().enumerate() {
            assert!(b.contains_cell(c));
            assert_eq!(b.cell_index(c), i);
        }
        assert_eq!(BoxDims::new(1, 1, 1).base_faces().len(), 4);
    }

    #[test]
    fn plane_complement_square_ring() {
        // the 4 edges around the face (1,1,0)
        let blocked: HashSet<Coord> =
            [c3(0, 1, 0), c3(2, 1, 0), c3(1, 0, 0), c3(1, 2, 0)].into_iter().collect();
        let pc = PlaneComplement::new(&blocked);
        assert_eq!(pc.finite.len(), 1);
        assert_eq!(pc.finite[0], vec![c3(1, 1, 0)]);
        assert!(pc.is_finite(c3(1, 1, 0)));
        assert_eq!(pc.component_of(c3(9, 9, 0)), Some(0));
        assert_eq!(pc.component_of(c3(3, 1, 0)), Some(0));
        assert_eq!(pc.component_of(c3(0, 1, 0)), None);
    }

    #[test]
    fn region_shapes() {
        let b = BoxDims::new(3, 3, 1);
        let r = Region::base(&b);
        assert!(r.is_simply_connected());
        assert_eq!(r.boundary_len(), 24);
        let ring = Region::new(r.faces.iter().copied().filter(|f| *f != c3(1, 1, 0)));
        assert!(!ring.is_simply_connected());
    }
}
