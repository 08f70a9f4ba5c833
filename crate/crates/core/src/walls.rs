//! Walls and ceilings.
//!
//! A ceiling face is a horizontal face of the interface that is alone in its
//! vertical fiber; every other face is a wall face. Walls and ceilings are the
//! star-connected classes of each kind. Translating each wall so that its
//! exterior ceiling sits at height 0 gives its standard form, and the
//! admissible collection of standard walls determines the interface.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{IsiError, Result};
use crate::interface::Interface;
use crate::lattice::{
    c3, components, project, vertices, BoxDims, Coord, Mode, PlaneComplement, Region,
};

/// Projection of a face set: height-0 faces (from horizontal faces) and
/// height-0 edges (from vertical faces).
pub fn projection(faces: &[Coord]) -> BTreeSet<Coord> {
    faces.iter().map(|&f| project(f)).collect()
}

/// Base faces whose closure meets the edge or face `e` of the plane.
pub fn faces_touching(e: Coord) -> Vec<Coord> {
    if e.is_horizontal() {
        return vec![e];
    }
    if e.x & 1 == 0 {
        vec![e.shift(-1, 0, 0), e.shift(1, 0, 0)]
    } else {
        vec![e.shift(0, -1, 0), e.shift(0, 1, 0)]
    }
}

/// The four edges bounding a height-0 face.
pub fn face_edges(f: Coord) -> [Coord; 4] {
    [f.shift(-1, 0, 0), f.shift(1, 0, 0), f.shift(0, -1, 0), f.shift(0, 1, 0)]
}

/// Planar data of a wall: its projection and the components of the complement.
#[derive(Clone, Debug)]
pub struct WallShape {
    /// Sorted faces.
    pub faces: Vec<Coord>,
    pub proj: BTreeSet<Coord>,
    pub complement: PlaneComplement,
}

impl WallShape {
    pub fn new(mut faces: Vec<Coord>) -> WallShape {
        faces.sort();
        faces.dedup();
        let proj = projection(&faces);
        let blocked: HashSet<Coord> = proj.iter().copied().collect();
        let complement = PlaneComplement::new(&blocked);
        WallShape { faces, proj, complement }
    }

    /// u is nested in the wall: in its projection or in a finite component
    /// of the complement.
    pub fn nests(&self, u: Coord) -> bool {
        let u = project(u);
        self.proj.contains(&u) || self.complement.is_finite(u)
    }

    /// Size of the projection of the hull: projection plus finite components.
    pub fn hull_proj_size(&self) -> usize {
        self.proj.len() + self.complement.finite.iter().map(|p| p.len()).sum::<usize>()
    }

    /// Projection of the hull as a set of height-0 faces and edges.
    pub fn hull_proj(&self) -> BTreeSet<Coord> {
        let mut s = self.proj.clone();
        for p in &self.complement.finite {
            s.extend(p.iter().copied());
        }
        s
    }

    /// Height-0 faces indexed to this wall: nested faces that lie in the
    /// projection or have a bounding edge in it.
    pub fn index_faces(&self) -> BTreeSet<Coord> {
        let mut out = BTreeSet::new();
        for &e in &self.proj {
            for f in faces_touching(e) {
                if self.nests(f) {
                    out.insert(f);
                }
            }
        }
        out
    }

    /// All lattice vertices of the projection.
    pub fn proj_vertices(&self) -> HashSet<Coord> {
        self.proj.iter().flat_map(|&e| vertices(e)).collect()
    }

    /// Faces of the projection (from horizontal faces).
    pub fn proj_face_count(&self) -> usize {
        self.proj.iter().filter(|e| e.is_horizontal()).count()
    }

    /// Excess area |W| - |F(rho(W))|.
    pub fn excess(&self) -> i64 {
        self.faces.len() as i64 - self.proj_face_count() as i64
    }

    /// A base face in the infinite component touching the projection.
    pub fn exterior_neighbours(&self) -> Vec<Coord> {
        let mut out = BTreeSet::new();
        for &e in &self.proj {
            let cands: Vec<Coord> = if e.is_horizontal() {
                face_edges(e).iter().flat_map(|&ed| faces_touching(ed)).collect()
            } else {
                faces_touching(e)
            };
            for f in cands {
                if self.complement.component_of(f) == Some(0) {
                    out.insert(f);
                }
            }
        }
        out.into_iter().collect()
    }

    /// Heights of the interior ceilings of the standard version of this wall,
    /// one per finite component of the complement.
    ///
    /// Spins are propagated column by column: exterior columns flip at height
    /// 0, columns over horizontal faces of the wall flip at those faces, and
    /// crossing an edge flips the spin at every level where the wall has a
    /// vertical face over that edge. Every interior column must flip exactly
    /// once.
    pub fn interior_heights(&self, floor: i32) -> Result<Vec<i32>> {
        let k = self.complement.finite.len();
        if k == 0 {
            return Ok(Vec::new());
        }
        // flips per column face over the projection
        let mut col: HashMap<Coord, Vec<i32>> = HashMap::new();
        let mut vert: HashMap<Coord, Vec<i32>> = HashMap::new();
        let (mut zlo, mut zhi) = (floor * 2, floor * 2);
        for &f in &self.faces {
            zlo = zlo.min(f.z);
            zhi = zhi.max(f.z);
            if f.is_horizontal() {
                col.entry(project(f)).or_default().push(f.z);
            } else {
                vert.entry(project(f)).or_default().push(f.z);
            }
        }
        zlo -= 3;
        zhi += 3;
        // levels are cell heights z2 (odd) in [zlo, zhi]
        let levels: Vec<i32> = (zlo..=zhi).filter(|z| z & 1 != 0).collect();
        let spins_from_flips = |flips: &[i32]| -> Vec<i8> {
            levels
                .iter()
                .map(|&z| {
                    let below = flips.iter().filter(|&&h| h < z).count();
                    if below % 2 == 0 {
                        1
                    } else {
                        -1
                    }
                })
                .collect()
        };
        let mut known: HashMap<Coord, Vec<i8>> = HashMap::new();
        for (f, flips) in &col {
            known.insert(*f, spins_from_flips(flips));
        }
        let exterior = spins_from_flips(&[floor * 2]);
        let mut heights: Vec<Option<i32>> = vec![None; k];
        let finite_faces = self.complement.finite_faces();
        let mut progress = true;
        while progress && heights.iter().any(|h| h.is_none()) {
            progress = false;
            for ci in 0..k {
                if heights[ci].is_some() {
                    continue;
                }
                let mut found: Option<i32> = None;
                for &z in &finite_faces[ci] {
                    for e in face_edges(z) {
                        let other = if e.x & 1 == 0 {
                            c3(2 * e.x - z.x, z.y, 0)
                        } else {
                            c3(z.x, 2 * e.y - z.y, 0)
                        };
                        let base: Option<Vec<i8>> = match self.complement.component_of(other) {
                            None => known.get(&other).cloned(),
                            Some(0) => Some(exterior.clone()),
                            Some(j) => heights[j - 1].map(|h| spins_from_flips(&[2 * h])),
                        };
                        let Some(base) = base else { continue };
                        let vz = vert.get(&e);
                        let sp: Vec<i8> = levels
                            .iter()
                            .zip(base.iter())
                            .map(|(&lv, &s)| {
                                if vz.is_some_and(|v| v.contains(&lv)) {
                                    -s
                                } else {
                                    s
                                }
                            })
                            .collect();
                        let flips: Vec<i32> = (1..sp.len())
                            .filter(|&i| sp[i] != sp[i - 1])
                            .map(|i| levels[i] - 1)
                            .collect();
                        if flips.len() != 1 || sp[0] != 1 {
                            return Err(IsiError::Inadmissible(format!(
                                "column {z} inside a wall does not flip exactly once"
                            )));
                        }
                        let h = flips[0] / 2;
                        match found {
                            None => found = Some(h),
                            Some(h0) if h0 != h => {
                                return Err(IsiError::Inadmissible(format!(
                                    "interior ceiling at {z} has two heights"
                                )))
                            }
                            _ => {}
                        }
                    }
                }
                if let Some(h) = found {
                    heights[ci] = Some(h - floor);
                    progress = true;
                }
            }
        }
        heights
            .into_iter()
            .map(|h| h.ok_or_else(|| IsiError::Inadmissible("unreachable interior component".into())))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ceiling {
    pub faces: Vec<Coord>,
    /// Height in lattice units.
    pub height: i32,
}

impl Ceiling {
    /// The ceiling together with the faces it encloses (edge-connectivity
    /// of the complement, only the ceiling's own faces block).
    pub fn hull(&self) -> Vec<Coord> {
        let blocked: HashSet<Coord> = self.faces.iter().map(|&f| project(f)).collect();
        let pc = PlaneComplement::new(&blocked);
        let mut out: BTreeSet<Coord> = self.faces.iter().copied().collect();
        for part in pc.finite_faces() {
            for f in part {
                out.insert(c3(f.x, f.y, 2 * self.height));
            }
        }
        out.into_iter().collect()
    }

    pub fn proj(&self) -> BTreeSet<Coord> {
        self.faces.iter().map(|&f| project(f)).collect()
    }
}

/// A wall of an interface, with its floor height.
#[derive(Clone, Debug)]
pub struct Wall {
    pub shape: WallShape,
    /// Height of the exterior ceiling (lattice units).
    pub floor: i32,
}

impl Wall {
    pub fn faces(&self) -> &[Coord] {
        &self.shape.faces
    }

    pub fn len(&self) -> usize {
        self.shape.faces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shape.faces.is_empty()
    }

    pub fn excess(&self) -> i64 {
        self.shape.excess()
    }

    pub fn nests(&self, u: Coord) -> bool {
        self.shape.nests(u)
    }

    pub fn standardize(&self) -> StandardWall {
        StandardWall::new(self.shape.faces.iter().map(|f| f.shift(0, 0, -2 * self.floor)).collect())
    }
}

/// Walls and ceilings of an interface.
#[derive(Clone, Debug)]
pub struct Decomposition {
    pub dims: BoxDims,
    pub walls: Vec<Wall>,
    pub ceilings: Vec<Ceiling>,
    /// Index map: base face -> wall number.
    pub index: BTreeMap<Coord, usize>,
    /// Wall containing each wall face.
    pub wall_of: HashMap<Coord, usize>,
    /// Ceiling containing each ceiling face.
    pub ceiling_of: HashMap<Coord, usize>,
}

pub fn decompose(i: &Interface) -> Result<Decomposition> {
    let cols = i.columns();
    let mut ceiling_faces = Vec::new();
    let mut wall_faces = Vec::new();
    for &f in &i.faces {
        if f.is_horizontal() && cols.get(&project(f)).map_or(0, |v| v.len()) == 1 {
            ceiling_faces.push(f);
        } else {
            wall_faces.push(f);
        }
    }
    let ceilings: Vec<Ceiling> = components(&ceiling_faces, Mode::Star)
        .into_iter()
        .map(|faces| {
            let height = faces[0].z / 2;
            Ceiling { faces, height }
        })
        .collect();
    let mut ceiling_of = HashMap::new();
    for (k, c) in ceilings.iter().enumerate() {
        for &f in &c.faces {
            ceiling_of.insert(f, k);
        }
    }
    let mut walls = Vec::new();
    let mut wall_of = HashMap::new();
    for (k, faces) in components(&wall_faces, Mode::Star).into_iter().enumerate() {
        for &f in &faces {
            wall_of.insert(f, k);
        }
        let shape = WallShape::new(faces);
        let mut floor: Option<i32> = None;
        for z in shape.exterior_neighbours() {
            if !i.dims.base_contains(z) {
                continue;
            }
            let Some(c) = cols.get(&z) else { continue };
            if c.len() != 1 {
                return Err(IsiError::Bug(format!("exterior column {z} is not a ceiling column")));
            }
            let h = c[0] / 2;
            match floor {
                None => floor = Some(h),
                Some(h0) if h0 != h => {
                    return Err(IsiError::Bug(format!("wall at {} has two floors", shape.faces[0])))
                }
                _ => {}
            }
        }
        walls.push(Wall { shape, floor: floor.unwrap_or(0) });
    }
    let mut index = BTreeMap::new();
    for (k, w) in walls.iter().enumerate() {
        for f in w.shape.index_faces() {
            if !i.dims.base_contains(f) {
                continue;
            }
            if let Some(prev) = index.insert(f, k) {
                return Err(IsiError::Bug(format!("face {f} indexed to walls {prev} and {k}")));
            }
        }
    }
    Ok(Decomposition { dims: i.dims, walls, ceilings, index, wall_of, ceiling_of })
}

impl Decomposition {
    pub fn wall_face_count(&self) -> usize {
        self.walls.iter().map(|w| w.len()).sum()
    }

    pub fn ceiling_face_count(&self) -> usize {
        self.ceilings.iter().map(|c| c.faces.len()).sum()
    }

    pub fn total_excess(&self) -> i64 {
        self.walls.iter().map(|w| w.excess()).sum()
    }

    /// Walls nesting the height-0 element x, innermost first.
    pub fn nested_sequence(&self, x: Coord) -> Vec<usize> {
        let mut v: Vec<usize> = (0..self.walls.len()).filter(|&k| self.walls[k].nests(x)).collect();
        v.sort_by_key(|&k| (self.walls[k].shape.hull_proj_size(), k));
        v
    }

    /// Ceilings adjacent to wall k lying inside it.
    pub fn interior_ceilings(&self, k: usize) -> Vec<usize> {
        let w = &self.walls[k];
        let mut out = BTreeSet::new();
        for (ci, c) in self.ceilings.iter().enumerate() {
            let f = c.faces[0];
            if !w.shape.complement.is_finite(project(f)) {
                continue;
            }
            // adjacent: some face of the ceiling shares a vertex with the wall
            let touches = c.faces.iter().any(|&cf| {
                crate::lattice::face_star_neighbors(cf).any(|nb| self.wall_of.get(&nb) == Some(&k))
            });
            if touches {
                out.insert(ci);
            }
        }
        out.into_iter().collect()
    }

    /// Hull of wall k: the wall and the hulls of its interior ceilings.
    pub fn wall_hull(&self, k: usize) -> Vec<Coord> {
        let mut s: BTreeSet<Coord> = self.walls[k].shape.faces.iter().copied().collect();
        for ci in self.interior_ceilings(k) {
            s.extend(self.ceilings[ci].hull());
        }
        s.into_iter().collect()
    }

    /// Standard wall representation.
    pub fn represent(&self) -> StandardWallCollection {
        StandardWallCollection::from_walls(self.dims, self.walls.iter().map(|w| w.standardize()).collect())
            .expect("walls of an interface are admissible")
    }
}

/// Height of the interface over a base face, if the fiber has exactly one
/// horizontal face.
pub fn height_at(i: &Interface, x: Coord) -> Option<i32> {
    let x = project(x);
    let mut found = None;
    let mut count = 0;
    for z in -2 * i.dims.h..=2 * i.dims.h {
        if z & 1 == 0 && i.faces.contains(&c3(x.x, x.y, z)) {
            count += 1;
            found = Some(z / 2);
        }
    }
    if count == 1 {
        found
    } else {
        None
    }
}

/// A closed curve of height-0 edges around a level component.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelLine {
    pub level: i32,
    pub edges: Vec<Coord>,
}

/// External boundaries of the star-components of {x : height_at(x) = h}.
pub fn level_lines(i: &Interface, h: i32) -> Vec<LevelLine> {
    let cols = i.columns();
    let set: Vec<Coord> = i
        .dims
        .base_faces()
        .into_iter()
        .filter(|x| cols.get(x).is_some_and(|c| c.len() == 1 && c[0] == 2 * h))
        .collect();
    let mut out = Vec::new();
    for comp in components(&set, Mode::Star) {
        let blocked: HashSet<Coord> = comp.iter().copied().collect();
        let pc = PlaneComplement::new(&blocked);
        // directed edges with the component on the left: (tail vertex, head vertex)
        let mut out_edges: HashMap<(i32, i32), Vec<((i32, i32), Coord)>> = HashMap::new();
        for &f in &comp {
            for e in face_edges(f) {
                let other = c3(2 * e.x - f.x, 2 * e.y - f.y, 0);
                if pc.component_of(other) != Some(0) {
                    continue;
                }
                // walking counterclockwise around f
                let (a, b) = if e.x & 1 == 0 {
                    if e.x > f.x {
                        ((e.x, e.y - 1), (e.x, e.y + 1))
                    } else {
                        ((e.x, e.y + 1), (e.x, e.y - 1))
                    }
                } else if e.y > f.y {
                    ((e.x + 1, e.y), (e.x - 1, e.y))
                } else {
                    ((e.x - 1, e.y), (e.x + 1, e.y))
                };
                out_edges.entry(a).or_default().push((b, e));
            }
        }
        let all: BTreeSet<Coord> = out_edges.values().flatten().map(|&(_, e)| e).collect();
        let Some(&start) = all.iter().next() else { continue };
        let mut tail = None;
        for (t, v) in &out_edges {
            if v.iter().any(|&(_, e)| e == start) {
                tail = Some(*t);
            }
        }
        let mut cur_tail = tail.unwrap();
        let mut cur = out_edges[&cur_tail].iter().find(|&&(_, e)| e == start).copied().unwrap();
        let mut edges = vec![start];
        let mut used: HashSet<Coord> = [start].into_iter().collect();
        loop {
            let (head, _) = cur;
            let dir = (head.0 - cur_tail.0, head.1 - cur_tail.1);
            let cands = out_edges.get(&head).cloned().unwrap_or_default();
            // prefer the rightmost turn so pinched components stay together
            let right = (dir.1, -dir.0);
            let left = (-dir.1, dir.0);
            let mut next = None;
            for want in [right, dir, left] {
                if let Some(&c) = cands
                    .iter()
                    .find(|&&(b, _)| (b.0 - head.0, b.1 - head.1) == want)
                {
                    next = Some(c);
                    break;
                }
            }
            let Some(n) = next else { break };
            if n.1 == start || !used.insert(n.1) {
                break;
            }
            edges.push(n.1);
            cur_tail = head;
            cur = n;
        }
        out.push(LevelLine { level: h, edges });
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct StandardWall {
    /// Sorted faces.
    pub faces: Vec<Coord>,
}

impl StandardWall {
    pub fn new(mut faces: Vec<Coord>) -> StandardWall {
        faces.sort();
        faces.dedup();
        StandardWall { faces }
    }

    pub fn shape(&self) -> WallShape {
        WallShape::new(self.faces.clone())
    }

    pub fn excess(&self) -> i64 {
        self.shape().excess()
    }

    pub fn shifted(&self, dz: i32) -> Vec<Coord> {
        self.faces.iter().map(|f| f.shift(0, 0, 2 * dz)).collect()
    }
}

/// Admissible collection of standard walls over a base.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StandardWallCollection {
    pub dims: BoxDims,
    /// Sorted by minimal face.
    pub walls: Vec<StandardWall>,
    /// Base face -> wall number.
    pub index: BTreeMap<Coord, usize>,
}

impl StandardWallCollection {
    pub fn empty(dims: BoxDims) -> StandardWallCollection {
        StandardWallCollection { dims, walls: Vec::new(), index: BTreeMap::new() }
    }

    /// Checks admissibility: projections pairwise vertex-disjoint and inside
    /// the closed base.
    pub fn from_walls(dims: BoxDims, mut walls: Vec<StandardWall>) -> Result<StandardWallCollection> {
        walls.sort();
        walls.dedup();
        let shapes: Vec<WallShape> = walls.iter().map(|w| w.shape()).collect();
        let mut owner: HashMap<Coord, usize> = HashMap::new();
        for (k, s) in shapes.iter().enumerate() {
            if s.faces.is_empty() {
                return Err(IsiError::Inadmissible("empty wall".into()));
            }
            for v in s.proj_vertices() {
                if v.x.abs() > 2 * dims.n || v.y.abs() > 2 * dims.m {
                    return Err(IsiError::Inadmissible(format!("wall {k} leaves the base")));
                }
                if let Some(&j) = owner.get(&v) {
                    if j != k {
                        return Err(IsiError::Inadmissible(format!(
                            "walls {j} and {k} have touching projections"
                        )));
                    }
                }
                owner.insert(v, k);
            }
        }
        let mut index = BTreeMap::new();
        for (k, s) in shapes.iter().enumerate() {
            for f in s.index_faces() {
                if dims.base_contains(f) {
                    if let Some(j) = index.insert(f, k) {
                        return Err(IsiError::Bug(format!("face {f} indexed to walls {j} and {k}")));
                    }
                }
            }
        }
        Ok(StandardWallCollection { dims, walls, index })
    }

    pub fn len(&self) -> usize {
        self.walls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.walls.is_empty()
    }

    pub fn total_faces(&self) -> usize {
        self.walls.iter().map(|w| w.faces.len()).sum()
    }

    pub fn excess(&self) -> i64 {
        self.walls.iter().map(|w| w.excess()).sum()
    }

    pub fn wall_at(&self, x: Coord) -> Option<&StandardWall> {
        self.index.get(&project(x)).map(|&k| &self.walls[k])
    }

    /// Sub-collection of the walls satisfying `keep`.
    pub fn filter(&self, keep: impl Fn(&StandardWall) -> bool) -> StandardWallCollection {
        StandardWallCollection::from_walls(self.dims, self.walls.iter().filter(|w| keep(w)).cloned().collect())
            .expect("sub-collections stay admissible")
    }

    /// Union with more walls; fails if the result is not admissible.
    pub fn with(&self, more: impl IntoIterator<Item = StandardWall>) -> Result<StandardWallCollection> {
        let mut v = self.walls.clone();
        v.extend(more);
        StandardWallCollection::from_walls(self.dims, v)
    }

    /// Index map restricted to faces outside `s`, as wall face lists.
    pub fn exterior_index(&self, s: &Region) -> BTreeMap<Coord, &StandardWall> {
        self.index
            .iter()
            .filter(|(f, _)| !s.contains(**f))
            .map(|(&f, &k)| (f, &self.walls[k]))
            .collect()
    }

    /// The interface with this standard wall representation.
    ///
    /// Walls are placed from the outermost inwards. Each one is lifted by
    /// the offset of the column just outside it, and then fixes the offsets
    /// of the columns in each of its interior components.
    pub fn reconstruct(&self) -> Result<Interface> {
        let dims = self.dims;
        let shapes: Vec<WallShape> = self.walls.iter().map(|w| w.shape()).collect();
        let mut order: Vec<usize> = (0..shapes.len()).collect();
        order.sort_by_key(|&k| (std::cmp::Reverse(shapes[k].hull_proj_size()), k));
        let mut offset: HashMap<Coord, i32> = HashMap::new();
        let mut covered: HashSet<Coord> = HashSet::new();
        let mut faces: BTreeSet<Coord> = BTreeSet::new();
        for &k in &order {
            let s = &shapes[k];
            let ext = s.exterior_neighbours();
            let lift = ext
                .iter()
                .find(|f| dims.base_contains(**f))
                .map(|f| *offset.get(f).unwrap_or(&0))
                .unwrap_or(0);
            for &f in &s.faces {
                let g = f.shift(0, 0, 2 * lift);
                if !dims.contains_face(g) {
                    return Err(IsiError::Inadmissible(format!("wall face {g} leaves the box")));
                }
                faces.insert(g);
            }
            for e in &s.proj {
                if e.is_horizontal() {
                    covered.insert(*e);
                }
            }
            let hs = s.interior_heights(0)?;
            for (part, h) in s.complement.finite_faces().iter().zip(hs) {
                for &f in part {
                    offset.insert(f, lift + h);
                }
            }
        }
        for f in dims.base_faces() {
            if covered.contains(&f) {
                continue;
            }
            let h = *offset.get(&f).unwrap_or(&0);
            let g = c3(f.x, f.y, 2 * h);
            if !dims.contains_face(g) {
                return Err(IsiError::Inadmissible(format!("ceiling face {g} leaves the box")));
            }
            faces.insert(g);
        }
        Ok(Interface { dims, faces })
    }

    pub fn to_json(&self, region: Option<&Region>) -> WallCollectionFile {
        WallCollectionFile {
            dims: self.dims,
            region: region.map(|r| r.faces.iter().map(|f| [f.x, f.y]).collect()),
            walls: self.walls.iter().map(|w| w.faces.iter().map(|f| [f.x, f.y, f.z]).collect()).collect(),
        }
    }
}

/// Standard wall representation of an interface.
pub fn represent(i: &Interface) -> Result<StandardWallCollection> {
    Ok(decompose(i)?.represent())
}

/// JSON form of a standard wall collection plus an optional base region.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WallCollectionFile {
    pub dims: BoxDims,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub region: Option<Vec<[i32; 2]>>,
    pub walls: Vec<Vec<[i32; 3]>>,
}

impl WallCollectionFile {
    pub fn collection(&self) -> Result<StandardWallCollection> {
        let walls = self
            .walls
            .iter()
            .map(|w| StandardWall::new(w.iter().map(|v| c3(v[0], v[1], v[2])).collect()))
            .collect::<Vec<_>>();
        for w in &walls {
            if let Some(f) = w.faces.iter().find(|f| !f.is_face()) {
                return Err(IsiError::Inadmissible(format!("{f} is not a face")));
            }
        }
        StandardWallCollection::from_walls(self.dims, walls)
    }

    pub fn region(&self) -> Option<Region> {
        self.region.as_ref().map(|r| Region::new(r.iter().map(|v| c3(v[0], v[1], 0))))
    }
}

/// Excess area m(I;J) = |I| - |J|.
pub fn excess_area(i: &Interface, j: &Interface) -> i64 {
    i.len() as i64 - j.len() as i64
}

/// Is I in the event I_W: the walls indexed by faces outside S are exactly
/// those of W, with the same index faces.
pub fn in_event(rep: &StandardWallCollection, s: &Region, w: &StandardWallCollection) -> bool {
    rep.exterior_index(s) == w.exterior_index(s)
        && w.walls.iter().all(|wall| rep.walls.contains(wall))
}

/// Restriction to S: the interface built from the walls not indexed outside S.
pub fn restrict(rep: &StandardWallCollection, s: &Region) -> Result<Interface> {
    let ext: BTreeSet<&StandardWall> = rep.exterior_index(s).into_values().collect();
    rep.filter(|w| !ext.contains(w)).reconstruct()
}

/// The interface of W and its ceiling C_W whose projection contains S.
pub fn ceiling_of_collection(
    w: &StandardWallCollection,
    s: &Region,
) -> Result<(Interface, Ceiling, i32)> {
    let iw = w.reconstruct()?;
    let dec = decompose(&iw)?;
    for c in &dec.ceilings {
        let p = c.proj();
        if s.faces.iter().all(|f| p.contains(f)) {
            return Ok((iw, c.clone(), c.height));
        }
    }
    Err(IsiError::Precondition("no ceiling of I_W covers S".into()))
}

/// Ring wall of height 1 along the side of the box: every top-level cell of
/// the outermost ring of columns is plus at height 1/2.
pub fn ring_wall(dims: BoxDims) -> StandardWall {
    let mut faces = Vec::new();
    let (n2, m2) = (2 * dims.n, 2 * dims.m);
    for x in (-n2 + 1..n2).step_by(2) {
        faces.push(c3(x, -m2, 1));
        faces.push(c3(x, m2, 1));
    }
    for y in (-m2 + 1..m2).step_by(2) {
        faces.push(c3(-n2, y, 1));
        faces.push(c3(n2, y, 1));
    }
    StandardWall::new(faces)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spins::SpinConfig;

    fn bump(d: BoxDims, cells: &[Coord]) -> Interface {
        let mut s = SpinConfig::ground(d);
        for &c in cells {
            s.set(c, 1).unwrap();
        }
        Interface::extract(&s).unwrap()
    }

    #[test]
    fn flat_decomposition() {
        let d = BoxDims::new(3, 3, 3);
        let dec = decompose(&Interface::flat(d)).unwrap();
        assert_eq!(dec.walls.len(), 0);
        assert_eq!(dec.ceilings.len(), 1);
        assert_eq!(dec.ceilings[0].height, 0);
    }

    #[test]
    fn bump_decomposition() {
        let d = BoxDims::new(3, 3, 3);
        let i = bump(d, &[c3(1, 1, 1)]);
        let dec = decompose(&i).unwrap();
        assert_eq!(dec.walls.len(), 1);
        assert_eq!(dec.walls[0].len(), 4);
        assert_eq!(dec.ceilings.len(), 2);
        let mut hs: Vec<i32> = dec.ceilings.iter().map(|c| c.height).collect();
        hs.sort();
        assert_eq!(hs, vec![0, 1]);
        let w = &dec.walls[0];
        assert!(w.nests(c3(1, 1, 0)));
        assert!(!w.nests(c3(11, 1, 0)));
        assert_eq!(w.excess(), 4);
        assert_eq!(w.shape.proj.len(), 4);
        assert_eq!(w.floor, 0);
        assert_eq!(dec.nested_sequence(c3(1, 1, 0)), vec![0]);
        assert!(dec.nested_sequence(c3(-5, -5, 0)).is_empty());
        assert_eq!(height_at(&i, c3(1, 1, 0)), Some(1));
        let top = dec.ceilings.iter().find(|c| c.height == 1).unwrap();
        assert_eq!(top.hull(), top.faces);
        // index faces: the face under the bump only
        assert_eq!(dec.index.keys().copied().collect::<Vec<_>>(), vec![c3(1, 1, 0)]);
    }

    #[test]
    fn standardize_on_plateau() {
        let d = BoxDims::new(4, 4, 5);
        let mut cells = Vec::new();
        for x in [-3, -1, 1, 3] {
            for y in [-3, -1, 1, 3] {
                for z in [1, 3, 5] {
                    cells.push(c3(x, y, z));
                }
            }
        }
        cells.push(c3(1, 1, 7));
        let i = bump(d, &cells);
        let dec = decompose(&i).unwrap();
        let small = dec.walls.iter().find(|w| w.len() == 4).unwrap();
        assert_eq!(small.floor, 3);
        let st = small.standardize();
        assert!(st.faces.iter().all(|f| f.z == 1));
        let again = Wall { shape: st.shape(), floor: 0 }.standardize();
        assert_eq!(again, st);
        let rep = dec.represent();
        assert_eq!(rep.reconstruct().unwrap(), i);
    }

    #[test]
    fn annulus_hull_contains_hole() {
        let mut faces = Vec::new();
        for x in [-3i32, -1, 1, 3] {
            for y in [-3i32, -1, 1, 3] {
                if !(x.abs() == 1 && y.abs() == 1) {
                    faces.push(c3(x, y, 4));
                }
            }
        }
        let c = Ceiling { faces, height: 2 };
        let h = c.hull();
        assert_eq!(h.len(), 16);
        assert!(h.contains(&c3(1, 1, 4)));
    }

    #[test]
    fn empty_collection_is_flat() {
        let d = BoxDims::new(3, 3, 3);
        let e = StandardWallCollection::empty(d);
        assert_eq!(e.reconstruct().unwrap(), Interface::flat(d));
    }

    #[test]
    fn overlapping_walls_rejected() {
        let d = BoxDims::new(3, 3, 3);
        let a = represent(&bump(d, &[c3(1, 1, 1)])).unwrap().walls[0].clone();
        let b = represent(&bump(d, &[c3(3, 1, 1)])).unwrap().walls[0].clone();
        assert!(StandardWallCollection::from_walls(d, vec![a, b]).is_err());
    }

    #[test]
    fn level_lines_of_bump() {
        let d = BoxDims::new(3, 3, 3);
        let i = bump(d, &[c3(1, 1, 1)]);
        let l = level_lines(&i, 1);
        assert_eq!(l.len(), 1);
        let mut e = l[0].edges.clone();
        e.sort();
        assert_eq!(e, vec![c3(0, 1, 0), c3(1, 0, 0), c3(1, 2, 0), c3(2, 1, 0)]);
        let flat = level_lines(&Interface::flat(d), 0);
        assert_eq!(flat.len(), 1);
        assert_eq!(flat[0].edges.len(), 24);
    }

    #[test]
    fn ring_ceiling_height() {
        let d = BoxDims::new(4, 4, 4);
        let w = StandardWallCollection::from_walls(d, vec![ring_wall(d)]).unwrap();
        let s = Region::inset(&d, 1);
        let (iw, c, h) = ceiling_of_collection(&w, &s).unwrap();
        assert_eq!(h, 1);
        assert!(c.faces.len() >= s.len());
        iw.validate().unwrap();
        assert_eq!(represent(&iw).unwrap(), w);
    }
}
