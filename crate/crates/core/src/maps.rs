//! Interface maps.
//!
//! Wall clusters and the deletion map, the isolated-pillar predicate and its
//! cone sets, the isolation map (Algorithm 1) with its trace and witness, the
//! pillar swap, pillar deletion and column insertion.
//!
//! Everything that touches a pillar runs on the restriction of the interface
//! to the region S, where the ceiling under S sits at height 0; results are
//! lifted back by adding the exterior walls W.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};

use crate::error::{IsiError, Result};
use crate::interface::Interface;
use crate::lattice::{c3, components, dist2, project, BoxDims, Coord, Mode, Region};
use crate::pillars::{increments, placed_faces, spine_from_increments, Increment, IncrementSeq, Pillar, ORIGIN_CELL};
use crate::walls::{
    ceiling_of_collection, decompose, faces_touching, in_event, represent, restrict, Ceiling, Decomposition,
    StandardWall, StandardWallCollection, Wall,
};

/// The region S, the exterior walls W and the height of the ceiling C_W.
#[derive(Clone, Debug)]
pub struct Frame {
    pub region: Region,
    pub walls: StandardWallCollection,
    pub hc: i32,
    trivial: bool,
}

impl Frame {
    pub fn new(region: Region, walls: StandardWallCollection) -> Result<Frame> {
        for w in &walls.walls {
            if w.shape().proj.iter().any(|e| e.is_horizontal() && region.contains(*e)) {
                return Err(IsiError::Precondition("rho(W) meets S".into()));
            }
        }
        let hc = if walls.is_empty() { 0 } else { ceiling_of_collection(&walls, &region)?.2 };
        let trivial = walls.is_empty() && region == Region::base(&walls.dims);
        Ok(Frame { region, walls, hc, trivial })
    }

    /// S = the whole base, no exterior walls.
    pub fn whole(dims: BoxDims) -> Frame {
        Frame { region: Region::base(&dims), walls: StandardWallCollection::empty(dims), hc: 0, trivial: true }
    }

    pub fn dims(&self) -> BoxDims {
        self.walls.dims
    }

    /// Is I in the event I_W.
    pub fn holds(&self, i: &Interface) -> Result<bool> {
        if self.trivial {
            return Ok(true);
        }
        Ok(in_event(&represent(i)?, &self.region, &self.walls))
    }

    /// I restricted to S; errors unless I is in I_W.
    pub fn restrict(&self, i: &Interface) -> Result<Interface> {
        if self.trivial {
            return Ok(i.clone());
        }
        let rep = represent(i)?;
        if !in_event(&rep, &self.region, &self.walls) {
            return Err(IsiError::Precondition("interface is not in the event I_W".into()));
        }
        restrict(&rep, &self.region)
    }

    /// Inverse of `restrict`: add the walls of W back.
    pub fn lift(&self, k: &Interface) -> Result<Interface> {
        if self.trivial {
            return Ok(k.clone());
        }
        represent(k)?.with(self.walls.walls.iter().cloned())?.reconstruct()
    }

    fn check_x(&self, x: Coord) -> Result<Coord> {
        let x = project(x);
        if !x.is_horizontal() || !self.region.contains(x) {
            return Err(IsiError::Precondition(format!("{x} is not a face of S")));
        }
        Ok(x)
    }
}

// ---------------------------------------------------------------------------
// clusters

fn hull_boundary(hull: &BTreeSet<Coord>) -> Vec<Coord> {
    let mut out = Vec::new();
    for &f in hull {
        for (e, nb) in [
            (f.shift(-1, 0, 0), f.shift(-2, 0, 0)),
            (f.shift(1, 0, 0), f.shift(2, 0, 0)),
            (f.shift(0, -1, 0), f.shift(0, -2, 0)),
            (f.shift(0, 1, 0), f.shift(0, 2, 0)),
        ] {
            if !hull.contains(&nb) {
                out.push(e);
            }
        }
    }
    out
}

struct HullData {
    faces: BTreeSet<Coord>,
    boundary: Vec<Coord>,
}

impl HullData {
    fn of(c: &Ceiling) -> HullData {
        let faces: BTreeSet<Coord> = c.hull().into_iter().map(project).collect();
        let boundary = hull_boundary(&faces);
        HullData { faces, boundary }
    }

    fn closely_nests(&self, w: &Wall) -> bool {
        let inside = w.shape.proj.iter().all(|&e| faces_touching(e).iter().all(|f| self.faces.contains(f)));
        if !inside {
            return false;
        }
        let m = w.excess();
        if m < 0 {
            return false;
        }
        let mut best = i64::MAX;
        for &e in &w.shape.proj {
            for &b in &self.boundary {
                best = best.min(dist2(e, b));
            }
        }
        best <= 4 * m * m
    }
}

/// W is nested in C and d(rho(boundary of hull C), rho(W)) <= m(W).
pub fn closely_nested(w: &Wall, c: &Ceiling) -> bool {
    HullData::of(c).closely_nests(w)
}

/// Clust(V) as wall numbers of a decomposition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WallCluster {
    pub seeds: Vec<usize>,
    pub walls: BTreeSet<usize>,
    /// Walls added at each round of the closure (round 0 = the seeds).
    pub generations: Vec<Vec<usize>>,
}

impl WallCluster {
    pub fn excess(&self, dec: &Decomposition) -> i64 {
        self.walls.iter().map(|&k| dec.walls[k].excess()).sum()
    }

    pub fn standard(&self, dec: &Decomposition) -> Vec<StandardWall> {
        self.walls.iter().map(|&k| dec.walls[k].standardize()).collect()
    }
}

/// Cluster closure with a cache of ceiling hulls, shared across calls.
pub struct ClusterFinder<'a> {
    dec: &'a Decomposition,
    hulls: HashMap<usize, HullData>,
    interior: HashMap<usize, Vec<usize>>,
}

impl<'a> ClusterFinder<'a> {
    pub fn new(dec: &'a Decomposition) -> ClusterFinder<'a> {
        ClusterFinder { dec, hulls: HashMap::new(), interior: HashMap::new() }
    }

    /// Walls closely nested in ceiling ci.
    fn closely_nested_in(&mut self, ci: usize) -> Vec<usize> {
        let dec = self.dec;
        let hull = self.hulls.entry(ci).or_insert_with(|| HullData::of(&dec.ceilings[ci]));
        (0..dec.walls.len()).filter(|&k| hull.closely_nests(&dec.walls[k])).collect()
    }

    /// Clust(V) = V and, recursively, the clusters of the interior ceilings
    /// of its walls.
    pub fn cluster(&mut self, seeds: &[usize]) -> WallCluster {
        let mut walls: BTreeSet<usize> = seeds.iter().copied().collect();
        let mut generations = vec![walls.iter().copied().collect::<Vec<_>>()];
        let mut frontier = generations[0].clone();
        while !frontier.is_empty() {
            let mut next = BTreeSet::new();
            for k in frontier {
                let dec = self.dec;
                let ceilings = self.interior.entry(k).or_insert_with(|| dec.interior_ceilings(k)).clone();
                for ci in ceilings {
                    for j in self.closely_nested_in(ci) {
                        if !walls.contains(&j) {
                            next.insert(j);
                        }
                    }
                }
            }
            walls.extend(next.iter().copied());
            frontier = next.into_iter().collect();
            if !frontier.is_empty() {
                generations.push(frontier.clone());
            }
        }
        WallCluster { seeds: seeds.to_vec(), walls, generations }
    }
}

pub fn wall_cluster(dec: &Decomposition, seeds: &[usize]) -> WallCluster {
    ClusterFinder::new(dec).cluster(seeds)
}

/// Result of the deletion map.
#[derive(Clone, Debug)]
pub struct Deletion {
    pub interface: Interface,
    pub cluster: WallCluster,
    pub removed: Vec<StandardWall>,
    /// m(Clust(V)).
    pub cluster_excess: i64,
}

/// Phi_V: remove the standard walls of Clust(V) and rebuild. V are wall
/// numbers in `decompose(i)`.
pub fn phi_delete(i: &Interface, v: &[usize], frame: &Frame) -> Result<Deletion> {
    let dec = decompose(i)?;
    if let Some(&k) = v.iter().find(|&&k| k >= dec.walls.len()) {
        return Err(IsiError::Precondition(format!("no wall {k}")));
    }
    if !frame.holds(i)? {
        return Err(IsiError::Precondition("interface is not in the event I_W".into()));
    }
    let cluster = wall_cluster(&dec, v);
    let removed = cluster.standard(&dec);
    if removed.iter().any(|w| frame.walls.walls.contains(w)) {
        return Err(IsiError::Precondition("cluster contains an exterior wall".into()));
    }
    let gone: BTreeSet<&StandardWall> = removed.iter().collect();
    let rep = dec.represent();
    let out = rep.filter(|w| !gone.contains(w)).reconstruct()?;
    let cluster_excess = cluster.excess(&dec);
    Ok(Deletion { interface: out, cluster, removed, cluster_excess })
}

/// Wall number of the wall containing face f.
pub fn wall_containing(dec: &Decomposition, f: Coord) -> Option<usize> {
    dec.wall_of.get(&f).copied()
}

// ---------------------------------------------------------------------------
// isolated pillars

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsoParams {
    pub l: i32,
    pub h: i32,
}

impl IsoParams {
    pub fn new(l: i32, h: i32) -> Result<IsoParams> {
        if l < 1 || h < 1 {
            return Err(IsiError::Precondition("L and h must be positive".into()));
        }
        Ok(IsoParams { l, h })
    }

    pub fn l3(&self) -> i64 {
        (self.l as i64).pow(3)
    }

    /// Increment bound: m(X_t) <= 0 for t <= L^3, <= t after.
    fn increment_ok(&self, t: usize, m: i64) -> bool {
        if (t as i64) <= self.l3() {
            m <= 0
        } else {
            m <= t as i64
        }
    }

    /// Wall bound by distance band, `d2` in doubled squared units. None when
    /// y is beyond L^3 h.
    fn wall_ok(&self, d2: i64, m: i64) -> Option<bool> {
        let l = self.l as i64;
        if d2 <= 4 * l * l {
            return Some(m <= 0);
        }
        let r = self.l3() * self.h as i64;
        if d2 >= 4 * r * r {
            return None;
        }
        Some((m as f64) <= log_dist(d2))
    }
}

impl Default for IsoParams {
    fn default() -> Self {
        IsoParams { l: 3, h: 1 }
    }
}

/// log d for a doubled squared distance.
fn log_dist(d2: i64) -> f64 {
    0.5 * (d2 as f64 / 4.0).ln()
}

/// Planar distance of an element's projection from x, doubled squared units.
fn pd2(f: Coord, x: Coord) -> i64 {
    dist2(project(f), x)
}

/// The five cone sets of a pillar over x, relative to the ceiling height.
///
/// F_par also holds the horizontal faces capping its cells, so that the top
/// face of a short column is covered.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConeSets {
    pub x: Coord,
    pub hc: i32,
    pub params: IsoParams,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConeMembership {
    pub cone: bool,
    pub column: bool,
    pub floor: bool,
    pub valley: bool,
    pub exterior: bool,
}

impl ConeMembership {
    pub fn pillar_side(&self) -> bool {
        self.cone || self.column
    }
    pub fn env_side(&self) -> bool {
        self.floor || self.valley || self.exterior
    }
}

pub fn cone_sets(x: Coord, hc: i32, p: IsoParams) -> ConeSets {
    ConeSets { x: project(x), hc, params: p }
}

impl ConeSets {
    pub fn classify(&self, f: Coord) -> ConeMembership {
        let p = self.params;
        let z2 = f.z - 2 * self.hc; // doubled height above C_W
        let d2 = pd2(f, self.x);
        let l3 = p.l3();
        let h = p.h as i64;
        let z3 = z2 as f64 / 2.0;
        let d = (d2 as f64).sqrt() / 2.0;
        let cone = (z2 as i64) > 2 * l3
            && (z2 as i64) < 20 * h
            && d <= (z3 * z3).min(10.0 * h as f64);
        let column = project(f) != self.x
            && !f.is_horizontal()
            && d2 == 1
            && z2 > 0
            && (z2 as i64) < 2 * l3
            || (f.is_horizontal() && project(f) == self.x && z2 > 0 && (z2 as i64) <= 2 * l3);
        let l = p.l as i64;
        let floor = f.is_horizontal() && z2 == 0 && d2 <= 4 * l * l;
        let valley = d2 >= 4 * l * l && (d2 == 0 || z3 <= log_dist(d2).powi(2));
        let r = l3 * h;
        let exterior = d2 > 4 * r * r;
        ConeMembership { cone, column, floor, valley, exterior }
    }
}

/// Outcome of the isolation check, item by item.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct IsoReport {
    pub isolated: bool,
    pub empty_pillar: bool,
    pub empty_base: bool,
    pub increments_ok: bool,
    pub spine_faces: usize,
    pub spine_ok: bool,
    pub walls_ok: bool,
    /// Index faces of walls breaking their band bound.
    pub offending: Vec<Coord>,
    /// Cone containment; only evaluated for isolated interfaces.
    pub cones_ok: Option<bool>,
}

fn spine_face_union(seq: &IncrementSeq) -> BTreeSet<Coord> {
    placed_faces(seq).into_iter().flatten().collect()
}

/// Iso check on a restricted interface (ceiling at 0).
fn iso_restricted(k: &Interface, x: Coord, region: &Region, p: IsoParams) -> Result<IsoReport> {
    let cfg = k.spins_of()?;
    let pil = Pillar::from_spins(&cfg, x, 0);
    let mut r = IsoReport { empty_pillar: pil.is_empty(), ..Default::default() };
    if pil.is_empty() {
        r.empty_base = true;
        r.increments_ok = true;
        r.spine_ok = true;
    } else {
        r.empty_base = pil.has_empty_base();
        if let Some(seq) = increments(&pil.split().spine) {
            r.increments_ok = seq
                .increments
                .iter()
                .chain(std::iter::once(&seq.remainder))
                .enumerate()
                .all(|(t, inc)| p.increment_ok(t + 1, inc.excess()));
            r.spine_faces = spine_face_union(&seq).len();
        }
        r.spine_ok = (r.spine_faces as i64) <= 10 * p.h as i64;
    }
    let cells: Vec<Coord> = pil.cells.iter().copied().collect();
    let rest = k.with_cells_minus(&cells)?;
    let dec = decompose(&rest)?;
    for (&y, &w) in &dec.index {
        if !region.contains(y) {
            continue;
        }
        if let Some(false) = p.wall_ok(dist2(y, x), dec.walls[w].excess()) {
            r.offending.push(y);
        }
    }
    r.walls_ok = r.offending.is_empty();
    r.isolated = r.empty_base && r.increments_ok && r.spine_ok && r.walls_ok;
    if r.isolated {
        let cones = cone_sets(x, 0, p);
        let ok_p = pil.faces.iter().all(|&f| cones.classify(f).pillar_side());
        let ok_e = rest.faces.iter().all(|&f| cones.classify(f).env_side());
        r.cones_ok = Some(ok_p && ok_e);
    }
    Ok(r)
}

/// (L,h)-isolation of the pillar of x in I restricted to S.
pub fn is_isolated(i: &Interface, x: Coord, frame: &Frame, p: IsoParams) -> Result<IsoReport> {
    let x = frame.check_x(x)?;
    let k = frame.restrict(i)?;
    iso_restricted(&k, x, &frame.region, p)
}

// ---------------------------------------------------------------------------
// Algorithm 1

/// Record of one run of the isolation map.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhiIsoTrace {
    pub x: Coord,
    pub params: IsoParams,
    pub empty_pillar: bool,
    /// No cut-point: v1 is put just above the pillar.
    pub virtual_v1: bool,
    /// v1 in restricted coordinates.
    pub v1: Coord,
    /// Number of increments T (the remainder is X_{T+1}).
    pub t: usize,
    pub increment_excess: Vec<i64>,
    /// Steps j at which A1 / A2 fired.
    pub a1: Vec<usize>,
    pub a2: Vec<usize>,
    pub j_star: usize,
    pub y_star: Option<Coord>,
    pub h_dagger: Option<i32>,
    pub y_dagger: Option<Coord>,
    pub a3: bool,
    pub spine_faces: usize,
    /// Marked index set Y, sorted.
    pub marked: Vec<Coord>,
    /// Standard walls deleted, i.e. the union of the clusters.
    pub deleted: Vec<StandardWall>,
    pub deleted_excess: i64,
    /// Column height added under the new spine.
    pub h_bold: i32,
    /// |W_par| = 4 h_bold.
    pub column_faces: i64,
    /// Cells of the spine at its top level.
    pub top_cells: usize,
    /// Cell below v1 is plus.
    pub below_plus: bool,
    /// m(I;J) = |I| - |J|.
    pub excess: i64,
    /// The closed-form sum over deleted walls and trivialized increments.
    pub formula: i64,
    /// Geometric balance between `formula` and the face count (cap faces of
    /// v1 and of the top level).
    pub correction: i64,
}

impl PhiIsoTrace {
    pub fn formula_consistent(&self) -> bool {
        self.excess == self.formula + self.correction
    }

    /// (name, holds) for each trace bound.
    pub fn bounds(&self) -> Vec<(&'static str, bool)> {
        let m = self.excess;
        let l3 = self.params.l3();
        let mut v = vec![
            ("column <= 2m", self.column_faces <= 2 * m),
            ("deleted <= 3m", self.deleted_excess <= 3 * m),
        ];
        if self.a3 {
            v.push(("h - hbold <= m", (self.params.h - self.h_bold) as i64 <= m));
        } else {
            v.push(("j*-1 <= (2 v L^3) m", self.j_star as i64 - 1 <= l3.max(2) * m));
        }
        v
    }

    pub fn bounds_hold(&self) -> bool {
        self.bounds().iter().all(|b| b.1)
    }
}

/// Green/blue/red face certificate of one application.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Witness {
    /// v1 when the pillar has a spine.
    pub anchor: Option<Coord>,
    /// The green part holds the whole spine.
    pub complete: bool,
    pub green: Vec<Coord>,
    pub parts: Vec<WitnessPart>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WitnessPart {
    pub y: Coord,
    pub blue: Vec<Coord>,
    pub red: Vec<Coord>,
}

impl Witness {
    pub fn face_count(&self) -> usize {
        self.green.len() + self.parts.iter().map(|p| p.blue.len() + p.red.len()).sum::<usize>()
    }

    pub fn digest(&self) -> u64 {
        let mut h = std::collections::hash_map::DefaultHasher::new();
        self.hash(&mut h);
        h.finish()
    }
}

fn x_bar(x: Coord, region: &Region) -> Vec<Coord> {
    let mut v = Vec::new();
    for dx in [-2, 0, 2] {
        for dy in [-2, 0, 2] {
            let f = x.shift(dx, dy, 0);
            if region.contains(f) {
                v.push(f);
            }
        }
    }
    v
}

/// Vertical faces of the column of k cells over x, standard form.
pub fn column_wall(x: Coord, k: i32) -> StandardWall {
    let mut faces = Vec::new();
    for i in 0..k {
        let z = 2 * i + 1;
        faces.extend([x.shift(-1, 0, z), x.shift(1, 0, z), x.shift(0, -1, z), x.shift(0, 1, z)]);
    }
    StandardWall::new(faces)
}

fn column_cells(x: Coord, k: i32) -> Vec<Coord> {
    (0..k).map(|i| c3(x.x, x.y, 2 * i + 1)).collect()
}

/// Smallest index face of each wall.
fn min_index(dec: &Decomposition) -> HashMap<usize, Coord> {
    let mut out = HashMap::new();
    for (&f, &k) in &dec.index {
        out.entry(k).or_insert(f);
    }
    out
}

fn nests_wall(outer: &Wall, inner: &Wall) -> bool {
    inner.shape.proj.iter().next().is_some_and(|&e| outer.nests(e))
}

/// Lexicographically least shortest path of base faces from a face touching
/// rho(a) to one touching rho(b).
fn red_path(dims: BoxDims, a: &Wall, b: &Wall) -> Vec<Coord> {
    let touch = |w: &Wall| -> BTreeSet<Coord> {
        w.shape
            .proj
            .iter()
            .flat_map(|&e| faces_touching(e))
            .filter(|f| dims.base_contains(*f))
            .collect()
    };
    let src = touch(a);
    let dst = touch(b);
    let mut dist: HashMap<Coord, usize> = HashMap::new();
    let mut q = VecDeque::new();
    for &f in &dst {
        dist.insert(f, 0);
        q.push_back(f);
    }
    let nbrs = |f: Coord| {
        let mut v = vec![f.shift(-2, 0, 0), f.shift(2, 0, 0), f.shift(0, -2, 0), f.shift(0, 2, 0)];
        v.retain(|g| dims.base_contains(*g));
        v.sort();
        v
    };
    while let Some(f) = q.pop_front() {
        let d = dist[&f];
        for g in nbrs(f) {
            if let std::collections::hash_map::Entry::Vacant(e) = dist.entry(g) {
                e.insert(d + 1);
                q.push_back(g);
            }
        }
    }
    let Some(mut cur) = src.iter().filter(|f| dist.contains_key(f)).min_by_key(|f| (dist[f], **f)).copied()
    else {
        return Vec::new();
    };
    let mut path = vec![cur];
    while dist[&cur] > 0 {
        cur = nbrs(cur).into_iter().find(|g| dist.get(g) == Some(&(dist[&cur] - 1))).unwrap();
        path.push(cur);
    }
    path
}

/// Cells enclosed by vertical faces, level by level. Regions are coloured
/// by parity of crossings from the outside.
fn cells_from_faces(faces: &[Coord]) -> BTreeSet<Coord> {
    let mut levels: BTreeMap<i32, BTreeSet<Coord>> = BTreeMap::new();
    for f in faces.iter().filter(|f| !f.is_horizontal()) {
        levels.entry(f.z).or_default().insert(project(*f));
    }
    let mut out = BTreeSet::new();
    for (z, edges) in levels {
        let v: Vec<Coord> = edges.iter().copied().collect();
        let (x0, x1, y0, y1) = crate::lattice::bbox2(&v);
        let (x0, x1, y0, y1) = (x0 - 3, x1 + 3, y0 - 3, y1 + 3);
        let odd = |a: i32| a & 1 != 0;
        let mut faces2 = Vec::new();
        let mut x = x0;
        while x <= x1 {
            let mut y = y0;
            while y <= y1 {
                if odd(x) && odd(y) {
                    faces2.push(c3(x, y, 0));
                }
                y += 1;
            }
            x += 1;
        }
        let inside_box = |f: Coord| f.x > x0 && f.x < x1 && f.y > y0 && f.y < y1;
        let mut parity: HashMap<Coord, bool> = HashMap::new();
        let start = *faces2.iter().find(|f| !inside_box(**f) || f.x == x0 + 1).unwrap();
        let mut q = VecDeque::from([(start, false)]);
        parity.insert(start, false);
        while let Some((f, p)) = q.pop_front() {
            for (e, g) in [
                (f.shift(-1, 0, 0), f.shift(-2, 0, 0)),
                (f.shift(1, 0, 0), f.shift(2, 0, 0)),
                (f.shift(0, -1, 0), f.shift(0, -2, 0)),
                (f.shift(0, 1, 0), f.shift(0, 2, 0)),
            ] {
                if g.x < x0 || g.x > x1 || g.y < y0 || g.y > y1 || parity.contains_key(&g) {
                    continue;
                }
                let pg = p ^ edges.contains(&e);
                parity.insert(g, pg);
                q.push_back((g, pg));
            }
        }
        for (f, p) in parity {
            if p {
                out.insert(c3(f.x, f.y, z));
            }
        }
    }
    out
}

struct IsoRun {
    j: Interface,
    trace: PhiIsoTrace,
    witness: Witness,
}

fn iso_core(k: &Interface, x: Coord, region: &Region, p: IsoParams) -> Result<IsoRun> {
    let dims = k.dims;
    let cfg = k.spins_of()?;
    let pil = Pillar::from_spins(&cfg, x, 0);
    let split = pil.split();
    let seq = increments(&split.spine);
    let empty_pillar = pil.is_empty();
    // v1, virtual when there is no cut-point
    let (v1, virtual_v1) = match &seq {
        Some(s) => (s.v1, false),
        None => (c3(x.x, x.y, 2 * pil.hgt() + 1), true),
    };
    let incs: Vec<&Increment> = match &seq {
        Some(s) => s.increments.iter().chain(std::iter::once(&s.remainder)).collect(),
        None => Vec::new(),
    };
    let t = incs.len().saturating_sub(1);
    let inc_m: Vec<i64> = incs.iter().map(|x| x.excess()).collect();
    let placed: Vec<BTreeSet<Coord>> = seq.as_ref().map(placed_faces).unwrap_or_default();
    let spine_faces = seq.as_ref().map_or(0, |s| spine_face_union(s).len());

    // I minus its spine
    let spine_cells: Vec<Coord> = split.spine.cells.iter().copied().collect();
    let rest = k.with_cells_minus(&spine_cells)?;
    let dec = decompose(&rest)?;
    let mins = min_index(&dec);
    let mut finder = ClusterFinder::new(&dec);

    // step 2
    let mut marked: BTreeSet<Coord> = x_bar(x, region).into_iter().collect();
    if region.contains(project(v1)) {
        marked.insert(project(v1));
    }

    // step 3: cut-height of the pillar built from the walls nesting rho(v1)
    let vseq = dec.nested_sequence(project(v1));
    let mut h_dagger = None;
    let mut y_dagger = None;
    if !vseq.is_empty() {
        let coll = StandardWallCollection::from_walls(dims, vseq.iter().map(|&w| dec.walls[w].standardize()).collect())?;
        let iv = coll.reconstruct()?;
        let pv = Pillar::from_spins(&iv.spins_of()?, x, 0);
        if let Some(top) = pv.cut_points().last() {
            h_dagger = Some(top.z);
            let vs: BTreeSet<usize> = vseq.iter().copied().collect();
            let mut best: Option<Coord> = None;
            for &f in pil.faces.iter().filter(|f| f.z == top.z) {
                if let Some(&w) = dec.wall_of.get(&f) {
                    if !vs.contains(&w) {
                        if let Some(&y) = mins.get(&w) {
                            best = Some(best.map_or(y, |b: Coord| b.min(y)));
                        }
                    }
                }
            }
            y_dagger = best;
        }
    }
    if let Some(y) = y_dagger {
        marked.insert(y);
    }

    // step 4: spine scan
    let l3 = p.l3();
    let mut s_mark = 0usize;
    let mut a1 = Vec::new();
    let mut a2 = Vec::new();
    let mut y_star = None;
    let ceilings: Vec<(usize, Vec<Coord>)> = (0..dec.walls.len())
        .map(|w| {
            let faces: Vec<Coord> = dec
                .interior_ceilings(w)
                .into_iter()
                .flat_map(|ci| dec.ceilings[ci].faces.iter().copied())
                .collect();
            (w, faces)
        })
        .filter(|(_, f)| !f.is_empty())
        .collect();
    for j in 1..=incs.len() {
        let m = inc_m[j - 1];
        let fire1 = if (j as i64) <= l3 { m >= 1 } else { m >= j as i64 - 1 };
        if fire1 {
            s_mark = j;
            a1.push(j);
        }
        if j >= 2 {
            let r2 = ((j - 1) * (j - 1)) as i64;
            let xj: Vec<Coord> = placed[j - 1].iter().copied().collect();
            let mut hit: Option<Coord> = None;
            for (w, faces) in &ceilings {
                let close = xj.iter().any(|&a| faces.iter().any(|&b| dist2(a, b) <= r2));
                if close {
                    if let Some(&y) = mins.get(w) {
                        hit = Some(hit.map_or(y, |h: Coord| h.min(y)));
                    }
                }
            }
            if let Some(y) = hit {
                s_mark = j;
                a2.push(j);
                y_star = Some(y);
            }
        }
    }
    let mut j_star = s_mark;
    if let Some(y) = y_star {
        marked.insert(y);
    }
    // step 5
    let a3 = (spine_faces as i64) > 5 * p.h as i64;
    if a3 {
        j_star = incs.len();
    }

    // step 6: environment
    let r = l3 * p.h as i64;
    for &y in &region.faces {
        let d2 = dist2(y, x);
        if d2 > 4 * r * r {
            continue;
        }
        let m = dec.index.get(&y).map_or(0, |&w| dec.walls[w].excess());
        let l = p.l as i64;
        let fire = if d2 <= 4 * l * l { m >= 0 } else { (m as f64) >= log_dist(d2) };
        if fire {
            marked.insert(y);
        }
    }

    // step 7: clusters of the nested sequences, in the order of Y
    let mut deleted: BTreeSet<usize> = BTreeSet::new();
    let mut parts = Vec::new();
    for &y in &marked {
        let ns = dec.nested_sequence(y);
        if ns.is_empty() {
            continue;
        }
        let cl = finder.cluster(&ns);
        let fresh: Vec<usize> = cl.walls.iter().copied().filter(|w| !deleted.contains(w)).collect();
        if fresh.is_empty() {
            continue;
        }
        let nsset: BTreeSet<usize> = ns.iter().copied().collect();
        let mut blue: Vec<Coord> = Vec::new();
        let mut red: BTreeSet<Coord> = BTreeSet::new();
        for &w in &fresh {
            blue.extend(dec.walls[w].standardize().faces);
            // innermost wall of the nested sequence around w
            let inner = ns
                .iter()
                .copied()
                .filter(|&o| o != w && nests_wall(&dec.walls[o], &dec.walls[w]))
                .min_by_key(|&o| (dec.walls[o].shape.hull_proj_size(), o));
            if let Some(o) = inner {
                if !nsset.contains(&w) || nsset.contains(&o) {
                    red.extend(red_path(dims, &dec.walls[w], &dec.walls[o]));
                }
            }
        }
        blue.sort();
        deleted.extend(fresh);
        parts.push(WitnessPart { y, blue, red: red.into_iter().collect() });
    }
    let deleted_excess: i64 = deleted.iter().map(|&w| dec.walls[w].excess()).sum();
    let deleted_std: Vec<StandardWall> = deleted.iter().map(|&w| dec.walls[w].standardize()).collect();

    // steps 8-9
    let h_bold = (v1.z - 1) / 2;
    let rep = dec.represent();
    let gone: BTreeSet<&StandardWall> = deleted_std.iter().collect();
    let mut kept: Vec<StandardWall> = rep.walls.iter().filter(|w| !gone.contains(w)).cloned().collect();
    if h_bold > 0 {
        kept.push(column_wall(x, h_bold));
    }
    let coll = StandardWallCollection::from_walls(dims, kept)
        .map_err(|e| IsiError::Bug(format!("column wall not admissible: {e}")))?;
    let kk = coll.reconstruct()?;

    // step 10: the new spine
    let v1p = c3(x.x, x.y, v1.z);
    let single = Increment { cells: vec![ORIGIN_CELL], remainder: true };
    let top_level = split.spine.cells.iter().map(|c| c.z).max();
    let new_seq = match &seq {
        None => None,
        Some(s) => {
            let (copies, tail, rem) = if a3 {
                ((p.h - h_bold).max(0), Vec::new(), single.clone())
            } else if j_star <= t {
                let c = (s.cut_points_at(j_star).z - v1.z) / 2;
                (c, s.increments[j_star..].to_vec(), s.remainder.clone())
            } else {
                ((top_level.unwrap() - v1.z) / 2, Vec::new(), single.clone())
            };
            let mut xs = vec![Increment::trivial(); copies as usize];
            xs.extend(tail);
            Some(IncrementSeq { v1: v1p, increments: xs, remainder: rem })
        }
    };
    let new_cells: Vec<Coord> = new_seq
        .as_ref()
        .map(|s| spine_from_increments(s).cells.into_iter().collect())
        .unwrap_or_default();
    // step 11
    let jj = kk.with_cells_plus(&new_cells)?;
    let mut expect: BTreeSet<Coord> = column_cells(x, h_bold).into_iter().collect();
    expect.extend(new_cells.iter().copied());
    let pj = Pillar::from_spins(&jj.spins_of()?, x, 0);
    if pj.cells != expect {
        return Err(IsiError::Bug(format!("appended spine at {x} merges with the environment")));
    }

    // bookkeeping
    let excess = k.len() as i64 - jj.len() as i64;
    let column_faces = 4 * h_bold as i64;
    let below_plus = cfg.get(v1.shift(0, 0, -2)) > 0;
    let top_cells = top_level.map_or(0, |z| split.spine.cells.iter().filter(|c| c.z == z).count());
    let (formula, correction) = if seq.is_none() {
        (deleted_excess - column_faces, 0)
    } else if a3 {
        let s = seq.as_ref().unwrap();
        let vt1 = s.cut_points_at(t);
        let f = deleted_excess + inc_m.iter().sum::<i64>() + 2 * vt1.z as i64 - 4 * p.h as i64 - column_faces;
        let n = ((top_level.unwrap() - v1.z) / 2 + 1) as i64;
        let n2 = (p.h - h_bold).max(0) as i64 + 1;
        let c = 4 * n + 1 + top_cells as i64 - 2 * below_plus as i64 - 4 * n2 - 2 * vt1.z as i64 + 4 * p.h as i64;
        (f, c)
    } else {
        let f = deleted_excess + inc_m[..j_star].iter().sum::<i64>() - column_faces;
        let c = if j_star == t + 1 { top_cells as i64 - 1 } else { 0 } + if below_plus { 0 } else { 2 };
        (f, c)
    };

    // witness green part
    let green: BTreeSet<Coord> = placed[..j_star.min(placed.len())].iter().flatten().copied().collect();
    let witness = Witness {
        anchor: seq.as_ref().map(|s| s.v1),
        complete: seq.is_some() && j_star == incs.len(),
        green: green.into_iter().collect(),
        parts,
    };
    let trace = PhiIsoTrace {
        x,
        params: p,
        empty_pillar,
        virtual_v1,
        v1,
        t,
        increment_excess: inc_m,
        a1,
        a2,
        j_star,
        y_star,
        h_dagger,
        y_dagger,
        a3,
        spine_faces,
        marked: marked.into_iter().collect(),
        deleted: deleted_std,
        deleted_excess,
        h_bold,
        column_faces,
        top_cells,
        below_plus,
        excess,
        formula,
        correction,
    };
    Ok(IsoRun { j: jj, trace, witness })
}

trait CutAt {
    fn cut_points_at(&self, j: usize) -> Coord;
}

impl CutAt for IncrementSeq {
    /// v_{j+1} (0-based j): v1 for j = 0.
    fn cut_points_at(&self, j: usize) -> Coord {
        let mut anchor = self.v1;
        for x in &self.increments[..j] {
            anchor = x.top_cell().add(anchor.sub(ORIGIN_CELL));
        }
        anchor
    }
}

/// Algorithm 1. Returns J and the trace.
pub fn phi_iso(i: &Interface, x: Coord, frame: &Frame, p: IsoParams) -> Result<(Interface, PhiIsoTrace)> {
    let (j, t, _) = phi_iso_with_witness(i, x, frame, p)?;
    Ok((j, t))
}

pub fn phi_iso_with_witness(
    i: &Interface,
    x: Coord,
    frame: &Frame,
    p: IsoParams,
) -> Result<(Interface, PhiIsoTrace, Witness)> {
    let x = frame.check_x(x)?;
    let k = frame.restrict(i)?;
    let run = iso_core(&k, x, &frame.region, p)?;
    let j = frame.lift(&run.j)?;
    Ok((j, run.trace, run.witness))
}

/// The witness of phi_iso(I) at x.
pub fn witness(i: &Interface, x: Coord, frame: &Frame, p: IsoParams) -> Result<Witness> {
    Ok(phi_iso_with_witness(i, x, frame, p)?.2)
}

/// Rebuild I from J = phi_iso(I) and the witness.
pub fn witness_reconstruct(j: &Interface, w: &Witness, x: Coord, frame: &Frame) -> Result<Interface> {
    let x = frame.check_x(x)?;
    let jr = frame.restrict(j)?;
    let dims = jr.dims;
    let pj = Pillar::from_spins(&jr.spins_of()?, x, 0);
    // spine: green cells and the shifted upper part of J's pillar
    let mut spine: BTreeSet<Coord> = BTreeSet::new();
    if let Some(v1) = w.anchor {
        let xa = cells_from_faces(&w.green);
        let top = match xa.iter().map(|c| c.z).max() {
            Some(z) => *xa.iter().find(|c| c.z == z).unwrap(),
            None => v1,
        };
        if xa.is_empty() {
            spine.insert(v1);
        }
        spine.extend(xa.iter().copied());
        if !w.complete {
            let (dx, dy) = (top.x - x.x, top.y - x.y);
            spine.extend(pj.cells.iter().filter(|c| c.z >= top.z).map(|c| c.shift(dx, dy, 0)));
        }
    }
    // walls: those of J without its pillar, plus the blue ones
    let cells: Vec<Coord> = pj.cells.iter().copied().collect();
    let rest = jr.with_cells_minus(&cells)?;
    let mut walls = represent(&rest)?.walls;
    let blue: Vec<Coord> = w.parts.iter().flat_map(|p| p.blue.iter().copied()).collect();
    for comp in components(&blue, Mode::Star) {
        walls.push(StandardWall::new(comp));
    }
    let coll = StandardWallCollection::from_walls(dims, walls)?;
    let k = coll.reconstruct()?;
    let spine: Vec<Coord> = spine.into_iter().collect();
    let ir = k.with_cells_plus(&spine)?;
    frame.lift(&ir)
}

// ---------------------------------------------------------------------------
// swap, deletion, insertion

fn restricted_pillar_cells(k: &Interface, x: Coord) -> Result<Pillar> {
    Ok(Pillar::from_spins(&k.spins_of()?, x, 0))
}

/// Exchange the pillar of x in I (restricted to S) with the pillar of x' in
/// the unconstrained I'. Both must be isolated.
pub fn phi_swap(
    i: &Interface,
    x: Coord,
    frame: &Frame,
    ip: &Interface,
    xp: Coord,
    p: IsoParams,
) -> Result<(Interface, Interface)> {
    let x = frame.check_x(x)?;
    let framep = Frame::whole(ip.dims);
    let xp = framep.check_x(xp)?;
    if !is_isolated(i, x, frame, p)?.isolated || !is_isolated(ip, xp, &framep, p)?.isolated {
        return Err(IsiError::Precondition("swap needs isolated pillars".into()));
    }
    let k = frame.restrict(i)?;
    let pa = restricted_pillar_cells(&k, x)?;
    let pb = restricted_pillar_cells(ip, xp)?;
    let a: Vec<Coord> = pa.cells.iter().copied().collect();
    let b: Vec<Coord> = pb.cells.iter().copied().collect();
    let into_i: Vec<Coord> = b.iter().map(|c| c.shift(x.x - xp.x, x.y - xp.y, 0)).collect();
    let into_ip: Vec<Coord> = a.iter().map(|c| c.shift(xp.x - x.x, xp.y - x.y, 0)).collect();
    let j = k.with_cells_minus(&a)?.with_cells_plus(&into_i)?;
    let jp = ip.with_cells_minus(&b)?.with_cells_plus(&into_ip)?;
    Ok((frame.lift(&j)?, jp))
}

/// Result of deleting a pillar.
#[derive(Clone, Debug)]
pub struct PillarDeletion {
    pub interface: Interface,
    pub height: i32,
    pub pillar_faces: usize,
    pub excess: i64,
    pub sym_diff: usize,
}

/// Psi_{y,S}: delete the pillar of y, which must have an empty base.
pub fn psi_delete(i: &Interface, y: Coord, frame: &Frame) -> Result<PillarDeletion> {
    let y = frame.check_x(y)?;
    let k = frame.restrict(i)?;
    let pil = restricted_pillar_cells(&k, y)?;
    if pil.is_empty() || pil.hgt() < 1 {
        return Err(IsiError::Precondition(format!("no pillar at {y}")));
    }
    if !pil.has_empty_base() {
        return Err(IsiError::Precondition(format!("pillar at {y} has a nonempty base")));
    }
    let cells: Vec<Coord> = pil.cells.iter().copied().collect();
    let jr = k.with_cells_minus(&cells)?;
    let j = frame.lift(&jr)?;
    let sym_diff = i.faces.symmetric_difference(&j.faces).count();
    Ok(PillarDeletion {
        height: pil.hgt(),
        pillar_faces: pil.faces.len(),
        excess: i.len() as i64 - j.len() as i64,
        sym_diff,
        interface: j,
    })
}

/// Psi_{x,h}: add the standard column wall of height h over x. No wall of
/// I restricted to S may nest a face of x-bar.
pub fn insert_column(i: &Interface, x: Coord, h: i32, frame: &Frame) -> Result<Interface> {
    let x = frame.check_x(x)?;
    if h < 1 {
        return Err(IsiError::Precondition("column height must be positive".into()));
    }
    let k = frame.restrict(i)?;
    let dec = decompose(&k)?;
    if x_bar(x, &frame.region).into_iter().any(|f| !dec.nested_sequence(f).is_empty()) {
        return Err(IsiError::Precondition(format!("walls nest the neighbourhood of {x}")));
    }
    let coll = dec.represent().with([column_wall(x, h)])?;
    frame.lift(&coll.reconstruct()?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spins::SpinConfig;

    fn with_plus(d: BoxDims, cells: &[Coord]) -> Interface {
        let mut s = SpinConfig::ground(d);
        for &c in cells {
            s.set(c, 1).unwrap();
        }
        Interface::extract(&s).unwrap()
    }

    fn column(x: Coord, h: i32) -> Vec<Coord> {
        column_cells(x, h)
    }

    const X: Coord = c3(1, 1, 0);

    #[test]
    fn bump_deletion() {
        let d = BoxDims::new(4, 4, 4);
        let i = with_plus(d, &[c3(5, 5, 1)]);
        let dec = decompose(&i).unwrap();
        assert_eq!(dec.walls.len(), 1);
        let out = phi_delete(&i, &[0], &Frame::whole(d)).unwrap();
        assert_eq!(out.interface, Interface::flat(d));
        assert_eq!(out.cluster_excess, 4);
        assert_eq!(i.len() as i64 - out.interface.len() as i64, 4);
        // nothing left to delete
        let again = phi_delete(&out.interface, &[], &Frame::whole(d)).unwrap();
        assert_eq!(again.interface, out.interface);
    }

    #[test]
    fn closely_nested_by_distance() {
        // a 12x12 plateau with a bump on top; the bump's edges sit at
        // planar distance k from the plateau's boundary
        let d = BoxDims::new(8, 8, 4);
        for (k, expect) in [(3, true), (5, false)] {
            let mut cells = Vec::new();
            for ix in -6..6 {
                for iy in -6..6 {
                    cells.push(c3(2 * ix + 1, 2 * iy + 1, 1));
                }
            }
            // plateau boundary at x = -12; bump column with left edge at -12 + 2k
            let bx = -12 + 2 * k + 1;
            cells.push(c3(bx, 1, 3));
            let i = with_plus(d, &cells);
            let dec = decompose(&i).unwrap();
            assert_eq!(dec.walls.len(), 2);
            let big = (0..2).max_by_key(|&w| dec.walls[w].len()).unwrap();
            let small = 1 - big;
            assert_eq!(dec.walls[small].excess(), 4);
            let ci = dec.interior_ceilings(big);
            assert_eq!(ci.len(), 1);
            assert_eq!(closely_nested(&dec.walls[small], &dec.ceilings[ci[0]]), expect, "k = {k}");
            let cl = wall_cluster(&dec, &[big]);
            assert_eq!(cl.walls.contains(&small), expect);
        }
    }

    #[test]
    fn insert_then_delete_column() {
        let d = BoxDims::new(4, 4, 4);
        let f = Frame::whole(d);
        let flat = Interface::flat(d);
        let j = insert_column(&flat, X, 2, &f).unwrap();
        assert_eq!(j.len() as i64 - flat.len() as i64, 8);
        assert_eq!(j.faces.symmetric_difference(&flat.faces).count(), 10);
        let back = psi_delete(&j, X, &f).unwrap();
        assert_eq!(back.interface, flat);
        assert_eq!(back.excess, 8);
        assert!(back.excess >= back.pillar_faces as i64 - 1);
        assert!(back.pillar_faces as i64 > back.sym_diff as i64 - 2);
    }

    #[test]
    fn column_is_a_fixed_point() {
        let d = BoxDims::new(6, 6, 5);
        let f = Frame::whole(d);
        let p = IsoParams::new(3, 3).unwrap();
        let i = with_plus(d, &column(X, 3));
        let rep = is_isolated(&i, X, &f, p).unwrap();
        assert!(rep.isolated, "{rep:?}");
        assert_eq!(rep.cones_ok, Some(true));
        let (j, tr, w) = phi_iso_with_witness(&i, X, &f, p).unwrap();
        assert_eq!(j, i);
        assert_eq!(tr.excess, 0);
        assert_eq!(tr.j_star, 0);
        assert!(tr.formula_consistent());
        assert!(w.green.is_empty() && w.parts.is_empty());
        assert_eq!(witness_reconstruct(&j, &w, X, &f).unwrap(), i);
    }

    #[test]
    fn nearby_bump_is_removed() {
        let d = BoxDims::new(6, 6, 5);
        let f = Frame::whole(d);
        let p = IsoParams::new(3, 3).unwrap();
        let mut cells = column(X, 3);
        cells.push(c3(5, 1, 1));
        let i = with_plus(d, &cells);
        assert!(!is_isolated(&i, X, &f, p).unwrap().isolated);
        let (j, tr, w) = phi_iso_with_witness(&i, X, &f, p).unwrap();
        assert_eq!(j, with_plus(d, &column(X, 3)));
        assert_eq!(tr.excess, 4);
        assert!(tr.formula_consistent() && tr.bounds_hold());
        assert_eq!(w.parts.len(), 1);
        assert_eq!(w.parts[0].blue.len(), 4);
        assert!(w.parts[0].red.is_empty());
        assert_eq!(witness_reconstruct(&j, &w, X, &f).unwrap(), i);
    }

    #[test]
    fn nonempty_base_is_not_isolated() {
        let d = BoxDims::new(6, 6, 5);
        let f = Frame::whole(d);
        let p = IsoParams::new(3, 3).unwrap();
        let mut cells = column(X, 3);
        cells.push(c3(3, 1, 1));
        let i = with_plus(d, &cells);
        let r = is_isolated(&i, X, &f, p).unwrap();
        assert!(!r.empty_base && !r.isolated);
        let (j, tr, w) = phi_iso_with_witness(&i, X, &f, p).unwrap();
        assert!(is_isolated(&j, X, &f, p).unwrap().isolated);
        assert!(tr.excess >= 1);
        assert!(tr.formula_consistent(), "{tr:?}");
        assert_eq!(witness_reconstruct(&j, &w, X, &f).unwrap(), i);
    }

    #[test]
    fn cells_from_faces_with_hole() {
        let mut cells = BTreeSet::new();
        for ix in 0..3 {
            for iy in 0..3 {
                if (ix, iy) != (1, 1) {
                    cells.insert(c3(2 * ix + 1, 2 * iy + 1, 1));
                }
            }
        }
        let faces: Vec<Coord> = crate::pillars::bounding_faces(&cells).into_iter().collect();
        assert_eq!(cells_from_faces(&faces), cells);
    }

    #[test]
    fn swap_columns() {
        let d = BoxDims::new(6, 6, 5);
        let p = IsoParams::new(3, 3).unwrap();
        let c = Constraint::ring(d).unwrap();
        let f = Frame::new(c.region.clone(), c.walls.clone()).unwrap();
        let hc = f.hc;
        let base = f.lift(&Interface::flat(d)).unwrap();
        let cells: Vec<Coord> = column(X, 2).into_iter().map(|c| c.shift(0, 0, 2 * hc)).collect();
        let i = base.with_cells_plus(&cells).unwrap();
        let xp = c3(-3, 1, 0);
        let ip = with_plus(d, &column(xp, 3));
        let (j, jp) = phi_swap(&i, X, &f, &ip, xp, p).unwrap();
        assert_eq!(i.len() + ip.len(), j.len() + jp.len());
        assert!(f.holds(&j).unwrap());
        let (i2, ip2) = phi_swap(&j, X, &f, &jp, xp, p).unwrap();
        assert_eq!((i2, ip2), (i, ip));
    }

    use crate::sampler::Constraint;

    #[test]
    fn cone_sets_disjoint_small() {
        let p = IsoParams::new(3, 4).unwrap();
        let cs = cone_sets(X, 0, p);
        for x in -40..40 {
            for y in -40..40 {
                for z in -4..100 {
                    let f = c3(x, y, z);
                    if !f.is_face() {
                        continue;
                    }
                    let m = cs.classify(f);
                    assert!(!(m.pillar_side() && m.env_side()), "{f}");
                }
            }
        }
    }
}
