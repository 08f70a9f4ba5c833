//! Verification suite: one check per acceptance criterion, each returning
//! the measured values next to its verdict.
//!
//! `Level::Quick` runs the bijection and map-property checks on reduced
//! sample counts; `Level::Full` runs everything at the pinned sizes.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::time::Instant;

use isi_core::interface::Interface;
use isi_core::lattice::{c3, cell_neighbors, BoxDims, Coord, Region};
use isi_core::maps::{
    insert_column, is_isolated, phi_iso, phi_iso_with_witness, phi_swap, psi_delete, witness_reconstruct,
    Frame, IsoParams,
};
use isi_core::pillars::{
    enumerate_increments, increments, spine_from_increments, Increment, IncrementSeq, Pillar, ORIGIN_CELL,
};
use isi_core::sampler::{
    for_each_conditional, plus_probability, sample_interfaces, Chain, Constraint, Schedule,
};
use isi_core::spins::{enumerate_exact, SpinConfig};
use isi_core::stats::{
    self, deep_faces, gamma, gamma_in_band, gamma_log, m_star_log, overlaps, pillar_heights,
    AlphaTable, TailTable,
};
use isi_core::walls::{decompose, projection, represent, StandardWall, StandardWallCollection};
use isi_core::{IsiError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Level {
    Quick,
    Full,
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct Outcome {
    pub id: u8,
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
    pub seconds: f64,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "C{:<2} {} {}: {} [{:.1}s]",
            self.id,
            if self.pass { "PASS" } else { "FAIL" },
            self.name,
            self.detail,
            self.seconds
        )
    }
}

pub const NAMES: [&str; 12] = [
    "sampler exactness",
    "wall collection bijection",
    "spine bijection",
    "excess-area identities",
    "isolation map guarantees",
    "witness injectivity",
    "swap map",
    "pillar deletion bound",
    "rigidity tail corridor",
    "conditional/unconditional ratio corridor",
    "maximum LLN corridor",
    "m* and gamma evaluations",
];

pub fn ids(level: Level) -> Vec<u8> {
    match level {
        Level::Quick => vec![2, 3, 4, 5, 6, 7, 8, 12],
        Level::Full => (1..=12).collect(),
    }
}

/// Desk-scale box for the sampled checks: n = 12, H = 6.
pub fn desk_box() -> BoxDims {
    BoxDims::new(12, 12, 6)
}

/// Batches for the MCMC confidence intervals of correlated sample series.
const BATCHES: usize = 50;

pub struct Suite {
    pub level: Level,
    pub seed: u64,
    tail: Option<TailTable>,
}

type Check = (bool, String);

impl Suite {
    pub fn new(level: Level, seed: u64) -> Suite {
        Suite { level, seed, tail: None }
    }

    fn quick(&self) -> bool {
        self.level == Level::Quick
    }

    /// Sample count: `full` at full level, a tenth otherwise.
    fn count(&self, full: usize) -> usize {
        if self.quick() {
            (full / 10).max(1)
        } else {
            full
        }
    }

    pub fn run(&mut self, id: u8) -> Outcome {
        let t = Instant::now();
        let res: Result<Check> = match id {
            1 => self.c1(),
            2 => self.c2(),
            3 => self.c3(),
            4 => self.c4(),
            5 => self.c5(),
            6 => self.c6(),
            7 => self.c7(),
            8 => self.c8(),
            9 => self.c9(),
            10 => self.c10(),
            11 => self.c11(),
            12 => self.c12(),
            _ => Err(IsiError::Precondition(format!("no criterion {id}"))),
        };
        let (pass, detail) = res.unwrap_or_else(|e| (false, format!("error: {e}")));
        Outcome {
            id,
            name: NAMES.get(id as usize - 1).copied().unwrap_or("?"),
            pass,
            detail,
            seconds: t.elapsed().as_secs_f64(),
        }
    }

    pub fn run_all(&mut self, mut report: impl FnMut(&Outcome)) -> Vec<Outcome> {
        let mut out = Vec::new();
        for id in ids(self.level) {
            let o = self.run(id);
            report(&o);
            out.push(o);
        }
        out
    }

    // -- C1 ---------------------------------------------------------------

    fn c1(&self) -> Result<Check> {
        let d = BoxDims::new(1, 1, 1);
        let beta = 0.5;
        let exact = enumerate_exact(d, beta)?;
        let updates = 10_000_000u64;
        let thin = 10u64;
        let mut hist = vec![0u64; exact.probs.len()];
        let mut ch = Chain::new(&SpinConfig::ground(d), beta, self.seed, 11);
        let mut mask = ch.config().to_mask() as usize;
        for k in 1..=updates {
            if let Some(c) = ch.step() {
                mask ^= 1 << c;
            }
            if k % thin == 0 {
                hist[mask] += 1;
            }
        }
        let total: u64 = hist.iter().sum();
        let tv = 0.5
            * hist
                .iter()
                .zip(&exact.probs)
                .map(|(&h, &p)| (h as f64 / total as f64 - p).abs())
                .sum::<f64>();
        // detailed balance of the heat-bath kernel on every one-flip pair
        let ncell = d.num_cells();
        let mut resid: f64 = 0.0;
        for mask in 0..exact.probs.len() {
            let s = SpinConfig::from_mask(d, mask as u64);
            for k in 0..ncell {
                let other = mask ^ (1 << k);
                let t = SpinConfig::from_mask(d, other as u64);
                let fwd = exact.probs[mask] * kernel(&s, beta, k);
                let back = exact.probs[other] * kernel(&t, beta, k);
                resid = resid.max((fwd - back).abs());
            }
        }
        let pass = tv < 0.01 && resid < 1e-10;
        Ok((pass, format!("TV = {tv:.5} (< 0.01), detailed-balance residual = {resid:.2e} (< 1e-10)")))
    }

    // -- C2 ---------------------------------------------------------------

    fn c2(&self) -> Result<Check> {
        let d = BoxDims::new(3, 3, 3);
        let max_faces = 10usize;
        let family = small_interfaces(d, max_faces as u32)?;
        let mut bad = Vec::new();
        let mut reps: BTreeSet<Vec<StandardWall>> = BTreeSet::new();
        let mut walls: BTreeSet<StandardWall> = BTreeSet::new();
        for i in &family {
            let rep = represent(i)?;
            match rep.reconstruct() {
                Ok(back) if back == *i => {}
                _ => bad.push(format!("reconstruct(represent(I)) != I for I with {} faces", i.len())),
            }
            walls.extend(rep.walls.iter().cloned());
            reps.insert(rep.walls.clone());
        }
        // admissible collections assembled wall by wall
        let walls: Vec<StandardWall> = walls.into_iter().collect();
        let mut colls: BTreeSet<Vec<StandardWall>> = BTreeSet::new();
        colls.insert(Vec::new());
        for (a, wa) in walls.iter().enumerate() {
            if wa.faces.len() <= max_faces {
                if let Ok(c) = StandardWallCollection::from_walls(d, vec![wa.clone()]) {
                    colls.insert(c.walls);
                }
            }
            for wb in &walls[a + 1..] {
                if wa.faces.len() + wb.faces.len() > max_faces {
                    continue;
                }
                if let Ok(c) = StandardWallCollection::from_walls(d, vec![wa.clone(), wb.clone()]) {
                    colls.insert(c.walls);
                }
            }
        }
        for c in &colls {
            let coll = StandardWallCollection::from_walls(d, c.clone())?;
            match coll.reconstruct().and_then(|i| represent(&i)) {
                Ok(r) if r == coll => {}
                Ok(_) => bad.push("represent(reconstruct(C)) != C".into()),
                Err(e) => bad.push(format!("reconstruct failed: {e}")),
            }
        }
        if colls != reps {
            bad.push(format!(
                "collections {} vs represented interfaces {}",
                colls.len(),
                reps.len()
            ));
        }
        Ok((
            bad.is_empty(),
            format!(
                "{} interfaces, {} admissible collections (<= {max_faces} faces, 6x6 base), {} distinct walls, {} failures{}",
                family.len(),
                colls.len(),
                walls.len(),
                bad.len(),
                bad.first().map(|b| format!(" (first: {b})")).unwrap_or_default()
            ),
        ))
    }

    // -- C3 ---------------------------------------------------------------

    fn c3(&self) -> Result<Check> {
        let mut checked = 0usize;
        let mut bad = 0usize;
        let rem1 = Increment { cells: vec![ORIGIN_CELL], remainder: true };
        let incs = enumerate_increments(4, false);
        let rems = enumerate_increments(4, true);
        let v1 = c3(3, -5, 7);
        for x in &incs {
            for seq in [
                IncrementSeq { v1, increments: vec![x.clone()], remainder: rem1.clone() },
                IncrementSeq { v1, increments: vec![Increment::trivial(), x.clone()], remainder: rem1.clone() },
            ] {
                checked += 1;
                bad += (increments(&spine_from_increments(&seq)).as_ref() != Some(&seq)) as usize;
            }
        }
        for r in &rems {
            let seq = IncrementSeq { v1, increments: vec![Increment::trivial()], remainder: r.clone() };
            checked += 1;
            bad += (increments(&spine_from_increments(&seq)).as_ref() != Some(&seq)) as usize;
        }
        // spines of sampled pillars
        let d = desk_box();
        let want = self.count(1000);
        let mut sampled = 0usize;
        let mut seed = self.seed.wrapping_add(3);
        while sampled < want {
            let run = sample_interfaces(d, 0.8, 500, Schedule { burn_in: 100, sweeps_between: 5 }, seed)?;
            seed = seed.wrapping_add(1);
            for i in &run.interfaces {
                let s = i.spins_of()?;
                for x in d.base_faces() {
                    if sampled >= want {
                        break;
                    }
                    let p = Pillar::from_spins(&s, x, 0);
                    let Some(seq) = increments(&p.split().spine) else { continue };
                    sampled += 1;
                    let back = spine_from_increments(&seq);
                    bad += (back != p.split().spine || increments(&back).as_ref() != Some(&seq)) as usize;
                }
            }
        }
        Ok((
            bad == 0,
            format!(
                "{} exhaustive (increments/remainders <= 4 cells: {}/{}), {} sampled spines, {} failures",
                checked,
                incs.len(),
                rems.len(),
                sampled,
                bad
            ),
        ))
    }

    // -- C4 ---------------------------------------------------------------

    fn c4(&self) -> Result<Check> {
        let d = desk_box();
        let run = sample_interfaces(d, 1.0, self.count(1000), Schedule::default(), self.seed.wrapping_add(4))?;
        let flat = Interface::flat(d).len() as i64;
        let mut n_walls = 0usize;
        let mut fails: BTreeMap<&str, usize> = BTreeMap::new();
        for i in &run.interfaces {
            let dec = decompose(i)?;
            let mut sum = 0i64;
            for w in &dec.walls {
                n_walls += 1;
                let m = w.excess();
                sum += m;
                let rho = projection(w.faces());
                let proj_faces = rho.iter().filter(|c| c.is_face()).count() as i64;
                if m != w.len() as i64 - proj_faces {
                    *fails.entry("m(W) = |W| - |F(rho W)|").or_default() += 1;
                }
                let alone = StandardWallCollection::from_walls(d, vec![w.standardize()])?.reconstruct()?;
                if m != alone.len() as i64 - flat {
                    *fails.entry("m(W) vs single-wall interface").or_default() += 1;
                }
                if 2 * m < w.len() as i64 {
                    *fails.entry("m(W) >= |W|/2").or_default() += 1;
                }
                if m < rho.len() as i64 {
                    *fails.entry("m(W) >= |rho W|").or_default() += 1;
                }
            }
            if sum != i.len() as i64 - flat {
                *fails.entry("additivity").or_default() += 1;
            }
        }
        Ok((
            fails.is_empty(),
            format!("{} interfaces, {} walls, failures {:?}", run.interfaces.len(), n_walls, fails),
        ))
    }

    // -- C5 / C6 ----------------------------------------------------------

    fn iso_samples(&self) -> Result<Vec<(Interface, Coord, IsoParams)>> {
        let d = desk_box();
        let run = sample_interfaces(d, 1.0, self.count(1000), Schedule::default(), self.seed.wrapping_add(5))?;
        let mut out = Vec::new();
        for i in run.interfaces {
            let (x, h) = tallest_deep_pillar(&i, 2)?;
            out.push((i, x, IsoParams::new(3, h.max(1))?));
        }
        Ok(out)
    }

    fn c5(&self) -> Result<Check> {
        let d = desk_box();
        let f = Frame::whole(d);
        let mut fails: BTreeMap<String, usize> = BTreeMap::new();
        let mut nontrivial = 0usize;
        let mut not_iso = 0usize;
        let samples = self.iso_samples()?;
        for (i, x, p) in &samples {
            let iso = is_isolated(i, *x, &f, *p)?;
            let (j, tr) = match phi_iso(i, *x, &f, *p) {
                Ok(v) => v,
                Err(e) => {
                    *fails.entry(format!("error {e}")).or_default() += 1;
                    continue;
                }
            };
            let mut bad = |s: &str| *fails.entry(s.to_string()).or_default() += 1;
            nontrivial += (tr.excess != 0) as usize;
            if j.validate().is_err() {
                bad("invalid output");
            }
            if !f.holds(&j)? {
                bad("output not in I_W");
            }
            if !is_isolated(&j, *x, &f, *p)?.isolated {
                bad("output not isolated");
            }
            let hi = Pillar::from_spins(&i.spins_of()?, *x, 0).hgt();
            let hj = Pillar::from_spins(&j.spins_of()?, *x, 0).hgt();
            if hi >= p.h && hj < p.h {
                bad("height event lost");
            }
            if !tr.formula_consistent() {
                bad("m(I;J) formula");
            }
            for (name, ok) in tr.bounds() {
                if !ok {
                    bad(name);
                }
            }
            if !iso.isolated {
                not_iso += 1;
                if tr.excess < 1 {
                    bad("non-isolated input with m(I;J) < 1");
                }
            }
        }
        Ok((
            fails.is_empty(),
            format!(
                "{} pairs ({} non-isolated inputs, {} moved), failures {:?}",
                samples.len(),
                not_iso,
                nontrivial,
                fails
            ),
        ))
    }

    fn c6(&self) -> Result<Check> {
        let d = desk_box();
        let f = Frame::whole(d);
        let mut bad = 0usize;
        let samples = self.iso_samples()?;
        for (i, x, p) in &samples {
            let (j, _, w) = phi_iso_with_witness(i, *x, &f, *p)?;
            match witness_reconstruct(&j, &w, *x, &f) {
                Ok(r) if r == *i => {}
                _ => bad += 1,
            }
        }
        let hunt = collision_hunt()?;
        let pass = bad == 0 && hunt.collisions == 0 && hunt.reconstruct_failures == 0;
        Ok((
            pass,
            format!(
                "{} sampled applications, {} reconstruction failures; collision hunt: {} pre-images, {} images, {} shared images, {} digest collisions, {} reconstruction failures",
                samples.len(),
                bad,
                hunt.preimages,
                hunt.images,
                hunt.shared,
                hunt.collisions,
                hunt.reconstruct_failures
            ),
        ))
    }

    // -- C7 ---------------------------------------------------------------

    fn c7(&self) -> Result<Check> {
        let d = desk_box();
        let want = self.count(1000);
        let cons = Constraint::ring(d)?;
        let fr = Frame::new(cons.region.clone(), cons.walls.clone())?;
        let whole = Frame::whole(d);
        let mut cond = Vec::with_capacity(want);
        for_each_conditional(
            cons,
            1.0,
            want,
            Schedule { burn_in: 100, sweeps_between: 2 },
            self.seed.wrapping_add(7),
            false,
            |_, i| {
                cond.push(i);
                Ok(())
            },
        )?;
        let uncond = sample_interfaces(d, 1.0, want, Schedule::default(), self.seed.wrapping_add(70))?;
        let mut fails: BTreeMap<String, usize> = BTreeMap::new();
        for (i, ip) in cond.iter().zip(&uncond.interfaces) {
            let (x, hx) = tallest_deep_pillar(&fr.restrict(i)?, 3)?;
            let (xp, hxp) = tallest_deep_pillar(ip, 3)?;
            let p = IsoParams::new(3, hx.max(hxp).max(1))?;
            let (a, _) = phi_iso(i, x, &fr, p)?;
            let (b, _) = phi_iso(ip, xp, &whole, p)?;
            let mut bad = |s: &str| *fails.entry(s.to_string()).or_default() += 1;
            let (j, jp) = match phi_swap(&a, x, &fr, &b, xp, p) {
                Ok(v) => v,
                Err(e) => {
                    bad(&format!("swap error {e}"));
                    continue;
                }
            };
            if a.len() + b.len() != j.len() + jp.len() {
                bad("|I| + |I'| not conserved");
            }
            if !fr.holds(&j)? {
                bad("swapped interface leaves I_W");
            }
            match phi_swap(&j, x, &fr, &jp, xp, p) {
                Ok((a2, b2)) if a2 == a && b2 == b => {}
                Ok(_) => bad("not an involution"),
                Err(e) => bad(&format!("second swap error {e}")),
            }
        }
        Ok((fails.is_empty(), format!("{} constructed isolated pairs, failures {:?}", cond.len(), fails)))
    }

    // -- C8 ---------------------------------------------------------------

    fn c8(&self) -> Result<Check> {
        let d = desk_box();
        let f = Frame::whole(d);
        let run = sample_interfaces(d, 1.0, self.count(1000), Schedule::default(), self.seed.wrapping_add(8))?;
        let mut applicable = 0usize;
        let mut bound_fail = 0usize;
        let mut min_slack = i64::MAX;
        for i in &run.interfaces {
            let s = i.spins_of()?;
            for y in deep_faces(d, 1) {
                let p = Pillar::from_spins(&s, y, 0);
                if p.hgt() < 1 || !p.has_empty_base() {
                    continue;
                }
                let del = psi_delete(i, y, &f)?;
                applicable += 1;
                let slack = del.excess - (4 * del.height as i64 - 1);
                min_slack = min_slack.min(slack);
                bound_fail += (slack < 0) as usize;
            }
        }
        // insert_column on flat and on sampled interfaces where it applies
        let mut inserts = 0usize;
        let mut exact_fail = 0usize;
        let flat = Interface::flat(d);
        let mut bases: Vec<&Interface> = vec![&flat];
        bases.extend(run.interfaces.iter().take(self.count(200)));
        for i in bases {
            for h in 1..=4 {
                let x = c3(1, 1, 0);
                let Ok(j) = insert_column(i, x, h, &f) else { continue };
                inserts += 1;
                let m = j.len() as i64 - i.len() as i64;
                let sd = i.faces.symmetric_difference(&j.faces).count() as i64;
                exact_fail += (m != 4 * h as i64 || sd != 4 * h as i64 + 2) as usize;
            }
        }
        let pass = bound_fail == 0 && exact_fail == 0 && applicable > 0 && inserts > 0;
        Ok((
            pass,
            format!(
                "psi: {applicable} applicable pillars, {bound_fail} with m < 4h - 1 (min slack {}); insert_column: {inserts} insertions, {exact_fail} inexact",
                if applicable > 0 { min_slack.to_string() } else { "-".into() }
            ),
        ))
    }

    // -- C9 ---------------------------------------------------------------

    /// Pooled pillar tail over the deep faces of the desk box, one
    /// configuration per sweep.
    fn tail(&mut self) -> Result<TailTable> {
        if let Some(t) = &self.tail {
            return Ok(t.clone());
        }
        let n = if self.quick() { 10_000 } else { 1_000_000 };
        let t = pillar_tail_stream(desk_box(), 1.0, n, 200, self.seed.wrapping_add(9))?;
        self.tail = Some(t.clone());
        Ok(t)
    }

    fn c9(&mut self) -> Result<Check> {
        let t = self.tail()?;
        let (lo, hi) = (0.75 * 4.0, 1.25 * 4.0);
        let mut pass = true;
        let mut parts = Vec::new();
        for h in [1, 2] {
            match t.rate(h) {
                Some(r) => {
                    pass &= r >= lo && r <= hi;
                    parts.push(format!("rate({h}) = {r:.3}"));
                }
                None => {
                    pass = false;
                    parts.push(format!("rate({h}) undefined"));
                }
            }
        }
        Ok((
            pass,
            format!(
                "{} in [{lo}, {hi}]; {} observations, counts {:?}",
                parts.join(", "),
                t.total,
                t.counts
            ),
        ))
    }

    // -- C10 --------------------------------------------------------------

    fn c10(&self) -> Result<Check> {
        let d = desk_box();
        let cons = Constraint::ring(d)?;
        let fr = Frame::new(cons.region.clone(), cons.walls.clone())?;
        // faces at distance >= 8 from the complement of S
        let xs: Vec<Coord> = Region::inset(&d, 9).faces.into_iter().collect();
        // per configuration: fraction of the xs with hgt >= 1 and >= 2
        let frac = |hs: &[i32], h: i32| hs.iter().filter(|&&v| v >= h).count() as f64 / hs.len() as f64;
        let mut cond: [Vec<f64>; 2] = Default::default();
        for_each_conditional(
            cons,
            1.0,
            20_000,
            Schedule { burn_in: 200, sweeps_between: 1 },
            self.seed.wrapping_add(10),
            false,
            |_, i| {
                let k = fr.restrict(&i)?;
                let hs = pillar_heights(&k.spins_of()?, &xs, 0);
                cond[0].push(frac(&hs, 1));
                cond[1].push(frac(&hs, 2));
                Ok(())
            },
        )?;
        let sched = Schedule { burn_in: 200, sweeps_between: 1 };
        let mut uncond: [Vec<f64>; 2] = Default::default();
        stats::for_each_pillar_sample(d, 1.0, 200_000, sched, self.seed.wrapping_add(100), 0, &xs, |hs| {
            uncond[0].push(frac(hs, 1));
            uncond[1].push(frac(hs, 2));
        })?;
        let mut pass = true;
        let mut parts = Vec::new();
        for h in [1usize, 2] {
            let ci = |s: &[f64]| {
                stats::batch_means(s, BATCHES, stats::DEFAULT_LEVEL)
                    .ok_or_else(|| IsiError::Precondition("too few samples for batch means".into()))
            };
            let (pc, cl, ch) = ci(&cond[h - 1])?;
            let (pu, ul, uh) = ci(&uncond[h - 1])?;
            let ratio = pc / pu;
            let ok = ratio.is_finite() && (0.5..=2.0).contains(&ratio) && overlaps((cl, ch), (ul, uh));
            pass &= ok;
            parts.push(format!("h={h}: cond {pc:.3e} [{cl:.3e}, {ch:.3e}] / uncond {pu:.3e} [{ul:.3e}, {uh:.3e}] = {ratio:.3}"));
        }
        Ok((
            pass,
            format!("{} (band [0.5, 2.0], {BATCHES}-batch-means CIs must overlap)", parts.join("; ")),
        ))
    }

    // -- C11 --------------------------------------------------------------

    fn c11(&mut self) -> Result<Check> {
        let t = self.tail()?;
        let table = AlphaTable::from_tail(&t, 1.0, stats::DEFAULT_LEVEL);
        let alpha = table.slope().ok_or_else(|| IsiError::Precondition("alpha slope undefined".into()))?;
        let target = 2.0 / alpha;
        let mut ratios = Vec::new();
        let mut pass = true;
        let mut parts = Vec::new();
        let mut identity_fail = 0usize;
        for n in [16, 32, 64] {
            let d = BoxDims::new(n, n, 6);
            let run = sample_interfaces(d, 1.0, 1000, Schedule { burn_in: 200, sweeps_between: 5 }, self.seed.wrapping_add(n as u64))?;
            let base = Region::base(&d);
            let mut m_sum = 0.0;
            for i in &run.interfaces {
                let (m, pm) = stats::sample_max(i, &base)?;
                identity_fail += (m != pm) as usize;
                m_sum += m as f64;
            }
            let mean = m_sum / run.interfaces.len() as f64;
            let r = mean / (n as f64).ln();
            let dev = (r - target).abs() / target;
            pass &= dev <= 0.35;
            ratios.push(r);
            parts.push(format!("n={n}: mean M = {mean:.3}, M/log n = {r:.3}, rel. dev {dev:.3}"));
        }
        let devs: Vec<f64> = ratios.iter().map(|r| (r - target).abs()).collect();
        let monotone = devs.windows(2).all(|w| w[1] <= w[0]);
        pass &= monotone && identity_fail == 0;
        Ok((
            pass,
            format!(
                "alpha-hat = {alpha:.3}, 2/alpha-hat = {target:.3}; {}; monotone approach: {monotone}; max-identity failures {identity_fail}",
                parts.join("; ")
            ),
        ))
    }

    // -- C12 --------------------------------------------------------------

    fn c12(&mut self) -> Result<Check> {
        let synth: Vec<f64> = (1..=6).map(|h| 4.0 * h as f64).collect();
        let m = m_star_log(10.0, &synth, 1.0)?;
        let g = gamma_log(10.0, &synth, 1.0)?;
        let synth_ok = m == 3 && g == (-2.0f64).exp();
        let t = self.tail()?;
        let table = AlphaTable::from_tail(&t, 1.0, stats::DEFAULT_LEVEL);
        let alpha: Vec<f64> = table.rows.iter().take_while(|r| !r.censored).map(|r| r.alpha).collect();
        let mut sim_ok = true;
        let mut parts = Vec::new();
        for n in [12, 16, 32, 64] {
            let s = (4 * n * n) as f64;
            match gamma(s, &alpha, 1.0) {
                Ok(gv) => {
                    let ok = gamma_in_band(gv, 1.0, 1.0);
                    sim_ok &= ok;
                    let ms = stats::m_star(s, &alpha, 1.0)?;
                    parts.push(format!("s={s}: m*={ms}, gamma={gv:.3}"));
                }
                Err(e) => {
                    sim_ok = false;
                    parts.push(format!("s={s}: {e}"));
                }
            }
        }
        Ok((
            synth_ok && sim_ok,
            format!(
                "synthetic m* = {m}, gamma = {g:.6} (exact e^-2: {}); simulated {} in (e^-3, e^2)",
                g == (-2.0f64).exp(),
                parts.join(", ")
            ),
        ))
    }
}

/// Heat-bath probability of moving cell k of `s` to the opposite spin.
fn kernel(s: &SpinConfig, beta: f64, k: usize) -> f64 {
    let c = s.dims.cell_at(k);
    let plus = cell_neighbors(c).iter().filter(|&&nb| s.get(nb) > 0).count() as u32;
    let p = plus_probability(beta, plus);
    let to = -s.spins[k];
    (if to > 0 { p } else { 1.0 - p }) / s.dims.num_cells() as f64
}

/// Face at distance >= `inset` columns from the side carrying the tallest
/// pillar (least face on ties), and its height.
fn tallest_deep_pillar(i: &Interface, inset: i32) -> Result<(Coord, i32)> {
    let s = i.spins_of()?;
    let xs = deep_faces(i.dims, inset);
    let hs = pillar_heights(&s, &xs, 0);
    let mut best = (xs[0], hs[0]);
    for (&x, h) in xs.iter().zip(hs) {
        if h > best.1 {
            best = (x, h);
        }
    }
    Ok(best)
}

pub fn pillar_tail_stream(d: BoxDims, beta: f64, n: usize, burn_in: usize, seed: u64) -> Result<TailTable> {
    let sched = Schedule { burn_in, sweeps_between: 1 };
    stats::sampled_pillar_tail(d, beta, n, sched, seed, 0, &deep_faces(d, 2), 5)
}

// ---------------------------------------------------------------------------
// exhaustive small interfaces

/// Levels that may differ from the ground state: cells at z = -3, -1, 1, 3
/// (doubled). Bit k of a column pattern is the spin at LEVELS[k], 1 = plus.
const LEVELS: [i32; 4] = [-3, -1, 1, 3];
const GROUND: u8 = 0b0011;

/// Sign changes along the full column, boundary spins included.
fn transitions(p: u8) -> u32 {
    // plus below the pattern, minus above
    let mut prev = true;
    let mut t = 0;
    for k in 0..4 {
        let s = p >> k & 1 == 1;
        t += (s != prev) as u32;
        prev = s;
    }
    t + prev as u32
}

/// Every interface on the box whose wall faces number at most `max_faces`.
/// Only levels within two of height 0 can differ from the ground state: a
/// nonempty level of flipped cells has at least four vertical faces, and
/// the levels that carry flipped cells are contiguous from height 0.
pub fn small_interfaces(d: BoxDims, max_faces: u32) -> Result<Vec<Interface>> {
    assert!(d.h >= 3, "need two free levels on each side");
    let (nx, ny) = (d.nx(), d.ny());
    let cost_pair = |a: u8, b: u8| (a ^ b).count_ones();
    let self_cost = |p: u8| {
        let t = transitions(p);
        if t >= 3 {
            t
        } else {
            0
        }
    };
    let mut cols = vec![GROUND; nx * ny];
    let mut out = Vec::new();
    let mut seen: HashSet<Vec<Coord>> = HashSet::new();
    #[allow(clippy::too_many_arguments)]
    fn rec(
        k: usize,
        cost: u32,
        max: u32,
        nx: usize,
        ny: usize,
        cols: &mut Vec<u8>,
        leaf: &mut dyn FnMut(&[u8]) -> Result<()>,
        cost_pair: &dyn Fn(u8, u8) -> u32,
        self_cost: &dyn Fn(u8) -> u32,
    ) -> Result<()> {
        if k == nx * ny {
            return leaf(cols);
        }
        let (ix, iy) = (k % nx, k / nx);
        for p in 0u8..16 {
            let mut c = cost + self_cost(p);
            c += cost_pair(p, if ix > 0 { cols[k - 1] } else { GROUND });
            c += cost_pair(p, if iy > 0 { cols[k - nx] } else { GROUND });
            if ix == nx - 1 {
                c += cost_pair(p, GROUND);
            }
            if iy == ny - 1 {
                c += cost_pair(p, GROUND);
            }
            if c > max {
                continue;
            }
            cols[k] = p;
            rec(k + 1, c, max, nx, ny, cols, leaf, cost_pair, self_cost)?;
        }
        cols[k] = GROUND;
        Ok(())
    }
    let mut leaf = |cols: &[u8]| -> Result<()> {
        let mut s = SpinConfig::ground(d);
        for (k, &p) in cols.iter().enumerate() {
            if p == GROUND {
                continue;
            }
            let (ix, iy) = ((k % nx) as i32, (k / nx) as i32);
            for (b, &z) in LEVELS.iter().enumerate() {
                let c = c3(2 * ix - 2 * d.n + 1, 2 * iy - 2 * d.m + 1, z);
                s.set(c, if p >> b & 1 == 1 { 1 } else { -1 })?;
            }
        }
        let i = Interface::extract(&s)?;
        // keep bubble-free configurations only: those are the interfaces
        if i.spins_of()? != s {
            return Ok(());
        }
        if decompose(&i)?.wall_face_count() as u32 <= max_faces && seen.insert(i.faces.iter().copied().collect()) {
            out.push(i);
        }
        Ok(())
    };
    rec(0, 0, max_faces, nx, ny, &mut cols, &mut leaf, &cost_pair, &self_cost)?;
    Ok(out)
}

// ---------------------------------------------------------------------------
// collision hunt

pub struct Hunt {
    pub preimages: usize,
    pub images: usize,
    /// Images with more than one pre-image.
    pub shared: usize,
    pub collisions: usize,
    pub reconstruct_failures: usize,
}

/// Flat interface with up to three flipped cells over the 3x3 block around
/// x, at the three levels next to height 0. All valid pre-images are sent
/// through the isolation map; pre-images sharing an image must have
/// distinct witnesses.
pub fn collision_hunt() -> Result<Hunt> {
    let d = BoxDims::new(5, 5, 3);
    let f = Frame::whole(d);
    let x = c3(1, 1, 0);
    let p = IsoParams::new(3, 1)?;
    let mut cells = Vec::new();
    for dx in [-2, 0, 2] {
        for dy in [-2, 0, 2] {
            for z in [-1, 1, 3] {
                cells.push(c3(x.x + dx, x.y + dy, z));
            }
        }
    }
    let mut pre: BTreeSet<Vec<Coord>> = BTreeSet::new();
    let n = cells.len();
    let mut subsets: Vec<Vec<usize>> = vec![vec![]];
    for a in 0..n {
        subsets.push(vec![a]);
        for b in a + 1..n {
            subsets.push(vec![a, b]);
            for c in b + 1..n {
                subsets.push(vec![a, b, c]);
            }
        }
    }
    let mut groups: BTreeMap<Vec<Coord>, Vec<(u64, isi_core::maps::Witness)>> = BTreeMap::new();
    let mut failures = 0usize;
    for sub in subsets {
        let mut s = SpinConfig::ground(d);
        for &k in &sub {
            s.flip(cells[k])?;
        }
        let Ok(i) = Interface::extract(&s) else { continue };
        if i.spins_of()? != s || !pre.insert(i.faces.iter().copied().collect()) {
            continue;
        }
        let (j, _, w) = phi_iso_with_witness(&i, x, &f, p)?;
        match witness_reconstruct(&j, &w, x, &f) {
            Ok(r) if r == i => {}
            _ => failures += 1,
        }
        groups.entry(j.faces.iter().copied().collect()).or_default().push((w.digest(), w));
    }
    let mut collisions = 0usize;
    let mut shared = 0usize;
    for ws in groups.values() {
        if ws.len() > 1 {
            shared += 1;
        }
        let digests: HashSet<u64> = ws.iter().map(|(h, _)| *h).collect();
        let distinct: HashSet<&isi_core::maps::Witness> = ws.iter().map(|(_, w)| w).collect();
        collisions += (ws.len() - digests.len()) + (ws.len() - distinct.len());
    }
    Ok(Hunt { preimages: pre.len(), images: groups.len(), shared, collisions, reconstruct_failures: failures })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn transitions_of_patterns() {
        assert_eq!(transitions(GROUND), 1);
        assert_eq!(transitions(0b0111), 1);
        assert_eq!(transitions(0b0101), 3);
        assert_eq!(transitions(0b0000), 1);
        assert_eq!(transitions(0b1111), 1);
    }

    #[test]
    fn single_bumps_on_small_base() {
        // 2x2 base, at most 4 wall faces: flat, one raised cell, one lowered
        let d = BoxDims::new(1, 1, 3);
        let fam = small_interfaces(d, 4).unwrap();
        assert_eq!(fam.len(), 1 + 4 + 4);
    }
}
