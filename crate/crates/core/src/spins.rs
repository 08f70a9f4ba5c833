//! Spin configurations on a truncated cylinder with Dobrushin boundary
//! conditions: plus below height 0, minus above.

use std::io::{Read, Write};

use crate::error::{IsiError, Result};
use crate::lattice::{cell_neighbors, BoxDims, Coord};

pub const SNAPSHOT_MAGIC: &[u8; 4] = b"ISI3";
pub const SNAPSHOT_VERSION: u32 = 1;

/// Boundary spin: -sign(z).
pub fn boundary_spin(c: Coord) -> i8 {
    if c.z < 0 {
        1
    } else {
        -1
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpinConfig {
    pub dims: BoxDims,
    /// +1 / -1 per in-box cell, indexed by `BoxDims::cell_index`.
    pub spins: Vec<i8>,
}

impl SpinConfig {
    /// The ground state sigma(v) = -sign(v_3).
    pub fn ground(dims: BoxDims) -> SpinConfig {
        let spins = dims.cells().map(boundary_spin).collect();
        SpinConfig { dims, spins }
    }

    pub fn filled(dims: BoxDims, s: i8) -> SpinConfig {
        SpinConfig { dims, spins: vec![s; dims.num_cells()] }
    }

    pub fn get(&self, c: Coord) -> i8 {
        if self.dims.contains_cell(c) {
            self.spins[self.dims.cell_index(c)]
        } else {
            boundary_spin(c)
        }
    }

    pub fn set(&mut self, c: Coord, s: i8) -> Result<()> {
        if !self.dims.contains_cell(c) {
            return Err(IsiError::OutsideBox(c));
        }
        let i = self.dims.cell_index(c);
        self.spins[i] = s;
        Ok(())
    }

    pub fn flip(&mut self, c: Coord) -> Result<()> {
        let s = self.get(c);
        self.set(c, -s)
    }

    pub fn flipped(&self, c: Coord) -> Result<SpinConfig> {
        let mut o = self.clone();
        o.flip(c)?;
        Ok(o)
    }

    /// Number of disagreeing nearest-neighbour pairs with at least one cell
    /// in the box, each pair counted once.
    pub fn energy(&self) -> i64 {
        let d = self.dims;
        let mut e = 0i64;
        for (i, c) in d.cells().enumerate() {
            let s = self.spins[i];
            for nb in cell_neighbors(c) {
                let inside = d.contains_cell(nb);
                if inside && d.cell_index(nb) < i {
                    continue;
                }
                if self.get(nb) != s {
                    e += 1;
                }
            }
        }
        e
    }

    /// energy(flip(c)) - energy(), from the six neighbours.
    pub fn delta_energy(&self, c: Coord) -> Result<i64> {
        if !self.dims.contains_cell(c) {
            return Err(IsiError::OutsideBox(c));
        }
        let s = self.get(c);
        let disagree = cell_neighbors(c).iter().filter(|&&nb| self.get(nb) != s).count() as i64;
        Ok(6 - 2 * disagree)
    }

    pub fn plus_count(&self) -> usize {
        self.spins.iter().filter(|&&s| s > 0).count()
    }

    /// Configuration encoded by the low bits of `mask` (bit i = cell i plus).
    pub fn from_mask(dims: BoxDims, mask: u64) -> SpinConfig {
        let spins = (0..dims.num_cells())
            .map(|i| if (mask >> i) & 1 == 1 { 1 } else { -1 })
            .collect();
        SpinConfig { dims, spins }
    }

    pub fn to_mask(&self) -> u64 {
        assert!(self.spins.len() <= 64);
        self.spins
            .iter()
            .enumerate()
            .fold(0u64, |m, (i, &s)| if s > 0 { m | (1 << i) } else { m })
    }

    pub fn write_snapshot<W: Write>(&self, w: &mut W, beta: f64, seed: u64) -> Result<()> {
        w.write_all(SNAPSHOT_MAGIC)?;
        w.write_all(&SNAPSHOT_VERSION.to_le_bytes())?;
        for v in [self.dims.n, self.dims.m, self.dims.h] {
            w.write_all(&(v as u32).to_le_bytes())?;
        }
        w.write_all(&beta.to_le_bytes())?;
        w.write_all(&seed.to_le_bytes())?;
        let mut bytes = vec![0u8; self.spins.len().div_ceil(8)];
        for (i, &s) in self.spins.iter().enumerate() {
            if s > 0 {
                bytes[i / 8] |= 1 << (i % 8);
            }
        }
        w.write_all(&bytes)?;
        Ok(())
    }

    /// Returns the configuration with the stored beta and seed.
    pub fn read_snapshot<R: Read>(r: &mut R) -> Result<(SpinConfig, f64, u64)> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != SNAPSHOT_MAGIC {
            return Err(IsiError::Format("bad magic".into()));
        }
        let mut u4 = [0u8; 4];
        r.read_exact(&mut u4)?;
        let version = u32::from_le_bytes(u4);
        if version != SNAPSHOT_VERSION {
            return Err(IsiError::Format(format!("unsupported version {version}")));
        }
        let mut dims = [0i32; 3];
        for d in dims.iter_mut() {
            r.read_exact(&mut u4)?;
            *d = u32::from_le_bytes(u4) as i32;
        }
        if dims.iter().any(|&d| d < 1) {
            return Err(IsiError::Format("non-positive box dimension".into()));
        }
        let mut u8b = [0u8; 8];
        r.read_exact(&mut u8b)?;
        let beta = f64::from_le_bytes(u8b);
        r.read_exact(&mut u8b)?;
        let seed = u64::from_le_bytes(u8b);
        let dims = BoxDims::new(dims[0], dims[1], dims[2]);
        let mut bytes = vec![0u8; dims.num_cells().div_ceil(8)];
        r.read_exact(&mut bytes)?;
        let spins = (0..dims.num_cells())
            .map(|i| if bytes[i / 8] >> (i % 8) & 1 == 1 { 1 } else { -1 })
            .collect();
        Ok((SpinConfig { dims, spins }, beta, seed))
    }
}

/// Exact Boltzmann law on a tiny box.
#[derive(Clone, Debug)]
pub struct ExactMeasure {
    pub dims: BoxDims,
    pub beta: f64,
    /// Probability of each configuration, indexed by its mask.
    pub probs: Vec<f64>,
    pub energies: Vec<i64>,
}

pub const EXACT_CELL_LIMIT: usize = 24;

pub fn enumerate_exact(dims: BoxDims, beta: f64) -> Result<ExactMeasure> {
    let k = dims.num_cells();
    if k > EXACT_CELL_LIMIT {
        return Err(IsiError::TooLarge(k));
    }
    let total = 1usize << k;
    let mut energies = Vec::with_capacity(total);
    let mut cfg = SpinConfig::from_mask(dims, 0);
    let mut e = cfg.energy();
    // Gray-code walk: one flip per step
    let mut prev = 0usize;
    for g in 0..total {
        let code = g ^ (g >> 1);
        if g > 0 {
            let bit = (code ^ prev).trailing_zeros() as usize;
            let c = dims.cell_at(bit);
            e += cfg.delta_energy(c)?;
            cfg.spins[bit] = -cfg.spins[bit];
        }
        prev = code;
        energies.push((code, e));
    }
    energies.sort_unstable();
    let energies: Vec<i64> = energies.into_iter().map(|(_, e)| e).collect();
    let emin = *energies.iter().min().unwrap();
    let mut probs: Vec<f64> = energies.iter().map(|&e| (-beta * (e - emin) as f64).exp()).collect();
    let z: f64 = probs.iter().sum();
    for p in probs.iter_mut() {
        *p /= z;
    }
    Ok(ExactMeasure { dims, beta, probs, energies })
}

impl ExactMeasure {
    pub fn ground_mask(&self) -> usize {
        SpinConfig::ground(self.dims).to_mask() as usize
    }

    /// Expectation of a function of the configuration.
    pub fn expect(&self, f: impl Fn(&SpinConfig) -> f64) -> f64 {
        self.probs
            .iter()
            .enumerate()
            .map(|(mask, &p)| p * f(&SpinConfig::from_mask(self.dims, mask as u64)))
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::c3;

    fn pair_oracle(cfg: &SpinConfig) -> i64 {
        // enumerate every unordered pair touching the box directly
        let d = cfg.dims;
        let mut pairs = std::collections::BTreeSet::new();
        for c in d.cells() {
            for nb in cell_neighbors(c) {
                let key = if c < nb { (c, nb) } else { (nb, c) };
                pairs.insert(key);
            }
        }
        pairs.iter().filter(|(a, b)| cfg.get(*a) != cfg.get(*b)).count() as i64
    }

    #[test]
    fn ground_energy() {
        let d = BoxDims::new(1, 1, 1);
        let g = SpinConfig::ground(d);
        assert_eq!(g.energy(), pair_oracle(&g));
        // four vertical pairs straddle height 0 inside the box
        assert_eq!(g.energy(), 4);
    }

    #[test]
    fn all_plus_energy() {
        let d = BoxDims::new(2, 1, 2);
        let p = SpinConfig::filled(d, 1);
        assert_eq!(p.energy(), pair_oracle(&p));
        // top face of the box plus the side faces of the upper half
        assert_eq!(p.energy(), 8 + 2 * (2 * 4 + 2 * 2));
    }

    #[test]
    fn deep_flip_costs_six() {
        let d = BoxDims::new(3, 3, 3);
        let g = SpinConfig::ground(d);
        let c = c3(1, 1, -3);
        assert_eq!(g.delta_energy(c).unwrap(), 6);
        assert_eq!(g.flipped(c).unwrap().energy() - g.energy(), 6);
        assert!(g.delta_energy(c3(1, 1, 7)).is_err());
    }

    #[test]
    fn snapshot_roundtrip() {
        let d = BoxDims::new(2, 3, 2);
        let mut g = SpinConfig::ground(d);
        g.flip(c3(1, 1, 1)).unwrap();
        let mut buf = Vec::new();
        g.write_snapshot(&mut buf, 0.75, 99).unwrap();
        assert_eq!(&buf[..4], b"ISI3");
        let (h, beta, seed) = SpinConfig::read_snapshot(&mut buf.as_slice()).unwrap();
        assert_eq!(h, g);
        assert_eq!(beta, 0.75);
        assert_eq!(seed, 99);
    }

    #[test]
    fn exact_measure_basics() {
        let d = BoxDims::new(1, 1, 1);
        let m = enumerate_exact(d, 0.0).unwrap();
        assert!(m.probs.iter().all(|&p| (p - 1.0 / 256.0).abs() < 1e-15));
        let m = enumerate_exact(d, 0.5).unwrap();
        assert!((m.probs.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        for (mask, &e) in m.energies.iter().enumerate() {
            assert_eq!(e, SpinConfig::from_mask(d, mask as u64).energy());
        }
        let m = enumerate_exact(d, 50.0).unwrap();
        assert!(m.probs[m.ground_mask()] > 0.999);
        assert!(enumerate_exact(BoxDims::new(2, 2, 1), 1.0).is_err());
    }
}
