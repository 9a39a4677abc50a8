//! Fixed-magnon bases of a periodic spin-1 ring.
//!
//! A product state of the ring is written as an excitation sequence
//! `e = (e_0, ..., e_{N-1})` with `e_n = a_n + 1 in {0, 1, 2}`, where `a_n` is
//! the `S^z` eigenvalue of site `n`. The fully polarized state `|-1 ... -1>`
//! is the all-zero sequence and every unit of `e` is one magnon, so a sector
//! with `m` magnons holds every sequence with `sum(e) = m` and total
//! magnetization `m - N`.
//!
//! Sector states are kept in ascending lexicographic order of their
//! sequences. The order is fixed and independent of the Hamiltonian, so matrix
//! layouts and dumps are reproducible.

use std::cmp::Ordering;
use std::fmt;
use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest ring this crate accepts. With two sites the periodic bond
/// `(n, n + 1 mod N)` would repeat the only physical bond.
pub const MIN_SITES: usize = 3;

/// Default bound on the number of states [`enumerate_basis`] will build.
pub const DEFAULT_MAX_DIM: usize = 200_000;

/// Onsite level of a three-level (spin-1) site.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Level {
    /// `|-1>`, the reference level of the polarized state.
    Down,
    /// `|0>`, one magnon.
    Zero,
    /// `|+1>`, two magnons.
    Up,
}

impl Level {
    /// Levels in excitation order, so `Level::ALL[e]` has excitation `e`.
    pub const ALL: [Level; 3] = [Level::Down, Level::Zero, Level::Up];

    /// `S^z` eigenvalue `a`.
    pub fn spin(self) -> i8 {
        self.excitation() as i8 - 1
    }

    /// Number of magnons carried by the level, `a + 1`.
    pub fn excitation(self) -> u8 {
        match self {
            Level::Down => 0,
            Level::Zero => 1,
            Level::Up => 2,
        }
    }

    /// Column of this level in per-site tables.
    pub fn index(self) -> usize {
        self.excitation() as usize
    }

    pub fn from_spin(a: i64) -> Result<Self> {
        match a {
            -1 => Ok(Level::Down),
            0 => Ok(Level::Zero),
            1 => Ok(Level::Up),
            other => Err(Error::InvalidLevel(other)),
        }
    }

    pub fn from_excitation(e: u8) -> Option<Self> {
        Level::ALL.get(e as usize).copied()
    }

    pub fn label(self) -> &'static str {
        match self {
            Level::Down => "-1",
            Level::Zero => "0",
            Level::Up => "+1",
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// One product configuration of the ring.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SpinConfig {
    excitations: Vec<u8>,
}

impl SpinConfig {
    pub fn new(excitations: Vec<u8>) -> Result<Self> {
        if let Some((site, &value)) = excitations.iter().enumerate().find(|(_, &e)| e > 2) {
            return Err(Error::InvalidExcitation { site, value });
        }
        Ok(Self { excitations })
    }

    /// Configuration obtained by raising the listed sites from the polarized
    /// state, one magnon per entry. A site may appear at most twice.
    pub fn from_raised_sites(n_sites: usize, sites: &[usize]) -> Result<Self> {
        let mut excitations = vec![0u8; n_sites];
        for &site in sites {
            if site >= n_sites {
                return Err(Error::SiteOutOfRange { site, n: n_sites });
            }
            excitations[site] += 1;
            if excitations[site] > 2 {
                let count = sites.iter().filter(|&&s| s == site).count();
                return Err(Error::SiteOverfilled { site, count });
            }
        }
        Ok(Self { excitations })
    }

    pub fn from_levels(levels: &[Level]) -> Self {
        Self {
            excitations: levels.iter().map(|l| l.excitation()).collect(),
        }
    }

    pub fn excitations(&self) -> &[u8] {
        &self.excitations
    }

    pub fn n_sites(&self) -> usize {
        self.excitations.len()
    }

    pub fn magnon_count(&self) -> usize {
        self.excitations.iter().map(|&e| e as usize).sum()
    }

    /// Total magnetization `sum_n a_n = m - N`.
    pub fn magnetization(&self) -> i64 {
        self.magnon_count() as i64 - self.n_sites() as i64
    }

    pub fn level(&self, site: usize) -> Level {
        Level::ALL[self.excitations[site] as usize]
    }
}

impl fmt::Display for SpinConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &e in &self.excitations {
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

fn check_sector(n: usize, m: usize) -> Result<()> {
    if n < MIN_SITES {
        return Err(Error::TooFewSites(n));
    }
    if m > 2 * n {
        return Err(Error::MagnonCountOutOfRange { n, m });
    }
    Ok(())
}

/// Number of excitation sequences in `{0,1,2}^n` summing to `m`, i.e. the
/// coefficient of `x^m` in `(1 + x + x^2)^n`.
pub fn dimension(n: usize, m: usize) -> Result<u128> {
    check_sector(n, m)?;
    let mut counts = vec![0u128; m + 1];
    counts[0] = 1;
    for _ in 0..n {
        for k in (0..=m).rev() {
            let mut c = counts[k];
            if k >= 1 {
                c += counts[k - 1];
            }
            if k >= 2 {
                c += counts[k - 2];
            }
            counts[k] = c;
        }
    }
    Ok(counts[m])
}

/// Ordered basis of one magnon sector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MagnonBasis {
    n_sites: usize,
    magnons: usize,
    // row-major, `n_sites` entries per state
    excitations: Vec<u8>,
}

/// Enumerate the `m`-magnon sector of an `n`-site ring, refusing sectors with
/// more than [`DEFAULT_MAX_DIM`] states.
pub fn enumerate_basis(n: usize, m: usize) -> Result<MagnonBasis> {
    enumerate_basis_with_cap(n, m, DEFAULT_MAX_DIM)
}

pub fn enumerate_basis_with_cap(n: usize, m: usize, max_dim: usize) -> Result<MagnonBasis> {
    let dim = dimension(n, m)?;
    if dim > max_dim as u128 {
        return Err(Error::CapacityExceeded { dim, cap: max_dim });
    }
    let dim = dim as usize;
    let mut excitations = Vec::with_capacity(dim * n);
    let mut current = vec![0u8; n];
    fill(&mut current, 0, m, &mut excitations);
    debug_assert_eq!(excitations.len(), dim * n);
    Ok(MagnonBasis {
        n_sites: n,
        magnons: m,
        excitations,
    })
}

// Depth-first over sites with digits tried in ascending order, which yields
// ascending lexicographic order directly.
fn fill(current: &mut [u8], site: usize, remaining: usize, out: &mut Vec<u8>) {
    let n = current.len();
    if site == n {
        if remaining == 0 {
            out.extend_from_slice(current);
        }
        return;
    }
    let capacity_after = 2 * (n - site - 1);
    for e in 0..=2u8 {
        let e_us = e as usize;
        if e_us > remaining {
            break;
        }
        if remaining - e_us > capacity_after {
            continue;
        }
        current[site] = e;
        fill(current, site + 1, remaining - e_us, out);
    }
    current[site] = 0;
}

impl MagnonBasis {
    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn magnons(&self) -> usize {
        self.magnons
    }

    /// Total magnetization `m - N` shared by every state of the sector.
    pub fn magnetization(&self) -> i64 {
        self.magnons as i64 - self.n_sites as i64
    }

    pub fn dim(&self) -> usize {
        self.excitations.len() / self.n_sites
    }

    /// Excitation sequence of state `index`.
    pub fn config(&self, index: usize) -> &[u8] {
        let n = self.n_sites;
        &self.excitations[index * n..(index + 1) * n]
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &[u8]> + '_ {
        self.excitations.chunks_exact(self.n_sites)
    }

    pub fn unrank(&self, index: usize) -> Option<SpinConfig> {
        (index < self.dim()).then(|| SpinConfig {
            excitations: self.config(index).to_vec(),
        })
    }

    /// Position of `config` in the sector ordering.
    pub fn rank(&self, config: &SpinConfig) -> Result<usize> {
        if config.n_sites() != self.n_sites {
            return Err(Error::SiteCountMismatch {
                expected: self.n_sites,
                got: config.n_sites(),
            });
        }
        if config.magnon_count() != self.magnons {
            return Err(Error::MagnonCountMismatch {
                expected: self.magnons,
                got: config.magnon_count(),
            });
        }
        self.index_of(config.excitations())
            .ok_or(Error::MagnonCountMismatch {
                expected: self.magnons,
                got: config.magnon_count(),
            })
    }

    /// Binary search for a raw excitation slice; `None` if it is not a state
    /// of this sector.
    pub fn index_of(&self, excitations: &[u8]) -> Option<usize> {
        if excitations.len() != self.n_sites {
            return None;
        }
        let (mut lo, mut hi) = (0usize, self.dim());
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            match self.config(mid).cmp(excitations) {
                Ordering::Less => lo = mid + 1,
                Ordering::Greater => hi = mid,
                Ordering::Equal => return Some(mid),
            }
        }
        None
    }

    /// Writes `index,excitations` rows, one per state.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "index,excitations")?;
        for (i, c) in self.iter().enumerate() {
            write!(w, "{i},")?;
            for &e in c {
                write!(w, "{e}")?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binomial(n: u128, k: u128) -> u128 {
        if k > n {
            return 0;
        }
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    /// All of `{0,1,2}^n`, filtered to magnon count `m`.
    fn brute_force(n: usize, m: usize) -> Vec<Vec<u8>> {
        let total = 3usize.pow(n as u32);
        let mut out = Vec::new();
        for mut code in 0..total {
            let mut seq = vec![0u8; n];
            for e in seq.iter_mut().rev() {
                *e = (code % 3) as u8;
                code /= 3;
            }
            if seq.iter().map(|&e| e as usize).sum::<usize>() == m {
                out.push(seq);
            }
        }
        out
    }

    #[test]
    fn dimension_examples() {
        assert_eq!(dimension(10, 3).unwrap(), 210);
        assert_eq!(dimension(3, 3).unwrap(), 7);
        assert_eq!(dimension(30, 2).unwrap(), 465);
        assert_eq!(dimension(30, 3).unwrap(), 4930);
        assert_eq!(dimension(7, 0).unwrap(), 1);
        assert_eq!(dimension(7, 14).unwrap(), 1);
    }

    #[test]
    fn dimension_matches_brute_force() {
        for n in 3..=8 {
            for m in 0..=2 * n {
                assert_eq!(
                    dimension(n, m).unwrap(),
                    brute_force(n, m).len() as u128,
                    "n={n} m={m}"
                );
            }
        }
    }

    #[test]
    fn three_magnon_count_identity() {
        for n in 3..=64u128 {
            let d = dimension(n as usize, 3).unwrap();
            assert_eq!(d, binomial(n, 3) + 2 * binomial(n, 2));
            assert_eq!(d, n * (n - 1) * (n + 4) / 6);
        }
    }

    #[test]
    fn two_magnon_closed_form() {
        for n in 3..=40u128 {
            assert_eq!(dimension(n as usize, 2).unwrap(), n * (n + 1) / 2);
        }
    }

    #[test]
    fn rejects_small_rings_and_overfull_sectors() {
        assert_eq!(dimension(2, 1), Err(Error::TooFewSites(2)));
        assert_eq!(
            dimension(4, 9),
            Err(Error::MagnonCountOutOfRange { n: 4, m: 9 })
        );
        assert!(enumerate_basis(2, 1).is_err());
    }

    #[test]
    fn capacity_guard() {
        let err = enumerate_basis_with_cap(30, 3, 1000).unwrap_err();
        assert_eq!(
            err,
            Error::CapacityExceeded {
                dim: 4930,
                cap: 1000
            }
        );
    }

    #[test]
    fn one_magnon_three_sites() {
        let b = enumerate_basis(3, 1).unwrap();
        let configs: Vec<&[u8]> = b.iter().collect();
        assert_eq!(configs, vec![&[0, 0, 1][..], &[0, 1, 0], &[1, 0, 0]]);
    }

    #[test]
    fn enumeration_equals_brute_force_filter() {
        for n in 3..=7 {
            for m in 0..=2 * n {
                let b = enumerate_basis(n, m).unwrap();
                let expected = brute_force(n, m);
                let got: Vec<Vec<u8>> = b.iter().map(<[u8]>::to_vec).collect();
                // brute force walks base-3 codes in ascending order, which is
                // the same lexicographic order
                assert_eq!(got, expected, "n={n} m={m}");
            }
        }
        assert_eq!(enumerate_basis(5, 3).unwrap().dim(), 30);
        assert_eq!(enumerate_basis(30, 3).unwrap().dim(), 4930);
    }

    #[test]
    fn strictly_increasing() {
        let b = enumerate_basis(9, 4).unwrap();
        for i in 1..b.dim() {
            assert!(b.config(i - 1) < b.config(i));
        }
    }

    #[test]
    fn rank_unrank_bijection() {
        for n in 3..=8 {
            for m in 0..=2 * n {
                let b = enumerate_basis(n, m).unwrap();
                for i in 0..b.dim() {
                    let c = b.unrank(i).unwrap();
                    assert_eq!(c.magnon_count(), m);
                    assert_eq!(b.rank(&c).unwrap(), i);
                }
                assert!(b.unrank(b.dim()).is_none());
            }
        }
    }

    #[test]
    fn rank_of_first_config_is_zero() {
        let b = enumerate_basis(6, 3).unwrap();
        let first = SpinConfig::new(vec![0, 0, 0, 0, 1, 2]).unwrap();
        assert_eq!(b.rank(&first).unwrap(), 0);
    }

    #[test]
    fn rank_agrees_with_linear_scan() {
        use rand::{Rng, SeedableRng};
        let b = enumerate_basis(8, 3).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let mut sites = Vec::new();
            while sites.len() < 3 {
                let s = rng.random_range(0..8);
                if sites.iter().filter(|&&x| x == s).count() < 2 {
                    sites.push(s);
                }
            }
            let c = SpinConfig::from_raised_sites(8, &sites).unwrap();
            let scan = b.iter().position(|x| x == c.excitations()).unwrap();
            assert_eq!(b.rank(&c).unwrap(), scan);
        }
    }

    #[test]
    fn rank_rejects_foreign_configs() {
        let b = enumerate_basis(6, 3).unwrap();
        let wrong_m = SpinConfig::new(vec![1, 1, 0, 0, 0, 0]).unwrap();
        assert_eq!(
            b.rank(&wrong_m),
            Err(Error::MagnonCountMismatch {
                expected: 3,
                got: 2
            })
        );
        let wrong_n = SpinConfig::new(vec![1, 1, 1]).unwrap();
        assert!(matches!(
            b.rank(&wrong_n),
            Err(Error::SiteCountMismatch { .. })
        ));
    }

    #[test]
    fn raised_sites_encoding() {
        let c = SpinConfig::from_raised_sites(5, &[1, 1, 3]).unwrap();
        assert_eq!(c.excitations(), &[0, 2, 0, 1, 0]);
        assert_eq!(c.magnetization(), -2);
        assert_eq!(c.to_string(), "02010");
        assert_eq!(
            SpinConfig::from_raised_sites(4, &[0, 0, 0]),
            Err(Error::SiteOverfilled { site: 0, count: 3 })
        );
        assert_eq!(
            SpinConfig::from_raised_sites(4, &[4]),
            Err(Error::SiteOutOfRange { site: 4, n: 4 })
        );
        assert!(SpinConfig::new(vec![0, 3]).is_err());
    }

    #[test]
    fn level_conventions() {
        for (e, level) in Level::ALL.iter().enumerate() {
            assert_eq!(level.index(), e);
            assert_eq!(Level::from_spin(level.spin() as i64).unwrap(), *level);
        }
        assert_eq!(Level::from_spin(2), Err(Error::InvalidLevel(2)));
    }

    #[test]
    fn csv_dump() {
        let b = enumerate_basis(3, 1).unwrap();
        let mut out = Vec::new();
        b.write_csv(&mut out).unwrap();
        assert_eq!(
            String::from_utf8(out).unwrap(),
            "index,excitations\n0,001\n1,010\n2,100\n"
        );
    }
}
