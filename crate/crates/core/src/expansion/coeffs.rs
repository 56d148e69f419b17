//! Hecke coefficient tables.

use std::collections::BTreeMap;
use std::path::Path;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};

/// Where a table came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Provenance {
    File,
    Synthetic,
    Delta,
}

/// `lambda(m1, m2)` for `m1, m2 >= 1` with `m1^2 m2 <= cutoff`; absent
/// keys are zero.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoefficientTable {
    entries: BTreeMap<(u64, u64), Complex64>,
    provenance: Provenance,
    cutoff: u64,
}

/// `s_{(l1, l2, 0)}(a1, a2, a3)` for `a1 a2 a3 = 1`, by Jacobi-Trudi:
/// `h_{l1} h_{l2} - h_{l1+1} h_{l2-1}`.
pub fn schur3(l1: u32, l2: u32, alpha: [Complex64; 3]) -> Complex64 {
    let e1 = alpha[0] + alpha[1] + alpha[2];
    let e2 = alpha[0] * alpha[1] + alpha[0] * alpha[2] + alpha[1] * alpha[2];
    let e3 = alpha[0] * alpha[1] * alpha[2];
    let n = l1 as usize + 2;
    let mut h = vec![Complex64::new(0.0, 0.0); n + 1];
    h[0] = Complex64::new(1.0, 0.0);
    for k in 1..=n {
        let mut v = e1 * h[k - 1];
        if k >= 2 {
            v -= e2 * h[k - 2];
        }
        if k >= 3 {
            v += e3 * h[k - 3];
        }
        h[k] = v;
    }
    let hm = |k: i64| if k < 0 { Complex64::new(0.0, 0.0) } else { h[k as usize] };
    hm(l1 as i64) * hm(l2 as i64) - hm(l1 as i64 + 1) * hm(l2 as i64 - 1)
}

pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let mut sieve = vec![true; n as usize + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut p = 2;
    while p * p <= n as usize {
        if sieve[p] {
            for q in (p * p..=n as usize).step_by(p) {
                sieve[q] = false;
            }
        }
        p += 1;
    }
    sieve.iter().enumerate().filter(|(_, &s)| s).map(|(k, _)| k as u64).collect()
}

/// Prime factorization with exponents, ascending.
fn factor(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        let mut e = 0;
        while n.is_multiple_of(p) {
            n /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

impl CoefficientTable {
    /// Only `lambda(1, 1) = 1`.
    pub fn delta() -> Self {
        let mut entries = BTreeMap::new();
        entries.insert((1, 1), Complex64::new(1.0, 0.0));
        CoefficientTable { entries, provenance: Provenance::Delta, cutoff: 1 }
    }

    /// Tempered multiplicative model: Satake angles drawn per prime (in
    /// increasing order) from a ChaCha stream, prime powers from Schur
    /// polynomials. Keys with a prime factor above `primes_up_to` are left
    /// out of the table.
    pub fn synthetic(seed: u64, primes_up_to_n: u64, cutoff: u64) -> Result<Self> {
        if cutoff < 1 {
            return Err(Error::Domain("coefficient cutoff must be at least 1".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut satake = BTreeMap::new();
        for p in primes_up_to(primes_up_to_n) {
            let th1: f64 = rng.random_range(0.0..std::f64::consts::TAU);
            let th2: f64 = rng.random_range(0.0..std::f64::consts::TAU);
            let a = [th1, th2, -th1 - th2].map(|t| Complex64::from_polar(1.0, t));
            satake.insert(p, a);
        }
        let mut entries = BTreeMap::new();
        let mut m1 = 1u64;
        while m1 * m1 <= cutoff {
            let mut m2 = 1u64;
            while m1 * m1 * m2 <= cutoff {
                if let Some(v) = Self::multiplicative(m1, m2, &satake) {
                    entries.insert((m1, m2), v);
                }
                m2 += 1;
            }
            m1 += 1;
        }
        Ok(CoefficientTable { entries, provenance: Provenance::Synthetic, cutoff })
    }

    fn multiplicative(m1: u64, m2: u64, satake: &BTreeMap<u64, [Complex64; 3]>) -> Option<Complex64> {
        let f1 = factor(m1);
        let f2 = factor(m2);
        let mut primes: Vec<u64> = f1.iter().chain(f2.iter()).map(|&(p, _)| p).collect();
        primes.sort_unstable();
        primes.dedup();
        let mut v = Complex64::new(1.0, 0.0);
        for p in primes {
            let alpha = satake.get(&p)?;
            let a = f1.iter().find(|q| q.0 == p).map_or(0, |q| q.1);
            let b = f2.iter().find(|q| q.0 == p).map_or(0, |q| q.1);
            v *= schur3(a + b, b, *alpha);
        }
        Some(v)
    }

    /// Reads a CSV with header `m1,m2,re,im`.
    pub fn load(path: &Path) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_path(path)
            .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        let header: Vec<String> =
            rdr.headers().map_err(|e| Error::Parse(e.to_string()))?.iter().map(|s| s.to_string()).collect();
        if header != ["m1", "m2", "re", "im"] {
            return Err(Error::Parse(format!("expected header m1,m2,re,im, got {}", header.join(","))));
        }
        let mut entries = BTreeMap::new();
        let mut cutoff = 1;
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| Error::Parse(e.to_string()))?;
            let bad = || Error::Parse(format!("malformed row {} in {}", line + 2, path.display()));
            if rec.len() != 4 {
                return Err(bad());
            }
            let m1: u64 = rec[0].parse().map_err(|_| bad())?;
            let m2: u64 = rec[1].parse().map_err(|_| bad())?;
            let re: f64 = rec[2].parse().map_err(|_| bad())?;
            let im: f64 = rec[3].parse().map_err(|_| bad())?;
            if m1 == 0 || m2 == 0 || !re.is_finite() || !im.is_finite() {
                return Err(bad());
            }
            if entries.insert((m1, m2), Complex64::new(re, im)).is_some() {
                return Err(Error::Parse(format!("duplicate key ({m1}, {m2})")));
            }
            cutoff = cutoff.max(m1 * m1 * m2);
        }
        let one = entries.get(&(1, 1)).copied().unwrap_or_default();
        if (one - Complex64::new(1.0, 0.0)).norm() > 1e-9 {
            return Err(Error::Normalization(format!("lambda(1,1) = {one}, expected 1")));
        }
        Ok(CoefficientTable { entries, provenance: Provenance::File, cutoff })
    }

    /// Writes the table as `m1,m2,re,im` CSV.
    pub fn save(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path).map_err(|e| Error::Parse(e.to_string()))?;
        let io = |e: csv::Error| Error::Parse(e.to_string());
        w.write_record(["m1", "m2", "re", "im"]).map_err(io)?;
        for (&(m1, m2), v) in &self.entries {
            w.write_record([m1.to_string(), m2.to_string(), format!("{:?}", v.re), format!("{:?}", v.im)])
                .map_err(io)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn get(&self, m1: u64, m2: u64) -> Complex64 {
        self.entries.get(&(m1, m2)).copied().unwrap_or_default()
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn cutoff(&self) -> u64 {
        self.cutoff
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries in ascending key order.
    pub fn iter(&self) -> impl Iterator<Item = ((u64, u64), Complex64)> + '_ {
        self.entries.iter().map(|(k, v)| (*k, *v))
    }
}

/// `sum_{m1^2 m2 <= cutoff} |lambda(m1, m2)|^2 / (m1^{2+2 eps} m2^{1+eps})`.
pub fn rankin_selberg_partial(coeffs: &CoefficientTable, epsilon: f64, cutoff: u64) -> f64 {
    let mut s = crate::quad::NeumaierSum::default();
    for ((m1, m2), v) in coeffs.iter() {
        if m1 * m1 * m2 <= cutoff {
            s.add(v.norm_sqr() / ((m1 as f64).powf(2.0 + 2.0 * epsilon) * (m2 as f64).powf(1.0 + epsilon)));
        }
    }
    s.value()
}
