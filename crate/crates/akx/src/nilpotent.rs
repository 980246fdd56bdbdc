//! Exact arithmetic in the free class-2 nilpotent group `N_n` on generators
//! `h_1 .. h_n`.
//!
//! Elements are stored in collected form `h_1^{a_1} .. h_n^{a_n} *
//! prod c_{ij}^{m_ij}` where `c_{ij} = [h_i, h_j]` (convention
//! `[x, y] = x^-1 y^-1 x y`, pairs in lexicographic order, `i < j`). The
//! commutators are central, so this pair of exponent vectors is a canonical
//! form: two elements are equal iff their vectors agree componentwise.
//! Exponents are arbitrary-precision integers.

use num::BigInt;
use num::Zero;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NilError {
    #[error("rank must be at least 1")]
    ZeroRank,
    #[error("rank mismatch: {0} vs {1}")]
    RankMismatch(usize, usize),
    #[error("pair indices out of range: ({0}, {1}) for rank {2}")]
    BadPair(u32, u32, usize),
    #[error("cannot parse canonical encoding: {0}")]
    BadEncoding(String),
}

/// Canonical form of an element of `N_n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NilElement {
    /// Generator exponents, length n.
    pub a: Vec<BigInt>,
    /// Central commutator exponents for pairs (i, j), i < j, lexicographic;
    /// length n(n-1)/2.
    pub m: Vec<BigInt>,
}

/// Position of pair (i, j), 1-based, i < j, in the lexicographic layout.
fn pair_slot(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(1 <= i && i < j && j <= n);
    // pairs (1,2)..(1,n), (2,3)..(2,n), ...
    let before = (i - 1) * n - (i - 1) * i / 2;
    before + (j - i) - 1
}

impl NilElement {
    pub fn identity(n: usize) -> Result<NilElement, NilError> {
        if n == 0 {
            return Err(NilError::ZeroRank);
        }
        Ok(NilElement {
            a: vec![BigInt::zero(); n],
            m: vec![BigInt::zero(); n * (n - 1) / 2],
        })
    }

    /// The generator `h_k` (1-based).
    pub fn generator(n: usize, k: usize) -> Result<NilElement, NilError> {
        let mut g = NilElement::identity(n)?;
        if k == 0 || k > n {
            return Err(NilError::BadPair(k as u32, k as u32, n));
        }
        g.a[k - 1] = BigInt::from(1);
        Ok(g)
    }

    pub fn rank(&self) -> usize {
        self.a.len()
    }

    pub fn is_identity(&self) -> bool {
        self.a.iter().all(Zero::is_zero) && self.m.iter().all(Zero::is_zero)
    }

    fn check_rank(&self, other: &NilElement) -> Result<(), NilError> {
        if self.rank() != other.rank() {
            return Err(NilError::RankMismatch(self.rank(), other.rank()));
        }
        Ok(())
    }

    /// Collected product: `a'' = a + a'`,
    /// `m''_ij = m_ij + m'_ij - a'_i a_j`.
    pub fn mul(&self, other: &NilElement) -> Result<NilElement, NilError> {
        self.check_rank(other)?;
        let n = self.rank();
        let a = self.a.iter().zip(&other.a).map(|(x, y)| x + y).collect();
        let mut m = Vec::with_capacity(self.m.len());
        let mut slot = 0;
        for i in 1..=n {
            for j in i + 1..=n {
                m.push(&self.m[slot] + &other.m[slot] - &other.a[i - 1] * &self.a[j - 1]);
                slot += 1;
            }
        }
        Ok(NilElement { a, m })
    }

    /// `a' = -a`, `m'_ij = -m_ij - a_i a_j`.
    pub fn inv(&self) -> NilElement {
        let n = self.rank();
        let a = self.a.iter().map(|x| -x).collect();
        let mut m = Vec::with_capacity(self.m.len());
        let mut slot = 0;
        for i in 1..=n {
            for j in i + 1..=n {
                m.push(-&self.m[slot] - &self.a[i - 1] * &self.a[j - 1]);
                slot += 1;
            }
        }
        NilElement { a, m }
    }

    /// `[g, g'] = g^-1 g'^-1 g g'`: central, `m''_ij = a_i a'_j - a'_i a_j`.
    pub fn commutator(&self, other: &NilElement) -> Result<NilElement, NilError> {
        self.check_rank(other)?;
        let n = self.rank();
        let mut out = NilElement::identity(n)?;
        let mut slot = 0;
        for i in 1..=n {
            for j in i + 1..=n {
                out.m[slot] =
                    &self.a[i - 1] * &other.a[j - 1] - &other.a[i - 1] * &self.a[j - 1];
                slot += 1;
            }
        }
        Ok(out)
    }

    /// `c^-1 g c`: generator exponents unchanged,
    /// `m_ij += a_i c_j - c_i a_j`.
    pub fn conj(&self, by: &NilElement) -> Result<NilElement, NilError> {
        self.check_rank(by)?;
        let n = self.rank();
        let mut out = self.clone();
        let mut slot = 0;
        for i in 1..=n {
            for j in i + 1..=n {
                out.m[slot] +=
                    &self.a[i - 1] * &by.a[j - 1] - &by.a[i - 1] * &self.a[j - 1];
                slot += 1;
            }
        }
        Ok(out)
    }

    /// Image under the projection killing all generators but `h_i`, `h_j`:
    /// the triple `(a_i, a_j, m_ij)` in the rank-2 (Heisenberg) case.
    pub fn heisenberg_project(&self, i: usize, j: usize) -> Result<(BigInt, BigInt, BigInt), NilError> {
        let n = self.rank();
        if !(1 <= i && i < j && j <= n) {
            return Err(NilError::BadPair(i as u32, j as u32, n));
        }
        Ok((
            self.a[i - 1].clone(),
            self.a[j - 1].clone(),
            self.m[pair_slot(n, i, j)].clone(),
        ))
    }

    /// Deterministic injective encoding used for key derivation:
    /// `N:<n>,<a entries>,<m entries>` in ASCII decimal.
    pub fn canonical_bytes(&self) -> Vec<u8> {
        let mut out = format!("N:{}", self.rank());
        for entry in self.a.iter().chain(&self.m) {
            out.push(',');
            out.push_str(&entry.to_string());
        }
        out.into_bytes()
    }

    /// Inverse of [`NilElement::canonical_bytes`].
    pub fn from_canonical_bytes(bytes: &[u8]) -> Result<NilElement, NilError> {
        let text = std::str::from_utf8(bytes)
            .map_err(|_| NilError::BadEncoding("not utf-8".into()))?;
        let bad = || NilError::BadEncoding(text.to_string());
        let rest = text.strip_prefix("N:").ok_or_else(bad)?;
        let mut fields = rest.split(',');
        let n: usize = fields.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
        if n == 0 {
            return Err(NilError::ZeroRank);
        }
        let values: Vec<BigInt> = fields
            .map(|f| f.parse().map_err(|_| bad()))
            .collect::<Result<_, _>>()?;
        if values.len() != n + n * (n - 1) / 2 {
            return Err(bad());
        }
        let (a, m) = values.split_at(n);
        Ok(NilElement { a: a.to_vec(), m: m.to_vec() })
    }
}
