//! Cosine basis on `[0, 1]` and its tensor-product extension.
//!
//! The univariate functions are `phi_k(x) = cos((k - 1) * pi * x)` for
//! `k >= 1`, used without the `sqrt(2)` factor. Their `L2[0, 1]` norm is
//! therefore 1 for `k = 1` and `1/sqrt(2)` for `k >= 2`; every function is
//! bounded by 1 in absolute value.
//!
//! Multivariate bases are products of univariate cosines indexed by a
//! [`MultiIndex`] `l`. A [`BasisCatalog`] orders the multi-indices by the
//! product `l[0] * ... * l[p-1]`, breaking ties lexicographically.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{check_dimension, Error, Result};

/// `cos((k - 1) * pi * x)`.
pub fn cosine_eval(k: u32, x: f64) -> Result<f64> {
    if k < 1 {
        return Err(Error::InvalidInput("basis index must be >= 1".into()));
    }
    Ok(cosine(k, x))
}

#[inline]
fn cosine(k: u32, x: f64) -> f64 {
    if k == 1 {
        1.0
    } else {
        (f64::from(k - 1) * PI * x).cos()
    }
}

/// Positive-integer index of a tensor-product cosine function.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(entries: Vec<u32>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidInput("multi-index must be non-empty".into()));
        }
        if entries.iter().any(|&l| l < 1) {
            return Err(Error::InvalidInput(
                "multi-index entries must be >= 1".into(),
            ));
        }
        Ok(Self(entries))
    }

    pub fn ones(p: usize) -> Self {
        Self(vec![1; p])
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn product(&self) -> u64 {
        self.0.iter().map(|&l| u64::from(l)).product()
    }
}

/// `prod_m cos((l[m] - 1) * pi * x[m])`.
pub fn tensor_basis_eval(index: &MultiIndex, x: &[f64]) -> Result<f64> {
    check_dimension(index.len(), x.len())?;
    Ok(index
        .entries()
        .iter()
        .zip(x)
        .map(|(&l, &xm)| cosine(l, xm))
        .product())
}

/// First `count` multi-indices of length `p`, ordered by product then lexicographically.
pub fn multi_index_sequence(p: usize, count: usize) -> Result<Vec<MultiIndex>> {
    if p == 0 || count == 0 {
        return Err(Error::InvalidInput("p and count must be positive".into()));
    }
    let mut catalog = BasisCatalog::new(p)?;
    catalog.ensure(count);
    Ok(catalog.indices()[..count].to_vec())
}

/// Appends every multi-index of length `p` whose product lies in `(lo, hi]`.
fn enumerate_products(p: usize, lo: u64, hi: u64, out: &mut Vec<MultiIndex>) {
    fn rec(
        p: usize,
        lo: u64,
        hi: u64,
        prefix: &mut Vec<u32>,
        prod: u64,
        out: &mut Vec<MultiIndex>,
    ) {
        if prefix.len() == p {
            if prod > lo {
                out.push(MultiIndex(prefix.clone()));
            }
            return;
        }
        let mut l = 1u64;
        while prod * l <= hi {
            prefix.push(l as u32);
            rec(p, lo, hi, prefix, prod * l, out);
            prefix.pop();
            l += 1;
        }
    }
    let mut prefix = Vec::with_capacity(p);
    rec(p, lo, hi, &mut prefix, 1, out);
}

/// Lazily extended, prefix-stable ordering of tensor-product cosine functions.
///
/// Extension enumerates every index with product at most some bound and
/// sorts the newly reached product levels; entries already materialized never
/// move. Extension needs `&mut self`, so a catalog is confined to its owner;
/// the materialized prefix can be read from any thread.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CatalogSnapshot", into = "CatalogSnapshot")]
pub struct BasisCatalog {
    dimension: usize,
    indices: Vec<MultiIndex>,
    /// Non-unit entries `(coordinate, l)` of each index, used for evaluation.
    sparse: Vec<Vec<(usize, u32)>>,
    /// Every index with product `<= bound` is materialized.
    bound: u64,
}

impl BasisCatalog {
    pub fn new(dimension: usize) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::InvalidInput(
                "catalog dimension must be positive".into(),
            ));
        }
        let mut catalog = Self {
            dimension,
            indices: Vec::new(),
            sparse: Vec::new(),
            bound: 0,
        };
        catalog.ensure(1);
        Ok(catalog)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// Materialized prefix.
    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Materializes at least `count` entries.
    pub fn ensure(&mut self, count: usize) {
        while self.indices.len() < count {
            let lo = self.bound;
            let hi = if lo == 0 {
                1
            } else if self.dimension == 1 {
                // univariate levels are single integers
                lo.max(count as u64)
            } else {
                lo * 2
            };
            let mut fresh = Vec::new();
            enumerate_products(self.dimension, lo, hi, &mut fresh);
            fresh.sort_by(|a, b| a.product().cmp(&b.product()).then_with(|| a.cmp(b)));
            for index in fresh {
                let sparse = index
                    .entries()
                    .iter()
                    .enumerate()
                    .filter(|(_, &l)| l > 1)
                    .map(|(m, &l)| (m, l))
                    .collect();
                self.sparse.push(sparse);
                self.indices.push(index);
            }
            self.bound = hi;
        }
    }

    /// Evaluates the first `j` catalog functions at `x`, extending the catalog if needed.
    pub fn basis_vector(&mut self, j: usize, x: &[f64]) -> Result<Vec<f64>> {
        self.ensure(j);
        self.materialized_basis_vector(j, x)
    }

    /// Like [`basis_vector`](Self::basis_vector) but read-only; `j` must not
    /// exceed the materialized length.
    pub fn materialized_basis_vector(&self, j: usize, x: &[f64]) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(j);
        self.basis_vector_into(j, x, &mut out)?;
        Ok(out)
    }

    pub fn basis_vector_into(&self, j: usize, x: &[f64], out: &mut Vec<f64>) -> Result<()> {
        check_dimension(self.dimension, x.len())?;
        if j > self.indices.len() {
            return Err(Error::InvalidInput(format!(
                "requested {j} basis functions, only {} materialized",
                self.indices.len()
            )));
        }
        out.clear();
        if self.dimension == 1 {
            out.extend((1..=j as u32).map(|k| cosine(k, x[0])));
            return Ok(());
        }
        // tables[m][l - 2] = cos((l - 1) * pi * x[m])
        let mut tables: Vec<Vec<f64>> = vec![Vec::new(); self.dimension];
        for entry in &self.sparse[..j] {
            let mut value = 1.0;
            for &(m, l) in entry {
                let table = &mut tables[m];
                while table.len() + 1 < l as usize {
                    let next = table.len() as u32 + 2;
                    table.push(cosine(next, x[m]));
                }
                value *= table[l as usize - 2];
            }
            out.push(value);
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct CatalogSnapshot {
    dimension: usize,
    materialized: usize,
}

impl From<BasisCatalog> for CatalogSnapshot {
    fn from(c: BasisCatalog) -> Self {
        Self {
            dimension: c.dimension,
            materialized: c.indices.len(),
        }
    }
}

impl TryFrom<CatalogSnapshot> for BasisCatalog {
    type Error = Error;

    fn try_from(s: CatalogSnapshot) -> Result<Self> {
        let mut catalog = BasisCatalog::new(s.dimension)?;
        catalog.ensure(s.materialized);
        Ok(catalog)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Every index with all entries <= max_entry, filtered by product and sorted.
    fn brute_force(p: usize, count: usize) -> Vec<Vec<u32>> {
        // any of the first `count` indices has product <= count, hence entries <= count
        let max_entry = count as u32;
        let mut all = vec![vec![]];
        for _ in 0..p {
            let mut next = Vec::new();
            for prefix in &all {
                for l in 1..=max_entry {
                    let mut v: Vec<u32> = prefix.clone();
                    v.push(l);
                    next.push(v);
                }
            }
            all = next;
        }
        let prod = |v: &Vec<u32>| v.iter().map(|&l| u64::from(l)).product::<u64>();
        all.retain(|v| prod(v) <= count as u64);
        all.sort_by(|a, b| prod(a).cmp(&prod(b)).then_with(|| a.cmp(b)));
        all.truncate(count);
        all
    }

    fn entries(v: &[MultiIndex]) -> Vec<Vec<u32>> {
        v.iter().map(|m| m.entries().to_vec()).collect()
    }

    #[test]
    fn cosine_examples() {
        assert_eq!(cosine_eval(1, 0.37).unwrap(), 1.0);
        assert_eq!(cosine_eval(2, 0.0).unwrap(), 1.0);
        assert!((cosine_eval(3, 0.5).unwrap() + 1.0).abs() < 1e-15);
        assert!(cosine_eval(0, 0.5).is_err());
    }

    #[test]
    fn sequence_examples() {
        assert_eq!(
            entries(&multi_index_sequence(1, 4).unwrap()),
            vec![vec![1], vec![2], vec![3], vec![4]]
        );
        assert_eq!(
            entries(&multi_index_sequence(2, 5).unwrap()),
            vec![vec![1, 1], vec![1, 2], vec![2, 1], vec![1, 3], vec![3, 1]]
        );
        assert_eq!(
            entries(&multi_index_sequence(3, 1).unwrap()),
            vec![vec![1, 1, 1]]
        );
        assert!(multi_index_sequence(0, 3).is_err());
    }

    #[test]
    fn sequence_matches_brute_force() {
        for p in 1..=3 {
            for count in [1, 2, 7, 30, 64, 200] {
                let got = entries(&multi_index_sequence(p, count).unwrap());
                assert_eq!(got, brute_force(p, count), "p={p} count={count}");
            }
        }
    }

    #[test]
    fn tensor_examples() {
        let ones = MultiIndex::new(vec![1, 1]).unwrap();
        assert_eq!(tensor_basis_eval(&ones, &[0.2, 0.9]).unwrap(), 1.0);
        let i21 = MultiIndex::new(vec![2, 1]).unwrap();
        assert_eq!(tensor_basis_eval(&i21, &[0.0, 0.5]).unwrap(), 1.0);
        let i22 = MultiIndex::new(vec![2, 2]).unwrap();
        assert!(tensor_basis_eval(&i22, &[0.5, 0.5]).unwrap().abs() < 1e-15);
        assert!(tensor_basis_eval(&i22, &[0.5]).is_err());
        assert!(MultiIndex::new(vec![1, 0]).is_err());
    }

    #[test]
    fn basis_vector_examples() {
        let mut c1 = BasisCatalog::new(1).unwrap();
        assert_eq!(c1.basis_vector(2, &[0.0]).unwrap(), vec![1.0, 1.0]);
        let v = c1.basis_vector(3, &[0.5]).unwrap();
        assert_eq!(v[0], 1.0);
        assert!(v[1].abs() < 1e-15);
        assert!((v[2] + 1.0).abs() < 1e-15);
        let mut c2 = BasisCatalog::new(2).unwrap();
        assert_eq!(
            c2.basis_vector(3, &[0.0, 0.0]).unwrap(),
            vec![1.0, 1.0, 1.0]
        );
    }

    #[test]
    fn vector_agrees_with_direct_product() {
        let mut catalog = BasisCatalog::new(3).unwrap();
        let x = [0.13, 0.77, 0.42];
        let v = catalog.basis_vector(150, &x).unwrap();
        for (k, index) in catalog.indices()[..150].iter().enumerate() {
            let direct = tensor_basis_eval(index, &x).unwrap();
            assert!((v[k] - direct).abs() < 1e-14);
        }
    }

    #[test]
    fn read_only_path_refuses_unmaterialized() {
        let catalog = BasisCatalog::new(2).unwrap();
        assert!(catalog.materialized_basis_vector(50, &[0.1, 0.2]).is_err());
    }

    #[test]
    fn serde_roundtrip_rebuilds_prefix() {
        let mut catalog = BasisCatalog::new(4).unwrap();
        catalog.ensure(40);
        let json = serde_json::to_string(&catalog).unwrap();
        let back: BasisCatalog = serde_json::from_str(&json).unwrap();
        assert_eq!(back.indices()[..40], catalog.indices()[..40]);
    }

    #[test]
    fn monte_carlo_orthogonality() {
        // documented normalization: E[phi_k^2] = 1 for k = 1, 1/2 for k >= 2
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let n = 1_000_000;
        let ks = [1u32, 2, 3, 5];
        let mut gram = [[0.0f64; 4]; 4];
        for _ in 0..n {
            let u: f64 = rng.random();
            let vals: Vec<f64> = ks.iter().map(|&k| cosine(k, u)).collect();
            for a in 0..4 {
                for b in 0..4 {
                    gram[a][b] += vals[a] * vals[b];
                }
            }
        }
        for a in 0..4 {
            for b in 0..4 {
                let mean = gram[a][b] / n as f64;
                let expected = match (a == b, ks[a]) {
                    (false, _) => 0.0,
                    (true, 1) => 1.0,
                    (true, _) => 0.5,
                };
                assert!(
                    (mean - expected).abs() < 5e-3,
                    "k={} k'={} mean={mean}",
                    ks[a],
                    ks[b]
                );
            }
        }
    }

    proptest! {
        #[test]
        fn prefix_stable(p in 1usize..5, n in 1usize..60, extra in 1usize..80) {
            let short = multi_index_sequence(p, n).unwrap();
            let long = multi_index_sequence(p, n + extra).unwrap();
            prop_assert_eq!(&long[..n], &short[..]);
            let mut dedup = long.clone();
            dedup.sort();
            dedup.dedup();
            prop_assert_eq!(dedup.len(), long.len());
            prop_assert_eq!(long[0].clone(), MultiIndex::ones(p));
        }

        #[test]
        fn uniformly_bounded(x in proptest::collection::vec(0.0f64..=1.0, 3), j in 1usize..120) {
            let mut catalog = BasisCatalog::new(3).unwrap();
            let v = catalog.basis_vector(j, &x).unwrap();
            prop_assert_eq!(v.len(), j);
            prop_assert!(v.iter().all(|z| z.abs() <= 1.0));
        }
    }
}
