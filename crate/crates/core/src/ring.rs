//! Residue arithmetic and the quadratic maps `x -> x^2 + a` as a dynamical system.

use std::collections::VecDeque;
use std::fmt;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Vertex;

/// The modulus `n` of the ring `Z_n`, with its primality cached.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Modulus {
    n: u64,
    prime: bool,
}

impl Modulus {
    pub fn new(n: u64) -> Result<Self> {
        if n < 2 || n > u64::from(Vertex::MAX) {
            return Err(Error::InvalidModulus(n));
        }
        Ok(Modulus { n, prime: is_prime(n) })
    }

    #[inline]
    pub fn get(self) -> u64 {
        self.n
    }

    #[inline]
    pub fn is_prime(self) -> bool {
        self.prime
    }

    #[inline]
    pub fn vertex_count(self) -> usize {
        self.n as usize
    }
}

impl fmt::Display for Modulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.n)
    }
}

/// `(x^2 + a) mod n`.
#[inline]
pub fn apply_map(modulus: Modulus, a: u64, x: u64) -> u64 {
    let n = u128::from(modulus.n);
    let x = u128::from(x);
    ((x * x + u128::from(a)) % n) as u64
}

/// Deterministic trial division.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n.is_multiple_of(2) || n.is_multiple_of(3) {
        return false;
    }
    let mut k = 5u64;
    while k.saturating_mul(k) <= n {
        if n.is_multiple_of(k) || n.is_multiple_of(k + 2) {
            return false;
        }
        k += 6;
    }
    true
}

/// Primes in `from..=to`, ascending.
pub fn primes_in(from: u64, to: u64) -> Vec<u64> {
    (from.max(2)..=to).filter(|&k| is_prime(k)).collect()
}

/// The smallest prime strictly greater than `p`.
pub fn next_prime(p: u64) -> u64 {
    (p + 1..).find(|&k| is_prime(k)).expect("primes are unbounded")
}

fn mul_mod(a: u64, b: u64, n: u64) -> u64 {
    ((u128::from(a) * u128::from(b)) % u128::from(n)) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, n: u64) -> u64 {
    let mut acc = 1 % n;
    base %= n;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, n);
        }
        base = mul_mod(base, base, n);
        exp >>= 1;
    }
    acc
}

/// Multiplicative order of `g` modulo `n`, or `None` when `gcd(g, n) != 1`.
pub fn multiplicative_order(g: u64, n: u64) -> Option<u64> {
    if n == 1 {
        return Some(1);
    }
    if num_integer::gcd(g % n, n) != 1 {
        return None;
    }
    let mut x = g % n;
    let mut k = 1;
    while x != 1 {
        x = mul_mod(x, g, n);
        k += 1;
    }
    Some(k)
}

/// Whether `g` generates the multiplicative group of the prime field `Z_p`.
pub fn is_primitive_root(g: u64, p: u64) -> bool {
    is_prime(p) && multiplicative_order(g, p) == Some(p - 1)
}

/// Primes of the form `2^(2^k) + 1`.
pub fn is_fermat_prime(p: u64) -> bool {
    if !is_prime(p) || p < 3 {
        return false;
    }
    let m = p - 1;
    m.is_power_of_two() && m.trailing_zeros().is_power_of_two()
}

/// `m` with every factor of two removed.
pub fn odd_part(m: u64) -> u64 {
    if m == 0 {
        0
    } else {
        m >> m.trailing_zeros()
    }
}

/// A point of the parameter space: a modulus and strictly increasing coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuadraticFamily {
    modulus: Modulus,
    coeffs: Vec<u64>,
}

impl QuadraticFamily {
    pub fn new(modulus: Modulus, coeffs: Vec<u64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::EmptyFamily);
        }
        if let Some(&coeff) = coeffs.iter().find(|&&a| a >= modulus.get()) {
            return Err(Error::CoefficientOutOfRange {
                coeff,
                modulus: modulus.get(),
            });
        }
        if coeffs.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::CoefficientsNotIncreasing(coeffs));
        }
        Ok(QuadraticFamily { modulus, coeffs })
    }

    /// Accepts coefficients in any order; duplicates are still rejected.
    pub fn from_unsorted(n: u64, mut coeffs: Vec<u64>) -> Result<Self> {
        let modulus = Modulus::new(n)?;
        coeffs.sort_unstable();
        Self::new(modulus, coeffs)
    }

    #[inline]
    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    #[inline]
    pub fn n(&self) -> u64 {
        self.modulus.get()
    }

    #[inline]
    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    /// Number of generators.
    #[inline]
    pub fn arity(&self) -> usize {
        self.coeffs.len()
    }

    /// `(Z_n, a1;a2;...)` style label used in file names and reports.
    pub fn coeff_label(&self) -> String {
        let parts: Vec<String> = self.coeffs.iter().map(u64::to_string).collect();
        parts.join(";")
    }
}

impl fmt::Display for QuadraticFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(Z_{}, {{{}}})", self.n(), self.coeff_label().replace(';', ","))
    }
}

/// Serialized identity of a family.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyId {
    pub n: u64,
    pub coeffs: Vec<u64>,
}

impl From<&QuadraticFamily> for FamilyId {
    fn from(f: &QuadraticFamily) -> Self {
        FamilyId {
            n: f.n(),
            coeffs: f.coeffs.clone(),
        }
    }
}

impl TryFrom<FamilyId> for QuadraticFamily {
    type Error = Error;

    fn try_from(id: FamilyId) -> Result<Self> {
        QuadraticFamily::new(Modulus::new(id.n)?, id.coeffs)
    }
}

/// The directed multigraph `x -> x^2 + a_i`, one out-edge per generator.
#[derive(Clone, Debug)]
pub struct FunctionalDigraph {
    family: QuadraticFamily,
    /// `out[x * d + i]` is the image of `x` under generator `i`.
    out: Vec<Vertex>,
}

impl FunctionalDigraph {
    pub fn new(family: QuadraticFamily) -> Self {
        let modulus = family.modulus();
        let n = family.n();
        let mut out = Vec::with_capacity(modulus.vertex_count() * family.arity());
        for x in 0..n {
            for &a in family.coeffs() {
                out.push(apply_map(modulus, a, x) as Vertex);
            }
        }
        FunctionalDigraph { family, out }
    }

    #[inline]
    pub fn family(&self) -> &QuadraticFamily {
        &self.family
    }

    #[inline]
    pub fn vertex_count(&self) -> usize {
        self.family.modulus().vertex_count()
    }

    #[inline]
    pub fn arity(&self) -> usize {
        self.family.arity()
    }

    /// Images of `x`, in generator order.
    #[inline]
    pub fn targets(&self, x: Vertex) -> &[Vertex] {
        let d = self.arity();
        let start = x as usize * d;
        &self.out[start..start + d]
    }

    fn check_vertex(&self, x: Vertex) -> Result<()> {
        if (x as usize) < self.vertex_count() {
            Ok(())
        } else {
            Err(Error::VertexOutOfRange {
                vertex: u64::from(x),
                modulus: self.family.n(),
            })
        }
    }

    /// In-degree of every vertex, self-loops included.
    pub fn in_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.vertex_count()];
        for &y in &self.out {
            deg[y as usize] += 1;
        }
        deg
    }

    /// Applies the generators named by `word` left to right: `w_1` acts first.
    pub fn iterate_word(&self, x: Vertex, word: &[usize]) -> Result<Vertex> {
        self.check_vertex(x)?;
        let d = self.arity();
        if let Some(&index) = word.iter().find(|&&i| i >= d) {
            return Err(Error::GeneratorIndex { index, arity: d });
        }
        Ok(word.iter().fold(x, |y, &i| self.targets(y)[i]))
    }

    /// Forward closure of `x` under all generators; contains `x` (empty word). Sorted.
    pub fn branch(&self, x: Vertex) -> Result<Vec<Vertex>> {
        self.check_vertex(x)?;
        let seen = self.branch_set(x);
        Ok(seen.ones().map(|v| v as Vertex).collect())
    }

    pub(crate) fn branch_set(&self, x: Vertex) -> FixedBitSet {
        let mut seen = FixedBitSet::with_capacity(self.vertex_count());
        let mut queue = VecDeque::from([x]);
        seen.insert(x as usize);
        while let Some(y) = queue.pop_front() {
            for &z in self.targets(y) {
                if !seen.put(z as usize) {
                    queue.push_back(z);
                }
            }
        }
        seen
    }

    /// Vertices that are not the image of any generator. Sorted.
    pub fn garden_of_eden(&self) -> Vec<Vertex> {
        self.in_degrees()
            .iter()
            .enumerate()
            .filter(|&(_, &k)| k == 0)
            .map(|(v, _)| v as Vertex)
            .collect()
    }

    /// Periodic cycles of a single map, each starting at its smallest vertex, ordered by
    /// that vertex.
    pub fn attractor_cycles(&self) -> Result<Vec<Vec<Vertex>>> {
        if self.arity() != 1 {
            return Err(Error::UnsupportedArity {
                expected: 1,
                found: self.arity(),
            });
        }
        const UNVISITED: u32 = 0;
        const DONE: u32 = u32::MAX;
        let n = self.vertex_count();
        // 0 = unvisited, DONE = finished, otherwise the walk id (start + 1) that is on it
        let mut mark = vec![UNVISITED; n];
        let mut cycles = Vec::new();
        for start in 0..n {
            if mark[start] != UNVISITED {
                continue;
            }
            let walk = start as u32 + 1;
            let mut path = Vec::new();
            let mut x = start;
            while mark[x] == UNVISITED {
                mark[x] = walk;
                path.push(x);
                x = self.out[x] as usize;
            }
            if mark[x] == walk {
                let pos = path.iter().position(|&v| v == x).expect("on current walk");
                let mut cycle: Vec<Vertex> = path[pos..].iter().map(|&v| v as Vertex).collect();
                let min_at = (0..cycle.len()).min_by_key(|&i| cycle[i]).unwrap_or(0);
                cycle.rotate_left(min_at);
                cycles.push(cycle);
            }
            for v in path {
                mark[v] = DONE;
            }
        }
        cycles.sort_by_key(|c| c[0]);
        Ok(cycles)
    }

    /// For a single map: index into `attractor_cycles()` of the cycle each vertex falls into.
    pub fn attractor_basins(&self) -> Result<Vec<usize>> {
        let cycles = self.attractor_cycles()?;
        let n = self.vertex_count();
        let mut basin = vec![usize::MAX; n];
        for (i, c) in cycles.iter().enumerate() {
            for &v in c {
                basin[v as usize] = i;
            }
        }
        for start in 0..n {
            let mut path = Vec::new();
            let mut x = start;
            while basin[x] == usize::MAX {
                path.push(x);
                x = self.out[x] as usize;
            }
            let b = basin[x];
            for v in path {
                basin[v] = b;
            }
        }
        Ok(basin)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn digraph(n: u64, coeffs: &[u64]) -> FunctionalDigraph {
        FunctionalDigraph::new(QuadraticFamily::from_unsorted(n, coeffs.to_vec()).unwrap())
    }

    #[test]
    fn apply_map_examples() {
        assert_eq!(apply_map(Modulus::new(5).unwrap(), 0, 3), 4);
        assert_eq!(apply_map(Modulus::new(2).unwrap(), 0, 1), 1);
        assert_eq!(apply_map(Modulus::new(23).unwrap(), 4, 14), 16);
    }

    #[test]
    fn apply_map_large_modulus_does_not_overflow() {
        let m = Modulus::new(u64::from(u32::MAX)).unwrap();
        let x = u64::from(u32::MAX) - 1;
        assert_eq!(apply_map(m, 0, x), 1);
    }

    #[test]
    fn modulus_validation() {
        assert!(matches!(Modulus::new(1), Err(Error::InvalidModulus(1))));
        assert!(Modulus::new(0).is_err());
        assert!(Modulus::new(2).unwrap().is_prime());
        assert!(!Modulus::new(2310).unwrap().is_prime());
    }

    #[test]
    fn primality_matches_sieve() {
        let limit = 5000usize;
        let mut sieve = vec![true; limit + 1];
        sieve[0] = false;
        sieve[1] = false;
        for i in 2..=limit {
            if sieve[i] {
                for j in (i * i..=limit).step_by(i) {
                    sieve[j] = false;
                }
            }
        }
        for (k, &p) in sieve.iter().enumerate() {
            assert_eq!(is_prime(k as u64), p, "{k}");
        }
    }

    #[test]
    fn family_validation() {
        let m = Modulus::new(7).unwrap();
        assert!(matches!(QuadraticFamily::new(m, vec![]), Err(Error::EmptyFamily)));
        assert!(matches!(
            QuadraticFamily::new(m, vec![3, 2]),
            Err(Error::CoefficientsNotIncreasing(_))
        ));
        assert!(matches!(
            QuadraticFamily::new(m, vec![2, 2]),
            Err(Error::CoefficientsNotIncreasing(_))
        ));
        assert!(matches!(
            QuadraticFamily::new(m, vec![7]),
            Err(Error::CoefficientOutOfRange { coeff: 7, modulus: 7 })
        ));
        let f = QuadraticFamily::from_unsorted(7, vec![3, 1]).unwrap();
        assert_eq!(f.coeffs(), &[1, 3]);
        assert_eq!(f.to_string(), "(Z_7, {1,3})");
    }

    #[test]
    fn iterate_word_examples() {
        assert_eq!(digraph(5, &[0]).iterate_word(2, &[0, 0]).unwrap(), 1);
        assert_eq!(digraph(7, &[1]).iterate_word(0, &[0, 0, 0]).unwrap(), 5);
        assert_eq!(digraph(7, &[1]).iterate_word(4, &[]).unwrap(), 4);
        assert!(matches!(
            digraph(7, &[1, 2]).iterate_word(0, &[0, 2]),
            Err(Error::GeneratorIndex { index: 2, arity: 2 })
        ));
    }

    #[test]
    fn branch_examples() {
        assert_eq!(digraph(5, &[0]).branch(2).unwrap(), vec![1, 2, 4]);
        assert_eq!(digraph(5, &[0]).branch(0).unwrap(), vec![0]);
        assert_eq!(digraph(2, &[1]).branch(0).unwrap(), vec![0, 1]);
        assert!(digraph(5, &[0]).branch(5).is_err());
    }

    #[test]
    fn garden_of_eden_examples() {
        assert_eq!(digraph(7, &[0]).garden_of_eden(), vec![3, 5, 6]);
        assert_eq!(digraph(5, &[0]).garden_of_eden(), vec![2, 3]);
        assert!(digraph(2, &[0]).garden_of_eden().is_empty());
    }

    #[test]
    fn garden_of_eden_of_squaring_is_half_the_units() {
        for p in primes_in(2, 199) {
            assert_eq!(digraph(p, &[0]).garden_of_eden().len() as u64, (p - 1) / 2, "p={p}");
        }
    }

    #[test]
    fn attractor_examples() {
        assert_eq!(digraph(5, &[0]).attractor_cycles().unwrap(), vec![vec![0], vec![1]]);
        assert_eq!(digraph(7, &[1]).attractor_cycles().unwrap(), vec![vec![3], vec![5]]);
        assert_eq!(digraph(2, &[1]).attractor_cycles().unwrap(), vec![vec![0, 1]]);
        assert!(matches!(
            digraph(7, &[1, 2]).attractor_cycles(),
            Err(Error::UnsupportedArity { expected: 1, found: 2 })
        ));
    }

    #[test]
    fn every_orbit_reaches_exactly_one_cycle() {
        for n in 2..=60 {
            for a in 0..n {
                let g = digraph(n, &[a]);
                let cycles = g.attractor_cycles().unwrap();
                let mut owner = vec![None; n as usize];
                for (i, c) in cycles.iter().enumerate() {
                    for &v in c {
                        assert!(owner[v as usize].replace(i).is_none(), "cycles overlap");
                    }
                    // a cycle really is a cycle
                    for (k, &v) in c.iter().enumerate() {
                        assert_eq!(g.targets(v)[0], c[(k + 1) % c.len()]);
                    }
                }
                let basins = g.attractor_basins().unwrap();
                for x in 0..n as Vertex {
                    // after n steps every orbit is on its cycle
                    let y = g.iterate_word(x, &vec![0; n as usize]).unwrap();
                    assert_eq!(owner[y as usize], Some(basins[x as usize]));
                }
            }
        }
    }

    #[test]
    fn in_degree_bounded_over_prime_fields() {
        for p in primes_in(2, 31) {
            for a in 0..p {
                for b in a + 1..p {
                    let g = digraph(p, &[a, b]);
                    assert!(g.in_degrees().iter().all(|&k| k <= 4));
                    assert!((0..p as Vertex).all(|x| g.targets(x).len() == 2));
                }
            }
        }
    }

    #[test]
    fn number_theory_helpers() {
        assert_eq!(multiplicative_order(2, 263), Some(131));
        assert_eq!(multiplicative_order(2, 131), Some(130));
        assert_eq!(multiplicative_order(2, 10), None);
        assert!(is_primitive_root(2, 131));
        assert!(!is_primitive_root(2, 263));
        assert!(is_primitive_root(3, 7));
        let fermat: Vec<u64> = primes_in(2, 70000).into_iter().filter(|&p| is_fermat_prime(p)).collect();
        assert_eq!(fermat, vec![3, 5, 17, 257, 65537]);
        assert_eq!(odd_part(192), 3);
        assert_eq!(pow_mod(3, 6, 7), 1);
        assert_eq!(next_prime(61), 67);
    }

    proptest! {
        #[test]
        fn word_action_is_a_monoid_action(
            n in 2u64..200,
            raw in proptest::collection::vec(0u64..200, 1..4),
            x in 0u64..200,
            u in proptest::collection::vec(0usize..4, 0..12),
            v in proptest::collection::vec(0usize..4, 0..12),
        ) {
            let mut coeffs: Vec<u64> = raw.iter().map(|a| a % n).collect();
            coeffs.sort_unstable();
            coeffs.dedup();
            let g = digraph(n, &coeffs);
            let d = g.arity();
            let x = (x % n) as Vertex;
            let u: Vec<usize> = u.into_iter().map(|i| i % d).collect();
            let v: Vec<usize> = v.into_iter().map(|i| i % d).collect();
            let uv: Vec<usize> = u.iter().chain(&v).copied().collect();
            let mid = g.iterate_word(x, &u).unwrap();
            prop_assert_eq!(g.iterate_word(x, &uv).unwrap(), g.iterate_word(mid, &v).unwrap());
        }

        #[test]
        fn branch_is_forward_closed(n in 2u64..150, a in 0u64..150, b in 0u64..150, x in 0u64..150) {
            let mut coeffs = vec![a % n, b % n];
            coeffs.sort_unstable();
            coeffs.dedup();
            let g = digraph(n, &coeffs);
            let x = (x % n) as Vertex;
            let br = g.branch(x).unwrap();
            prop_assert!(br.binary_search(&x).is_ok());
            prop_assert!(br.len() as u64 <= n);
            for &y in &br {
                for &z in g.targets(y) {
                    prop_assert!(br.binary_search(&z).is_ok());
                }
            }
        }
    }
}
