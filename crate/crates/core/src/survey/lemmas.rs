//! Exhaustive checks of the structural statements about quadratic orbital networks.
//!
//! Proven statements must hold on every instance; a counterexample means a bug here.
//! Observed statements are patterns seen in experiments and are only reported.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::branch::{branch_cover_number, branch_graph, positively_connected};
use crate::error::{Error, Result};
use crate::graph::{orbital_graph_of, OrbitalGraph};
use crate::invariants::{clique_census, component_count, cycle_rank, diameter, inductive_dimension, Diameter};
use crate::ring::{
    is_fermat_prime, is_primitive_root, odd_part, FamilyId, FunctionalDigraph, Modulus, QuadraticFamily,
};
use crate::survey::{enumerate_space, par_map_ordered};
use crate::{Rational, Vertex};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LemmaKind {
    Proven,
    Observed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LemmaId {
    /// d = 1: chi >= 0.
    D1ChiNonnegative,
    /// d = 1: at most two triangles.
    D1AtMostTwoTriangles,
    /// d = 1: no K4.
    D1NoK4,
    /// d = 1: cycle rank equals the number of attractor cycles of length >= 3.
    D1CycleRankCountsLongAttractors,
    /// x^2: exactly (p - 1) / 2 vertices without preimage.
    GardenOfEdenHalf,
    /// x^2, odd p: the nonzero vertices form one component iff p is a Fermat prime.
    SquaringSingleComponentIffFermat,
    /// x^2: components on the nonzero vertices = cycles of t -> 2t on Z_m, m the odd part of p - 1.
    SquaringComponentsMatchDoublingCycles,
    /// x^2: two components on the nonzero vertices iff 2 is a primitive root mod p.
    SquaringTwoComponentsIffPrimitiveRoot,
    /// d = 2, p > 13: chi < 0.
    D2ChiNegative,
    /// Triangle-free and 4-regular implies chi = -n.
    TriangleFreeFourRegular,
    /// c_m <= d^(m+1) 2^(m+1) for m >= 2.
    CliqueCountBound,
    /// No K6. The out-degree counting argument covers d <= 2; d = 3 is only checked exhaustively.
    NoK6,
    /// Connected members of X_p^2 have diameter >= log_6(p).
    DiameterLogSixBound,
    /// dim >= 1 whenever there is no isolated vertex.
    DimensionAtLeastOne,
    /// dim >= 1 for every family except x^2 on Z_2.
    DimensionAtLeastOneLiteral,
    /// G connected iff the branch graph is connected.
    BranchGraphConnectivity,
    /// Positively connected implies connected.
    PositivelyConnectedIsConnected,
    /// Branch cover number >= size of the garden of eden.
    CoverBoundsGardenOfEden,
    /// Cover number 1 iff some single branch is all of Z_n.
    CoverOneIffSpanningBranch,
}

impl LemmaId {
    /// Whether the statement is proven for families with `d` generators.
    pub fn kind(self, d: usize) -> LemmaKind {
        use LemmaId::*;
        match self {
            SquaringTwoComponentsIffPrimitiveRoot | D2ChiNegative | DimensionAtLeastOneLiteral => LemmaKind::Observed,
            NoK6 if d > 2 => LemmaKind::Observed,
            _ => LemmaKind::Proven,
        }
    }

    pub fn statement(self) -> &'static str {
        use LemmaId::*;
        match self {
            D1ChiNonnegative => "d=1: Euler characteristic is nonnegative",
            D1AtMostTwoTriangles => "d=1: at most 2 triangles",
            D1NoK4 => "d=1: no K4 subgraph",
            D1CycleRankCountsLongAttractors => "d=1: cycle rank = number of attractor cycles of length >= 3",
            GardenOfEdenHalf => "x^2 on Z_p: garden of eden has (p-1)/2 vertices",
            SquaringSingleComponentIffFermat => "x^2 on Z_p, p odd: nonzero vertices connected iff p is a Fermat prime",
            SquaringComponentsMatchDoublingCycles => {
                "x^2 on Z_p: components on nonzero vertices = cycles of t->2t on Z_m, m odd part of p-1"
            }
            SquaringTwoComponentsIffPrimitiveRoot => {
                "x^2 on Z_p: nonzero vertices form 2 components iff 2 is a primitive root mod p"
            }
            D2ChiNegative => "d=2, p>13: Euler characteristic is negative",
            TriangleFreeFourRegular => "triangle-free and 4-regular implies chi = -n",
            CliqueCountBound => "c_m <= d^(m+1) 2^(m+1) for m >= 2",
            NoK6 => "no K6 subgraph",
            DiameterLogSixBound => "d=2, connected: diameter >= log_6(p)",
            DimensionAtLeastOne => "no isolated vertex implies dimension >= 1",
            DimensionAtLeastOneLiteral => "dimension >= 1 except x^2 on Z_2",
            BranchGraphConnectivity => "G connected iff B(G) connected",
            PositivelyConnectedIsConnected => "positively connected implies connected",
            CoverBoundsGardenOfEden => "branch cover number >= |garden of eden|",
            CoverOneIffSpanningBranch => "branch cover number 1 iff some branch is all of Z_n",
        }
    }

    /// Lemmas about the single map x^2 rather than a whole family space.
    fn is_squaring_only(self) -> bool {
        use LemmaId::*;
        matches!(
            self,
            GardenOfEdenHalf
                | SquaringSingleComponentIffFermat
                | SquaringComponentsMatchDoublingCycles
                | SquaringTwoComponentsIffPrimitiveRoot
        )
    }

    /// `Some(true)` if the statement holds on `family`, `None` if it does not apply.
    pub fn check(self, family: &QuadraticFamily) -> Option<bool> {
        use LemmaId::*;
        let p = family.n();
        let d = family.arity();
        let digraph = FunctionalDigraph::new(family.clone());
        let graph = orbital_graph_of(&digraph);
        match self {
            D1ChiNonnegative => (d == 1).then(|| clique_census(&graph).1 >= 0),
            D1AtMostTwoTriangles => (d == 1).then(|| clique_census(&graph).0.triangles() <= 2),
            D1NoK4 => (d == 1).then(|| clique_census(&graph).0.tetrahedra() == 0),
            D1CycleRankCountsLongAttractors => (d == 1).then(|| {
                let long = digraph
                    .attractor_cycles()
                    .expect("single map")
                    .iter()
                    .filter(|c| c.len() >= 3)
                    .count();
                cycle_rank(&graph) == long as i64
            }),
            GardenOfEdenHalf => {
                is_squaring(family).then(|| digraph.garden_of_eden().len() as u64 == (p - 1) / 2)
            }
            SquaringSingleComponentIffFermat => (is_squaring(family) && p % 2 == 1)
                .then(|| (nonzero_components(&graph) == 1) == is_fermat_prime(p)),
            SquaringComponentsMatchDoublingCycles => {
                is_squaring(family).then(|| nonzero_components(&graph) == doubling_cycles(odd_part(p - 1)))
            }
            SquaringTwoComponentsIffPrimitiveRoot => {
                is_squaring(family).then(|| (nonzero_components(&graph) == 2) == is_primitive_root(2, p))
            }
            D2ChiNegative => (d == 2 && p > 13).then(|| clique_census(&graph).1 < 0),
            TriangleFreeFourRegular => {
                let regular = graph.vertices().all(|v| graph.degree(v) == 4);
                let (cliques, chi) = clique_census(&graph);
                Some(!(regular && cliques.triangles() == 0) || chi == -(p as i64))
            }
            CliqueCountBound => {
                let cliques = clique_census(&graph).0;
                let d = d as u128;
                Some((2..cliques.as_slice().len()).all(|m| {
                    let bound = d.checked_pow(m as u32 + 1).and_then(|x| x.checked_mul(1u128 << (m + 1)));
                    bound.is_none_or(|b| u128::from(cliques.count(m)) <= b)
                }))
            }
            NoK6 => Some(clique_census(&graph).0.complete_subgraphs(6) == 0),
            DiameterLogSixBound => (d == 2).then(|| match diameter(&graph) {
                Diameter::Infinite => true,
                // diameter >= log_6(p)  <=>  6^diameter >= p
                Diameter::Finite(k) => 6u128.checked_pow(k).is_none_or(|x| x >= u128::from(p)),
            }),
            DimensionAtLeastOne => {
                let isolated = graph.vertices().any(|v| graph.degree(v) == 0);
                Some(isolated || inductive_dimension(&graph) >= Rational::from_integer(1.into()))
            }
            DimensionAtLeastOneLiteral => Some(
                (p == 2 && family.coeffs() == [0]) || inductive_dimension(&graph) >= Rational::from_integer(1.into()),
            ),
            BranchGraphConnectivity => {
                Some((component_count(&graph) == 1) == (component_count(&branch_graph(&digraph)) == 1))
            }
            PositivelyConnectedIsConnected => Some(!positively_connected(&digraph) || component_count(&graph) == 1),
            CoverBoundsGardenOfEden => Some(branch_cover_number(&digraph) >= digraph.garden_of_eden().len()),
            CoverOneIffSpanningBranch => {
                let n = digraph.vertex_count();
                let spanning = (0..n as Vertex).any(|x| digraph.branch_set(x).count_ones(..) == n);
                Some((branch_cover_number(&digraph) == 1) == spanning)
            }
        }
    }
}

impl fmt::Display for LemmaId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).expect("unit variant");
        f.write_str(s.as_str().expect("string tag"))
    }
}

fn is_squaring(family: &QuadraticFamily) -> bool {
    family.coeffs() == [0]
}

/// Components of the graph restricted to the nonzero residues. Zero is always an isolated
/// fixed point of x^2, so this is the count the multiplicative structure governs.
pub fn nonzero_components(graph: &OrbitalGraph) -> usize {
    let nonzero: Vec<Vertex> = (1..graph.vertex_count() as Vertex).collect();
    component_count(&graph.induced(&nonzero).graph)
}

/// Number of orbits of the permutation `t -> 2t` on `Z_m`, `m` odd.
fn doubling_cycles(m: u64) -> usize {
    let mut seen = vec![false; m as usize];
    let mut cycles = 0;
    for start in 0..m {
        if seen[start as usize] {
            continue;
        }
        cycles += 1;
        let mut t = start;
        while !seen[t as usize] {
            seen[t as usize] = true;
            t = (2 * t) % m;
        }
    }
    cycles
}

/// A list of `(lemma, arity)` checks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LemmaSet(pub Vec<(LemmaId, usize)>);

impl LemmaSet {
    pub fn d1() -> Self {
        use LemmaId::*;
        LemmaSet(vec![
            (D1ChiNonnegative, 1),
            (D1AtMostTwoTriangles, 1),
            (D1NoK4, 1),
            (D1CycleRankCountsLongAttractors, 1),
            (CliqueCountBound, 1),
        ])
    }

    pub fn squaring() -> Self {
        use LemmaId::*;
        LemmaSet(vec![
            (GardenOfEdenHalf, 1),
            (SquaringSingleComponentIffFermat, 1),
            (SquaringComponentsMatchDoublingCycles, 1),
            (SquaringTwoComponentsIffPrimitiveRoot, 1),
        ])
    }

    pub fn d2() -> Self {
        use LemmaId::*;
        LemmaSet(vec![
            (D2ChiNegative, 2),
            (TriangleFreeFourRegular, 2),
            (CliqueCountBound, 2),
            (NoK6, 2),
            (DiameterLogSixBound, 2),
        ])
    }

    pub fn d3() -> Self {
        use LemmaId::*;
        LemmaSet(vec![(CliqueCountBound, 3), (NoK6, 3), (TriangleFreeFourRegular, 3)])
    }

    pub fn dimension() -> Self {
        use LemmaId::*;
        LemmaSet(vec![
            (DimensionAtLeastOne, 1),
            (DimensionAtLeastOne, 2),
            (DimensionAtLeastOneLiteral, 1),
            (DimensionAtLeastOneLiteral, 2),
        ])
    }

    pub fn branch() -> Self {
        use LemmaId::*;
        let mut v = Vec::new();
        for d in 1..=2 {
            v.extend([
                (BranchGraphConnectivity, d),
                (PositivelyConnectedIsConnected, d),
                (CoverBoundsGardenOfEden, d),
                (CoverOneIffSpanningBranch, d),
            ]);
        }
        LemmaSet(v)
    }

    pub fn all() -> Self {
        let mut v = Vec::new();
        for set in [Self::d1(), Self::squaring(), Self::d2(), Self::d3(), Self::dimension(), Self::branch()] {
            v.extend(set.0);
        }
        LemmaSet(v)
    }
}

impl FromStr for LemmaSet {
    type Err = Error;

    /// Comma-separated group names: `d1,x2,d2,d3,dimension,branch,all`.
    fn from_str(s: &str) -> Result<Self> {
        let mut v = Vec::new();
        for name in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let set = match name {
                "d1" => Self::d1(),
                "x2" => Self::squaring(),
                "d2" => Self::d2(),
                "d3" => Self::d3(),
                "dimension" => Self::dimension(),
                "branch" => Self::branch(),
                "all" => Self::all(),
                other => return Err(Error::UnknownLemmaSet(other.to_owned())),
            };
            for item in set.0 {
                if !v.contains(&item) {
                    v.push(item);
                }
            }
        }
        Ok(LemmaSet(v))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LemmaStatus {
    /// Proven statement held everywhere.
    Verified,
    /// Proven statement failed somewhere.
    Counterexample,
    /// Observed pattern held everywhere.
    Holds,
    /// Observed pattern failed somewhere.
    Fails,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LemmaReport {
    pub lemma: LemmaId,
    pub kind: LemmaKind,
    pub statement: &'static str,
    pub d: usize,
    pub primes: Vec<u64>,
    pub instances: usize,
    pub status: LemmaStatus,
    pub violations: usize,
    /// First violating family in scan order.
    pub counterexample: Option<FamilyId>,
}

impl LemmaReport {
    pub fn is_proven_failure(&self) -> bool {
        self.status == LemmaStatus::Counterexample
    }

    /// Recomputes the statement on the recorded counterexample; `Some(false)` confirms it.
    pub fn recheck(&self) -> Option<bool> {
        let family = QuadraticFamily::try_from(self.counterexample.clone()?).ok()?;
        self.lemma.check(&family)
    }
}

/// Evaluates every `(lemma, d)` of `set` over all families of the given prime moduli.
pub fn verify_lemmas(primes: &[u64], set: &LemmaSet, jobs: usize) -> Result<Vec<LemmaReport>> {
    let mut reports = Vec::new();
    for &(lemma, d) in &set.0 {
        let mut families = Vec::new();
        for &p in primes {
            if lemma.is_squaring_only() {
                families.push(QuadraticFamily::new(Modulus::new(p)?, vec![0])?);
            } else {
                families.extend(enumerate_space(p, d)?);
            }
        }
        let verdicts = par_map_ordered(jobs, &families, |f| lemma.check(f));
        let instances = verdicts.iter().filter(|v| v.is_some()).count();
        let mut violations = 0;
        let mut counterexample = None;
        for (f, v) in families.iter().zip(&verdicts) {
            if *v == Some(false) {
                violations += 1;
                counterexample.get_or_insert_with(|| FamilyId::from(f));
            }
        }
        let status = match (lemma.kind(d), violations) {
            (LemmaKind::Proven, 0) => LemmaStatus::Verified,
            (LemmaKind::Proven, _) => LemmaStatus::Counterexample,
            (LemmaKind::Observed, 0) => LemmaStatus::Holds,
            (LemmaKind::Observed, _) => LemmaStatus::Fails,
        };
        reports.push(LemmaReport {
            lemma,
            kind: lemma.kind(d),
            statement: lemma.statement(),
            d,
            primes: primes.to_vec(),
            instances,
            status,
            violations,
            counterexample,
        });
    }
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_orbital_graph;
    use crate::ring::primes_in;

    #[test]
    fn doubling_cycle_count() {
        assert_eq!(doubling_cycles(1), 1);
        assert_eq!(doubling_cycles(3), 2);
        assert_eq!(doubling_cycles(131), 2);
        assert_eq!(doubling_cycles(7), 3);
    }

    #[test]
    fn squaring_components_on_nonzero_vertices() {
        let counts: Vec<usize> = [193, 257, 263]
            .iter()
            .map(|&p| nonzero_components(&build_orbital_graph(&QuadraticFamily::from_unsorted(p, vec![0]).unwrap())))
            .collect();
        assert_eq!(counts, vec![2, 1, 2]);
    }

    #[test]
    fn d1_suite_small() {
        let reports = verify_lemmas(&primes_in(2, 61), &LemmaSet::d1(), 1).unwrap();
        for r in &reports {
            assert_eq!(r.status, LemmaStatus::Verified, "{r:?}");
        }
    }

    #[test]
    fn squaring_primitive_root_claim_fails_at_seven() {
        let reports = verify_lemmas(&[7], &LemmaSet(vec![(LemmaId::SquaringTwoComponentsIffPrimitiveRoot, 1)]), 1).unwrap();
        assert_eq!(reports[0].status, LemmaStatus::Fails);
        assert_eq!(reports[0].recheck(), Some(false));
    }

    #[test]
    fn literal_dimension_claim_fails_for_squaring() {
        let r = &verify_lemmas(&[5], &LemmaSet(vec![(LemmaId::DimensionAtLeastOneLiteral, 1)]), 1).unwrap()[0];
        assert_eq!(r.status, LemmaStatus::Fails);
        assert_eq!(r.counterexample, Some(FamilyId { n: 5, coeffs: vec![0] }));
        assert_eq!(r.recheck(), Some(false));
    }

    #[test]
    fn lemma_set_parsing() {
        let s: LemmaSet = "d1,d1".parse().unwrap();
        assert_eq!(s, LemmaSet::d1());
        assert!(matches!("nope".parse::<LemmaSet>(), Err(Error::UnknownLemmaSet(_))));
        assert_eq!(LemmaId::D1NoK4.to_string(), "d1-no-k4");
    }
}
