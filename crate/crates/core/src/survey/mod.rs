//! Exhaustive scans of family spaces `X_n^d`, lemma verification and exception hunting.
//!
//! Work is split per family and run on a dedicated rayon pool; results are collected in
//! family order, so the output never depends on the number of workers.

mod exceptions;
mod lemmas;

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use itertools::{Combinations, Itertools};
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::Serialize;

use crate::branch::BranchStats;
use crate::error::{Error, Result};
use crate::graph::{build_orbital_graph, orbital_graph_of};
use crate::invariants::{
    clique_census, component_count, diameter, inductive_dimension, rational_to_f64, serialize_rational, CliqueVector,
    Diameter,
};
use crate::planarity::is_planar;
use crate::ring::{FunctionalDigraph, Modulus, QuadraticFamily};
use crate::Rational;

pub use exceptions::{
    find_exceptions, read_checkpoint, ExceptionMatch, ExceptionPredicate, ExceptionQuery, HuntOutcome, PartitionRecord,
};
pub use lemmas::{verify_lemmas, LemmaId, LemmaKind, LemmaReport, LemmaSet, LemmaStatus};

/// Iterator over `X_n^d`: strictly increasing coefficient tuples in lexicographic order.
pub struct FamilySpace {
    modulus: Modulus,
    inner: Combinations<std::ops::Range<u64>>,
}

impl Iterator for FamilySpace {
    type Item = QuadraticFamily;

    fn next(&mut self) -> Option<QuadraticFamily> {
        let coeffs = self.inner.next()?;
        Some(QuadraticFamily::new(self.modulus, coeffs).expect("combinations are increasing residues"))
    }
}

pub fn enumerate_space(n: u64, d: usize) -> Result<FamilySpace> {
    if d == 0 {
        return Err(Error::EmptyFamily);
    }
    let modulus = Modulus::new(n)?;
    Ok(FamilySpace {
        modulus,
        inner: (0..n).combinations(d),
    })
}

/// `C(n, d)`.
pub fn space_size(n: u64, d: usize) -> u64 {
    if d as u64 > n {
        0
    } else {
        num_integer::binomial(n, d as u64)
    }
}

/// Which invariants a scan computes. Vertex and edge counts are always filled.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct InvariantSelection {
    pub chi: bool,
    pub dim: bool,
    pub diam: bool,
    pub planar: bool,
    pub cliques: bool,
    pub components: bool,
    pub branch: bool,
}

impl InvariantSelection {
    pub fn all() -> Self {
        InvariantSelection {
            chi: true,
            dim: true,
            diam: true,
            planar: true,
            cliques: true,
            components: true,
            branch: true,
        }
    }

    pub fn none() -> Self {
        Self::default()
    }
}

impl FromStr for InvariantSelection {
    type Err = Error;

    /// Comma-separated names: `chi,dim,diam,planar,cliques,components,branch`, or `all`.
    fn from_str(s: &str) -> Result<Self> {
        let mut sel = InvariantSelection::none();
        for name in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            match name {
                "all" => sel = InvariantSelection::all(),
                "chi" => sel.chi = true,
                "dim" => sel.dim = true,
                "diam" => sel.diam = true,
                "planar" => sel.planar = true,
                "cliques" => sel.cliques = true,
                "components" => sel.components = true,
                "branch" => sel.branch = true,
                other => return Err(Error::UnknownInvariant(other.to_owned())),
            }
        }
        Ok(sel)
    }
}

/// One row of a scan. `None` marks an invariant that was not selected.
#[derive(Clone, Debug, PartialEq)]
pub struct ScanRecord {
    pub p: u64,
    pub d: usize,
    pub coeffs: Vec<u64>,
    pub vertices: usize,
    pub edges: usize,
    pub triangles: Option<u64>,
    pub tetrahedra: Option<u64>,
    pub chi: Option<i64>,
    pub components: Option<usize>,
    pub diameter: Option<Diameter>,
    pub dimension: Option<Rational>,
    pub planar: Option<bool>,
    pub branch_cover: Option<usize>,
    pub positively_connected: Option<bool>,
    /// Full clique vector when cliques or chi were selected; not serialized.
    pub clique_vector: Option<CliqueVector>,
}

pub const CSV_HEADER: [&str; 15] = [
    "p",
    "d",
    "coeffs",
    "vertices",
    "edges",
    "triangles",
    "tetrahedra",
    "chi",
    "components",
    "diameter",
    "dimension_num",
    "dimension_den",
    "planar",
    "branch_cover",
    "positively_connected",
];

fn cell<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(T::to_string).unwrap_or_default()
}

impl ScanRecord {
    pub fn family(&self) -> QuadraticFamily {
        QuadraticFamily::from_unsorted(self.p, self.coeffs.clone()).expect("record of a valid family")
    }

    pub fn coeff_label(&self) -> String {
        self.coeffs.iter().map(u64::to_string).join(";")
    }

    pub fn dimension_decimal(&self) -> Option<f64> {
        self.dimension.as_ref().map(rational_to_f64)
    }

    pub fn csv_row(&self) -> Vec<String> {
        vec![
            self.p.to_string(),
            self.d.to_string(),
            self.coeff_label(),
            self.vertices.to_string(),
            self.edges.to_string(),
            cell(&self.triangles),
            cell(&self.tetrahedra),
            cell(&self.chi),
            cell(&self.components),
            cell(&self.diameter.map(Diameter::to_csv)),
            cell(&self.dimension.as_ref().map(|r| r.numer().clone())),
            cell(&self.dimension.as_ref().map(|r| r.denom().clone())),
            cell(&self.planar),
            cell(&self.branch_cover),
            cell(&self.positively_connected),
        ]
    }

    fn json_row(&self) -> serde_json::Value {
        let big = |b: &num_bigint::BigInt| match b.to_i64() {
            Some(k) => serde_json::Value::from(k),
            None => serde_json::Value::from(b.to_string()),
        };
        serde_json::json!({
            "p": self.p,
            "d": self.d,
            "coeffs": self.coeffs,
            "vertices": self.vertices,
            "edges": self.edges,
            "triangles": self.triangles,
            "tetrahedra": self.tetrahedra,
            "chi": self.chi,
            "components": self.components,
            "diameter": self.diameter,
            "dimension_num": self.dimension.as_ref().map(|r| big(r.numer())),
            "dimension_den": self.dimension.as_ref().map(|r| big(r.denom())),
            "planar": self.planar,
            "branch_cover": self.branch_cover,
            "positively_connected": self.positively_connected,
        })
    }
}

/// Computes the selected invariants of one family.
pub fn scan_family(family: &QuadraticFamily, sel: &InvariantSelection) -> ScanRecord {
    let digraph = FunctionalDigraph::new(family.clone());
    let graph = orbital_graph_of(&digraph);
    let cliques = (sel.cliques || sel.chi).then(|| clique_census(&graph).0);
    let branch = sel.branch.then(|| BranchStats::of(&digraph));
    ScanRecord {
        p: family.n(),
        d: family.arity(),
        coeffs: family.coeffs().to_vec(),
        vertices: graph.vertex_count(),
        edges: graph.edge_count(),
        triangles: sel.cliques.then(|| cliques.as_ref().map_or(0, CliqueVector::triangles)),
        tetrahedra: sel.cliques.then(|| cliques.as_ref().map_or(0, CliqueVector::tetrahedra)),
        chi: sel.chi.then(|| cliques.as_ref().map_or(0, CliqueVector::euler_characteristic)),
        components: sel.components.then(|| component_count(&graph)),
        diameter: sel.diam.then(|| diameter(&graph)),
        dimension: sel.dim.then(|| inductive_dimension(&graph)),
        planar: sel.planar.then(|| is_planar(&graph).planar),
        branch_cover: branch.as_ref().map(|b| b.cover_number),
        positively_connected: branch.as_ref().map(|b| b.positively_connected),
        clique_vector: cliques,
    }
}

/// A rayon pool with `jobs` workers (`0` means rayon's default).
pub(crate) fn pool(jobs: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .expect("thread pool")
}

/// Runs `f` over `items` on `jobs` workers, keeping input order.
pub(crate) fn par_map_ordered<T, R, F>(jobs: usize, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    if jobs == 1 {
        return items.iter().map(f).collect();
    }
    pool(jobs).install(|| items.par_iter().map(f).collect())
}

#[derive(Clone, Debug)]
pub struct ScanOutput {
    pub records: Vec<ScanRecord>,
    pub summaries: Vec<ModulusSummary>,
}

/// Scans `X_n^d` for every modulus in `moduli`.
pub fn scan_space(moduli: &[u64], d: usize, sel: &InvariantSelection, jobs: usize) -> Result<ScanOutput> {
    let mut families = Vec::new();
    for &n in moduli {
        families.extend(enumerate_space(n, d)?);
    }
    let records = par_map_ordered(jobs, &families, |f| scan_family(f, sel));
    let summaries = summarize(&records);
    Ok(ScanOutput { records, summaries })
}

/// An extreme value and the first family (in scan order) attaining it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Extreme<T> {
    pub value: T,
    pub coeffs: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RationalExtreme {
    #[serde(serialize_with = "serialize_rational")]
    pub value: Rational,
    pub decimal: f64,
    pub coeffs: Vec<u64>,
}

/// Per-modulus aggregate over the records of one scan.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ModulusSummary {
    pub p: u64,
    pub d: usize,
    pub families: usize,
    pub chi_min: Option<Extreme<i64>>,
    pub chi_max: Option<Extreme<i64>>,
    /// `chi_min + p`, the offset the minimum sits at relative to `-p`.
    pub chi_min_plus_p: Option<i64>,
    pub chi_max_plus_p: Option<i64>,
    pub triangles_max: Option<Extreme<u64>>,
    pub tetrahedra_max: Option<Extreme<u64>>,
    pub largest_clique: Option<Extreme<usize>>,
    pub disconnected: Option<usize>,
    /// Over connected families only.
    pub diameter_min: Option<Extreme<u32>>,
    pub diameter_max: Option<Extreme<u32>>,
    pub dimension_min: Option<RationalExtreme>,
    pub dimension_max: Option<RationalExtreme>,
    pub dimension_mean: Option<f64>,
    pub planar: Option<usize>,
    pub positively_connected: Option<usize>,
    pub branch_cover_max: Option<Extreme<usize>>,
}

fn fold_extreme<T: PartialOrd + Clone>(slot: &mut Option<Extreme<T>>, value: T, coeffs: &[u64], want_max: bool) {
    let better = match slot {
        None => true,
        Some(e) if want_max => value > e.value,
        Some(e) => value < e.value,
    };
    if better {
        *slot = Some(Extreme {
            value,
            coeffs: coeffs.to_vec(),
        });
    }
}

impl ModulusSummary {
    fn new(p: u64, d: usize) -> Self {
        ModulusSummary {
            p,
            d,
            families: 0,
            chi_min: None,
            chi_max: None,
            chi_min_plus_p: None,
            chi_max_plus_p: None,
            triangles_max: None,
            tetrahedra_max: None,
            largest_clique: None,
            disconnected: None,
            diameter_min: None,
            diameter_max: None,
            dimension_min: None,
            dimension_max: None,
            dimension_mean: None,
            planar: None,
            positively_connected: None,
            branch_cover_max: None,
        }
    }
}

/// Groups consecutive records by `(p, d)` and folds each group.
pub fn summarize(records: &[ScanRecord]) -> Vec<ModulusSummary> {
    let mut out = Vec::new();
    for ((p, d), group) in &records.iter().chunk_by(|r| (r.p, r.d)) {
        let mut s = ModulusSummary::new(p, d);
        let mut dim_min: Option<Extreme<Rational>> = None;
        let mut dim_max: Option<Extreme<Rational>> = None;
        let mut dim_sum = Rational::from_integer(0.into());
        let mut dim_count = 0usize;
        for r in group {
            s.families += 1;
            if let Some(chi) = r.chi {
                fold_extreme(&mut s.chi_min, chi, &r.coeffs, false);
                fold_extreme(&mut s.chi_max, chi, &r.coeffs, true);
            }
            if let Some(t) = r.triangles {
                fold_extreme(&mut s.triangles_max, t, &r.coeffs, true);
            }
            if let Some(t) = r.tetrahedra {
                fold_extreme(&mut s.tetrahedra_max, t, &r.coeffs, true);
            }
            if let Some(cv) = &r.clique_vector {
                fold_extreme(&mut s.largest_clique, cv.max_k().map_or(0, |k| k + 1), &r.coeffs, true);
            }
            let disconnected = match (r.components, r.diameter) {
                (Some(c), _) => Some(c > 1),
                (None, Some(diam)) => Some(diam == Diameter::Infinite),
                _ => None,
            };
            if let Some(dc) = disconnected {
                *s.disconnected.get_or_insert(0) += usize::from(dc);
            }
            if let Some(Diameter::Finite(k)) = r.diameter {
                fold_extreme(&mut s.diameter_min, k, &r.coeffs, false);
                fold_extreme(&mut s.diameter_max, k, &r.coeffs, true);
            }
            if let Some(dim) = &r.dimension {
                fold_extreme(&mut dim_min, dim.clone(), &r.coeffs, false);
                fold_extreme(&mut dim_max, dim.clone(), &r.coeffs, true);
                dim_sum += dim;
                dim_count += 1;
            }
            if let Some(pl) = r.planar {
                *s.planar.get_or_insert(0) += usize::from(pl);
            }
            if let Some(pc) = r.positively_connected {
                *s.positively_connected.get_or_insert(0) += usize::from(pc);
            }
            if let Some(k) = r.branch_cover {
                fold_extreme(&mut s.branch_cover_max, k, &r.coeffs, true);
            }
        }
        let offset = p as i64;
        s.chi_min_plus_p = s.chi_min.as_ref().map(|e| e.value + offset);
        s.chi_max_plus_p = s.chi_max.as_ref().map(|e| e.value + offset);
        let to_rational_extreme = |e: Extreme<Rational>| RationalExtreme {
            decimal: rational_to_f64(&e.value),
            value: e.value,
            coeffs: e.coeffs,
        };
        s.dimension_min = dim_min.map(to_rational_extreme);
        s.dimension_max = dim_max.map(to_rational_extreme);
        if dim_count > 0 {
            s.dimension_mean = Some(rational_to_f64(&(dim_sum / Rational::from_integer(dim_count.into()))));
        }
        out.push(s);
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RecordFormat {
    Csv,
    /// One json object per line, same fields as the csv columns.
    Json,
}

impl FromStr for RecordFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(RecordFormat::Csv),
            "json" => Ok(RecordFormat::Json),
            other => Err(Error::UnknownFormat(other.to_owned())),
        }
    }
}

impl fmt::Display for RecordFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RecordFormat::Csv => "csv",
            RecordFormat::Json => "json",
        })
    }
}

pub fn write_records<W: Write>(records: &[ScanRecord], format: RecordFormat, out: W) -> Result<()> {
    match format {
        RecordFormat::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(CSV_HEADER)?;
            for r in records {
                w.write_record(r.csv_row())?;
            }
            w.flush()?;
        }
        RecordFormat::Json => {
            let mut out = out;
            for r in records {
                serde_json::to_writer(&mut out, &r.json_row())?;
                out.write_all(b"\n")?;
            }
            out.flush()?;
        }
    }
    Ok(())
}

pub fn write_summaries<W: Write>(summaries: &[ModulusSummary], mut out: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, summaries)?;
    out.write_all(b"\n")?;
    Ok(())
}

/// Convenience for one-off families.
pub fn scan_one(n: u64, coeffs: &[u64], sel: &InvariantSelection) -> Result<ScanRecord> {
    let family = QuadraticFamily::from_unsorted(n, coeffs.to_vec())?;
    Ok(scan_family(&family, sel))
}

/// The orbital graph of a record's family.
pub fn record_graph(record: &ScanRecord) -> crate::OrbitalGraph {
    build_orbital_graph(&record.family())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn space_enumeration_examples() {
        assert_eq!(enumerate_space(5, 2).unwrap().count(), 10);
        assert_eq!(enumerate_space(23, 1).unwrap().count(), 23);
        assert_eq!(enumerate_space(47, 3).unwrap().count(), 16215);
        assert_eq!(space_size(47, 3), 16215);
        assert_eq!(enumerate_space(3, 4).unwrap().count(), 0);
        assert!(enumerate_space(5, 0).is_err());
        let first: Vec<Vec<u64>> = enumerate_space(4, 2).unwrap().map(|f| f.coeffs().to_vec()).collect();
        assert_eq!(first, vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]);
    }

    #[test]
    fn selection_parsing() {
        let s: InvariantSelection = "chi, dim".parse().unwrap();
        assert!(s.chi && s.dim && !s.planar);
        assert_eq!("all".parse::<InvariantSelection>().unwrap(), InvariantSelection::all());
        assert!(matches!("genus".parse::<InvariantSelection>(), Err(Error::UnknownInvariant(_))));
    }

    #[test]
    fn unselected_fields_stay_empty() {
        let r = scan_one(53, &[1, 17], &"chi".parse().unwrap()).unwrap();
        assert_eq!(r.chi, Some(-52));
        assert_eq!(r.triangles, None);
        assert_eq!(r.dimension, None);
        let row = r.csv_row();
        assert_eq!(row[2], "1;17");
        assert_eq!(row[5], "");
        assert_eq!(row[7], "-52");
    }

    #[test]
    fn csv_encodes_infinite_diameter_as_minus_one() {
        let r = scan_one(5, &[0], &InvariantSelection::all()).unwrap();
        let mut buf = Vec::new();
        write_records(&[r], RecordFormat::Csv, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), CSV_HEADER.join(","));
        assert_eq!(lines.next().unwrap(), "5,1,0,5,3,0,0,2,2,-1,4,5,true,3,false");
    }

    #[test]
    fn json_rows_mirror_csv() {
        let r = scan_one(7, &[2, 3], &InvariantSelection::all()).unwrap();
        let mut buf = Vec::new();
        write_records(&[r], RecordFormat::Json, &mut buf).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v["dimension_num"], 449);
        assert_eq!(v["dimension_den"], 210);
        let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
        let mut header = CSV_HEADER.to_vec();
        header.sort_unstable();
        assert_eq!(keys, header);
    }

    #[test]
    fn summary_matches_direct_fold() {
        let out = scan_space(&[11, 13], 2, &InvariantSelection::all(), 2).unwrap();
        assert_eq!(out.summaries.len(), 2);
        for s in &out.summaries {
            let rows: Vec<&ScanRecord> = out.records.iter().filter(|r| r.p == s.p).collect();
            assert_eq!(s.families, rows.len());
            let min = rows.iter().filter_map(|r| r.chi).min().unwrap();
            let max = rows.iter().filter_map(|r| r.chi).max().unwrap();
            assert_eq!(s.chi_min.as_ref().unwrap().value, min);
            assert_eq!(s.chi_max.as_ref().unwrap().value, max);
            let arg = &s.chi_min.as_ref().unwrap().coeffs;
            assert_eq!(rows.iter().find(|r| r.chi == Some(min)).unwrap().coeffs, *arg);
            let dmax = rows.iter().filter_map(|r| r.dimension.clone()).max().unwrap();
            assert_eq!(s.dimension_max.as_ref().unwrap().value, dmax);
            let diam_min = rows.iter().filter_map(|r| r.diameter.and_then(Diameter::finite)).min();
            assert_eq!(s.diameter_min.as_ref().map(|e| e.value), diam_min);
            assert_eq!(s.chi_min_plus_p, Some(min + s.p as i64));
        }
    }
}
