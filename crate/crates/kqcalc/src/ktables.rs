//! Orchestrated end results: hermitian K-theory tables over a profile,
//! algebraic K-groups and Witt groups of the integers, rational dimensions,
//! the symbol-map report, and verification against the shipped golden sets.

use crate::arith;
use crate::coeffrings::{CoefficientProfile, ConjectureMode, Marker};
use crate::exactalg::{direct_sum, AmbiguousSet, FGAbGroup, OverrideTable};
use crate::overrides;
use crate::ssengine::{
    apply_first_differential, assemble_column, build_page1, certify_collapse, wood_consistency,
    EngineError, LadderResult, WoodReport,
};
use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde_json::{json, Value};
use std::collections::BTreeMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Theory {
    KQ,
    KGL,
    KW,
    KQRational,
}

#[derive(Clone, Debug)]
pub struct TableCell {
    pub s: i64,
    pub w: i64,
    /// The computed group; None when the assembly refused to guess.
    pub value: Option<FGAbGroup>,
    pub text: String,
    pub markers: Vec<Marker>,
    pub provenance: String,
    pub ambiguous: Option<AmbiguousSet>,
}

#[derive(Clone, Debug)]
pub struct ResultTable {
    pub base: String,
    pub theory: Theory,
    pub cells: BTreeMap<(i64, i64), TableCell>,
}

impl ResultTable {
    pub fn cell(&self, s: i64, w: i64) -> Option<&TableCell> {
        self.cells.get(&(s, w))
    }

    pub fn group(&self, s: i64, w: i64) -> Option<&FGAbGroup> {
        self.cells.get(&(s, w)).and_then(|c| c.value.as_ref())
    }

    pub fn has_ambiguity(&self) -> bool {
        self.cells.values().any(|c| c.ambiguous.is_some())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("s,w,group,provenance,conditional\n");
        for cell in self.cells.values() {
            let cond = render_markers(&cell.markers);
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                cell.s,
                cell.w,
                csv_quote(&cell.text),
                csv_quote(&cell.provenance),
                csv_quote(&cond),
            ));
        }
        out
    }

    pub fn to_json(&self) -> Value {
        let cells: Vec<Value> = self
            .cells
            .values()
            .map(|c| {
                json!({
                    "s": c.s,
                    "w": c.w,
                    "group": c.text,
                    "resolved": c.value.is_some(),
                    "conditional": c.markers.iter().map(|m| m.provenance()).collect::<Vec<_>>(),
                    "provenance": c.provenance,
                })
            })
            .collect();
        json!({
            "base": self.base,
            "theory": format!("{:?}", self.theory),
            "cells": cells,
        })
    }

    /// Aligned text, one row per simplicial degree, one column per weight.
    pub fn to_text(&self) -> String {
        let mut ws: Vec<i64> = self.cells.keys().map(|(_, w)| *w).collect();
        ws.sort_unstable();
        ws.dedup();
        let mut ss: Vec<i64> = self.cells.keys().map(|(s, _)| *s).collect();
        ss.sort_unstable();
        ss.dedup();
        let widths: Vec<usize> = ws
            .iter()
            .map(|w| {
                self.cells
                    .values()
                    .filter(|c| c.w == *w)
                    .map(|c| c.text.len() + usize::from(!c.markers.is_empty()))
                    .max()
                    .unwrap_or(1)
                    .max(format!("w={}", w).len())
                    .max(4)
            })
            .collect();
        let mut out = String::new();
        out.push_str(&format!("{:>5} ", "s"));
        for (i, w) in ws.iter().enumerate() {
            out.push_str(&format!(" {:>width$}", format!("w={}", w), width = widths[i]));
        }
        out.push('\n');
        for s in &ss {
            out.push_str(&format!("{:>5} ", s));
            for (i, w) in ws.iter().enumerate() {
                let text = self
                    .cells
                    .get(&(*s, *w))
                    .map(|c| {
                        let mut t = c.text.clone();
                        if !c.markers.is_empty() {
                            t.push('?');
                        }
                        t
                    })
                    .unwrap_or_else(|| "-".into());
                out.push_str(&format!(" {:>width$}", text, width = widths[i]));
            }
            out.push('\n');
        }
        out
    }
}

fn render_markers(markers: &[Marker]) -> String {
    let mut parts: Vec<&str> = markers
        .iter()
        .map(|m| match m {
            Marker::ConditionallyZero => "conditionally-zero",
            Marker::ConditionallyCyclic => "conditionally-cyclic",
        })
        .collect();
    parts.sort_unstable();
    parts.dedup();
    parts.join("|")
}

fn csv_quote(s: &str) -> String {
    if s.contains(',') || s.contains('"') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Full pipeline for the hermitian K-groups pi_{s+(w)} over a profile: the
/// weight is reduced modulo four by periodicity, the first page is built,
/// the first differential applied, collapse certified, and every requested
/// column folded into its abutment.
pub fn kq_groups(
    profile: &CoefficientProfile,
    s_range: (i64, i64),
    w: i64,
) -> Result<ResultTable, EngineError> {
    let w0 = w.rem_euclid(4);
    let shift = w - w0;
    let reduced_range = (s_range.0 - shift, s_range.1 - shift);
    // One guard column on the left, two on the right: the second page of the
    // right guard column needs the differential arriving from one further
    // column.
    let page1 = build_page1(profile, w0, (reduced_range.0 - 1, reduced_range.1 + 2), None)?;
    let mut page2 = apply_first_differential(&page1)?;
    page2.cells.retain(|(s, _), _| *s <= reduced_range.1 + 1);
    page2.s_range = (reduced_range.0 - 1, reduced_range.1 + 1);
    let report = certify_collapse(&page2);
    if !report.certified {
        return Err(EngineError::UncertifiedPage);
    }
    let empty = OverrideTable::new();
    let mut cells = BTreeMap::new();
    for s_red in reduced_range.0..=reduced_range.1 {
        let ladder = assemble_column(&page2, s_red, &report, &empty)?;
        let s = s_red + shift;
        let provenance = if ladder.overrides_applied.is_empty() {
            "assembled column".to_string()
        } else {
            format!(
                "assembled column; resolutions: {}",
                ladder
                    .overrides_applied
                    .iter()
                    .map(|(k, c)| format!("{} ({})", k, c))
                    .collect::<Vec<_>>()
                    .join("; ")
            )
        };
        let cell = match &ladder.result {
            LadderResult::Resolved(g) => TableCell {
                s,
                w,
                value: Some(g.clone()),
                text: g.text(),
                markers: ladder.markers.clone(),
                provenance,
                ambiguous: None,
            },
            LadderResult::Ambiguous { candidates, .. } => TableCell {
                s,
                w,
                value: None,
                text: ladder
                    .quotients
                    .iter()
                    .rev()
                    .map(|g| g.group.text())
                    .collect::<Vec<_>>()
                    .join(" . "),
                markers: ladder.markers.clone(),
                provenance,
                ambiguous: Some(candidates.clone()),
            },
        };
        cells.insert((s, w), cell);
    }
    Ok(ResultTable { base: profile.name.clone(), theory: Theory::KQ, cells })
}

/// Hermitian K-theory table over several weights.
pub fn kq_table(
    profile: &CoefficientProfile,
    s_range: (i64, i64),
    weights: &[i64],
) -> Result<ResultTable, EngineError> {
    let mut cells = BTreeMap::new();
    for &w in weights {
        let t = kq_groups(profile, s_range, w)?;
        cells.extend(t.cells);
    }
    Ok(ResultTable { base: profile.name.clone(), theory: Theory::KQ, cells })
}

/// The algebraic K-groups of the integers: the collapsed slice-sequence
/// case split, evaluated against the integral cohomology table. The degree
/// is n = s - w; the answer is weight-independent by periodicity.
pub fn kgl_groups_z(n: i64) -> (FGAbGroup, Vec<Marker>, String) {
    let z = CoefficientProfile::integers();
    let h = |s: i64, w: i64| z.integral(s, w).expect("built-in table");
    if n < 0 {
        return (FGAbGroup::trivial(), Vec::new(), "vanishing in negative degrees".into());
    }
    if n == 0 {
        return (FGAbGroup::z(), Vec::new(), "rank".into());
    }
    match n.rem_euclid(8) {
        1 | 7 => {
            let g = h(1, (n + 1) / 2);
            (g.group, g.markers, format!("first cohomology line, weight {}", (n + 1) / 2))
        }
        2 => {
            let g = h(2, (n + 2) / 2);
            (g.group, g.markers, format!("second cohomology line, weight {}", (n + 2) / 2))
        }
        3 => {
            let v = arith::uv_of_weight((n + 1) / 2).expect("even weight").v;
            let (g, citation) = overrides::kgl_degree3_extension(&v);
            (g, Vec::new(), citation)
        }
        0 | 4 => {
            let g = h(2, (n + 2) / 2);
            (g.group, g.markers, format!("second cohomology line, weight {}", (n + 2) / 2))
        }
        5 => (FGAbGroup::z(), Vec::new(), "free class".into()),
        _ => {
            // n = 6 mod 8: kernel of the projection of the second cohomology
            // line onto its order-two part.
            let w = (n + 2) / 2;
            let u = arith::uv_of_weight(w).expect("even weight").u;
            let mut markers = Vec::new();
            if !u.is_one() {
                markers.push(Marker::ConditionallyCyclic);
            }
            (
                FGAbGroup::cyclic_big(u),
                markers,
                format!("odd part of the second cohomology line, weight {}", w),
            )
        }
    }
}

/// K-theory table of the integers as a ResultTable keyed by (n, 0).
pub fn kgl_table_z(n_range: (i64, i64)) -> ResultTable {
    let mut cells = BTreeMap::new();
    for n in n_range.0..=n_range.1 {
        let (g, markers, provenance) = kgl_groups_z(n);
        cells.insert(
            (n, 0),
            TableCell {
                s: n,
                w: 0,
                value: Some(g.clone()),
                text: g.text(),
                markers,
                provenance,
                ambiguous: None,
            },
        );
    }
    ResultTable { base: "Z".into(), theory: Theory::KGL, cells }
}

/// Higher Witt groups of the integers: the four-periodic pattern in the
/// simplicial degree, independent of the weight.
pub fn kw_groups_z(s: i64, w: i64) -> FGAbGroup {
    let _ = w;
    match s.rem_euclid(4) {
        0 => FGAbGroup::z(),
        1 => FGAbGroup::cyclic(2),
        _ => FGAbGroup::trivial(),
    }
}

/// A monomial in the Witt coefficient ring of the integers:
/// coeff * alpha^a * eta^e * xi^x with x in {0, 1}, subject to 2 xi = 0 and
/// xi^2 = 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KwElement {
    pub coeff: i64,
    pub alpha: i64,
    pub eta: i64,
    pub xi: bool,
}

impl KwElement {
    pub fn new(coeff: i64, alpha: i64, eta: i64, xi: bool) -> Self {
        KwElement { coeff, alpha, eta, xi }.normalize()
    }

    fn normalize(mut self) -> Self {
        if self.xi {
            self.coeff = self.coeff.rem_euclid(2);
        }
        if self.coeff == 0 {
            return KwElement { coeff: 0, alpha: 0, eta: 0, xi: false };
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.coeff == 0
    }

    /// Bidegree s + (w) of the monomial.
    pub fn bidegree(&self) -> (i64, i64) {
        let s = 4 * self.alpha + i64::from(self.xi);
        let w = 4 * self.alpha + self.eta;
        (s, w)
    }

    pub fn multiply(&self, other: &KwElement) -> KwElement {
        if self.xi && other.xi {
            return KwElement::new(0, 0, 0, false);
        }
        KwElement::new(
            self.coeff * other.coeff,
            self.alpha + other.alpha,
            self.eta + other.eta,
            self.xi || other.xi,
        )
    }
}

/// Rational hermitian K-theory: the dimension of pi_{t,w} with rational
/// coefficients as a sum of rational cohomology ranks over the slice
/// degrees, with the per-degree breakdown.
pub fn kq_rational(
    profile: &CoefficientProfile,
    t: i64,
    w: i64,
) -> Result<(usize, Vec<(i64, usize)>), EngineError> {
    let witt_rank = profile.kmw(-1)?.group.free_rank;
    let rank_h = |a: i64, b: i64| -> usize {
        profile.integral(a, b).map(|g| g.group.free_rank).unwrap_or(0)
    };
    let bound = t.abs() + w.abs() + 8;
    let mut total = 0usize;
    let mut breakdown = Vec::new();
    for q in -bound..=bound {
        let a = 4 * q - t;
        let b = 2 * q - w;
        let r = if q.rem_euclid(2) == 0 {
            // Quadratic-refined cohomology: the rational Witt line sits on
            // the diagonal.
            rank_h(a, b) + if a == b { witt_rank } else { 0 }
        } else {
            rank_h(a, b)
        };
        if r > 0 {
            breakdown.push((q, r));
            total += r;
        }
    }
    Ok((total, breakdown))
}

#[derive(Debug, thiserror::Error)]
pub enum KtError {
    #[error("the symbol comparison is stated only through degree five, got {0}")]
    OutOfRange(i64),
    #[error("the symbol comparison needs a field profile")]
    NeedsField,
    #[error("unknown golden set `{0}`")]
    UnknownGoldenSet(String),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

#[derive(Clone, Debug)]
pub struct MwImageReport {
    pub n: i64,
    pub kernel: FGAbGroup,
    pub cokernel: FGAbGroup,
    pub isomorphism: bool,
}

/// The image of Milnor-Witt K-theory in hermitian K-theory through degree
/// five: injective with cokernel the (n-4, n-2) cohomology group.
pub fn mw_image_sequence(profile: &CoefficientProfile, n: i64) -> Result<MwImageReport, KtError> {
    if n > 5 {
        return Err(KtError::OutOfRange(n));
    }
    if profile.is_integers() {
        return Err(KtError::NeedsField);
    }
    let cokernel = profile
        .integral(n - 4, n - 2)
        .map(|g| g.group)
        .unwrap_or_else(|_| FGAbGroup::trivial());
    Ok(MwImageReport {
        n,
        kernel: FGAbGroup::trivial(),
        cokernel: cokernel.clone(),
        isomorphism: n < 3 || cokernel.is_trivial(),
    })
}

// ---------------------------------------------------------------------------
// Golden sets
// ---------------------------------------------------------------------------

pub const GOLDEN_COEFF_KQZ: &str = include_str!("../resources/golden/coeff_kqz.csv");
pub const GOLDEN_KGL_Z: &str = include_str!("../resources/golden/kgl_z.csv");
pub const GOLDEN_FINITE_FIELDS: &str = include_str!("../resources/golden/finite_fields.csv");
pub const GOLDEN_COEFF_KW: &str = include_str!("../resources/golden/coeff_kw.csv");

#[derive(Clone, Debug)]
pub struct GoldenEntry {
    pub key: Vec<i64>,
    pub group: FGAbGroup,
    pub order_only: bool,
    pub conditional: bool,
}

pub fn parse_golden(csv: &str, key_len: usize) -> Vec<GoldenEntry> {
    let mut out = Vec::new();
    for line in csv.lines().skip(1) {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parts: Vec<&str> = line.split(',').collect();
        assert!(parts.len() >= key_len + 1, "bad golden row: {}", line);
        let key: Vec<i64> = parts[..key_len].iter().map(|p| p.trim().parse().unwrap()).collect();
        let group = FGAbGroup::parse(parts[key_len].trim().trim_matches('"')).unwrap();
        let flags = parts.get(key_len + 1).copied().unwrap_or("");
        out.push(GoldenEntry {
            key,
            group,
            order_only: flags.contains("cyclic?"),
            conditional: flags.contains("cond"),
        });
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CellVerdict {
    Equal,
    Conditional,
    Mismatch { expected: String, got: String },
}

#[derive(Clone, Debug)]
pub struct DiffReport {
    pub set: String,
    pub verdicts: Vec<(Vec<i64>, CellVerdict)>,
}

impl DiffReport {
    pub fn mismatches(&self) -> Vec<&(Vec<i64>, CellVerdict)> {
        self.verdicts.iter().filter(|(_, v)| matches!(v, CellVerdict::Mismatch { .. })).collect()
    }

    pub fn ok(&self) -> bool {
        self.mismatches().is_empty()
    }
}

fn compare_cell(entry: &GoldenEntry, got: Option<&FGAbGroup>, tracked: bool) -> CellVerdict {
    let Some(g) = got else {
        return CellVerdict::Mismatch { expected: entry.group.text(), got: "ambiguous".into() };
    };
    let matches = if entry.order_only {
        g.free_rank == entry.group.free_rank && g.torsion_order() == entry.group.torsion_order()
    } else {
        *g == entry.group
    };
    if !matches {
        return CellVerdict::Mismatch { expected: entry.group.text(), got: g.text() };
    }
    if entry.conditional || (tracked && entry.order_only) {
        CellVerdict::Conditional
    } else {
        CellVerdict::Equal
    }
}

/// Verifies one of the shipped golden sets against a fresh computation.
pub fn golden_verify(set: &str) -> Result<DiffReport, KtError> {
    match set {
        "coeff-KQZ" => {
            let profile = CoefficientProfile::integers();
            let tracked = profile.conjecture_mode == ConjectureMode::TrackUnknown;
            let table = kq_table(&profile, (-8, 24), &[0, 1, 2, 3])?;
            let golden = parse_golden(GOLDEN_COEFF_KQZ, 2);
            let mut verdicts = Vec::new();
            for e in &golden {
                let got = table.group(e.key[0], e.key[1]);
                verdicts.push((e.key.clone(), compare_cell(e, got, tracked)));
            }
            Ok(DiffReport { set: set.into(), verdicts })
        }
        "kgl-Z" => {
            let golden = parse_golden(GOLDEN_KGL_Z, 1);
            let mut verdicts = Vec::new();
            for e in &golden {
                let (g, _, _) = kgl_groups_z(e.key[0]);
                verdicts.push((e.key.clone(), compare_cell(e, Some(&g), false)));
            }
            Ok(DiffReport { set: set.into(), verdicts })
        }
        "coeff-KW" => {
            let golden = parse_golden(GOLDEN_COEFF_KW, 2);
            let mut verdicts = Vec::new();
            for e in &golden {
                let g = kw_groups_z(e.key[0], e.key[1]);
                verdicts.push((e.key.clone(), compare_cell(e, Some(&g), false)));
            }
            Ok(DiffReport { set: set.into(), verdicts })
        }
        name if name.starts_with("finite-fields") => {
            let filter: Option<i64> =
                name.strip_prefix("finite-fields-q").map(|x| x.parse().unwrap());
            let golden = parse_golden(GOLDEN_FINITE_FIELDS, 4);
            let mut tables: BTreeMap<i64, ResultTable> = BTreeMap::new();
            let mut verdicts = Vec::new();
            for e in &golden {
                let (q, n, w) = (e.key[0], e.key[1], e.key[2]);
                if let Some(f) = filter {
                    if q != f {
                        continue;
                    }
                }
                let table = match tables.entry(q) {
                    std::collections::btree_map::Entry::Occupied(o) => o.into_mut(),
                    std::collections::btree_map::Entry::Vacant(v) => {
                        let profile = CoefficientProfile::finite_field(q as u64)
                            .expect("golden prime powers");
                        v.insert(kq_table(&profile, (0, 22), &[0, 1, 2, 3])?)
                    }
                };
                let got = table.group(n + w, w);
                verdicts.push((e.key.clone(), compare_cell(e, got, false)));
            }
            Ok(DiffReport { set: set.into(), verdicts })
        }
        other => Err(KtError::UnknownGoldenSet(other.into())),
    }
}

pub fn golden_set_names() -> Vec<&'static str> {
    vec!["coeff-KQZ", "kgl-Z", "coeff-KW", "finite-fields"]
}

/// Long-exact-sequence consistency over the integers for one weight pair,
/// from freshly assembled tables.
pub fn wood_over_z(w: i64, s_range: (i64, i64)) -> Result<WoodReport, EngineError> {
    let profile = CoefficientProfile::integers();
    let mut kq: BTreeMap<(i64, i64), FGAbGroup> = BTreeMap::new();
    for weight in [w - 1, w] {
        let t = kq_groups(&profile, (s_range.0 - 1, s_range.1), weight)?;
        for ((s, wt), cell) in &t.cells {
            if let Some(g) = &cell.value {
                kq.insert((*s, *wt), g.clone());
            }
        }
    }
    let mut kgl: BTreeMap<(i64, i64), FGAbGroup> = BTreeMap::new();
    for s in (s_range.0 - 1)..=s_range.1 {
        kgl.insert((s, w), kgl_groups_z(s - w).0);
    }
    wood_consistency(&kq, &kgl, w, s_range)
}

/// The odd part of a group, for the introduction-table dictionary.
pub fn odd_part(g: &FGAbGroup) -> FGAbGroup {
    let two = BigUint::from(2u32);
    let orders: Vec<BigUint> = g
        .invariant_factors
        .iter()
        .map(|d| {
            let mut d = d.clone();
            while (&d % &two).is_zero() {
                d /= &two;
            }
            d
        })
        .collect();
    let mut out = FGAbGroup::from_orders(&orders);
    out.free_rank = g.free_rank;
    out
}

pub fn sum(gs: &[FGAbGroup]) -> FGAbGroup {
    direct_sum(gs)
}
