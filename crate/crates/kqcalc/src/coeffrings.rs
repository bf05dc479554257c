//! Bidegree-indexed coefficient data: integral and mod-2 cohomology of the
//! integers and the reals with their Steenrod action, plus finite-field and
//! table-driven field profiles.

use crate::arith;
use crate::exactalg::{direct_sum, FGAbGroup};
use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

/// Bidegree in the s+(w) convention: simplicial degree s, weight w. The
/// topological degree is t = s + w.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Bidegree {
    pub s: i64,
    pub w: i64,
}

impl Bidegree {
    pub fn new(s: i64, w: i64) -> Self {
        Bidegree { s, w }
    }

    pub fn topological(&self) -> (i64, i64) {
        (self.s + self.w, self.w)
    }
}

/// pi_{t,w} in the topological convention equals pi_{(t-w)+(w)}.
pub fn grade_convert(t: i64, w: i64) -> Bidegree {
    Bidegree { s: t - w, w }
}

/// Grothendieck-Witt indexing: GW^w_t lives in pi_{t-2w,-w}, i.e. bidegree
/// (t - w) + (-w).
pub fn gw_index(t: i64, w: i64) -> Bidegree {
    Bidegree { s: t - w, w: -w }
}

/// A named cohomology class.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CohClass {
    /// tau^tau * rho^rho in the mod-2 ring; cohomological bidegree (rho, tau+rho).
    TauRho { tau: u32, rho: u32 },
    /// tau^tau * (tau eps); cohomological bidegree (1, tau + 2).
    TauEpsilon { tau: u32 },
    /// A sum of two mod-2 classes (used for kernel bases).
    Sum(Box<CohClass>, Box<CohClass>),
    /// Generator of an infinite cyclic summand.
    Integral { label: String },
    /// Generator of a finite cyclic summand.
    Torsion { label: String, order: BigUint },
}

impl CohClass {
    pub fn label(&self) -> String {
        match self {
            CohClass::TauRho { tau, rho } => match (tau, rho) {
                (0, 0) => "1".to_string(),
                (t, 0) => format!("tau^{}", t),
                (0, r) => format!("rho^{}", r),
                (t, r) => format!("tau^{}rho^{}", t, r),
            },
            CohClass::TauEpsilon { tau } => {
                if *tau == 0 {
                    "taueps".to_string()
                } else {
                    format!("tau^{}taueps", tau)
                }
            }
            CohClass::Sum(a, b) => format!("{}+{}", a.label(), b.label()),
            CohClass::Integral { label } => label.clone(),
            CohClass::Torsion { label, .. } => label.clone(),
        }
    }
}

impl fmt::Display for CohClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

/// Order of a basis element.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Order {
    Infinite,
    Finite(BigUint),
}

/// Conditional markers attached to table cells.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Marker {
    /// Group is conjecturally trivial; its order is a product of irregular
    /// primes. Tracked only, never guessed nonzero.
    ConditionallyZero,
    /// Order is exact but the cyclic structure is conjectural.
    ConditionallyCyclic,
}

impl Marker {
    /// Marker string used in JSON output.
    pub fn provenance(&self) -> &'static str {
        "conditional: Kummer-Vandiver-adjacent"
    }
}

/// A finitely generated abelian group together with named generators.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupWithBasis {
    pub group: FGAbGroup,
    pub basis: Vec<(CohClass, Order)>,
    pub markers: Vec<Marker>,
}

impl GroupWithBasis {
    pub fn zero() -> Self {
        GroupWithBasis { group: FGAbGroup::trivial(), basis: Vec::new(), markers: Vec::new() }
    }

    pub fn from_basis(basis: Vec<(CohClass, Order)>) -> Self {
        let parts: Vec<FGAbGroup> = basis
            .iter()
            .map(|(_, o)| match o {
                Order::Infinite => FGAbGroup::z(),
                Order::Finite(n) => FGAbGroup::cyclic_big(n.clone()),
            })
            .collect();
        GroupWithBasis { group: direct_sum(&parts), basis, markers: Vec::new() }
    }

    pub fn with_markers(mut self, markers: Vec<Marker>) -> Self {
        self.markers = markers;
        self
    }

    pub fn is_zero(&self) -> bool {
        self.group.is_trivial()
    }

    pub fn mod2_dimension(&self) -> usize {
        self.basis
            .iter()
            .filter(|(_, o)| matches!(o, Order::Finite(n) if *n == BigUint::from(2u32)))
            .count()
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CoeffError {
    #[error("no table entry supplied for bidegree ({s}, {w})")]
    MissingTableEntry { s: i64, w: i64 },
    #[error("class does not live in the mod-2 coefficients")]
    WrongCoefficients,
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("profile `{0}` does not supply {1}")]
    UnsupportedProfile(String, String),
    #[error("malformed profile entry at ({s}, {w}): {message}")]
    MalformedEntry { s: i64, w: i64, message: String },
    #[error("profile violates a structural constraint: {0}")]
    BadProfile(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConjectureMode {
    AssumeVanishing,
    TrackUnknown,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CyclicityMode {
    AssumeCyclic,
    TrackUncertain,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoefficientSystem {
    Z,
    Zmod2,
    Zmod3,
}

/// Tables of a user-supplied field of cohomological dimension at most two.
#[derive(Clone, Debug, Default)]
pub struct CD2Tables {
    pub h: BTreeMap<(i64, i64), FGAbGroup>,
    pub h2: BTreeMap<(i64, i64), FGAbGroup>,
    pub h3: BTreeMap<(i64, i64), FGAbGroup>,
    pub kmw: BTreeMap<i64, FGAbGroup>,
    /// Highest weight the tables cover; queries beyond it are errors.
    pub max_weight: i64,
}

#[derive(Clone, Debug)]
pub enum ProfileKind {
    IntegersZ,
    RealsR,
    FiniteField { q: u64, p: u64 },
    CD2Field(CD2Tables),
    /// Named placeholder for a field profile with no built-in tables.
    RationalPoint,
}

/// The per-base input bundle: coefficient tables, Milnor-Witt data and
/// conjecture handling.
#[derive(Clone, Debug)]
pub struct CoefficientProfile {
    pub name: String,
    pub kind: ProfileKind,
    pub conjecture_mode: ConjectureMode,
    pub cyclicity_mode: CyclicityMode,
}

fn z2() -> Order {
    Order::Finite(BigUint::from(2u32))
}

impl CoefficientProfile {
    pub fn integers() -> Self {
        CoefficientProfile {
            name: "Z".into(),
            kind: ProfileKind::IntegersZ,
            conjecture_mode: ConjectureMode::AssumeVanishing,
            cyclicity_mode: CyclicityMode::AssumeCyclic,
        }
    }

    pub fn reals() -> Self {
        CoefficientProfile {
            name: "R".into(),
            kind: ProfileKind::RealsR,
            conjecture_mode: ConjectureMode::AssumeVanishing,
            cyclicity_mode: CyclicityMode::AssumeCyclic,
        }
    }

    /// Built-in finite-field profile; q must be a prime power.
    pub fn finite_field(q: u64) -> Result<Self, CoeffError> {
        if q < 2 {
            return Err(CoeffError::NotPrimePower(q));
        }
        let factors = crate::exactalg::factorize(&BigUint::from(q));
        if factors.len() != 1 {
            return Err(CoeffError::NotPrimePower(q));
        }
        let p: u64 = factors[0].0.to_string().parse().unwrap();
        Ok(CoefficientProfile {
            name: format!("F{}", q),
            kind: ProfileKind::FiniteField { q, p },
            conjecture_mode: ConjectureMode::AssumeVanishing,
            cyclicity_mode: CyclicityMode::AssumeCyclic,
        })
    }

    pub fn cd2_field(name: &str, tables: CD2Tables) -> Result<Self, CoeffError> {
        for (&(s, w), g) in tables.h.iter().chain(tables.h2.iter()) {
            if s > 2 && !g.is_trivial() {
                return Err(CoeffError::MalformedEntry {
                    s,
                    w,
                    message: "cohomological dimension at most 2 requires zero above s = 2".into(),
                });
            }
        }
        for (&w, g) in &tables.kmw {
            if w >= 3 && !g.is_trivial() {
                return Err(CoeffError::BadProfile(format!(
                    "Milnor-Witt entry in weight {} must vanish (cube of the fundamental ideal is zero)",
                    w
                )));
            }
        }
        Ok(CoefficientProfile {
            name: name.into(),
            kind: ProfileKind::CD2Field(tables),
            conjecture_mode: ConjectureMode::AssumeVanishing,
            cyclicity_mode: CyclicityMode::AssumeCyclic,
        })
    }

    /// Loads a field profile from its JSON document:
    /// {"name": ..., "tables": {"H": [[s, w, group]], "h2": ..., "h3": ...,
    /// "kmw": [[w, group]], "max_weight": ...}} with group literals in the
    /// canonical text form.
    pub fn from_json(doc: &str) -> Result<Self, CoeffError> {
        let v: serde_json::Value = serde_json::from_str(doc)
            .map_err(|e| CoeffError::BadProfile(format!("not valid JSON: {}", e)))?;
        let name = v
            .get("name")
            .and_then(|n| n.as_str())
            .ok_or_else(|| CoeffError::BadProfile("missing `name`".into()))?;
        let tables_v = v
            .get("tables")
            .ok_or_else(|| CoeffError::BadProfile("missing `tables`".into()))?;
        let mut tables = CD2Tables {
            max_weight: tables_v.get("max_weight").and_then(|m| m.as_i64()).unwrap_or(16),
            ..CD2Tables::default()
        };
        let parse_bidegree_table = |key: &str| -> Result<BTreeMap<(i64, i64), FGAbGroup>, CoeffError> {
            let mut out = BTreeMap::new();
            let Some(rows) = tables_v.get(key) else {
                return Ok(out);
            };
            let rows = rows
                .as_array()
                .ok_or_else(|| CoeffError::BadProfile(format!("`{}` must be an array", key)))?;
            for row in rows {
                let items = row.as_array().filter(|r| r.len() == 3);
                let Some(items) = items else {
                    return Err(CoeffError::BadProfile(format!(
                        "`{}` rows must be [s, w, group]",
                        key
                    )));
                };
                let (Some(s), Some(w)) = (items[0].as_i64(), items[1].as_i64()) else {
                    return Err(CoeffError::BadProfile(format!("`{}` indices must be integers", key)));
                };
                let lit = items[2].as_str().ok_or(CoeffError::MalformedEntry {
                    s,
                    w,
                    message: "group literal must be a string".into(),
                })?;
                let g = FGAbGroup::parse(lit).map_err(|e| CoeffError::MalformedEntry {
                    s,
                    w,
                    message: e.to_string(),
                })?;
                out.insert((s, w), g);
            }
            Ok(out)
        };
        tables.h = parse_bidegree_table("H")?;
        tables.h2 = parse_bidegree_table("h2")?;
        tables.h3 = parse_bidegree_table("h3")?;
        if let Some(rows) = tables_v.get("kmw") {
            let rows = rows
                .as_array()
                .ok_or_else(|| CoeffError::BadProfile("`kmw` must be an array".into()))?;
            for row in rows {
                let items = row.as_array().filter(|r| r.len() == 2);
                let Some(items) = items else {
                    return Err(CoeffError::BadProfile("`kmw` rows must be [w, group]".into()));
                };
                let Some(w) = items[0].as_i64() else {
                    return Err(CoeffError::BadProfile("`kmw` index must be an integer".into()));
                };
                let lit = items[1].as_str().ok_or(CoeffError::MalformedEntry {
                    s: 0,
                    w,
                    message: "group literal must be a string".into(),
                })?;
                let g = FGAbGroup::parse(lit).map_err(|e| CoeffError::MalformedEntry {
                    s: 0,
                    w,
                    message: e.to_string(),
                })?;
                tables.kmw.insert(w, g);
            }
        }
        Self::cd2_field(name, tables)
    }

    pub fn char_two(&self) -> bool {
        matches!(self.kind, ProfileKind::FiniteField { p: 2, .. })
    }

    /// True when every cohomology entry above simplicial degree 2 vanishes,
    /// which forces all slice differentials to vanish.
    pub fn cd_at_most_two(&self) -> bool {
        matches!(self.kind, ProfileKind::FiniteField { .. } | ProfileKind::CD2Field(_))
    }

    pub fn is_integers(&self) -> bool {
        matches!(self.kind, ProfileKind::IntegersZ)
    }

    /// Dimension bound of the base: 1 for the integers, 0 for fields.
    pub fn krull_dimension(&self) -> i64 {
        if self.is_integers() {
            1
        } else {
            0
        }
    }

    /// Integral cohomology at (s, w).
    pub fn integral(&self, s: i64, w: i64) -> Result<GroupWithBasis, CoeffError> {
        match &self.kind {
            ProfileKind::IntegersZ => Ok(integral_z(s, w, self.conjecture_mode, self.cyclicity_mode)),
            ProfileKind::FiniteField { q, .. } => Ok(integral_fq(*q, s, w)),
            ProfileKind::CD2Field(t) => {
                if w > t.max_weight {
                    return Err(CoeffError::MissingTableEntry { s, w });
                }
                Ok(table_entry(&t.h, s, w))
            }
            ProfileKind::RealsR | ProfileKind::RationalPoint => Err(CoeffError::UnsupportedProfile(
                self.name.clone(),
                "integral coefficients".into(),
            )),
        }
    }

    /// Mod-2 cohomology at (s, w).
    pub fn mod2(&self, s: i64, w: i64) -> Result<GroupWithBasis, CoeffError> {
        match &self.kind {
            ProfileKind::IntegersZ => Ok(mod2_z(s, w)),
            ProfileKind::RealsR => Ok(mod2_r(s, w)),
            ProfileKind::FiniteField { q, p } => Ok(mod_l_fq(*q, *p, s, w, 2)),
            ProfileKind::CD2Field(t) => {
                if w > t.max_weight {
                    return Err(CoeffError::MissingTableEntry { s, w });
                }
                Ok(table_entry(&t.h2, s, w))
            }
            ProfileKind::RationalPoint => Err(CoeffError::UnsupportedProfile(
                self.name.clone(),
                "mod-2 coefficients".into(),
            )),
        }
    }

    /// Mod-3 cohomology at (s, w); derived by universal coefficients from
    /// the integral table for the built-in profiles.
    pub fn mod3(&self, s: i64, w: i64) -> Result<GroupWithBasis, CoeffError> {
        match &self.kind {
            ProfileKind::IntegersZ => Ok(mod3_z(s, w)),
            ProfileKind::FiniteField { q, p } => Ok(mod_l_fq(*q, *p, s, w, 3)),
            ProfileKind::CD2Field(t) => {
                if w > t.max_weight {
                    return Err(CoeffError::MissingTableEntry { s, w });
                }
                Ok(table_entry(&t.h3, s, w))
            }
            ProfileKind::RealsR | ProfileKind::RationalPoint => Err(CoeffError::UnsupportedProfile(
                self.name.clone(),
                "mod-3 coefficients".into(),
            )),
        }
    }

    /// Milnor-Witt column: the value of the zeroth homotopy of the zeroth
    /// very effective slice in weight w.
    pub fn kmw(&self, w: i64) -> Result<GroupWithBasis, CoeffError> {
        match &self.kind {
            ProfileKind::IntegersZ => Ok(kmw_z(w)),
            ProfileKind::RealsR => Ok(kmw_r(w)),
            ProfileKind::FiniteField { q, p } => Ok(kmw_fq(*q, *p, w)),
            ProfileKind::CD2Field(t) => {
                if w > t.max_weight {
                    return Err(CoeffError::MissingTableEntry { s: 0, w });
                }
                if w >= 3 {
                    return Ok(GroupWithBasis::zero());
                }
                Ok(t.kmw
                    .get(&w)
                    .map(|g| group_only(g.clone(), &format!("kmw_{}", w)))
                    .unwrap_or_else(GroupWithBasis::zero))
            }
            ProfileKind::RationalPoint => Err(CoeffError::UnsupportedProfile(
                self.name.clone(),
                "Milnor-Witt data".into(),
            )),
        }
    }

    /// Dispatch by coefficient system.
    pub fn coeff(
        &self,
        system: CoefficientSystem,
        s: i64,
        w: i64,
    ) -> Result<GroupWithBasis, CoeffError> {
        match system {
            CoefficientSystem::Z => self.integral(s, w),
            CoefficientSystem::Zmod2 => self.mod2(s, w),
            CoefficientSystem::Zmod3 => self.mod3(s, w),
        }
    }
}

fn table_entry(table: &BTreeMap<(i64, i64), FGAbGroup>, s: i64, w: i64) -> GroupWithBasis {
    table
        .get(&(s, w))
        .map(|g| group_only(g.clone(), &format!("c_{{{},{}}}", s, w)))
        .unwrap_or_else(GroupWithBasis::zero)
}

/// Wraps a bare group with mechanically named generators.
pub fn group_only(g: FGAbGroup, stem: &str) -> GroupWithBasis {
    let mut basis = Vec::new();
    for i in 0..g.free_rank {
        basis.push((CohClass::Integral { label: format!("{}[{}]", stem, i) }, Order::Infinite));
    }
    for (i, d) in g.invariant_factors.iter().enumerate() {
        basis.push((
            CohClass::Torsion { label: format!("{}[t{}]", stem, i), order: d.clone() },
            Order::Finite(d.clone()),
        ));
    }
    GroupWithBasis { group: g, basis, markers: Vec::new() }
}

// ---------------------------------------------------------------------------
// Integers
// ---------------------------------------------------------------------------

fn integral_z(s: i64, w: i64, _conj: ConjectureMode, _cyc: CyclicityMode) -> GroupWithBasis {
    if s < 0 || w < 0 {
        return GroupWithBasis::zero();
    }
    match s {
        0 => {
            if w == 0 {
                GroupWithBasis::from_basis(vec![(
                    CohClass::Integral { label: "1".into() },
                    Order::Infinite,
                )])
            } else {
                GroupWithBasis::zero()
            }
        }
        1 => {
            if w <= 0 {
                GroupWithBasis::zero()
            } else if w == 1 {
                GroupWithBasis::from_basis(vec![(
                    CohClass::Torsion { label: "c_{1,1}".into(), order: BigUint::from(2u32) },
                    z2(),
                )])
            } else if w % 2 == 1 {
                GroupWithBasis::from_basis(vec![
                    (CohClass::Integral { label: format!("b_{{1,{}}}", w) }, Order::Infinite),
                    (
                        CohClass::Torsion {
                            label: format!("c_{{1,{}}}", w),
                            order: BigUint::from(2u32),
                        },
                        z2(),
                    ),
                ])
            } else {
                let v = arith::uv_of_weight(w).expect("even positive weight").v;
                GroupWithBasis::from_basis(vec![(
                    CohClass::Torsion { label: format!("v_{{{}}}", w), order: v.clone() },
                    Order::Finite(v),
                )])
            }
        }
        2 => {
            if w == 0 || w == 1 || w == 3 {
                GroupWithBasis::zero()
            } else if w % 2 == 1 {
                // Finite, conjecturally trivial, of irregular-prime order.
                GroupWithBasis::zero().with_markers(vec![Marker::ConditionallyZero])
            } else {
                let u = arith::uv_of_weight(w).expect("even positive weight").u;
                let order = BigUint::from(2u32) * &u;
                let mut markers = Vec::new();
                if !u.is_one() {
                    markers.push(Marker::ConditionallyCyclic);
                }
                GroupWithBasis::from_basis(vec![(
                    CohClass::Torsion { label: format!("d_{{2,{}}}", w), order: order.clone() },
                    Order::Finite(order),
                )])
                .with_markers(markers)
            }
        }
        _ => {
            if s <= w && (w - s) % 2 == 0 {
                GroupWithBasis::from_basis(vec![(
                    CohClass::Torsion {
                        label: format!("e_{{{},{}}}", s, w),
                        order: BigUint::from(2u32),
                    },
                    z2(),
                )])
            } else {
                GroupWithBasis::zero()
            }
        }
    }
}

/// Mod-2 motivic cohomology of the integers: F_2[tau, rho, taueps] modulo
/// (taueps)^2 and taueps * rho.
pub fn mod2_z(s: i64, w: i64) -> GroupWithBasis {
    let mut basis = Vec::new();
    if s >= 0 && w >= s {
        basis.push((CohClass::TauRho { tau: (w - s) as u32, rho: s as u32 }, z2()));
    }
    if s == 1 && w >= 2 {
        basis.push((CohClass::TauEpsilon { tau: (w - 2) as u32 }, z2()));
    }
    GroupWithBasis::from_basis(basis)
}

/// Mod-2 motivic cohomology of the reals: F_2[tau, rho].
pub fn mod2_r(s: i64, w: i64) -> GroupWithBasis {
    if s >= 0 && w >= s {
        GroupWithBasis::from_basis(vec![(
            CohClass::TauRho { tau: (w - s) as u32, rho: s as u32 },
            z2(),
        )])
    } else {
        GroupWithBasis::zero()
    }
}

/// Mod-3 cohomology of the integers by universal coefficients from the
/// integral table.
fn mod3_z(s: i64, w: i64) -> GroupWithBasis {
    let three = BigUint::from(3u32);
    let here = integral_z(s, w, ConjectureMode::AssumeVanishing, CyclicityMode::AssumeCyclic);
    let next = integral_z(s + 1, w, ConjectureMode::AssumeVanishing, CyclicityMode::AssumeCyclic);
    let mut basis = Vec::new();
    for i in 0..here.group.free_rank {
        basis.push((
            CohClass::Torsion { label: format!("m3_{{{},{}}}[{}]", s, w, i), order: three.clone() },
            Order::Finite(three.clone()),
        ));
    }
    for d in &here.group.invariant_factors {
        if (d % &three).is_zero() {
            basis.push((
                CohClass::Torsion { label: format!("m3_{{{},{}}}", s, w), order: three.clone() },
                Order::Finite(three.clone()),
            ));
        }
    }
    for d in &next.group.invariant_factors {
        if (d % &three).is_zero() {
            basis.push((
                CohClass::Torsion { label: format!("m3tor_{{{},{}}}", s, w), order: three.clone() },
                Order::Finite(three.clone()),
            ));
        }
    }
    GroupWithBasis::from_basis(basis)
}

/// Milnor-Witt column over the integers: Z in positive weights, rank two in
/// weight zero, the Witt-image copy of Z in negative weights.
fn kmw_z(w: i64) -> GroupWithBasis {
    match w.cmp(&0) {
        std::cmp::Ordering::Greater => GroupWithBasis::from_basis(vec![(
            CohClass::Integral { label: format!("g_{{{}}}", w) },
            Order::Infinite,
        )]),
        std::cmp::Ordering::Equal => GroupWithBasis::from_basis(vec![
            (CohClass::Integral { label: "rank".into() }, Order::Infinite),
            (CohClass::Integral { label: "hyperbolic".into() }, Order::Infinite),
        ]),
        std::cmp::Ordering::Less => GroupWithBasis::from_basis(vec![(
            CohClass::Integral { label: "witt".into() },
            Order::Infinite,
        )]),
    }
}

fn kmw_r(w: i64) -> GroupWithBasis {
    match w.cmp(&0) {
        std::cmp::Ordering::Greater => GroupWithBasis::from_basis(vec![(
            CohClass::Integral { label: format!("pow_{{{}}}", w) },
            Order::Infinite,
        )]),
        std::cmp::Ordering::Equal => GroupWithBasis::from_basis(vec![
            (CohClass::Integral { label: "rank".into() }, Order::Infinite),
            (CohClass::Integral { label: "signature".into() }, Order::Infinite),
        ]),
        std::cmp::Ordering::Less => GroupWithBasis::from_basis(vec![(
            CohClass::Integral { label: "witt".into() },
            Order::Infinite,
        )]),
    }
}

// ---------------------------------------------------------------------------
// Finite fields
// ---------------------------------------------------------------------------

fn integral_fq(q: u64, s: i64, w: i64) -> GroupWithBasis {
    if s == 0 && w == 0 {
        return GroupWithBasis::from_basis(vec![(
            CohClass::Integral { label: "1".into() },
            Order::Infinite,
        )]);
    }
    if s == 1 && w > 0 {
        let order = BigUint::from(q).pow(w as u32) - BigUint::one();
        if order.is_one() {
            return GroupWithBasis::zero();
        }
        return GroupWithBasis::from_basis(vec![(
            CohClass::Torsion { label: format!("u_{{{}}}", w), order: order.clone() },
            Order::Finite(order),
        )]);
    }
    GroupWithBasis::zero()
}

/// Mod-l cohomology of a finite field by universal coefficients; in
/// characteristic l only the reduction of the unit class remains.
fn mod_l_fq(q: u64, p: u64, s: i64, w: i64, l: u64) -> GroupWithBasis {
    let lb = BigUint::from(l);
    let mut basis: Vec<(CohClass, Order)> = Vec::new();
    let push = |basis: &mut Vec<(CohClass, Order)>, label: String| {
        basis.push((
            CohClass::Torsion { label, order: lb.clone() },
            Order::Finite(lb.clone()),
        ));
    };
    if p == l {
        if s == 0 && w == 0 {
            push(&mut basis, "1".into());
        }
        return GroupWithBasis::from_basis(basis);
    }
    let here = integral_fq(q, s, w);
    let next = integral_fq(q, s + 1, w);
    for _ in 0..here.group.free_rank {
        push(&mut basis, format!("m{}_{{{},{}}}", l, s, w));
    }
    for d in &here.group.invariant_factors {
        if (d % &lb).is_zero() {
            push(&mut basis, format!("m{}_{{{},{}}}", l, s, w));
        }
    }
    for d in &next.group.invariant_factors {
        if (d % &lb).is_zero() {
            push(&mut basis, format!("m{}tor_{{{},{}}}", l, s, w));
        }
    }
    GroupWithBasis::from_basis(basis)
}

fn kmw_fq(q: u64, p: u64, w: i64) -> GroupWithBasis {
    if w >= 2 {
        // The second Milnor K-group of a finite field vanishes, as does the
        // cube of the fundamental ideal.
        return GroupWithBasis::zero();
    }
    if w == 1 {
        let order = BigUint::from(q) - BigUint::one();
        if order.is_one() {
            return GroupWithBasis::zero();
        }
        return GroupWithBasis::from_basis(vec![(
            CohClass::Torsion { label: "units".into(), order: order.clone() },
            Order::Finite(order),
        )]);
    }
    if w == 0 {
        if p == 2 {
            return GroupWithBasis::from_basis(vec![(
                CohClass::Integral { label: "rank".into() },
                Order::Infinite,
            )]);
        }
        return GroupWithBasis::from_basis(vec![
            (CohClass::Integral { label: "rank".into() }, Order::Infinite),
            (CohClass::Torsion { label: "disc".into(), order: BigUint::from(2u32) }, z2()),
        ]);
    }
    // Negative weights: the Witt group.
    if p == 2 {
        return GroupWithBasis::from_basis(vec![(
            CohClass::Torsion { label: "witt".into(), order: BigUint::from(2u32) },
            z2(),
        )]);
    }
    if q % 4 == 1 {
        GroupWithBasis::from_basis(vec![
            (CohClass::Torsion { label: "witt0".into(), order: BigUint::from(2u32) }, z2()),
            (CohClass::Torsion { label: "witt1".into(), order: BigUint::from(2u32) }, z2()),
        ])
    } else {
        GroupWithBasis::from_basis(vec![(
            CohClass::Torsion { label: "witt".into(), order: BigUint::from(4u32) },
            Order::Finite(BigUint::from(4u32)),
        )])
    }
}

// ---------------------------------------------------------------------------
// Steenrod operations on the mod-2 rings of Z and R
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SteenrodOp {
    Sq1,
    Sq2,
}

/// Sq2 on a monomial tau^m rho^b is tau^(m-1) rho^(b+2) exactly when
/// m = 2, 3 mod 4, and kills the taueps classes; Sq1 is the Bockstein
/// derivation with Sq1(tau) = rho.
pub fn steenrod(op: SteenrodOp, class: &CohClass) -> Result<Option<CohClass>, CoeffError> {
    match (op, class) {
        (SteenrodOp::Sq2, CohClass::TauRho { tau, rho }) => {
            if tau % 4 == 2 || tau % 4 == 3 {
                Ok(Some(CohClass::TauRho { tau: tau - 1, rho: rho + 2 }))
            } else {
                Ok(None)
            }
        }
        (SteenrodOp::Sq2, CohClass::TauEpsilon { .. }) => Ok(None),
        (SteenrodOp::Sq1, CohClass::TauRho { tau, rho }) => {
            if tau % 2 == 1 {
                Ok(Some(CohClass::TauRho { tau: tau - 1, rho: rho + 1 }))
            } else {
                Ok(None)
            }
        }
        (SteenrodOp::Sq1, CohClass::TauEpsilon { .. }) => Ok(None),
        _ => Err(CoeffError::WrongCoefficients),
    }
}

/// Reduction of the named integral generators of the integers to the mod-2
/// ring.
pub fn pr2_z(s: i64, w: i64, class: &CohClass) -> Option<CohClass> {
    match class {
        CohClass::Integral { .. } => {
            if s == 0 && w == 0 {
                Some(CohClass::TauRho { tau: 0, rho: 0 })
            } else if s == 1 && w > 1 && w % 2 == 1 {
                // The infinite cyclic summand reduces onto the taueps line.
                Some(CohClass::TauEpsilon { tau: (w - 2) as u32 })
            } else {
                None
            }
        }
        CohClass::Torsion { order, .. } => {
            if (order % BigUint::from(2u32)).is_zero() && s >= 0 && w >= s {
                Some(CohClass::TauRho { tau: (w - s) as u32, rho: s as u32 })
            } else {
                None
            }
        }
        _ => None,
    }
}

/// True when the mod-2 class at (s, w) over the integers is a reduction of
/// an integral class, i.e. is killed by the integral Bockstein.
pub fn in_pr2_image_z(s: i64, w: i64, class: &CohClass) -> bool {
    let source = integral_z(s, w, ConjectureMode::AssumeVanishing, CyclicityMode::AssumeCyclic);
    source.basis.iter().any(|(c, _)| pr2_z(s, w, c).as_ref() == Some(class))
}

/// Integral Bockstein on a mod-2 class of the integers: nonzero exactly off
/// the image of reduction, landing in the 2-torsion one degree up.
pub fn bockstein_z(s: i64, w: i64, class: &CohClass) -> Option<CohClass> {
    if in_pr2_image_z(s, w, class) {
        return None;
    }
    let target = integral_z(s + 1, w, ConjectureMode::AssumeVanishing, CyclicityMode::AssumeCyclic);
    target
        .basis
        .iter()
        .find(|(_, o)| matches!(o, Order::Finite(n) if (n % BigUint::from(2u32)).is_zero()))
        .map(|(c, _)| c.clone())
}

/// Behaviour of a homomorphism pinned up to kernel/cokernel data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MapBehavior {
    Zero,
    Iso,
    Surjection { kernel: FGAbGroup },
    Injection { cokernel: FGAbGroup },
}

/// The weight-raising composite: reduce mod 2, apply Sq2, take the integral
/// Bockstein. A homomorphism from the integral (s, w) group to the integral
/// (s+3, w+1) group.
pub fn theta_integral(
    profile: &CoefficientProfile,
    s: i64,
    w: i64,
) -> Result<MapBehavior, CoeffError> {
    let source = profile.integral(s, w)?;
    let target = profile.integral(s + 3, w + 1)?;
    if source.is_zero() || target.is_zero() {
        return Ok(MapBehavior::Zero);
    }
    if !profile.is_integers() {
        return Ok(MapBehavior::Zero);
    }
    let mut images = Vec::new();
    for (c, _) in &source.basis {
        let image = pr2_z(s, w, c)
            .and_then(|r| steenrod(SteenrodOp::Sq2, &r).expect("mod-2 class"))
            .and_then(|y| bockstein_z(s + 2, w + 1, &y));
        images.push(image.is_some());
    }
    if images.iter().all(|b| !b) {
        return Ok(MapBehavior::Zero);
    }
    let kernel = kernel_of_map_to_z2(&source, &images);
    if kernel.is_trivial() {
        Ok(MapBehavior::Iso)
    } else {
        Ok(MapBehavior::Surjection { kernel })
    }
}

/// Kernel of a surjection onto Z/2 described by which basis generators hit
/// the generator.
fn kernel_of_map_to_z2(source: &GroupWithBasis, hits: &[bool]) -> FGAbGroup {
    let mut parts: Vec<FGAbGroup> = Vec::new();
    let mut absorbed = false;
    for ((_, o), hit) in source.basis.iter().zip(hits) {
        match (hit, o) {
            (false, Order::Infinite) => parts.push(FGAbGroup::z()),
            (false, Order::Finite(n)) => parts.push(FGAbGroup::cyclic_big(n.clone())),
            (true, Order::Infinite) => {
                // Kernel of Z onto Z/2 is again Z; any further hitting
                // generators contribute their whole group via a diagonal
                // change of basis.
                parts.push(FGAbGroup::z());
                absorbed = true;
            }
            (true, Order::Finite(n)) => {
                if absorbed {
                    parts.push(FGAbGroup::cyclic_big(n.clone()));
                } else {
                    parts.push(FGAbGroup::cyclic_big(n / BigUint::from(2u32)));
                    absorbed = true;
                }
            }
        }
    }
    direct_sum(&parts)
}

// ---------------------------------------------------------------------------
// Contract checks
// ---------------------------------------------------------------------------

/// Checks the closed Sq2 formula against its behavioural description over
/// the stated window: nonzero exactly when 0 <= s <= w with w - s = 2, 3
/// mod 4, an isomorphism except at s = 1 where the kernel is the taueps
/// line.
pub fn verify_sq2_contract() -> Result<(), String> {
    for s in -2..=12i64 {
        for w in -2..=14i64 {
            let source = mod2_z(s, w);
            let target = mod2_z(s + 2, w + 1);
            let mut image_classes = Vec::new();
            for (c, _) in &source.basis {
                if let Some(img) = steenrod(SteenrodOp::Sq2, c).map_err(|e| e.to_string())? {
                    if !target.basis.iter().any(|(t, _)| *t == img) {
                        return Err(format!("Sq2 lands off the target basis at ({}, {})", s, w));
                    }
                    if matches!(c, CohClass::TauEpsilon { .. }) {
                        return Err(format!("Sq2 fails to kill the taueps class at ({}, {})", s, w));
                    }
                    image_classes.push(img);
                }
            }
            let nonzero = !image_classes.is_empty();
            let expected = s >= 0 && s <= w && ((w - s) % 4 == 2 || (w - s) % 4 == 3);
            if nonzero != expected {
                return Err(format!(
                    "Sq2 vanishing pattern mismatch at ({}, {}): computed {}, expected {}",
                    s, w, nonzero, expected
                ));
            }
            if nonzero {
                let source_dim = source.mod2_dimension();
                let image_dim = image_classes.len();
                if s == 1 {
                    if image_dim != source_dim - 1 {
                        return Err(format!(
                            "kernel at s = 1 must have exactly two elements ({}, {})",
                            s, w
                        ));
                    }
                } else if image_dim != source_dim {
                    return Err(format!("Sq2 must be injective at ({}, {})", s, w));
                }
            }
        }
    }
    Ok(())
}

/// The restriction map from the integers to the reals on the mod-2 basis:
/// monomials map to monomials, the taueps line dies. Onto everywhere, with
/// kernel of order two exactly at s = 1, w > 1.
pub fn verify_mod2_restriction_law() -> Result<(), String> {
    for s in -2..=12i64 {
        for w in -2..=14i64 {
            let z = mod2_z(s, w);
            let r = mod2_r(s, w);
            for (c, _) in &r.basis {
                if !z.basis.iter().any(|(cz, _)| cz == c) {
                    return Err(format!("restriction not onto at ({}, {})", s, w));
                }
            }
            let kernel_dim = z.mod2_dimension() - r.mod2_dimension();
            let expected = usize::from(s == 1 && w > 1);
            if kernel_dim != expected {
                return Err(format!(
                    "kernel of restriction has dimension {} at ({}, {}), expected {}",
                    kernel_dim, s, w, expected
                ));
            }
        }
    }
    Ok(())
}
