use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use super::interval::{Bound, Interval, RawInterval};
use super::ModelError;

/// Parity constraint on a vertex quantity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parity {
    Even,
    Any,
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parity::Even => "even",
            Parity::Any => "any",
        })
    }
}

impl FromStr for Parity {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "even" => Ok(Parity::Even),
            "any" => Ok(Parity::Any),
            _ => Err(ModelError::Syntax(s.to_string())),
        }
    }
}

/// Rounds the endpoints of `iv` inward to the parity class.
pub fn apply_parity(iv: Interval, parity: Parity) -> Result<Interval, ModelError> {
    match parity {
        Parity::Any => Ok(iv),
        Parity::Even => {
            let lo = iv.lo() + iv.lo().rem_euclid(2);
            let hi = match iv.hi() {
                Bound::Finite(h) => Bound::Finite(h - h.rem_euclid(2)),
                Bound::Infinite => Bound::Infinite,
            };
            Interval::new(lo, hi).map_err(|_| ModelError::ParityContradiction(iv))
        }
    }
}

/// Map from a raw invariant value to the quantity labelling a graph vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Transform {
    /// `scale * x + offset`.
    Affine { scale: i64, offset: i64 },
    /// `scale * |x|`.
    AbsoluteValue { scale: i64 },
    /// `⌈x / 2⌉`.
    CeilHalf,
}

impl Transform {
    pub const IDENTITY: Transform = Transform::Affine { scale: 1, offset: 0 };

    pub fn affine(scale: i64, offset: i64) -> Self {
        Transform::Affine { scale, offset }
    }

    pub fn is_invertible(&self) -> bool {
        matches!(self, Transform::Affine { .. })
    }
}

fn ceil_half(x: i64) -> i64 {
    -((-x).div_euclid(2))
}

fn map_upper(hi: Bound, f: impl Fn(i64) -> Option<i64>) -> Result<Bound, ModelError> {
    match hi {
        Bound::Finite(h) => f(h).map(Bound::Finite).ok_or(ModelError::Overflow),
        Bound::Infinite => Ok(Bound::Infinite),
    }
}

/// Converts a raw bound pair in invariant units to a vertex interval.
///
/// The resulting lower bound is clamped to zero.
pub fn to_vertex(raw: RawInterval, transform: Transform) -> Result<Interval, ModelError> {
    let (lo, hi) = match transform {
        Transform::Affine { scale, offset } => {
            let f = |x: i64| x.checked_mul(scale).and_then(|v| v.checked_add(offset));
            (f(raw.lo()).ok_or(ModelError::Overflow)?, map_upper(raw.hi(), f)?)
        }
        Transform::AbsoluteValue { scale } => {
            let abs = |x: i64| x.checked_abs();
            let (lo, hi) = if raw.lo() >= 0 {
                (raw.lo(), raw.hi())
            } else if raw.hi().cmp_value(0) != std::cmp::Ordering::Less {
                // spans zero
                let neg = abs(raw.lo()).ok_or(ModelError::Overflow)?;
                (0, raw.hi().max(Bound::Finite(neg)))
            } else {
                let hi = raw.hi().finite().expect("negative upper end is finite");
                (
                    abs(hi).ok_or(ModelError::Overflow)?,
                    Bound::Finite(abs(raw.lo()).ok_or(ModelError::Overflow)?),
                )
            };
            let s = |x: i64| x.checked_mul(scale);
            (s(lo).ok_or(ModelError::Overflow)?, map_upper(hi, s)?)
        }
        Transform::CeilHalf => (ceil_half(raw.lo()), map_upper(raw.hi(), |h| Some(ceil_half(h)))?),
    };
    Interval::new(lo.max(0), hi)
}

/// A vertex interval reported back in the units of the underlying invariant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Reported {
    pub lo: i64,
    pub hi: Bound,
    /// `false` when the transform loses information (absolute value, halving);
    /// the range is then the vertex value itself.
    pub invertible: bool,
}

impl fmt::Display for Reported {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.hi == Bound::Finite(self.lo) {
            write!(f, "{}", self.lo)?;
        } else {
            write!(f, "[{}, {}]", self.lo, self.hi)?;
        }
        if !self.invertible {
            f.write_str(" (vertex value)")?;
        }
        Ok(())
    }
}

/// Inverts the vertex transform where possible.
pub fn from_vertex(iv: Interval, transform: Transform) -> Result<Reported, ModelError> {
    match transform {
        Transform::Affine { scale, offset } => {
            let inv = |v: i64| -> Result<i64, ModelError> {
                let shifted = v - offset;
                if shifted % scale != 0 {
                    return Err(ModelError::NonIntegral {
                        value: v,
                        scale,
                        offset,
                    });
                }
                Ok(shifted / scale)
            };
            let hi = match iv.hi() {
                Bound::Finite(h) => Bound::Finite(inv(h)?),
                Bound::Infinite => Bound::Infinite,
            };
            Ok(Reported {
                lo: inv(iv.lo())?,
                hi,
                invertible: true,
            })
        }
        Transform::AbsoluteValue { .. } | Transform::CeilHalf => Ok(Reported {
            lo: iv.lo(),
            hi: iv.hi(),
            invertible: false,
        }),
    }
}

/// Where the values of a vertex come from when building the database.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SourceClass {
    /// Exported from the KnotInfo tables.
    KnotInfo,
    /// Transcribed from the literature into a supplement file.
    Reference,
    /// No tabulated values; only bounded through the inequalities.
    Unknown,
}

/// One quantity of the inequality network.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexDef {
    pub id: String,
    pub display: String,
    pub base_invariant: String,
    pub transform: Transform,
    pub parity: Parity,
    pub source_class: SourceClass,
}

impl VertexDef {
    pub fn new(
        id: &str,
        display: &str,
        base_invariant: &str,
        transform: Transform,
        parity: Parity,
        source_class: SourceClass,
    ) -> Self {
        VertexDef {
            id: id.to_string(),
            display: display.to_string(),
            base_invariant: base_invariant.to_string(),
            transform,
            parity,
            source_class,
        }
    }
}

/// Index of a vertex inside a [`Registry`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexIdx(pub usize);

/// Ordered set of vertex definitions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Registry {
    defs: Vec<VertexDef>,
    index: HashMap<String, usize>,
}

impl Registry {
    pub fn new(defs: Vec<VertexDef>) -> Result<Self, ModelError> {
        let mut index = HashMap::with_capacity(defs.len());
        for (i, d) in defs.iter().enumerate() {
            if index.insert(d.id.clone(), i).is_some() {
                return Err(ModelError::DuplicateVertex(d.id.clone()));
            }
        }
        Ok(Registry { defs, index })
    }

    /// The 33 quantities of the standard network with their default parity
    /// classes.
    pub fn standard() -> Self {
        use Parity::{Any, Even};
        use SourceClass::{KnotInfo, Reference, Unknown};
        let x2 = Transform::affine(2, 0);
        let x2m2 = Transform::affine(2, -2);
        let id = Transform::IDENTITY;
        let defs = vec![
            VertexDef::new("c", "c", "crossing number", id, Any, KnotInfo),
            VertexDef::new("c3", "c_3", "triple crossing number", id, Any, Reference),
            VertexDef::new("2cD", "2c_Δ", "delta-crossing number", x2, Even, Reference),
            VertexDef::new("td", "td", "skein tree depth", id, Any, Reference),
            VertexDef::new("tr", "tr", "trivializing number", id, Even, Reference),
            VertexDef::new("2gf", "2g_f", "free genus", x2, Even, Unknown),
            VertexDef::new("2gc", "2g_c", "canonical genus", x2, Even, Unknown),
            VertexDef::new("2u", "2u", "unknotting number", x2, Even, KnotInfo),
            VertexDef::new("ub", "u_b", "band-unknotting number", id, Any, Unknown),
            VertexDef::new("ulb", "ul_b", "band-unlinking number", id, Any, Unknown),
            VertexDef::new("2cl", "2cl", "clasp number", x2, Even, KnotInfo),
            VertexDef::new("2br-2", "2br-2", "bridge number", x2m2, Even, KnotInfo),
            VertexDef::new("2b-2", "2b-2", "braid index", x2m2, Even, KnotInfo),
            VertexDef::new("alpha-2", "α-2", "arc index", Transform::affine(1, -2), Any, KnotInfo),
            VertexDef::new("m-1", "m-1", "mosaic number", Transform::affine(1, -1), Any, KnotInfo),
            VertexDef::new("2a", "2a", "ascending number", x2, Even, Reference),
            VertexDef::new("2cl4", "2cl_4", "4D clasp number", x2, Even, KnotInfo),
            VertexDef::new("2g4", "2g_4", "slice genus", x2, Even, KnotInfo),
            VertexDef::new(
                "|sigma|",
                "|σ|",
                "signature",
                Transform::AbsoluteValue { scale: 1 },
                Even,
                KnotInfo,
            ),
            VertexDef::new("gds", "g_ds", "doubly slice genus", id, Any, KnotInfo),
            VertexDef::new("2gr", "2g_r", "ribbon genus", x2, Even, Unknown),
            VertexDef::new("2ur*", "2u_r*", "weak ribbon unknotting number", x2, Even, Unknown),
            VertexDef::new("2us", "2u_s", "slicing number", x2, Even, Unknown),
            VertexDef::new("2uc", "2u_c", "concordance unknotting number", x2, Even, Reference),
            VertexDef::new("2g", "2g", "genus", x2, Even, KnotInfo),
            VertexDef::new("Ordv", "Ord_v", "torsion order", id, Any, Unknown),
            VertexDef::new(
                "2|tau|",
                "2|τ|",
                "Ozsváth–Szabó tau",
                Transform::AbsoluteValue { scale: 2 },
                Even,
                KnotInfo,
            ),
            VertexDef::new(
                "|s|",
                "|s|",
                "Rasmussen s-invariant",
                Transform::AbsoluteValue { scale: 1 },
                Even,
                KnotInfo,
            ),
            VertexDef::new("spDt", "spΔ_t", "Alexander polynomial span", id, Even, KnotInfo),
            VertexDef::new(
                "ceil(spVt/2)",
                "⌈spV_t/2⌉",
                "Jones polynomial span",
                Transform::CeilHalf,
                Any,
                KnotInfo,
            ),
            VertexDef::new("degPz", "degP_z", "HOMFLYPT z-degree", id, Even, KnotInfo),
            VertexDef::new("spPa", "spP_a", "HOMFLYPT a-spread", id, Even, KnotInfo),
            VertexDef::new("spFa", "spF_a", "Kauffman polynomial a-spread", id, Any, KnotInfo),
        ];
        Registry::new(defs).expect("standard registry ids are unique")
    }

    pub fn len(&self) -> usize {
        self.defs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.defs.is_empty()
    }

    pub fn defs(&self) -> &[VertexDef] {
        &self.defs
    }

    pub fn get(&self, idx: VertexIdx) -> &VertexDef {
        &self.defs[idx.0]
    }

    pub fn lookup(&self, id: &str) -> Option<VertexIdx> {
        self.index.get(id).copied().map(VertexIdx)
    }

    pub fn require(&self, id: &str) -> Result<VertexIdx, ModelError> {
        self.lookup(id).ok_or_else(|| ModelError::UnknownVertex(id.to_string()))
    }

    pub fn indices(&self) -> impl Iterator<Item = VertexIdx> + '_ {
        (0..self.defs.len()).map(VertexIdx)
    }

    pub fn parity(&self, idx: VertexIdx) -> Parity {
        self.defs[idx.0].parity
    }

    pub fn set_parity(&mut self, id: &str, parity: Parity) -> Result<(), ModelError> {
        let idx = self.require(id)?;
        self.defs[idx.0].parity = parity;
        Ok(())
    }

    /// Overrides parity classes from a parity table.
    pub fn apply_parity_table(&mut self, table: &ParityTable) -> Result<(), ModelError> {
        for (id, parity) in &table.entries {
            self.set_parity(id, *parity)?;
        }
        Ok(())
    }
}

/// Parsed parity table file: `vertex<TAB>even|any` per line, `#` comments.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParityTable {
    pub entries: Vec<(String, Parity)>,
}

impl ParityTable {
    pub const BUNDLED: &'static str = include_str!("../../data/parity.tsv");

    pub fn bundled() -> Self {
        ParityTable::parse(Self::BUNDLED).expect("bundled parity table parses")
    }

    pub fn parse(text: &str) -> Result<Self, ModelError> {
        let mut entries: Vec<(String, Parity)> = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut cols = line.split('\t').map(str::trim);
            let (Some(id), Some(p), None) = (cols.next(), cols.next(), cols.next()) else {
                return Err(ModelError::TableLine {
                    line: n + 1,
                    text: line.to_string(),
                });
            };
            if entries.iter().any(|(e, _)| e == id) {
                return Err(ModelError::DuplicateVertex(id.to_string()));
            }
            entries.push((id.to_string(), p.parse()?));
        }
        Ok(ParityTable { entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}
