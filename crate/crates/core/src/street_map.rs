//! Name registries and the road-side tag planner.
//!
//! A road is a 1-D line measured in meters from its start. Tags are laid on a
//! regular grid (default every 8 m) plus one tag at each road feature. Serial
//! numbers increase with position, which is what lets the reader infer the
//! walking direction later on.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sgln::{self, CodecConfig, CodecError, DirectionCode, TagFields, TagWord};

pub const DEFAULT_SPACING_M: f64 = 8.0;
pub const DEFAULT_SERIAL_BASE: u32 = 1;

/// Positions closer than this are the same spot on the road.
const POSITION_EPSILON: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MapError {
    #[error("registry is full ({capacity} codes)")]
    RegistryFull { capacity: u64 },
    #[error("registry names must be nonempty")]
    EmptyName,
    #[error("duplicate registry code {code} for {name:?}")]
    DuplicateCode { name: String, code: u32 },
    #[error("registry code {code} for {name:?} is out of range")]
    CodeOutOfRange { name: String, code: u32 },
    #[error("invalid building: {0}")]
    InvalidBuilding(String),
    #[error("invalid feature: {0}")]
    InvalidFeature(String),
    #[error("invalid road: {0}")]
    InvalidRoad(String),
    #[error("unknown company {0:?}")]
    UnknownCompany(String),
    #[error("unknown road condition {0:?}")]
    UnknownCondition(String),
    #[error("serial number overflow on road {0}")]
    OverflowSerial(RoadId),
    #[error("serial override at {position_m} m is not above the preceding serial {previous}")]
    SerialOrder { position_m: f64, previous: u32 },
    #[error("serial override at {0} m does not match any tag position")]
    UnknownOverride(f64),
    #[error("duplicate road id {0}")]
    DuplicateRoad(RoadId),
    #[error(transparent)]
    Codec(#[from] CodecError),
}

/// Sequential name → code allocator. Code 0 is the null value and never issued.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NameRegistry {
    by_name: BTreeMap<String, u32>,
    by_code: BTreeMap<u32, String>,
    next: u32,
    capacity: u64,
}

impl NameRegistry {
    pub fn new(capacity: u64) -> Self {
        Self::with_start(capacity, 1)
    }

    /// Registry whose next allocation is `next`; used to exercise capacity limits.
    pub fn with_start(capacity: u64, next: u32) -> Self {
        Self {
            by_name: BTreeMap::new(),
            by_code: BTreeMap::new(),
            next: next.max(1),
            capacity,
        }
    }

    /// Registry sized for the 18-bit company code.
    pub fn companies() -> Self {
        Self::new(sgln::company_capacity())
    }

    pub fn capacity(&self) -> u64 {
        self.capacity
    }

    /// Idempotent: a known name returns its existing code.
    pub fn register(&mut self, name: &str) -> Result<u32, MapError> {
        if name.trim().is_empty() {
            return Err(MapError::EmptyName);
        }
        if let Some(&code) = self.by_name.get(name) {
            return Ok(code);
        }
        if u64::from(self.next) >= self.capacity {
            return Err(MapError::RegistryFull { capacity: self.capacity });
        }
        let code = self.next;
        self.insert(name, code)?;
        Ok(code)
    }

    /// Inserts an explicit assignment, e.g. when loading a serialized map.
    pub fn insert(&mut self, name: &str, code: u32) -> Result<(), MapError> {
        if name.trim().is_empty() {
            return Err(MapError::EmptyName);
        }
        if code == 0 || u64::from(code) >= self.capacity {
            return Err(MapError::CodeOutOfRange { name: name.to_string(), code });
        }
        match (self.by_name.get(name), self.by_code.get(&code)) {
            (Some(&existing), _) if existing == code => return Ok(()),
            (Some(_), _) | (None, Some(_)) => {
                return Err(MapError::DuplicateCode { name: name.to_string(), code })
            }
            (None, None) => {}
        }
        self.by_name.insert(name.to_string(), code);
        self.by_code.insert(code, name.to_string());
        self.next = self.next.max(code.saturating_add(1));
        Ok(())
    }

    pub fn code(&self, name: &str) -> Option<u32> {
        self.by_name.get(name).copied()
    }

    pub fn name(&self, code: u32) -> Option<&str> {
        self.by_code.get(&code).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.by_name.len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_name.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, u32)> {
        self.by_name.iter().map(|(n, &c)| (n.as_str(), c))
    }

    pub fn to_map(&self) -> BTreeMap<String, u32> {
        self.by_name.clone()
    }

    pub fn from_map(capacity: u64, map: &BTreeMap<String, u32>) -> Result<Self, MapError> {
        let mut registry = Self::new(capacity);
        for (name, &code) in map {
            registry.insert(name, code)?;
        }
        Ok(registry)
    }
}

/// Five-bit road-condition code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ConditionCode(pub u8);

impl ConditionCode {
    pub const NONE: ConditionCode = ConditionCode(0);
    pub const ENTRANCE: ConditionCode = ConditionCode(1);
    pub const STAIRS: ConditionCode = ConditionCode(2);
    pub const CROSSWALK: ConditionCode = ConditionCode(3);
    pub const TRAFFIC_LIGHT: ConditionCode = ConditionCode(4);
    pub const TURN: ConditionCode = ConditionCode(5);

    pub fn is_none(self) -> bool {
        self == Self::NONE
    }
}

/// Condition name ↔ code table. Serialized with every map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConditionRegistry {
    by_name: BTreeMap<String, ConditionCode>,
}

impl Default for ConditionRegistry {
    fn default() -> Self {
        let by_name = [
            ("NONE", ConditionCode::NONE),
            ("ENTRANCE", ConditionCode::ENTRANCE),
            ("STAIRS", ConditionCode::STAIRS),
            ("CROSSWALK", ConditionCode::CROSSWALK),
            ("TRAFFIC_LIGHT", ConditionCode::TRAFFIC_LIGHT),
            ("TURN", ConditionCode::TURN),
        ]
        .into_iter()
        .map(|(n, c)| (n.to_string(), c))
        .collect();
        Self { by_name }
    }
}

fn condition_key(name: &str) -> String {
    name.trim().to_ascii_uppercase().replace([' ', '-'], "_")
}

impl ConditionRegistry {
    pub fn from_map(map: &BTreeMap<String, u8>) -> Result<Self, MapError> {
        let mut by_name = BTreeMap::new();
        let mut seen = BTreeMap::new();
        for (name, &code) in map {
            let key = condition_key(name);
            if key.is_empty() {
                return Err(MapError::EmptyName);
            }
            if u32::from(code) > sgln::ROAD_CONDITION.max() {
                return Err(MapError::CodeOutOfRange { name: key, code: code.into() });
            }
            if seen.insert(code, key.clone()).is_some() {
                return Err(MapError::DuplicateCode { name: key, code: code.into() });
            }
            by_name.insert(key, ConditionCode(code));
        }
        Ok(Self { by_name })
    }

    pub fn to_map(&self) -> BTreeMap<String, u8> {
        self.by_name.iter().map(|(n, c)| (n.clone(), c.0)).collect()
    }

    /// Case-insensitive; spaces and hyphens match underscores.
    pub fn code(&self, name: &str) -> Option<ConditionCode> {
        self.by_name.get(&condition_key(name)).copied()
    }

    pub fn name(&self, code: ConditionCode) -> Option<&str> {
        self.by_name.iter().find(|(_, &c)| c == code).map(|(n, _)| n.as_str())
    }
}

/// (main road, sub road, path). Zero is null in any position.
#[derive(
    Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize,
)]
pub struct RoadId {
    pub main: u8,
    pub sub: u8,
    pub path: u8,
}

impl RoadId {
    pub const fn new(main: u8, sub: u8, path: u8) -> Self {
        Self { main, sub, path }
    }

    pub fn of(fields: &TagFields) -> Self {
        Self::new(fields.main_road, fields.sub_road, fields.path)
    }

    pub fn is_null(&self) -> bool {
        self.main == 0 && self.sub == 0 && self.path == 0
    }

    fn check_widths(&self) -> Result<(), MapError> {
        let fields = TagFields {
            main_road: self.main,
            sub_road: self.sub,
            path: self.path,
            ..TagFields::default()
        };
        fields.check_widths().map_err(MapError::from)
    }
}

impl fmt::Display for RoadId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}.{}", self.main, self.sub, self.path)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RoadClass {
    Main,
    Sub,
    Path,
}

/// Road names. Registered names get a sequential code within their class.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RoadRegistry {
    names: BTreeMap<RoadId, String>,
}

impl RoadRegistry {
    pub fn register(&mut self, name: &str, class: RoadClass) -> Result<RoadId, MapError> {
        if name.trim().is_empty() {
            return Err(MapError::EmptyName);
        }
        if let Some((&id, _)) = self.names.iter().find(|(_, n)| n.as_str() == name) {
            return Ok(id);
        }
        let (capacity, used) = match class {
            RoadClass::Main => (sgln::MAIN_ROAD.capacity(), self.names.keys().map(|r| r.main).max()),
            RoadClass::Sub => (sgln::SUB_ROAD.capacity(), self.names.keys().map(|r| r.sub).max()),
            RoadClass::Path => (sgln::PATH.capacity(), self.names.keys().map(|r| r.path).max()),
        };
        let next = u64::from(used.unwrap_or(0)) + 1;
        if next >= capacity {
            return Err(MapError::RegistryFull { capacity });
        }
        let code = next as u8;
        let id = match class {
            RoadClass::Main => RoadId::new(code, 0, 0),
            RoadClass::Sub => RoadId::new(0, code, 0),
            RoadClass::Path => RoadId::new(0, 0, code),
        };
        self.names.insert(id, name.to_string());
        Ok(id)
    }

    pub fn insert(&mut self, id: RoadId, name: &str) {
        self.names.insert(id, name.to_string());
    }

    pub fn name(&self, id: RoadId) -> Option<&str> {
        self.names.get(&id).map(String::as_str)
    }

    /// Short display label: the name without its road-class suffix
    /// ("Y sub road" → "Y"), or the dotted id when unnamed.
    pub fn label(&self, id: RoadId) -> String {
        let Some(name) = self.name(id) else {
            return id.to_string();
        };
        let upper = name.trim().to_ascii_uppercase();
        for suffix in [" SUB ROAD", " MAIN ROAD", " ROAD", " PATH"] {
            if let Some(stem) = upper.strip_suffix(suffix) {
                if !stem.trim().is_empty() {
                    return stem.trim().to_string();
                }
            }
        }
        upper
    }
}

/// Everything needed to turn codes back into names.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Registry {
    pub companies: NameRegistry,
    pub conditions: ConditionRegistry,
    pub roads: RoadRegistry,
}

impl Default for Registry {
    fn default() -> Self {
        Self {
            companies: NameRegistry::companies(),
            conditions: ConditionRegistry::default(),
            roads: RoadRegistry::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    #[serde(alias = "Left", alias = "LEFT")]
    Left,
    #[serde(alias = "Right", alias = "RIGHT")]
    Right,
}

impl Side {
    /// Odd numbers on the left, even on the right.
    pub fn for_number(number: u16) -> Self {
        if number % 2 == 1 {
            Side::Left
        } else {
            Side::Right
        }
    }

    pub fn direction(self) -> DirectionCode {
        match self {
            Side::Left => DirectionCode::Left,
            Side::Right => DirectionCode::Right,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Building {
    pub name: String,
    pub number: u16,
    pub side: Side,
    pub position_m: f64,
}

impl Building {
    pub fn check(&self) -> Result<(), MapError> {
        if self.number == 0 || u32::from(self.number) > sgln::BUILDING_NUMBER.max() {
            return Err(MapError::InvalidBuilding(format!(
                "{:?}: number {} outside 1..=1023",
                self.name, self.number
            )));
        }
        if Side::for_number(self.number) != self.side {
            return Err(MapError::InvalidBuilding(format!(
                "{:?}: number {} must be on the {:?} side",
                self.name,
                self.number,
                Side::for_number(self.number)
            )));
        }
        if !(self.position_m.is_finite() && self.position_m >= 0.0) {
            return Err(MapError::InvalidBuilding(format!(
                "{:?}: position {} m",
                self.name, self.position_m
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoadFeature {
    pub condition: ConditionCode,
    pub direction: DirectionCode,
    pub position_m: f64,
    pub building: u16,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SerialOverride {
    pub position_m: f64,
    pub serial: u32,
}

/// Planner input for one road.
#[derive(Debug, Clone, PartialEq)]
pub struct RoadSpec {
    pub id: RoadId,
    pub name: Option<String>,
    pub length_m: f64,
    pub buildings: Vec<Building>,
    pub features: Vec<RoadFeature>,
    pub spacing_m: f64,
    pub serial_base: u32,
    pub serial_overrides: Vec<SerialOverride>,
}

impl RoadSpec {
    pub fn new(id: RoadId, length_m: f64) -> Self {
        Self {
            id,
            name: None,
            length_m,
            buildings: Vec::new(),
            features: Vec::new(),
            spacing_m: DEFAULT_SPACING_M,
            serial_base: DEFAULT_SERIAL_BASE,
            serial_overrides: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TagPlacement {
    pub position_m: f64,
    pub word: TagWord,
    pub fields: TagFields,
}

fn same_spot(a: f64, b: f64) -> bool {
    (a - b).abs() <= POSITION_EPSILON
}

/// Building whose start is the greatest position ≤ `position_m`; ties go to the lower number.
fn building_at(buildings: &[Building], position_m: f64) -> Option<&Building> {
    buildings
        .iter()
        .filter(|b| b.position_m <= position_m + POSITION_EPSILON)
        .max_by(|a, b| {
            a.position_m
                .total_cmp(&b.position_m)
                .then_with(|| b.number.cmp(&a.number))
        })
}

fn check_road(road: &RoadSpec) -> Result<(), MapError> {
    road.id.check_widths()?;
    if !(road.length_m.is_finite() && road.length_m > 0.0) {
        return Err(MapError::InvalidRoad(format!("{}: length {} m", road.id, road.length_m)));
    }
    if !(road.spacing_m.is_finite() && road.spacing_m > 0.0) {
        return Err(MapError::InvalidRoad(format!("{}: spacing {} m", road.id, road.spacing_m)));
    }
    for b in &road.buildings {
        b.check()?;
    }
    for f in &road.features {
        if f.condition.is_none() {
            return Err(MapError::InvalidFeature(format!("{}: condition NONE", road.id)));
        }
        if u32::from(f.condition.0) > sgln::ROAD_CONDITION.max() {
            return Err(MapError::InvalidFeature(format!(
                "{}: condition code {}",
                road.id, f.condition.0
            )));
        }
        if !(f.position_m.is_finite() && (0.0..=road.length_m).contains(&f.position_m)) {
            return Err(MapError::InvalidFeature(format!(
                "{}: position {} m outside the road",
                road.id, f.position_m
            )));
        }
        if !road.buildings.iter().any(|b| b.number == f.building) {
            return Err(MapError::InvalidFeature(format!(
                "{}: building {} is not on this road",
                road.id, f.building
            )));
        }
    }
    Ok(())
}

/// Lays out tags along one road.
///
/// Grid tags sit at `0, spacing, 2·spacing, …` up to the road length, and a
/// tag is added at every feature position (a feature on a grid point shares
/// that tag). Serials rise strictly with position, starting at
/// `serial_base` unless overridden.
pub fn plan_road(
    road: &RoadSpec,
    companies: &NameRegistry,
    codec: &CodecConfig,
) -> Result<Vec<TagPlacement>, MapError> {
    check_road(road)?;

    let grid_count = (road.length_m / road.spacing_m + POSITION_EPSILON).floor() as u64 + 1;
    if grid_count + road.features.len() as u64 > sgln::SERIAL.capacity() {
        return Err(MapError::OverflowSerial(road.id));
    }

    // (position, feature)
    let mut spots: Vec<(f64, Option<&RoadFeature>)> =
        (0..grid_count).map(|k| (k as f64 * road.spacing_m, None)).collect();
    for feature in &road.features {
        match spots.iter_mut().find(|(p, _)| same_spot(*p, feature.position_m)) {
            Some((_, slot @ None)) => *slot = Some(feature),
            Some((_, Some(_))) => {
                return Err(MapError::InvalidFeature(format!(
                    "{}: two features at {} m",
                    road.id, feature.position_m
                )))
            }
            None => spots.push((feature.position_m, Some(feature))),
        }
    }
    spots.sort_by(|a, b| a.0.total_cmp(&b.0));

    for o in &road.serial_overrides {
        if !spots.iter().any(|(p, _)| same_spot(*p, o.position_m)) {
            return Err(MapError::UnknownOverride(o.position_m));
        }
    }

    let company_code = |b: &Building| -> Result<u32, MapError> {
        companies
            .code(&b.name)
            .ok_or_else(|| MapError::UnknownCompany(b.name.clone()))
    };

    let mut placements = Vec::with_capacity(spots.len());
    let mut previous: Option<u32> = None;
    for (position_m, feature) in spots {
        let serial = match road.serial_overrides.iter().find(|o| same_spot(o.position_m, position_m)) {
            Some(o) => {
                if let Some(prev) = previous.filter(|&prev| o.serial <= prev) {
                    return Err(MapError::SerialOrder { position_m, previous: prev });
                }
                o.serial
            }
            None => match previous {
                None => road.serial_base,
                Some(prev) => prev.checked_add(1).ok_or(MapError::OverflowSerial(road.id))?,
            },
        };
        if serial > sgln::SERIAL.max() {
            return Err(MapError::OverflowSerial(road.id));
        }
        previous = Some(serial);

        let building = match feature {
            Some(f) => road.buildings.iter().find(|b| b.number == f.building),
            None => building_at(&road.buildings, position_m),
        };
        let mut fields = codec.blank_fields();
        fields.main_road = road.id.main;
        fields.sub_road = road.id.sub;
        fields.path = road.id.path;
        fields.serial = serial;
        if let Some(b) = building {
            fields.company_code = company_code(b)?;
            fields.building_number = b.number;
            fields.tag_direction = b.side.direction();
        }
        match feature {
            Some(f) => {
                fields.road_condition = f.condition.0;
                fields.feature_direction = f.direction;
            }
            None => {
                fields.road_condition = ConditionCode::NONE.0;
                fields.feature_direction = DirectionCode::Forward;
            }
        }
        let word = sgln::encode(&fields)?;
        placements.push(TagPlacement { position_m, word, fields });
    }
    Ok(placements)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoadPlan {
    pub spec: RoadSpec,
    pub placements: Vec<TagPlacement>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StreetMap {
    pub registry: Registry,
    pub roads: Vec<RoadPlan>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ViolationKind {
    InvalidBuilding,
    SerialOrder,
    DecodeMismatch,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub road: RoadId,
    pub detail: String,
}

impl StreetMap {
    pub fn road(&self, id: RoadId) -> Option<&RoadPlan> {
        self.roads.iter().find(|r| r.spec.id == id)
    }

    /// Checks parity, serial order and word/field consistency. Violations are data.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for road in &self.roads {
            let id = road.spec.id;
            for b in &road.spec.buildings {
                if let Err(e) = b.check() {
                    out.push(Violation { kind: ViolationKind::InvalidBuilding, road: id, detail: e.to_string() });
                }
            }
            for (i, p) in road.placements.iter().enumerate() {
                if sgln::decode(p.word).ok() != Some(p.fields) {
                    out.push(Violation {
                        kind: ViolationKind::DecodeMismatch,
                        road: id,
                        detail: format!("tag {i} at {} m: word {} does not decode to its fields", p.position_m, p.word),
                    });
                }
                let n = p.fields.building_number;
                if n != 0 && p.fields.tag_direction != Side::for_number(n).direction() {
                    out.push(Violation {
                        kind: ViolationKind::InvalidBuilding,
                        road: id,
                        detail: format!("tag {i} at {} m: building {n} on the wrong side", p.position_m),
                    });
                }
            }
            for (i, pair) in road.placements.windows(2).enumerate() {
                let (a, b) = (&pair[0], &pair[1]);
                if b.position_m < a.position_m || b.fields.serial <= a.fields.serial {
                    out.push(Violation {
                        kind: ViolationKind::SerialOrder,
                        road: id,
                        detail: format!(
                            "tags {i}/{} : serial {} at {} m then {} at {} m",
                            i + 1,
                            a.fields.serial,
                            a.position_m,
                            b.fields.serial,
                            b.position_m
                        ),
                    });
                }
            }
        }
        out
    }
}

pub fn validate(map: &StreetMap) -> Vec<Violation> {
    map.validate()
}

/// JSON map document.
pub mod file {
    use super::*;

    #[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
    pub struct MapFile {
        #[serde(default)]
        pub companies: BTreeMap<String, u32>,
        #[serde(default)]
        pub conditions: BTreeMap<String, u8>,
        pub roads: Vec<RoadEntry>,
    }

    #[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
    pub struct RoadEntry {
        pub id: RoadId,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        pub name: Option<String>,
        pub length_m: f64,
        #[serde(default)]
        pub buildings: Vec<Building>,
        #[serde(default)]
        pub features: Vec<FeatureEntry>,
        #[serde(default = "default_spacing")]
        pub spacing_m: f64,
        #[serde(default = "default_serial_base")]
        pub serial_base: u32,
        #[serde(default)]
        pub serial_overrides: Vec<SerialOverride>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        pub placements: Option<Vec<PlacementEntry>>,
    }

    #[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
    pub struct FeatureEntry {
        pub condition: String,
        pub direction: DirectionCode,
        pub position_m: f64,
        pub building: u16,
    }

    #[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
    pub struct PlacementEntry {
        pub position_m: f64,
        pub hex: String,
    }

    fn default_spacing() -> f64 {
        DEFAULT_SPACING_M
    }

    fn default_serial_base() -> u32 {
        DEFAULT_SERIAL_BASE
    }

    impl MapFile {
        /// Registry from the document; names missing from `companies` are
        /// registered in order of first appearance.
        pub fn registry(&self) -> Result<Registry, MapError> {
            let mut companies = NameRegistry::from_map(sgln::company_capacity(), &self.companies)?;
            let conditions = if self.conditions.is_empty() {
                ConditionRegistry::default()
            } else {
                ConditionRegistry::from_map(&self.conditions)?
            };
            let mut roads = RoadRegistry::default();
            for road in &self.roads {
                for b in &road.buildings {
                    companies.register(&b.name)?;
                }
                if let Some(name) = &road.name {
                    roads.insert(road.id, name);
                }
            }
            Ok(Registry { companies, conditions, roads })
        }

        pub fn road_specs(&self, registry: &Registry) -> Result<Vec<RoadSpec>, MapError> {
            let mut seen = Vec::new();
            self.roads
                .iter()
                .map(|entry| {
                    if seen.contains(&entry.id) {
                        return Err(MapError::DuplicateRoad(entry.id));
                    }
                    seen.push(entry.id);
                    entry.to_spec(registry)
                })
                .collect()
        }

        /// Plans every road. Existing placements are ignored and recomputed.
        pub fn plan(&self, codec: &CodecConfig) -> Result<StreetMap, MapError> {
            let registry = self.registry()?;
            let roads = self
                .road_specs(&registry)?
                .into_iter()
                .map(|spec| {
                    let placements = plan_road(&spec, &registry.companies, codec)?;
                    Ok(RoadPlan { spec, placements })
                })
                .collect::<Result<Vec<_>, MapError>>()?;
            Ok(StreetMap { registry, roads })
        }

        /// Takes placements as written. Building checks are left to
        /// [`StreetMap::validate`] so that bad documents still load.
        pub fn load(&self) -> Result<StreetMap, MapError> {
            let registry = self.registry()?;
            let mut roads = Vec::new();
            for entry in &self.roads {
                let spec = entry.to_spec(&registry)?;
                let placements = entry
                    .placements
                    .iter()
                    .flatten()
                    .map(|p| {
                        let word = TagWord::from_hex(&p.hex)?;
                        // an undecodable word keeps blank fields and surfaces as DecodeMismatch
                        let fields = sgln::decode(word).unwrap_or_default();
                        Ok(TagPlacement { position_m: p.position_m, word, fields })
                    })
                    .collect::<Result<Vec<_>, MapError>>()?;
                roads.push(RoadPlan { spec, placements });
            }
            Ok(StreetMap { registry, roads })
        }
    }

    impl RoadEntry {
        fn to_spec(&self, registry: &Registry) -> Result<RoadSpec, MapError> {
            let features = self
                .features
                .iter()
                .map(|f| {
                    let condition = registry
                        .conditions
                        .code(&f.condition)
                        .ok_or_else(|| MapError::UnknownCondition(f.condition.clone()))?;
                    Ok(RoadFeature {
                        condition,
                        direction: f.direction,
                        position_m: f.position_m,
                        building: f.building,
                    })
                })
                .collect::<Result<Vec<_>, MapError>>()?;
            Ok(RoadSpec {
                id: self.id,
                name: self.name.clone(),
                length_m: self.length_m,
                buildings: self.buildings.clone(),
                features,
                spacing_m: self.spacing_m,
                serial_base: self.serial_base,
                serial_overrides: self.serial_overrides.clone(),
            })
        }
    }

    impl StreetMap {
        pub fn to_file(&self) -> MapFile {
            let roads = self
                .roads
                .iter()
                .map(|r| RoadEntry {
                    id: r.spec.id,
                    name: r.spec.name.clone(),
                    length_m: r.spec.length_m,
                    buildings: r.spec.buildings.clone(),
                    features: r
                        .spec
                        .features
                        .iter()
                        .map(|f| FeatureEntry {
                            condition: self
                                .registry
                                .conditions
                                .name(f.condition)
                                .map(str::to_string)
                                .unwrap_or_else(|| f.condition.0.to_string()),
                            direction: f.direction,
                            position_m: f.position_m,
                            building: f.building,
                        })
                        .collect(),
                    spacing_m: r.spec.spacing_m,
                    serial_base: r.spec.serial_base,
                    serial_overrides: r.spec.serial_overrides.clone(),
                    placements: Some(
                        r.placements
                            .iter()
                            .map(|p| PlacementEntry { position_m: p.position_m, hex: p.word.to_hex() })
                            .collect(),
                    ),
                })
                .collect();
            MapFile {
                companies: self.registry.companies.to_map(),
                conditions: self.registry.conditions.to_map(),
                roads,
            }
        }
    }
}
