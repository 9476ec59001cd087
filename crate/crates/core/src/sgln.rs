//! 96-bit road tag word derived from the EPC SGLN-96 layout.
//!
//! The company prefix, location reference and extension component of SGLN-96
//! are subdivided into nine application fields. Packing is MSB-first in table
//! order:
//!
//! ```txt
//! bits   95..88 header             8
//!        87..85 filter             3
//!        84..82 partition          3
//!        81..64 company_code      18  ┐ company prefix (20)
//!        63..62 tag_direction      2  ┘
//!        61..56 main_road          6  ┐
//!        55..49 sub_road           7  │ location reference (21)
//!        48..41 path               8  ┘
//!            40 constant 1         1  ┐
//!        39..30 building_number   10  │
//!        29..28 feature_direction  2  │ extension component (41)
//!        27..23 road_condition     5  │
//!        22..0  serial            23  ┘
//! ```

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Header byte of an SGLN-96 word.
pub const DEFAULT_HEADER: u8 = 0x32;
pub const DEFAULT_FILTER: u8 = 0;
/// Partition 6: 20-bit company prefix, 21-bit location reference.
pub const DEFAULT_PARTITION: u8 = 6;

/// Bit position of the extension component's constant leading bit.
pub const EXTENSION_BIT: u32 = 40;
pub const WORD_BITS: u32 = 96;
pub const HEX_LEN: usize = 24;

const WORD_MASK: u128 = (1u128 << WORD_BITS) - 1;

/// One packed field: name, width in bits, and shift of its least significant bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FieldSpec {
    pub name: &'static str,
    pub width: u32,
    pub shift: u32,
}

impl FieldSpec {
    const fn new(name: &'static str, width: u32, shift: u32) -> Self {
        Self { name, width, shift }
    }

    pub const fn max(&self) -> u32 {
        ((1u64 << self.width) - 1) as u32
    }

    pub const fn capacity(&self) -> u64 {
        1u64 << self.width
    }

    fn mask(&self) -> u128 {
        (1u128 << self.width) - 1
    }
}

pub const HEADER: FieldSpec = FieldSpec::new("header", 8, 88);
pub const FILTER: FieldSpec = FieldSpec::new("filter", 3, 85);
pub const PARTITION: FieldSpec = FieldSpec::new("partition", 3, 82);
pub const COMPANY_CODE: FieldSpec = FieldSpec::new("company_code", 18, 64);
pub const TAG_DIRECTION: FieldSpec = FieldSpec::new("tag_direction", 2, 62);
pub const MAIN_ROAD: FieldSpec = FieldSpec::new("main_road", 6, 56);
pub const SUB_ROAD: FieldSpec = FieldSpec::new("sub_road", 7, 49);
pub const PATH: FieldSpec = FieldSpec::new("path", 8, 41);
pub const EXTENSION_FLAG: FieldSpec = FieldSpec::new("extension_bit", 1, EXTENSION_BIT);
pub const BUILDING_NUMBER: FieldSpec = FieldSpec::new("building_number", 10, 30);
pub const FEATURE_DIRECTION: FieldSpec = FieldSpec::new("feature_direction", 2, 28);
pub const ROAD_CONDITION: FieldSpec = FieldSpec::new("road_condition", 5, 23);
pub const SERIAL: FieldSpec = FieldSpec::new("serial", 23, 0);

/// Every packed field, most significant first.
pub const LAYOUT: [FieldSpec; 13] = [
    HEADER,
    FILTER,
    PARTITION,
    COMPANY_CODE,
    TAG_DIRECTION,
    MAIN_ROAD,
    SUB_ROAD,
    PATH,
    EXTENSION_FLAG,
    BUILDING_NUMBER,
    FEATURE_DIRECTION,
    ROAD_CONDITION,
    SERIAL,
];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodecError {
    #[error("field `{0}` exceeds its bit width")]
    FieldOverflow(&'static str),
    #[error("extension component leading bit (bit 40) is not set")]
    BadExtensionBit,
    #[error("header {found:#04x} does not match expected {expected:#04x}")]
    BadHeader { expected: u8, found: u8 },
    #[error("tag word must be exactly {HEX_LEN} hex characters, got {0}")]
    BadLength(usize),
    #[error("invalid hex character {0:?}")]
    BadCharacter(char),
    #[error("value does not fit in 96 bits")]
    WordTooWide,
    #[error("unknown direction {0:?}")]
    UnknownDirection(String),
}

/// Two-bit direction code. Complementary directions are bitwise complements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
#[repr(u8)]
pub enum DirectionCode {
    Right = 0b00,
    Backward = 0b01,
    Forward = 0b10,
    Left = 0b11,
}

impl DirectionCode {
    pub const ALL: [DirectionCode; 4] = [
        DirectionCode::Right,
        DirectionCode::Backward,
        DirectionCode::Forward,
        DirectionCode::Left,
    ];

    pub const fn bits(self) -> u8 {
        self as u8
    }

    /// Low two bits of `bits`; higher bits are ignored.
    pub const fn from_bits(bits: u8) -> Self {
        match bits & 0b11 {
            0b00 => DirectionCode::Right,
            0b01 => DirectionCode::Backward,
            0b10 => DirectionCode::Forward,
            _ => DirectionCode::Left,
        }
    }

    pub const fn flip(self) -> Self {
        Self::from_bits(!self.bits())
    }

    pub const fn name(self) -> &'static str {
        match self {
            DirectionCode::Right => "right",
            DirectionCode::Backward => "backward",
            DirectionCode::Forward => "forward",
            DirectionCode::Left => "left",
        }
    }

    /// Single-letter form used on the display.
    pub const fn letter(self) -> char {
        match self {
            DirectionCode::Right => 'R',
            DirectionCode::Backward => 'B',
            DirectionCode::Forward => 'F',
            DirectionCode::Left => 'L',
        }
    }
}

/// Bitwise NOT restricted to two bits: Right↔Left, Forward↔Backward.
pub fn flip_direction(d: DirectionCode) -> DirectionCode {
    d.flip()
}

impl fmt::Display for DirectionCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DirectionCode {
    type Err = CodecError;

    /// Accepts names (`right`, `back`, ...), single letters, or the two-bit code (`00`..`11`).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "right" | "r" | "00" => Ok(DirectionCode::Right),
            "backward" | "back" | "b" | "01" => Ok(DirectionCode::Backward),
            "forward" | "f" | "10" => Ok(DirectionCode::Forward),
            "left" | "l" | "11" => Ok(DirectionCode::Left),
            _ => Err(CodecError::UnknownDirection(s.to_string())),
        }
    }
}

/// Decoded contents of a tag word.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TagFields {
    #[serde(default = "default_header")]
    pub header: u8,
    #[serde(default)]
    pub filter: u8,
    #[serde(default = "default_partition")]
    pub partition: u8,
    pub company_code: u32,
    /// Side of the building relative to the tag, seen walking the positive direction.
    pub tag_direction: DirectionCode,
    pub main_road: u8,
    pub sub_road: u8,
    pub path: u8,
    pub building_number: u16,
    /// Direction of the road condition, seen walking the positive direction.
    pub feature_direction: DirectionCode,
    pub road_condition: u8,
    pub serial: u32,
}

fn default_header() -> u8 {
    DEFAULT_HEADER
}

fn default_partition() -> u8 {
    DEFAULT_PARTITION
}

impl Default for TagFields {
    fn default() -> Self {
        Self {
            header: DEFAULT_HEADER,
            filter: DEFAULT_FILTER,
            partition: DEFAULT_PARTITION,
            company_code: 0,
            tag_direction: DirectionCode::Right,
            main_road: 0,
            sub_road: 0,
            path: 0,
            building_number: 0,
            feature_direction: DirectionCode::Right,
            road_condition: 0,
            serial: 0,
        }
    }
}

impl TagFields {
    /// Returns the first field (in layout order) that does not fit its width.
    pub fn check_widths(&self) -> Result<(), CodecError> {
        let checks: [(FieldSpec, u32); 9] = [
            (FILTER, self.filter.into()),
            (PARTITION, self.partition.into()),
            (COMPANY_CODE, self.company_code),
            (MAIN_ROAD, self.main_road.into()),
            (SUB_ROAD, self.sub_road.into()),
            (PATH, self.path.into()),
            (BUILDING_NUMBER, self.building_number.into()),
            (ROAD_CONDITION, self.road_condition.into()),
            (SERIAL, self.serial),
        ];
        match checks.iter().find(|(spec, v)| *v > spec.max()) {
            Some((spec, _)) => Err(CodecError::FieldOverflow(spec.name)),
            None => Ok(()),
        }
    }
}

/// A 96-bit tag word. Canonical text form is 24 uppercase hex digits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct TagWord(u128);

impl TagWord {
    pub fn from_bits(bits: u128) -> Result<Self, CodecError> {
        if bits & !WORD_MASK != 0 {
            return Err(CodecError::WordTooWide);
        }
        Ok(Self(bits))
    }

    pub const fn bits(self) -> u128 {
        self.0
    }

    pub fn bit(self, index: u32) -> bool {
        index < WORD_BITS && (self.0 >> index) & 1 == 1
    }

    /// Toggles one bit; indices outside the word are ignored.
    pub fn with_bit_flipped(self, index: u32) -> Self {
        if index >= WORD_BITS {
            return self;
        }
        Self(self.0 ^ (1u128 << index))
    }

    fn get(self, spec: FieldSpec) -> u32 {
        ((self.0 >> spec.shift) & spec.mask()) as u32
    }

    pub fn to_hex(self) -> String {
        format!("{:024X}", self.0)
    }

    pub fn from_hex(text: &str) -> Result<Self, CodecError> {
        let len = text.chars().count();
        if len != HEX_LEN {
            return Err(CodecError::BadLength(len));
        }
        let mut bits = 0u128;
        for c in text.chars() {
            let digit = c.to_digit(16).ok_or(CodecError::BadCharacter(c))?;
            bits = (bits << 4) | u128::from(digit);
        }
        Ok(Self(bits))
    }
}

impl fmt::Display for TagWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl FromStr for TagWord {
    type Err = CodecError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::from_hex(s)
    }
}

impl Serialize for TagWord {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_hex())
    }
}

impl<'de> Deserialize<'de> for TagWord {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        Self::from_hex(&text).map_err(serde::de::Error::custom)
    }
}

pub fn to_hex(word: TagWord) -> String {
    word.to_hex()
}

pub fn from_hex(text: &str) -> Result<TagWord, CodecError> {
    TagWord::from_hex(text)
}

/// Packs `fields` into a word. The extension bit is always forced to 1.
pub fn encode(fields: &TagFields) -> Result<TagWord, CodecError> {
    fields.check_widths()?;
    let values: [(FieldSpec, u32); 13] = [
        (HEADER, fields.header.into()),
        (FILTER, fields.filter.into()),
        (PARTITION, fields.partition.into()),
        (COMPANY_CODE, fields.company_code),
        (TAG_DIRECTION, fields.tag_direction.bits().into()),
        (MAIN_ROAD, fields.main_road.into()),
        (SUB_ROAD, fields.sub_road.into()),
        (PATH, fields.path.into()),
        (EXTENSION_FLAG, 1),
        (BUILDING_NUMBER, fields.building_number.into()),
        (FEATURE_DIRECTION, fields.feature_direction.bits().into()),
        (ROAD_CONDITION, fields.road_condition.into()),
        (SERIAL, fields.serial),
    ];
    let bits = values
        .iter()
        .fold(0u128, |acc, (spec, v)| acc | (u128::from(*v) << spec.shift));
    Ok(TagWord(bits))
}

/// Header check applied on decode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HeaderCheck {
    /// Any header byte is accepted.
    #[default]
    Lenient,
    /// The header must equal the given byte.
    Strict(u8),
}

/// Lenient decode: any header byte is accepted.
pub fn decode(word: TagWord) -> Result<TagFields, CodecError> {
    decode_with(word, HeaderCheck::Lenient)
}

pub fn decode_with(word: TagWord, check: HeaderCheck) -> Result<TagFields, CodecError> {
    if !word.bit(EXTENSION_BIT) {
        return Err(CodecError::BadExtensionBit);
    }
    let header = word.get(HEADER) as u8;
    if let HeaderCheck::Strict(expected) = check {
        if header != expected {
            return Err(CodecError::BadHeader { expected, found: header });
        }
    }
    Ok(TagFields {
        header,
        filter: word.get(FILTER) as u8,
        partition: word.get(PARTITION) as u8,
        company_code: word.get(COMPANY_CODE),
        tag_direction: DirectionCode::from_bits(word.get(TAG_DIRECTION) as u8),
        main_road: word.get(MAIN_ROAD) as u8,
        sub_road: word.get(SUB_ROAD) as u8,
        path: word.get(PATH) as u8,
        building_number: word.get(BUILDING_NUMBER) as u16,
        feature_direction: DirectionCode::from_bits(word.get(FEATURE_DIRECTION) as u8),
        road_condition: word.get(ROAD_CONDITION) as u8,
        serial: word.get(SERIAL),
    })
}

/// Constant SGLN fields stamped on every planned tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct CodecConfig {
    pub header: u8,
    pub filter: u8,
    pub partition: u8,
    /// Reject words whose header differs from `header`.
    pub strict_header: bool,
}

impl Default for CodecConfig {
    fn default() -> Self {
        Self {
            header: DEFAULT_HEADER,
            filter: DEFAULT_FILTER,
            partition: DEFAULT_PARTITION,
            strict_header: false,
        }
    }
}

impl CodecConfig {
    /// All-zero application fields carrying this configuration's constants.
    pub fn blank_fields(&self) -> TagFields {
        TagFields {
            header: self.header,
            filter: self.filter,
            partition: self.partition,
            ..TagFields::default()
        }
    }

    pub fn header_check(&self) -> HeaderCheck {
        if self.strict_header {
            HeaderCheck::Strict(self.header)
        } else {
            HeaderCheck::Lenient
        }
    }

    pub fn decode(&self, word: TagWord) -> Result<TagFields, CodecError> {
        decode_with(word, self.header_check())
    }
}

/// Number of distinct company codes a word can carry.
pub const fn company_capacity() -> u64 {
    COMPANY_CODE.capacity()
}

/// Number of distinct (main road, sub road, path) triples a word can carry.
pub const fn road_capacity() -> u64 {
    MAIN_ROAD.capacity() * SUB_ROAD.capacity() * PATH.capacity()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    // Frozen from tests/oracles/pack_oracle.py.
    const ORACLE_ZERO: &str = "321800000000010000000000";
    const ORACLE_BARE: &str = "000000000000010000000000";
    const ORACLE_TAG_B: &str = "32180002000201010080003C";
    const ORACLE_TAG_C: &str = "321800020002010121800046";

    fn reference_b() -> TagFields {
        TagFields {
            company_code: 2,
            tag_direction: DirectionCode::Right,
            sub_road: 1,
            building_number: 4,
            feature_direction: DirectionCode::Right,
            road_condition: 1,
            serial: 60,
            ..TagFields::default()
        }
    }

    #[test]
    fn widths_cover_the_word() {
        assert_eq!(LAYOUT.iter().map(|f| f.width).sum::<u32>(), WORD_BITS);
        let mut next = WORD_BITS;
        for spec in LAYOUT {
            assert_eq!(spec.shift + spec.width, next, "{} is not contiguous", spec.name);
            next = spec.shift;
        }
        assert_eq!(next, 0);
    }

    #[test]
    fn zero_fields_only_set_extension_bit() {
        let bare = TagFields { header: 0, partition: 0, ..TagFields::default() };
        let word = encode(&bare).unwrap();
        assert_eq!(word.bits(), 1u128 << EXTENSION_BIT);
        assert_eq!(word.to_hex(), ORACLE_BARE);
        assert_eq!(encode(&TagFields::default()).unwrap().to_hex(), ORACLE_ZERO);
    }

    #[test]
    fn reference_words_match_oracle() {
        assert_eq!(encode(&reference_b()).unwrap().to_hex(), ORACLE_TAG_B);
        let c = decode(TagWord::from_hex(ORACLE_TAG_C).unwrap()).unwrap();
        assert_eq!(c.road_condition, 3);
        assert_eq!(c.serial, 70);
        assert_eq!(c.feature_direction, DirectionCode::Forward);
        assert_eq!(c.company_code, 2);
        assert_eq!(c.building_number, 4);
    }

    #[test]
    fn overflow_names_the_field() {
        let f = TagFields { company_code: 1 << 18, ..TagFields::default() };
        assert_eq!(encode(&f), Err(CodecError::FieldOverflow("company_code")));
        let f = TagFields { serial: 1 << 23, ..TagFields::default() };
        assert_eq!(encode(&f), Err(CodecError::FieldOverflow("serial")));
        let f = TagFields { filter: 8, ..TagFields::default() };
        assert_eq!(encode(&f), Err(CodecError::FieldOverflow("filter")));
        let f = TagFields { road_condition: 32, ..TagFields::default() };
        assert_eq!(encode(&f), Err(CodecError::FieldOverflow("road_condition")));
        let f = TagFields { building_number: 1024, ..TagFields::default() };
        assert_eq!(encode(&f), Err(CodecError::FieldOverflow("building_number")));
    }

    #[test]
    fn cleared_extension_bit_is_rejected() {
        let word = encode(&reference_b()).unwrap().with_bit_flipped(EXTENSION_BIT);
        assert_eq!(decode(word), Err(CodecError::BadExtensionBit));
    }

    #[test]
    fn strict_header() {
        let word = encode(&TagFields { header: 0x30, ..reference_b() }).unwrap();
        assert!(decode(word).is_ok());
        assert_eq!(
            decode_with(word, HeaderCheck::Strict(DEFAULT_HEADER)),
            Err(CodecError::BadHeader { expected: 0x32, found: 0x30 })
        );
        let word = encode(&reference_b()).unwrap();
        assert!(decode_with(word, HeaderCheck::Strict(DEFAULT_HEADER)).is_ok());
    }

    #[test]
    fn direction_codes() {
        assert_eq!(DirectionCode::Right.bits(), 0b00);
        assert_eq!(DirectionCode::Left.bits(), 0b11);
        assert_eq!(DirectionCode::Forward.bits(), 0b10);
        assert_eq!(DirectionCode::Backward.bits(), 0b01);
        assert_eq!(flip_direction(DirectionCode::Right), DirectionCode::Left);
        assert_eq!(flip_direction(DirectionCode::Forward), DirectionCode::Backward);
        for d in DirectionCode::ALL {
            assert_eq!(d.flip().flip(), d);
            assert_ne!(d.flip(), d);
            assert_eq!(d.name().parse::<DirectionCode>().unwrap(), d);
        }
        assert_eq!("back".parse::<DirectionCode>().unwrap(), DirectionCode::Backward);
        assert!("up".parse::<DirectionCode>().is_err());
    }

    #[test]
    fn hex_edges() {
        assert_eq!(TagWord::default().to_hex(), "000000000000000000000000");
        assert_eq!(from_hex("00000000000000000000000"), Err(CodecError::BadLength(23)));
        assert_eq!(from_hex("0000000000000000000000000"), Err(CodecError::BadLength(25)));
        assert_eq!(from_hex("00000000000000000000000G"), Err(CodecError::BadCharacter('G')));
        assert_eq!(from_hex(&ORACLE_TAG_B.to_lowercase()).unwrap().to_hex(), ORACLE_TAG_B);
        // bit 95 is the top bit of the first character
        assert_eq!(from_hex("800000000000000000000000").unwrap().bits(), 1u128 << 95);
        assert_eq!(TagWord::from_bits(1u128 << 96), Err(CodecError::WordTooWide));
    }

    #[test]
    fn capacities() {
        assert_eq!(company_capacity(), 262_144);
        assert_eq!(road_capacity(), 2_097_152);
    }

    fn direction() -> impl Strategy<Value = DirectionCode> {
        (0u8..4).prop_map(DirectionCode::from_bits)
    }

    prop_compose! {
        fn valid_fields()(
            header in any::<u8>(),
            filter in 0u8..8,
            partition in 0u8..8,
            company_code in 0u32..(1 << 18),
            tag_direction in direction(),
            main_road in 0u8..64,
            sub_road in 0u8..128,
            path in any::<u8>(),
            building_number in 0u16..1024,
            feature_direction in direction(),
            road_condition in 0u8..32,
            serial in 0u32..(1 << 23),
        ) -> TagFields {
            TagFields {
                header, filter, partition, company_code, tag_direction, main_road, sub_road,
                path, building_number, feature_direction, road_condition, serial,
            }
        }
    }

    proptest! {
        #[test]
        fn decode_inverts_encode(f in valid_fields()) {
            let word = encode(&f).unwrap();
            prop_assert!(word.bit(EXTENSION_BIT));
            prop_assert_eq!(decode(word).unwrap(), f);
        }

        #[test]
        fn hex_round_trip(bits in any::<u128>()) {
            let word = TagWord::from_bits(bits & WORD_MASK).unwrap();
            let text = word.to_hex();
            prop_assert_eq!(text.len(), HEX_LEN);
            prop_assert!(!text.chars().any(|c| c.is_ascii_lowercase()));
            prop_assert_eq!(from_hex(&text).unwrap(), word);
        }
    }
}
