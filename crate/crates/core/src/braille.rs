//! Six-dot Braille for the cane's two-line, twelve-cell display.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::reader::PedestrianMessage;

pub const LINES: usize = 2;
pub const CELLS_PER_LINE: usize = 12;
/// Handle width range of the cane, in millimeters.
pub const HANDLE_WIDTH_MM: (f64, f64) = (110.0, 120.0);

pub const UNICODE_BRAILLE_BASE: u32 = 0x2800;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BrailleError {
    #[error("unsupported character {0:?}")]
    UnsupportedCharacter(char),
    #[error("{0:?} is not a six-dot Braille pattern")]
    NotBraille(char),
    #[error("frame text must have {LINES} lines of at most {CELLS_PER_LINE} cells")]
    BadFrameText,
    #[error("profile {profile:?} has no {dimension}")]
    MissingDimension { profile: String, dimension: &'static str },
    #[error("line width needs at least one cell")]
    NoCells,
    #[error("bad measurement {0:?}")]
    BadMeasure(String),
}

/// A six-dot cell. Bit `n - 1` is dot `n`; dots 1-3 run down the left
/// column and 4-6 down the right.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct BrailleCell(u8);

impl BrailleCell {
    pub const BLANK: BrailleCell = BrailleCell(0);
    /// Dots 3-4-5-6.
    pub const NUMBER_SIGN: BrailleCell = BrailleCell(0b11_1100);

    pub fn from_bits(bits: u8) -> Option<Self> {
        (bits < 64).then_some(Self(bits))
    }

    pub fn from_dots(dots: &[u8]) -> Self {
        Self(
            dots.iter()
                .filter(|d| (1..=6).contains(*d))
                .fold(0, |acc, d| acc | 1 << (d - 1)),
        )
    }

    pub const fn bits(self) -> u8 {
        self.0
    }

    pub fn has_dot(self, dot: u8) -> bool {
        (1..=6).contains(&dot) && self.0 & (1 << (dot - 1)) != 0
    }

    pub fn dots(self) -> Vec<u8> {
        (1..=6).filter(|&d| self.has_dot(d)).collect()
    }

    fn with_dot(self, dot: u8, raised: bool) -> Self {
        let bit = 1 << (dot - 1);
        Self(if raised { self.0 | bit } else { self.0 & !bit })
    }

    pub fn is_blank(self) -> bool {
        self.0 == 0
    }

    /// The Unicode Braille Patterns block uses the same dot-to-bit order.
    pub fn to_char(self) -> char {
        char::from_u32(UNICODE_BRAILLE_BASE + u32::from(self.0)).unwrap()
    }

    pub fn from_char(c: char) -> Result<Self, BrailleError> {
        let offset = u32::from(c).wrapping_sub(UNICODE_BRAILLE_BASE);
        if offset < 64 {
            Ok(Self(offset as u8))
        } else {
            Err(BrailleError::NotBraille(c))
        }
    }
}

// Grade-1 English, letters a..z, as dot lists.
const LETTER_DOTS: [&[u8]; 26] = [
    &[1],
    &[1, 2],
    &[1, 4],
    &[1, 4, 5],
    &[1, 5],
    &[1, 2, 4],
    &[1, 2, 4, 5],
    &[1, 2, 5],
    &[2, 4],
    &[2, 4, 5],
    &[1, 3],
    &[1, 2, 3],
    &[1, 3, 4],
    &[1, 3, 4, 5],
    &[1, 3, 5],
    &[1, 2, 3, 4],
    &[1, 2, 3, 4, 5],
    &[1, 2, 3, 5],
    &[2, 3, 4],
    &[2, 3, 4, 5],
    &[1, 3, 6],
    &[1, 2, 3, 6],
    &[2, 4, 5, 6],
    &[1, 3, 4, 6],
    &[1, 3, 4, 5, 6],
    &[1, 3, 5, 6],
];

/// Cell for one character. Digits return their letter cell (1→a … 0→j);
/// the number sign is added by [`text_to_cells`].
pub fn char_to_cell(c: char) -> Result<BrailleCell, BrailleError> {
    let upper = c.to_ascii_uppercase();
    match upper {
        'A'..='Z' => Ok(BrailleCell::from_dots(LETTER_DOTS[(upper as u8 - b'A') as usize])),
        '1'..='9' => Ok(BrailleCell::from_dots(LETTER_DOTS[(upper as u8 - b'1') as usize])),
        '0' => Ok(BrailleCell::from_dots(LETTER_DOTS[9])),
        ' ' => Ok(BrailleCell::BLANK),
        '.' => Ok(BrailleCell::from_dots(&[2, 5, 6])),
        ',' => Ok(BrailleCell::from_dots(&[2])),
        _ => Err(BrailleError::UnsupportedCharacter(c)),
    }
}

pub fn is_supported(c: char) -> bool {
    char_to_cell(c).is_ok()
}

/// One cell per character, with a number sign before each run of digits.
pub fn text_to_cells(text: &str) -> Result<Vec<BrailleCell>, BrailleError> {
    let mut cells = Vec::with_capacity(text.len());
    let mut in_number = false;
    for c in text.chars() {
        let cell = char_to_cell(c)?;
        let digit = c.is_ascii_digit();
        if digit && !in_number {
            cells.push(BrailleCell::NUMBER_SIGN);
        }
        in_number = digit;
        cells.push(cell);
    }
    Ok(cells)
}

/// Whole-word replacements applied before rendering.
pub const ABBREVIATIONS: [(&str, &str); 9] = [
    ("TRAFFIC LIGHT", "LIGHT"),
    ("COMPANY", "CO"),
    ("ENTRANCE", "ENTR"),
    ("CROSSWALK", "XWALK"),
    ("STAIRS", "STAIR"),
    ("RIGHT", "R"),
    ("LEFT", "L"),
    ("FORWARD", "F"),
    ("BACKWARD", "B"),
];

/// Uppercases, collapses whitespace and applies [`ABBREVIATIONS`] word-wise.
pub fn abbreviate(text: &str) -> String {
    let words: Vec<String> = text.split_whitespace().map(|w| w.to_ascii_uppercase()).collect();
    let mut out: Vec<&str> = Vec::with_capacity(words.len());
    let mut i = 0;
    'words: while i < words.len() {
        for (long, short) in ABBREVIATIONS {
            let n = long.split(' ').count();
            if i + n <= words.len() && long.split(' ').eq(words[i..i + n].iter().map(String::as_str)) {
                out.push(short);
                i += n;
                continue 'words;
            }
        }
        out.push(&words[i]);
        i += 1;
    }
    out.join(" ")
}

pub type BrailleLine = [BrailleCell; CELLS_PER_LINE];

/// Two lines of twelve cells; unused cells are blank.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct BrailleFrame {
    pub lines: [BrailleLine; LINES],
}

impl BrailleFrame {
    pub fn cell(&self, line: usize, cell: usize) -> BrailleCell {
        self.lines[line][cell]
    }

    /// Number of leading cell positions up to the last non-blank cell.
    pub fn used_cells(&self, line: usize) -> usize {
        self.lines[line]
            .iter()
            .rposition(|c| !c.is_blank())
            .map_or(0, |i| i + 1)
    }

    fn fill_line(cells: &[BrailleCell]) -> BrailleLine {
        let mut line = [BrailleCell::BLANK; CELLS_PER_LINE];
        for (slot, cell) in line.iter_mut().zip(cells) {
            *slot = *cell;
        }
        line
    }
}

/// Abbreviated, Braille-encoded, and cut to the line budget. Characters the
/// display cannot show are skipped.
pub fn render_line(text: &str) -> Vec<BrailleCell> {
    let printable: String = abbreviate(text).chars().filter(|&c| is_supported(c)).collect();
    let mut cells = text_to_cells(&printable).expect("filtered to supported characters");
    cells.truncate(CELLS_PER_LINE);
    cells
}

pub fn render_text(line1: &str, line2: &str) -> BrailleFrame {
    BrailleFrame {
        lines: [
            BrailleFrame::fill_line(&render_line(line1)),
            BrailleFrame::fill_line(&render_line(line2)),
        ],
    }
}

pub fn render_frame(msg: &PedestrianMessage) -> BrailleFrame {
    render_text(&msg.line1, &msg.line2)
}

/// One line of Unicode Braille per display line, all twelve cells included.
pub fn frame_to_unicode(frame: &BrailleFrame) -> String {
    frame
        .lines
        .iter()
        .map(|line| line.iter().map(|c| c.to_char()).collect::<String>())
        .collect::<Vec<_>>()
        .join("\n")
}

/// Inverse of [`frame_to_unicode`]. Short lines are padded with blanks.
pub fn unicode_to_frame(text: &str) -> Result<BrailleFrame, BrailleError> {
    let lines: Vec<&str> = text.split('\n').collect();
    if lines.len() != LINES {
        return Err(BrailleError::BadFrameText);
    }
    let mut frame = BrailleFrame::default();
    for (slot, line) in frame.lines.iter_mut().zip(lines) {
        let cells = line.chars().map(BrailleCell::from_char).collect::<Result<Vec<_>, _>>()?;
        if cells.len() > CELLS_PER_LINE {
            return Err(BrailleError::BadFrameText);
        }
        *slot = BrailleFrame::fill_line(&cells);
    }
    Ok(frame)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PinAction {
    Raise,
    Lower,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PinCommand {
    pub line: u8,
    pub cell: u8,
    pub dot: u8,
    pub action: PinAction,
}

/// Raise/lower commands for exactly the dots that differ, ordered by (line, cell, dot).
pub fn pin_schedule(prev: &BrailleFrame, next: &BrailleFrame) -> Vec<PinCommand> {
    let mut out = Vec::new();
    for line in 0..LINES {
        for cell in 0..CELLS_PER_LINE {
            let (a, b) = (prev.cell(line, cell), next.cell(line, cell));
            if a == b {
                continue;
            }
            for dot in 1..=6u8 {
                match (a.has_dot(dot), b.has_dot(dot)) {
                    (false, true) => out.push(PinCommand { line: line as u8, cell: cell as u8, dot, action: PinAction::Raise }),
                    (true, false) => out.push(PinCommand { line: line as u8, cell: cell as u8, dot, action: PinAction::Lower }),
                    _ => {}
                }
            }
        }
    }
    out
}

/// Drives the pins of `frame` as `commands` say. Out-of-range commands are ignored.
pub fn apply_schedule(frame: &BrailleFrame, commands: &[PinCommand]) -> BrailleFrame {
    let mut out = *frame;
    for c in commands {
        let (line, cell) = (usize::from(c.line), usize::from(c.cell));
        if line < LINES && cell < CELLS_PER_LINE && (1..=6).contains(&c.dot) {
            let slot = &mut out.lines[line][cell];
            *slot = slot.with_dot(c.dot, c.action == PinAction::Raise);
        }
    }
    out
}

/// A table measurement: exact, a range, or a one-sided bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Measure {
    Exact(f64),
    Range(f64, f64),
    AtLeast(f64),
    MoreThan(f64),
}

impl Measure {
    /// Single value for arithmetic: the midpoint of a range, the bound of a bound.
    pub fn nominal(self) -> f64 {
        match self {
            Measure::Exact(v) | Measure::AtLeast(v) | Measure::MoreThan(v) => v,
            Measure::Range(lo, hi) => (lo + hi) / 2.0,
        }
    }
}

impl FromStr for Measure {
    type Err = BrailleError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || BrailleError::BadMeasure(s.to_string());
        let num = |t: &str| t.trim().parse::<f64>().map_err(|_| bad());
        let t = s.trim();
        let m = if let Some(rest) = t.strip_prefix(">=").or_else(|| t.strip_prefix('≥')) {
            Measure::AtLeast(num(rest)?)
        } else if let Some(rest) = t.strip_prefix('>') {
            Measure::MoreThan(num(rest)?)
        } else if let Some((lo, hi)) = t.split_once('-') {
            Measure::Range(num(lo)?, num(hi)?)
        } else {
            Measure::Exact(num(t)?)
        };
        Ok(m)
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Measure::Exact(v) => write!(f, "{v}"),
            Measure::Range(lo, hi) => write!(f, "{lo} - {hi}"),
            Measure::AtLeast(v) => write!(f, ">={v}"),
            Measure::MoreThan(v) => write!(f, ">{v}"),
        }
    }
}

impl Serialize for Measure {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Measure {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        String::deserialize(deserializer)?.parse().map_err(serde::de::Error::custom)
    }
}

/// Physical cell geometry. Absent entries are unknown, not zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimensionProfile {
    pub name: String,
    #[serde(rename = "Horizontal dot to dot (mm)", default, skip_serializing_if = "Option::is_none")]
    pub horizontal_dot_mm: Option<Measure>,
    #[serde(rename = "Vertical dot to dot (mm)", default, skip_serializing_if = "Option::is_none")]
    pub vertical_dot_mm: Option<Measure>,
    #[serde(rename = "Cell to cell (mm)", default, skip_serializing_if = "Option::is_none")]
    pub cell_to_cell_mm: Option<Measure>,
    #[serde(rename = "Blank space between cells (mm)", default, skip_serializing_if = "Option::is_none")]
    pub cell_gap_mm: Option<Measure>,
    #[serde(rename = "Line to line (mm)", default, skip_serializing_if = "Option::is_none")]
    pub line_to_line_mm: Option<Measure>,
    #[serde(rename = "Dot base diameter (mm)", default, skip_serializing_if = "Option::is_none")]
    pub dot_diameter_mm: Option<Measure>,
    #[serde(rename = "Dot height (mm)", default, skip_serializing_if = "Option::is_none")]
    pub dot_height_mm: Option<Measure>,
}

const PROFILES_JSON: &str = include_str!("../data/braille_profiles.json");

/// The bundled profiles: the common system plus four national standards.
pub fn builtin_profiles() -> Vec<DimensionProfile> {
    serde_json::from_str(PROFILES_JSON).expect("bundled profile table is valid")
}

pub fn profile(name: &str) -> Option<DimensionProfile> {
    builtin_profiles().into_iter().find(|p| p.name.eq_ignore_ascii_case(name))
}

impl DimensionProfile {
    fn missing(&self, dimension: &'static str) -> BrailleError {
        BrailleError::MissingDimension { profile: self.name.clone(), dimension }
    }

    pub fn horizontal_mm(&self) -> Result<f64, BrailleError> {
        self.horizontal_dot_mm
            .map(Measure::nominal)
            .ok_or_else(|| self.missing("horizontal dot to dot"))
    }

    /// Blank space between the facing dots of adjacent cells.
    pub fn cell_gap(&self) -> Result<f64, BrailleError> {
        if let Some(g) = self.cell_gap_mm {
            return Ok(g.nominal());
        }
        let pitch = self.cell_to_cell_mm.ok_or_else(|| self.missing("cell spacing"))?;
        Ok(pitch.nominal() - self.horizontal_mm()?)
    }

    pub fn line_pitch(&self) -> Result<f64, BrailleError> {
        self.line_to_line_mm
            .map(Measure::nominal)
            .ok_or_else(|| self.missing("line to line"))
    }
}

/// Outer dot-center span of `cells` cells: `cells·h + (cells − 1)·g`.
pub fn line_width_mm(profile: &DimensionProfile, cells: usize) -> Result<f64, BrailleError> {
    if cells == 0 {
        return Err(BrailleError::NoCells);
    }
    let h = profile.horizontal_mm()?;
    if cells == 1 {
        return Ok(h);
    }
    let g = profile.cell_gap()?;
    Ok(cells as f64 * h + (cells - 1) as f64 * g)
}

pub fn fits_handle(width_mm: f64) -> bool {
    width_mm <= HANDLE_WIDTH_MM.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    // Standard Grade-1 chart, written out independently of LETTER_DOTS.
    const CHART: &str = "a1 b12 c14 d145 e15 f124 g1245 h125 i24 j245 k13 l123 m134 n1345 o135 \
                         p1234 q12345 r1235 s234 t2345 u136 v1236 w2456 x1346 y13456 z1356";

    fn chart() -> Vec<(char, Vec<u8>)> {
        CHART
            .split_whitespace()
            .map(|e| {
                let mut it = e.chars();
                let letter = it.next().unwrap();
                (letter, it.map(|d| d.to_digit(10).unwrap() as u8).collect())
            })
            .collect()
    }

    #[test]
    fn letters_match_the_chart() {
        for (letter, dots) in chart() {
            assert_eq!(char_to_cell(letter).unwrap().dots(), dots, "{letter}");
        }
        assert_eq!(char_to_cell('A').unwrap().dots(), [1]);
        assert_eq!(char_to_cell(' ').unwrap(), BrailleCell::BLANK);
        assert_eq!(char_to_cell('@'), Err(BrailleError::UnsupportedCharacter('@')));
    }

    #[test]
    fn digits_share_letter_cells() {
        for (digit, letter) in "1234567890".chars().zip("abcdefghij".chars()) {
            assert_eq!(char_to_cell(digit).unwrap(), char_to_cell(letter).unwrap());
        }
        assert_eq!(BrailleCell::NUMBER_SIGN.dots(), [3, 4, 5, 6]);
    }

    #[test]
    fn number_sign_prefixes_digit_runs() {
        let cell = |c| char_to_cell(c).unwrap();
        assert_eq!(
            text_to_cells("NO 4").unwrap(),
            [cell('n'), cell('o'), BrailleCell::BLANK, BrailleCell::NUMBER_SIGN, cell('d')]
        );
        let cells = text_to_cells("12 A3").unwrap();
        assert_eq!(cells.iter().filter(|c| **c == BrailleCell::NUMBER_SIGN).count(), 2);
        assert_eq!(cells.len(), 7);
        assert!(text_to_cells("").unwrap().is_empty());
        assert_eq!(text_to_cells("AA").unwrap(), text_to_cells("aa").unwrap());
    }

    #[test]
    fn abbreviation_table() {
        assert_eq!(abbreviate("N company 4 Y"), "N CO 4 Y");
        assert_eq!(abbreviate("ENTRANCE R"), "ENTR R");
        assert_eq!(abbreviate("traffic  light left"), "LIGHT L");
        assert_eq!(abbreviate("TRAFFIC STAIRS"), "TRAFFIC STAIR");
        assert_eq!(abbreviate("COMPANYX"), "COMPANYX");
    }

    #[test]
    fn frame_cell_counts() {
        let frame = render_text("N CO 4 Y", "ENTR R");
        // N, blank, C, O, blank, number sign, d, blank, Y
        assert_eq!(frame.used_cells(0), 9);
        assert_eq!(frame.used_cells(1), 6);
        assert_eq!(render_text("N COMPANY 4 Y", "ENTRANCE R"), frame);

        let frame = render_text("M SHOP 2 Y", "");
        assert!(frame.lines[1].iter().all(|c| c.is_blank()));

        let long = "ABCDEFGHIJKLMNOPQRSTUVWXYZ1234";
        let frame = render_text(long, "");
        assert_eq!(frame.used_cells(0), 12);
        assert_eq!(frame.lines[0].to_vec(), text_to_cells(&long[..12]).unwrap());
    }

    #[test]
    fn unicode_mapping() {
        assert_eq!(BrailleCell::BLANK.to_char(), '\u{2800}');
        assert_eq!(BrailleCell::from_dots(&[1]).to_char(), '\u{2801}');
        assert_eq!(BrailleCell::from_dots(&[1, 2, 3, 4, 5, 6]).to_char(), '\u{283F}');
        for bits in 0..64u8 {
            let cell = BrailleCell::from_bits(bits).unwrap();
            assert_eq!(BrailleCell::from_char(cell.to_char()).unwrap(), cell);
        }
        assert!(BrailleCell::from_bits(64).is_none());
        assert_eq!(BrailleCell::from_char('\u{2840}'), Err(BrailleError::NotBraille('\u{2840}')));

        let frame = render_text("N CO 4 Y", "ENTR R");
        let text = frame_to_unicode(&frame);
        assert_eq!(text.lines().count(), 2);
        assert!(text.lines().all(|l| l.chars().count() == CELLS_PER_LINE));
        assert_eq!(unicode_to_frame(&text).unwrap(), frame);
        assert_eq!(unicode_to_frame("⠁"), Err(BrailleError::BadFrameText));
    }

    #[test]
    fn pin_schedule_counts() {
        let blank = BrailleFrame::default();
        assert!(pin_schedule(&blank, &blank).is_empty());
        let mut next = blank;
        next.lines[0][0] = BrailleCell::from_dots(&[1, 2]);
        let cmds = pin_schedule(&blank, &next);
        assert_eq!(cmds.len(), 2);
        assert!(cmds.iter().all(|c| c.action == PinAction::Raise));
        assert_eq!(apply_schedule(&blank, &cmds), next);
        let back = pin_schedule(&next, &blank);
        assert!(back.iter().all(|c| c.action == PinAction::Lower));
    }

    #[test]
    fn measures_parse() {
        assert_eq!("2.5".parse::<Measure>().unwrap(), Measure::Exact(2.5));
        assert_eq!("2.5 - 2.6".parse::<Measure>().unwrap(), Measure::Range(2.5, 2.6));
        assert_eq!(">10".parse::<Measure>().unwrap(), Measure::MoreThan(10.0));
        assert_eq!("≥ 0.5".parse::<Measure>().unwrap(), Measure::AtLeast(0.5));
        assert!("wide".parse::<Measure>().is_err());
    }

    #[test]
    fn builtin_table() {
        let names: Vec<String> = builtin_profiles().into_iter().map(|p| p.name).collect();
        assert_eq!(names, ["Common", "Electronic Braille", "French", "German", "Small English"]);
        let electronic = profile("electronic braille").unwrap();
        assert!(electronic.line_to_line_mm.is_none());
        assert!(electronic.dot_diameter_mm.is_none());
        assert!(matches!(electronic.line_pitch(), Err(BrailleError::MissingDimension { .. })));
        assert_eq!(profile("German").unwrap().line_pitch().unwrap(), 10.0);
    }

    #[test]
    fn line_widths() {
        let common = profile("Common").unwrap();
        // 12 × 2.5 + 11 × 3.75
        assert!((line_width_mm(&common, 12).unwrap() - 71.25).abs() < 1e-9);
        assert!(fits_handle(71.25));
        let german = profile("German").unwrap();
        // 12 × 2.5 + 11 × (6.0 − 2.5)
        assert!((line_width_mm(&german, 12).unwrap() - 68.5).abs() < 1e-9);
        for p in builtin_profiles() {
            if let Ok(h) = p.horizontal_mm() {
                assert_eq!(line_width_mm(&p, 1).unwrap(), h);
            }
        }
        assert_eq!(line_width_mm(&common, 0), Err(BrailleError::NoCells));
        let french = profile("French").unwrap();
        assert!(matches!(line_width_mm(&french, 12), Err(BrailleError::MissingDimension { .. })));
    }

    fn frame() -> impl Strategy<Value = BrailleFrame> {
        proptest::collection::vec(0u8..64, LINES * CELLS_PER_LINE).prop_map(|bits| {
            let mut f = BrailleFrame::default();
            for (i, b) in bits.into_iter().enumerate() {
                f.lines[i / CELLS_PER_LINE][i % CELLS_PER_LINE] = BrailleCell(b);
            }
            f
        })
    }

    proptest! {
        #[test]
        fn schedule_is_minimal_and_replays(a in frame(), b in frame()) {
            let cmds = pin_schedule(&a, &b);
            let hamming: u32 = a.lines.iter().flatten().zip(b.lines.iter().flatten())
                .map(|(x, y)| (x.0 ^ y.0).count_ones())
                .sum();
            prop_assert_eq!(cmds.len() as u32, hamming);
            prop_assert_eq!(apply_schedule(&a, &cmds), b);
            let keys: Vec<_> = cmds.iter().map(|c| (c.line, c.cell, c.dot)).collect();
            let mut sorted = keys.clone();
            sorted.sort();
            prop_assert_eq!(keys, sorted);
        }

        #[test]
        fn rendered_lines_fit(line1 in "[ -~]{0,40}", line2 in "[A-Z0-9 ]{0,40}") {
            let frame = render_text(&line1, &line2);
            prop_assert!(frame.used_cells(0) <= CELLS_PER_LINE);
            prop_assert!(frame.used_cells(1) <= CELLS_PER_LINE);
            prop_assert!(render_line(&line1).len() <= CELLS_PER_LINE);
        }

        #[test]
        fn width_is_linear(n in 1usize..200) {
            let common = profile("Common").unwrap();
            let w = |k| line_width_mm(&common, k).unwrap();
            prop_assert!(w(n + 1) > w(n));
            prop_assert!((w(n + 1) - w(n) - 6.25).abs() < 1e-9);
        }
    }
}
