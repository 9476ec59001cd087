//! Cane-side tag analysis.
//!
//! Decoded reads go into a bounded FIFO. The walking direction is inferred
//! from the last two distinct serials on the current road: rising serials mean
//! the pedestrian walks the positive direction, falling serials the negative
//! one. Directions on the tag are stored for the positive direction, so when
//! walking the other way both are complemented before being shown.

use std::collections::VecDeque;
use std::num::NonZeroUsize;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sgln::{flip_direction, DirectionCode, TagFields};
use crate::street_map::{ConditionCode, Registry, RoadId};

pub const DEFAULT_QUEUE_CAPACITY: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Heading {
    Positive,
    Negative,
    Unknown,
}

impl Heading {
    pub fn reversed(self) -> Self {
        match self {
            Heading::Positive => Heading::Negative,
            Heading::Negative => Heading::Positive,
            Heading::Unknown => Heading::Unknown,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Confidence {
    Verified,
    Unverified,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MessageError {
    #[error("no registry entry for company code {0}")]
    UnknownCompany(u32),
    #[error("no registry entry for road condition {0}")]
    UnknownCondition(u8),
}

/// Text for the two display lines, before Braille encoding.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PedestrianMessage {
    pub line1: String,
    pub line2: String,
    pub confidence: Confidence,
    pub heading: Heading,
    /// Building side after direction resolution.
    pub tag_direction: DirectionCode,
    /// Condition and its resolved direction, when the tag marks one.
    pub feature: Option<(ConditionCode, DirectionCode)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReaderState {
    queue: VecDeque<TagFields>,
    capacity: NonZeroUsize,
    heading: Heading,
    road: Option<RoadId>,
}

impl Default for ReaderState {
    fn default() -> Self {
        Self::new(NonZeroUsize::new(DEFAULT_QUEUE_CAPACITY).unwrap())
    }
}

impl ReaderState {
    pub fn new(capacity: NonZeroUsize) -> Self {
        Self {
            queue: VecDeque::with_capacity(capacity.get()),
            capacity,
            heading: Heading::Unknown,
            road: None,
        }
    }

    pub fn heading(&self) -> Heading {
        self.heading
    }

    pub fn road(&self) -> Option<RoadId> {
        self.road
    }

    pub fn capacity(&self) -> usize {
        self.capacity.get()
    }

    /// Buffered reads, oldest first.
    pub fn reads(&self) -> impl ExactSizeIterator<Item = &TagFields> {
        self.queue.iter()
    }

    pub fn last(&self) -> Option<&TagFields> {
        self.queue.back()
    }

    /// Advances the state by one read and composes the message for it.
    ///
    /// A read repeating the previous serial on the same road changes nothing
    /// and yields no message.
    pub fn ingest(
        mut self,
        fields: TagFields,
        registry: &Registry,
    ) -> Result<(ReaderState, Option<PedestrianMessage>), MessageError> {
        let road = RoadId::of(&fields);
        let previous = self.last().filter(|_| self.road == Some(road)).map(|f| f.serial);
        match previous {
            Some(serial) if serial == fields.serial => return Ok((self, None)),
            Some(serial) => self.heading = infer_heading(serial, fields.serial),
            None => {
                self.heading = Heading::Unknown;
                self.road = Some(road);
            }
        }
        if self.queue.len() == self.capacity.get() {
            self.queue.pop_front();
        }
        self.queue.push_back(fields);
        let message = compose_message(&fields, self.heading, registry)?;
        Ok((self, Some(message)))
    }
}

/// Heading implied by two serials read on the same road.
pub fn infer_heading(prev_serial: u32, cur_serial: u32) -> Heading {
    use std::cmp::Ordering::*;
    match cur_serial.cmp(&prev_serial) {
        Greater => Heading::Positive,
        Less => Heading::Negative,
        Equal => Heading::Unknown,
    }
}

/// (tag direction, feature direction) as seen by the pedestrian.
pub fn resolve_directions(fields: &TagFields, heading: Heading) -> (DirectionCode, DirectionCode) {
    match heading {
        Heading::Negative => (
            flip_direction(fields.tag_direction),
            flip_direction(fields.feature_direction),
        ),
        Heading::Positive | Heading::Unknown => (fields.tag_direction, fields.feature_direction),
    }
}

/// Line 1: company, building number, road label. Line 2: condition and its
/// direction letter, or empty when the tag marks no condition.
pub fn compose_message(
    fields: &TagFields,
    heading: Heading,
    registry: &Registry,
) -> Result<PedestrianMessage, MessageError> {
    let (tag_direction, feature_direction) = resolve_directions(fields, heading);
    let road = registry.roads.label(RoadId::of(fields));

    let mut line1 = Vec::new();
    if fields.company_code != 0 {
        let company = registry
            .companies
            .name(fields.company_code)
            .ok_or(MessageError::UnknownCompany(fields.company_code))?;
        line1.push(company.trim().to_ascii_uppercase());
    }
    if fields.building_number != 0 {
        line1.push(fields.building_number.to_string());
    }
    line1.push(road);

    let condition = ConditionCode(fields.road_condition);
    let (line2, feature) = if condition.is_none() {
        (String::new(), None)
    } else {
        let name = registry
            .conditions
            .name(condition)
            .ok_or(MessageError::UnknownCondition(condition.0))?;
        (
            format!("{} {}", name.replace('_', " "), feature_direction.letter()),
            Some((condition, feature_direction)),
        )
    };

    Ok(PedestrianMessage {
        line1: line1.join(" "),
        line2,
        confidence: if heading == Heading::Unknown {
            Confidence::Unverified
        } else {
            Confidence::Verified
        },
        heading,
        tag_direction,
        feature,
    })
}
