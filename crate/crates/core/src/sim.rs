//! Deterministic walk simulation: a pedestrian moves along one road, the cane
//! reads tags in range, and each read runs through the reader protocol, the
//! Braille display and the power supply.

use std::collections::BTreeSet;
use std::num::NonZeroUsize;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::braille::{self, BrailleFrame, PinCommand};
use crate::reader::{MessageError, PedestrianMessage, ReaderState, DEFAULT_QUEUE_CAPACITY};
use crate::street_map::{RoadId, StreetMap};

pub const DEFAULT_READ_RADIUS_M: f64 = 2.0;
pub const MAX_READ_RADIUS_M: f64 = 10.0;
pub const DEFAULT_TICK_S: f64 = 0.5;
pub const DEFAULT_DRAW: u32 = 1;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("road {0} is not on the map")]
    UnknownRoad(RoadId),
    #[error("invalid walk script: {0}")]
    InvalidScript(String),
    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),
    #[error("invalid power state: {0}")]
    InvalidPower(String),
    #[error(transparent)]
    Message(#[from] MessageError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PowerSource {
    #[serde(rename = "LIB")]
    Lib,
    SolarCell,
}

/// Lithium-ion battery with a solar-charged fallback cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PowerState {
    pub source: PowerSource,
    pub lib_charge: u32,
    pub capacity: u32,
    pub low_threshold: u32,
    pub alarm_emitted: bool,
}

impl PowerState {
    /// Fully charged, running on the battery.
    pub fn new(capacity: u32, low_threshold: u32) -> Self {
        Self {
            source: PowerSource::Lib,
            lib_charge: capacity,
            capacity,
            low_threshold,
            alarm_emitted: false,
        }
    }

    pub fn check(&self) -> Result<(), SimError> {
        if self.lib_charge > self.capacity {
            return Err(SimError::InvalidPower(format!(
                "charge {} above capacity {}",
                self.lib_charge, self.capacity
            )));
        }
        if self.source == PowerSource::SolarCell && self.lib_charge > self.low_threshold {
            return Err(SimError::InvalidPower("on solar cell with the battery above threshold".into()));
        }
        Ok(())
    }
}

impl Default for PowerState {
    fn default() -> Self {
        Self::new(100, 10)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PowerEvent {
    LowBatteryAlarm { lib_charge: u32 },
    SourceSwitch { from: PowerSource, to: PowerSource },
}

/// Draws from the battery while it is the source. The first time the charge
/// is at or below the threshold an alarm is raised and supply moves to the
/// solar cell for good.
pub fn step_power(state: PowerState, draw: u32) -> (PowerState, Vec<PowerEvent>) {
    let mut next = state;
    let mut events = Vec::new();
    if draw == 0 || state.source != PowerSource::Lib {
        return (next, events);
    }
    next.lib_charge = state.lib_charge.saturating_sub(draw);
    if next.lib_charge <= next.low_threshold && !next.alarm_emitted {
        next.alarm_emitted = true;
        next.source = PowerSource::SolarCell;
        events.push(PowerEvent::LowBatteryAlarm { lib_charge: next.lib_charge });
        events.push(PowerEvent::SourceSwitch { from: PowerSource::Lib, to: PowerSource::SolarCell });
    }
    (next, events)
}

/// A pedestrian's timed positions along one road.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WalkScript {
    pub road: RoadId,
    #[serde(default = "default_radius")]
    pub read_radius_m: f64,
    /// `(time s, position m)`, strictly increasing in time.
    pub waypoints: Vec<(f64, f64)>,
}

fn default_radius() -> f64 {
    DEFAULT_READ_RADIUS_M
}

impl WalkScript {
    pub fn new(road: RoadId, waypoints: Vec<(f64, f64)>) -> Self {
        Self { road, read_radius_m: DEFAULT_READ_RADIUS_M, waypoints }
    }

    /// Same positions visited in reverse order over the same time span.
    pub fn reversed(&self) -> Self {
        let times: Vec<f64> = self.waypoints.iter().map(|w| w.0).collect();
        let positions = self.waypoints.iter().rev().map(|w| w.1);
        Self {
            waypoints: times.into_iter().zip(positions).collect(),
            ..self.clone()
        }
    }

    pub fn check(&self) -> Result<(), SimError> {
        if !(self.read_radius_m > 0.0 && self.read_radius_m <= MAX_READ_RADIUS_M) {
            return Err(SimError::InvalidScript(format!(
                "read radius {} m outside (0, {MAX_READ_RADIUS_M}]",
                self.read_radius_m
            )));
        }
        if self.waypoints.iter().any(|(t, p)| !t.is_finite() || !p.is_finite()) {
            return Err(SimError::InvalidScript("non-finite waypoint".into()));
        }
        if self.waypoints.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(SimError::InvalidScript("waypoint times must strictly increase".into()));
        }
        Ok(())
    }

    /// Linear interpolation; clamped to the first and last waypoint.
    pub fn position_at(&self, time: f64) -> Option<f64> {
        let first = self.waypoints.first()?;
        if time <= first.0 {
            return Some(first.1);
        }
        for w in self.waypoints.windows(2) {
            let ((t0, p0), (t1, p1)) = (w[0], w[1]);
            if time <= t1 {
                return Some(p0 + (p1 - p0) * (time - t0) / (t1 - t0));
            }
        }
        self.waypoints.last().map(|w| w.1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimConfig {
    pub tick_s: f64,
    /// Charge units drawn per read-and-display cycle.
    pub draw: u32,
    pub queue_capacity: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self { tick_s: DEFAULT_TICK_S, draw: DEFAULT_DRAW, queue_capacity: DEFAULT_QUEUE_CAPACITY }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "payload")]
pub enum Event {
    TagRead {
        road: RoadId,
        serial: u32,
        tag_position_m: f64,
        pedestrian_m: f64,
        hex: String,
    },
    Message(PedestrianMessage),
    Frame { lines: Vec<String> },
    PinCommands { commands: Vec<PinCommand> },
    LowBatteryAlarm { lib_charge: u32 },
    SourceSwitch { from: PowerSource, to: PowerSource },
}

impl Event {
    /// Tie-break order for events at the same instant.
    pub fn rank(&self) -> u8 {
        match self {
            Event::TagRead { .. } => 0,
            Event::Message(_) => 1,
            Event::Frame { .. } => 2,
            Event::PinCommands { .. } => 3,
            Event::LowBatteryAlarm { .. } => 4,
            Event::SourceSwitch { .. } => 5,
        }
    }
}

impl From<PowerEvent> for Event {
    fn from(e: PowerEvent) -> Self {
        match e {
            PowerEvent::LowBatteryAlarm { lib_charge } => Event::LowBatteryAlarm { lib_charge },
            PowerEvent::SourceSwitch { from, to } => Event::SourceSwitch { from, to },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEvent {
    pub time: f64,
    #[serde(flatten)]
    pub event: Event,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimOutput {
    pub events: Vec<TraceEvent>,
    pub power: PowerState,
    /// Completed read-and-display cycles.
    pub cycles: u32,
    pub frame: BrailleFrame,
}

/// Runs the walk and returns the trace with the end state.
pub fn run(
    map: &StreetMap,
    script: &WalkScript,
    power: PowerState,
    config: &SimConfig,
) -> Result<SimOutput, SimError> {
    let road = map.road(script.road).ok_or(SimError::UnknownRoad(script.road))?;
    script.check()?;
    power.check()?;
    if !(config.tick_s.is_finite() && config.tick_s > 0.0) {
        return Err(SimError::InvalidConfig(format!("tick {} s", config.tick_s)));
    }
    let capacity = NonZeroUsize::new(config.queue_capacity)
        .ok_or_else(|| SimError::InvalidConfig("reader queue capacity 0".into()))?;

    let mut out = SimOutput {
        events: Vec::new(),
        power,
        cycles: 0,
        frame: BrailleFrame::default(),
    };
    let (Some(&(start, _)), Some(&(end, _))) = (script.waypoints.first(), script.waypoints.last())
    else {
        return Ok(out);
    };

    let mut reader = ReaderState::new(capacity);
    // tags read and still within range
    let mut active: BTreeSet<usize> = BTreeSet::new();
    let radius = script.read_radius_m;

    for k in 0u64.. {
        let time = start + k as f64 * config.tick_s;
        if time > end + 1e-9 {
            break;
        }
        let here = script.position_at(time).expect("script has waypoints");
        let in_range = |p: f64| (p - here).abs() <= radius;

        active.retain(|&i| in_range(road.placements[i].position_m));
        let nearest = road
            .placements
            .iter()
            .enumerate()
            .filter(|(i, p)| !active.contains(i) && in_range(p.position_m))
            .min_by(|(_, a), (_, b)| {
                (a.position_m - here).abs().total_cmp(&(b.position_m - here).abs())
            });
        let Some((index, tag)) = nearest else { continue };
        active.insert(index);

        let mut push = |event: Event| out.events.push(TraceEvent { time, event });
        push(Event::TagRead {
            road: script.road,
            serial: tag.fields.serial,
            tag_position_m: tag.position_m,
            pedestrian_m: here,
            hex: tag.word.to_hex(),
        });

        let (next, message) = reader.ingest(tag.fields, &map.registry)?;
        reader = next;
        let Some(message) = message else { continue };

        let frame = braille::render_frame(&message);
        let commands = braille::pin_schedule(&out.frame, &frame);
        push(Event::Message(message));
        push(Event::Frame {
            lines: braille::frame_to_unicode(&frame).split('\n').map(str::to_string).collect(),
        });
        push(Event::PinCommands { commands });
        out.frame = frame;

        let (power, events) = step_power(out.power, config.draw);
        for e in events {
            push(e.into());
        }
        out.power = power;
        out.cycles += 1;
    }
    Ok(out)
}

pub fn simulate(
    map: &StreetMap,
    script: &WalkScript,
    power: PowerState,
    config: &SimConfig,
) -> Result<Vec<TraceEvent>, SimError> {
    run(map, script, power, config).map(|o| o.events)
}

/// One JSON object per line, newline-terminated.
pub fn to_jsonl(events: &[TraceEvent]) -> String {
    let mut out = String::new();
    for e in events {
        out.push_str(&serde_json::to_string(e).expect("trace events serialize"));
        out.push('\n');
    }
    out
}
