//! RFID wayfinding for a smart white cane.
//!
//! Road-side passive tags carry a 96-bit word laid out after EPC SGLN-96
//! ([`sgln`]). Tags are planned along roads with serial numbers rising in the
//! positive direction ([`street_map`]). The cane infers the walking direction
//! from consecutive serials and turns each read into a two-line message
//! ([`reader`]) shown on a twelve-cell refreshable Braille display
//! ([`braille`]). [`sim`] ties everything together in a deterministic walk
//! with a battery / solar-cell power supply.

pub mod braille;
pub mod cli;
pub mod reader;
pub mod sgln;
pub mod sim;
pub mod street_map;

pub use reader::{Heading, PedestrianMessage, ReaderState};
pub use sgln::{decode, encode, DirectionCode, TagFields, TagWord};
pub use street_map::{RoadId, StreetMap};
