#![allow(dead_code)]

use std::fs;
use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rfid_cane::sgln::{CodecConfig, DirectionCode, TagFields};
use rfid_cane::sim::WalkScript;
use rfid_cane::street_map::file::MapFile;
use rfid_cane::street_map::{
    Building, ConditionCode, RoadFeature, RoadId, RoadSpec, Side, StreetMap,
};

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn golden(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

pub fn read_fixture(name: &str) -> String {
    fs::read_to_string(fixture(name)).unwrap()
}

pub fn map_file(name: &str) -> MapFile {
    serde_json::from_str(&read_fixture(name)).unwrap()
}

pub fn script(name: &str) -> WalkScript {
    serde_json::from_str(&read_fixture(name)).unwrap()
}

pub fn reference_map() -> StreetMap {
    map_file("reference_map.json").plan(&CodecConfig::default()).unwrap()
}

pub const Y_SUB_ROAD: RoadId = RoadId { main: 0, sub: 1, path: 0 };

/// reference rows A–D: (company, building number, feature direction, condition, serial).
pub const REFERENCE_ROWS: [(&str, u16, DirectionCode, ConditionCode, u32); 4] = [
    ("M shop", 2, DirectionCode::Forward, ConditionCode::NONE, 30),
    ("N company", 4, DirectionCode::Right, ConditionCode::ENTRANCE, 60),
    ("N company", 4, DirectionCode::Forward, ConditionCode::CROSSWALK, 70),
    ("W office", 6, DirectionCode::Backward, ConditionCode::CROSSWALK, 71),
];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_fields(rng: &mut impl Rng) -> TagFields {
    TagFields {
        header: rng.random(),
        filter: rng.random_range(0..8),
        partition: rng.random_range(0..8),
        company_code: rng.random_range(0..1 << 18),
        tag_direction: DirectionCode::from_bits(rng.random_range(0..4)),
        main_road: rng.random_range(0..64),
        sub_road: rng.random_range(0..128),
        path: rng.random(),
        building_number: rng.random_range(0..1024),
        feature_direction: DirectionCode::from_bits(rng.random_range(0..4)),
        road_condition: rng.random_range(0..32),
        serial: rng.random_range(0..1 << 23),
    }
}

/// A road with random buildings and features. With `sparse`, features sit
/// halfway between grid tags so neighbouring tags are at least
/// `spacing / 2` apart.
pub fn random_road(rng: &mut impl Rng, sparse: bool) -> (RoadSpec, Vec<String>) {
    let id = RoadId::new(rng.random_range(0..64), rng.random_range(1..128), rng.random());
    let spacing = if sparse { rng.random_range(5.0..12.0) } else { rng.random_range(1.0..16.0) };
    let length = rng.random_range(spacing..400.0f64);
    let mut road = RoadSpec::new(id, length);
    road.spacing_m = spacing;
    road.serial_base = rng.random_range(1..1000);

    let mut names = Vec::new();
    let mut numbers: Vec<u16> = (1..=1023).collect();
    let count = rng.random_range(1..12usize);
    for i in 0..count {
        let number = numbers.swap_remove(rng.random_range(0..numbers.len()));
        let name = format!("Company {i}");
        names.push(name.clone());
        road.buildings.push(Building {
            name,
            number,
            side: Side::for_number(number),
            position_m: rng.random_range(0.0..length),
        });
    }

    let grid = (length / spacing).floor() as usize;
    let mut used = Vec::new();
    for _ in 0..rng.random_range(0..8usize) {
        let position_m = if sparse {
            if grid == 0 {
                break;
            }
            (rng.random_range(0..grid) as f64 + 0.5) * spacing
        } else {
            (rng.random_range(0.0..length) * 10.0).floor() / 10.0
        };
        if used.iter().any(|p: &f64| (p - position_m).abs() < 1e-6) {
            continue;
        }
        used.push(position_m);
        let building = road.buildings[rng.random_range(0..road.buildings.len())].number;
        road.features.push(RoadFeature {
            condition: ConditionCode(rng.random_range(1..=5)),
            direction: DirectionCode::from_bits(rng.random_range(0..4)),
            position_m,
            building,
        });
    }
    (road, names)
}
