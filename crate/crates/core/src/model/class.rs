use std::fmt;
use std::str::FromStr;

use crate::error::Error;

/// Object categories understood by the toolkit (nuScenes, KITTI and Lyft names).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ClassLabel {
    Car,
    Truck,
    Bus,
    Trailer,
    ConstructionVehicle,
    Pedestrian,
    Motorcycle,
    Bicycle,
    Cyclist,
    TrafficCone,
    Barrier,
    OtherVehicle,
}

impl ClassLabel {
    pub const ALL: [ClassLabel; 12] = [
        ClassLabel::Car,
        ClassLabel::Truck,
        ClassLabel::Bus,
        ClassLabel::Trailer,
        ClassLabel::ConstructionVehicle,
        ClassLabel::Pedestrian,
        ClassLabel::Motorcycle,
        ClassLabel::Bicycle,
        ClassLabel::Cyclist,
        ClassLabel::TrafficCone,
        ClassLabel::Barrier,
        ClassLabel::OtherVehicle,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ClassLabel::Car => "car",
            ClassLabel::Truck => "truck",
            ClassLabel::Bus => "bus",
            ClassLabel::Trailer => "trailer",
            ClassLabel::ConstructionVehicle => "construction_vehicle",
            ClassLabel::Pedestrian => "pedestrian",
            ClassLabel::Motorcycle => "motorcycle",
            ClassLabel::Bicycle => "bicycle",
            ClassLabel::Cyclist => "cyclist",
            ClassLabel::TrafficCone => "traffic_cone",
            ClassLabel::Barrier => "barrier",
            ClassLabel::OtherVehicle => "other_vehicle",
        }
    }

    /// Mean (dx, dy, dz) in meters as commonly used for nuScenes anchors.
    pub fn mean_size(&self) -> [f64; 3] {
        match self {
            ClassLabel::Car => [4.63, 1.97, 1.74],
            ClassLabel::Truck => [6.93, 2.51, 2.84],
            ClassLabel::Bus => [10.5, 2.94, 3.47],
            ClassLabel::Trailer => [12.29, 2.90, 3.87],
            ClassLabel::ConstructionVehicle => [6.37, 2.85, 3.19],
            ClassLabel::Pedestrian => [0.73, 0.67, 1.77],
            ClassLabel::Motorcycle => [2.11, 0.77, 1.47],
            ClassLabel::Bicycle | ClassLabel::Cyclist => [1.70, 0.60, 1.28],
            ClassLabel::TrafficCone => [0.41, 0.41, 1.07],
            ClassLabel::Barrier => [2.31, 0.50, 0.98],
            ClassLabel::OtherVehicle => [4.80, 2.10, 1.90],
        }
    }
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ClassLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.trim().to_ascii_lowercase().replace(['-', ' '], "_");
        ClassLabel::ALL
            .iter()
            .copied()
            .find(|c| c.as_str() == key)
            .ok_or_else(|| Error::validation(format!("unknown class label `{s}`")))
    }
}
