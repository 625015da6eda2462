use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::model::CategoryLabel;

const RESTAURANT_ENTITIES: &[&str] = &["RESTAURANT", "FOOD", "DRINKS", "AMBIENCE", "SERVICE", "LOCATION"];
const RESTAURANT_ATTRIBUTES: &[&str] = &["GENERAL", "PRICES", "QUALITY", "STYLE_OPTIONS", "MISCELLANEOUS"];

const LAPTOP_ENTITIES: &[&str] = &[
    "LAPTOP",
    "DISPLAY",
    "KEYBOARD",
    "MOUSE",
    "MOTHERBOARD",
    "CPU",
    "FANS_COOLING",
    "PORTS",
    "MEMORY",
    "POWER_SUPPLY",
    "OPTICAL_DRIVES",
    "BATTERY",
    "GRAPHICS",
    "HARD_DISK",
    "MULTIMEDIA_DEVICES",
    "HARDWARE",
    "SOFTWARE",
    "OS",
    "WARRANTY",
    "SHIPPING",
    "SUPPORT",
    "COMPANY",
];
const LAPTOP_ATTRIBUTES: &[&str] = &[
    "GENERAL",
    "PRICE",
    "QUALITY",
    "DESIGN_FEATURES",
    "OPERATION_PERFORMANCE",
    "USABILITY",
    "PORTABILITY",
    "CONNECTIVITY",
    "MISCELLANEOUS",
];

const HOTEL_ENTITIES: &[&str] =
    &["HOTEL", "ROOMS", "FACILITIES", "ROOM_AMENITIES", "SERVICE", "LOCATION", "FOOD_DRINKS"];
const HOTEL_ATTRIBUTES: &[&str] = &[
    "GENERAL",
    "PRICE",
    "COMFORT",
    "CLEANLINESS",
    "QUALITY",
    "DESIGN_FEATURES",
    "STYLE_OPTIONS",
    "MISCELLANEOUS",
];

/// A per-domain `ENTITY#ATTRIBUTE` inventory.
///
/// Any entity may combine with any attribute. List order is kept because it
/// fixes the order in which labels are rendered into prompts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CategoryScheme {
    pub domain: String,
    pub entities: Vec<String>,
    pub attributes: Vec<String>,
}

impl CategoryScheme {
    pub const BUILTIN: [&'static str; 3] = ["restaurant", "laptop", "hotel"];

    pub fn new(domain: impl Into<String>, entities: &[&str], attributes: &[&str]) -> Self {
        Self {
            domain: domain.into(),
            entities: entities.iter().map(|e| e.to_uppercase()).collect(),
            attributes: attributes.iter().map(|a| a.to_uppercase()).collect(),
        }
    }

    pub fn restaurant() -> Self {
        Self::new("restaurant", RESTAURANT_ENTITIES, RESTAURANT_ATTRIBUTES)
    }

    pub fn laptop() -> Self {
        Self::new("laptop", LAPTOP_ENTITIES, LAPTOP_ATTRIBUTES)
    }

    pub fn hotel() -> Self {
        Self::new("hotel", HOTEL_ENTITIES, HOTEL_ATTRIBUTES)
    }

    /// Looks up a built-in scheme by domain name.
    pub fn builtin(name: &str) -> Option<Self> {
        match name.trim().to_ascii_lowercase().as_str() {
            "restaurant" | "rest" | "res" => Some(Self::restaurant()),
            "laptop" | "lap" => Some(Self::laptop()),
            "hotel" | "hot" => Some(Self::hotel()),
            _ => None,
        }
    }

    pub fn contains(&self, label: &CategoryLabel) -> bool {
        self.entities.iter().any(|e| e == label.entity())
            && self.attributes.iter().any(|a| a == label.attribute())
    }

    /// Every valid label, entity-major.
    pub fn labels(&self) -> Vec<CategoryLabel> {
        self.entities
            .iter()
            .flat_map(|e| {
                self.attributes
                    .iter()
                    .filter_map(move |a| CategoryLabel::new(e, a).ok())
            })
            .collect()
    }

    pub fn len(&self) -> usize {
        self.entities.len() * self.attributes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Labels joined with `", "`, as substituted into prompts.
    pub fn render_labels(&self) -> String {
        self.labels()
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join(", ")
    }
}
