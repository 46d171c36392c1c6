//! Data files compiled into the crate, addressed as `builtin:<name>`.

pub const PREFIX: &str = "builtin:";

const FILES: &[(&str, &[u8])] = &[
    ("population/region.txt", include_bytes!("../data/population/region.txt")),
    ("population/density_1876.txt", include_bytes!("../data/population/density_1876.txt")),
    ("population/density_1936.txt", include_bytes!("../data/population/density_1936.txt")),
    ("population/schedule.csv", include_bytes!("../data/population/schedule.csv")),
];

pub fn get(name: &str) -> Option<&'static [u8]> {
    FILES.iter().find(|(n, _)| *n == name).map(|(_, b)| *b)
}

pub fn names() -> impl Iterator<Item = &'static str> {
    FILES.iter().map(|(n, _)| *n)
}
