pub mod diagnose;
pub mod params;
pub mod scaling;
pub mod simulate;
pub mod validate_table;
