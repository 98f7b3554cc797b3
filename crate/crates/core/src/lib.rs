pub mod examples;
pub mod format;
pub mod linalg;
pub mod nva;
pub mod product;
pub mod quantum;
pub mod registry;
pub mod report;
pub mod series;
pub mod smash;
pub mod suite;
pub mod twist;
