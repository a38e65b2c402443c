pub mod acts;
pub mod belief;
pub mod dot;
pub mod error;
pub mod implicature;
pub mod term;
pub mod trace;
pub mod planner;
pub mod scenario;
