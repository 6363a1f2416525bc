pub mod atlas;
pub mod cli;
pub mod farey;
pub mod fixtures;
pub mod invariants;
pub mod llc;
pub mod negcable;
pub mod paths;
pub mod poscable;
pub mod render;
