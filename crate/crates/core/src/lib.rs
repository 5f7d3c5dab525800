pub mod acp;
pub mod commands;
pub mod dilation;
pub mod fixtures;
pub mod group;
pub mod group_algebra;
pub mod json;
pub mod numerics;
pub mod radon_nikodym;
