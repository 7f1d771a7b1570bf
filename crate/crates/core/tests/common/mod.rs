#![allow(dead_code)]

pub mod phase_grid;
