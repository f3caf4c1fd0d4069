//! Exact characters and hyperbolic length functions of curves on the
//! once-punctured torus, with a search engine for distinct curves sharing a
//! character.

pub mod acceptance;
pub mod exact;
pub mod explorer;
pub mod geometry;
pub mod harness;
pub mod intersections;
pub mod interval;
pub mod traces;
pub mod words;
