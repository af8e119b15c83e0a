//! Computational toolkit for surface braid groups and mixed braid groups:
//! group presentations, abelianized kernel actions, integer obstruction
//! systems for sections, and a triangulated witness of the geometric
//! section construction.

pub mod geometry;
pub mod intlinalg;
pub mod kernel_action;
pub mod presentations;
pub mod section_solver;
pub mod words;
