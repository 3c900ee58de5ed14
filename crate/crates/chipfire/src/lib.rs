//! Chip-firing on signed graphs.
//!
//! A signed graph assigns `+` or `-` to each edge of a simple graph. With
//! a chosen sink, its reduced signed Laplacian `L` and the reduced
//! Laplacian `M` of the underlying unsigned graph form a chip-firing
//! pair: firing a vertex moves chips along columns of `L`, while validity
//! and stability of a configuration are read off from the cone spanned by
//! the columns of `M`. This crate provides the exact linear algebra, the
//! graph and switching machinery, the chip-firing engine (stabilization,
//! critical and superstable configurations, the critical group), closed
//! forms for classic graph families, and a command-line front end.
//!
//! ```
//! use chipfire::engine::{cfg, ChipFiringPair};
//! use chipfire::fixtures::negative_triangle;
//!
//! let pair = ChipFiringPair::new(negative_triangle()).unwrap();
//! // the critical group is cyclic of order det L = 3
//! assert_eq!(pair.critical_group().order, 3.into());
//! assert_eq!(pair.enumerate_superstables().unwrap().len(), 3);
//! assert!(pair.is_critical(&cfg(&[5, 5])).unwrap());
//! ```

pub mod error;
pub mod linalg;
pub mod graph;
pub mod fixtures;
pub mod engine;
pub mod families;
pub mod cli;
