//! Ordinal level-set analysis of finite sequences on linear and circular
//! domains: flats, sublevel/superlevel filtrations, merge trees, barcodes and
//! box-snake surgery.

pub mod barcode;
pub mod boxsnake;
pub mod cli;
pub mod domain;
mod dsu;
pub mod error;
pub mod filtration;
pub mod flats;
pub mod generate;
pub mod io;
pub mod oracle;
pub mod suite;

pub use barcode::{Bar, Barcode, LabeledBar, Rule};
pub use boxsnake::{BoxKind, BoxSnake, Snake, SnakeBox};
pub use domain::{Betti, Domain, IndexSubset, LevelUniverse, OrderedSequence, Rank};
pub use error::{Error, Result};
pub use filtration::{Direction, Filtration, MergeTree};
pub use flats::{Flat, FlatClass, FlatRun};
