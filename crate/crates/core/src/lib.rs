//! Exact GF(2) computations for differential graded Hopf algebras: bar
//! constructions, Gerstenhaber-Schack cohomology, deformation triviality and
//! order-4 homotopy transfer.

pub mod bar;
pub mod demos;
pub mod error;
pub mod gf2;
pub mod graded;
pub mod gs;
pub mod presentation;
pub mod report;
pub mod transfer;
pub mod triviality;
pub mod weights;

pub use bar::{bar_basis, hga_relations_check, homology, BarComplex, BarHomology};
pub use demos::{example4_report, loopspace_report, DemoOutcome, LoopOptions, Pipeline};
pub use error::{Error, Result};
pub use gf2::{homology_of_pair, kernel_basis, rref, solve_affine, BitMatrix, BitVec, Homology, SpanSolver};
pub use graded::{Element, Evaluate, GradedBasis, MultiMap, Tuple, Weight};
pub use gs::{cocycle_checks, d_squared_check, parse_cochain, total_d, GSCochain};
pub use presentation::{parse_presentation, AlgebraPresentation};
pub use report::{Check, RunReport, Status};
pub use transfer::{parse_pins, transfer, verify_loopspace, Pin, TransferState};
pub use triviality::{decide_triviality, Certificate, Verdict};
