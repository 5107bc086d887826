pub mod circle;
pub mod cocycle;
pub mod error;
pub mod groupoid;
pub mod linalg;
pub mod validation;
pub mod algebra;
pub mod extension;
pub mod cyclic;
pub mod morita;
pub mod doc;
pub mod random;
pub mod fixtures;
pub mod report;
pub mod suite;
pub mod cli;
