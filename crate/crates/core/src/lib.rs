pub mod corpus;
pub mod creal;
pub mod formulas;
pub mod kernel;
pub mod majorizer;
pub mod pipeline;
pub mod ust;
pub mod verifier;
