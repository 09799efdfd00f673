//! End-to-end applications of the Fréchet-derivative action: edge
//! sensitivities of exponential network centralities, and a one-parameter
//! heat-equation fit whose gradient comes from the coupled solver.

pub mod heat;
pub mod sensitivity;
