pub mod algebra;
pub mod formula;
pub mod qe;
pub mod realroots;
pub mod runtime;
pub mod smtlib;
pub mod synth;
pub mod cli;
