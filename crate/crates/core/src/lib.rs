pub mod cq;
pub mod error;
pub mod exec;
pub mod gamma;
pub mod harness;
pub mod mittag_leffler;
pub mod oracle;
pub mod quadrature;
pub mod solver;
pub mod source;
pub mod space;
#[cfg(test)]
mod testutil;
