//! Batch front end for the mixed-mops pipeline: config files, matrix export and
//! verification reports.

pub mod app;
pub mod config;
pub mod export;
