//! Experiment runner for `fedapa-core`: config files, dataset and metric
//! file formats, a rayon client executor and the `fedapa` command line.

pub mod cli;
pub mod commands;
pub mod config;
pub mod data_io;
pub mod exec;
pub mod output;
