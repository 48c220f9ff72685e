pub mod bots;
pub mod cli;
pub mod env;
pub mod fixed;
pub mod net;
pub mod render;
pub mod replay;
pub mod rng;
pub mod scenario;
pub mod sim;
pub mod tournament;
