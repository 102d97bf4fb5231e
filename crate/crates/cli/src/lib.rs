//! Command line tools and HTTP API over `campus-ar-core`.
//!
//! The API keeps the campus graph and staff directory in one immutable
//! [`api::Snapshot`]; `/api/reload` builds a fresh snapshot from disk and swaps
//! it in atomically.

pub mod api;
pub mod cli;
pub mod config;
pub mod server;

pub use api::{ApiError, RouteResponse, Snapshot};
pub use cli::run;
pub use config::{AppConfig, LogLevel};
pub use server::{router, AppState};
