//! Core algorithms for the campus staff finder and the table-spec SQL generator.
//!
//! Two pipelines share this crate:
//!
//! - **Table specification to DDL**: [`tablespec`] normalizes OCR-extracted text and
//!   parses the fixed-format table description into a schema IR, and [`sqlgen`]
//!   renders that IR as an Oracle-style `create table` statement.
//! - **Staff finding**: [`staffdir`] encodes the staff-location payload carried by
//!   entrance-board QR codes and holds the staff/advisor directory, [`qrcode`]
//!   encodes and decodes the symbols themselves, and [`navgraph`] routes a walker
//!   across the campus graph and produces spoken-style instructions.

pub mod navgraph;
pub mod qrcode;
pub mod sqlgen;
pub mod staffdir;
pub mod tablespec;
#[cfg(feature = "testkit")]
pub mod testkit;

pub use navgraph::{
    CampusGraph, Edge, EdgeKind, NavError, Node, NodeKind, Route, RouteStep, StepAction,
};
pub use qrcode::{BitMatrix, DecodeReport, EcLevel, QrError, QrSymbolConfig, Symmetry};
pub use sqlgen::{DdlOptions, KeywordCase, SqlGenError};
pub use staffdir::{Directory, DirectoryError, PayloadError, StaffLocationPayload, StaffRecord};
pub use tablespec::{
    ColumnSpec, CompareOp, ConstraintSpec, Datatype, ParseError, RawSpecDocument, SizeSpec,
    TableSpec, Violation,
};
