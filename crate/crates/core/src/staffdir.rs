//! Entrance-board QR payloads and the staff/advisor directory.
//!
//! A payload is a pipe-delimited record, `HCTIS1|<building>|<floor>|<node>|<staff>`,
//! where the trailing staff field may be empty. The directory is loaded from two
//! CSV files and checked against a [`CampusGraph`]; it is never mutated after
//! loading, so a relocation means loading a new directory.

use crate::navgraph::CampusGraph;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::io::Read;
use std::path::Path;
use thiserror::Error;

pub const SCHEMA_TAG: &str = "HCTIS1";
/// Longest encoded payload. Only level L fits this in a version 3 symbol;
/// level M tops out at 42 bytes.
pub const MAX_PAYLOAD_LEN: usize = 52;

const STAFF_HEADER: [&str; 5] = ["staff_id", "name", "department", "specialization", "desk_node"];
const ADVISOR_HEADER: [&str; 2] = ["student_id", "advisor_staff_id"];

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StaffLocationPayload {
    pub building: String,
    pub floor: i32,
    pub node_id: String,
    pub staff_id: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PayloadError {
    #[error("payload is {len} bytes, limit is {MAX_PAYLOAD_LEN}")]
    FieldTooLong { len: usize },
    #[error("{field} contains a character outside printable ASCII or a '|'")]
    IllegalCharacter { field: &'static str },
    #[error("{field} is empty")]
    EmptyField { field: &'static str },
    #[error("schema tag {0:?} is not {SCHEMA_TAG}")]
    BadSchemaTag(String),
    #[error("expected 5 fields, found {0}")]
    WrongFieldCount(usize),
    #[error("floor {0:?} is not an integer")]
    NonNumericFloor(String),
}

fn check_field(field: &'static str, value: &str) -> Result<(), PayloadError> {
    if value.is_empty() {
        return Err(PayloadError::EmptyField { field });
    }
    if !value.chars().all(|c| c.is_ascii_graphic() && c != '|') {
        return Err(PayloadError::IllegalCharacter { field });
    }
    Ok(())
}

impl StaffLocationPayload {
    pub fn encode(&self) -> Result<String, PayloadError> {
        encode_payload(self)
    }

    pub fn parse(s: &str) -> Result<Self, PayloadError> {
        parse_payload(s)
    }
}

pub fn encode_payload(p: &StaffLocationPayload) -> Result<String, PayloadError> {
    check_field("building", &p.building)?;
    check_field("node_id", &p.node_id)?;
    if let Some(staff) = &p.staff_id {
        check_field("staff_id", staff)?;
    }
    let s = format!(
        "{SCHEMA_TAG}|{}|{}|{}|{}",
        p.building,
        p.floor,
        p.node_id,
        p.staff_id.as_deref().unwrap_or("")
    );
    if s.len() > MAX_PAYLOAD_LEN {
        return Err(PayloadError::FieldTooLong { len: s.len() });
    }
    Ok(s)
}

pub fn parse_payload(s: &str) -> Result<StaffLocationPayload, PayloadError> {
    let fields: Vec<&str> = s.split('|').collect();
    if fields[0] != SCHEMA_TAG {
        return Err(PayloadError::BadSchemaTag(fields[0].to_owned()));
    }
    if fields.len() != 5 {
        return Err(PayloadError::WrongFieldCount(fields.len()));
    }
    if s.len() > MAX_PAYLOAD_LEN {
        return Err(PayloadError::FieldTooLong { len: s.len() });
    }
    let floor_text = fields[2];
    let digits = floor_text.strip_prefix('-').unwrap_or(floor_text);
    if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) {
        return Err(PayloadError::NonNumericFloor(floor_text.to_owned()));
    }
    let floor = floor_text
        .parse()
        .map_err(|_| PayloadError::NonNumericFloor(floor_text.to_owned()))?;
    check_field("building", fields[1])?;
    check_field("node_id", fields[3])?;
    let staff_id = match fields[4] {
        "" => None,
        staff => {
            check_field("staff_id", staff)?;
            Some(staff.to_owned())
        }
    };
    Ok(StaffLocationPayload {
        building: fields[1].to_owned(),
        floor,
        node_id: fields[3].to_owned(),
        staff_id,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StaffRecord {
    pub staff_id: String,
    pub name: String,
    pub department: String,
    pub specialization: String,
    pub desk_node: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdvisorAssignment {
    pub student_id: String,
    pub advisor_staff_id: String,
}

#[derive(Debug, Error)]
pub enum DirectoryError {
    #[error("cannot read {file}: {source}")]
    Io {
        file: String,
        source: std::io::Error,
    },
    #[error("{file} line {line}: {message}")]
    ParseError {
        file: String,
        line: u64,
        message: String,
    },
    #[error("student {0} is assigned to an advisor who is not on the staff list")]
    DanglingAdvisor(String),
    #[error("staff {0} sits at a desk node missing from the campus graph")]
    DanglingDeskNode(String),
    #[error("staff id {0} appears more than once")]
    DuplicateStaffId(String),
    #[error("student id {0} appears more than once")]
    DuplicateStudentId(String),
    #[error("unknown student {0}")]
    UnknownStudent(String),
}

/// Staff list and advisor assignments with referential integrity checked
/// against the campus graph.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Directory {
    staff: BTreeMap<String, StaffRecord>,
    advisors: BTreeMap<String, AdvisorAssignment>,
}

fn read_csv<T, R>(name: &str, reader: R, header: &[&str]) -> Result<Vec<T>, DirectoryError>
where
    T: serde::de::DeserializeOwned,
    R: Read,
{
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let parse_err = |line: u64, message: String| DirectoryError::ParseError {
        file: name.to_owned(),
        line,
        message,
    };
    let found = rdr
        .headers()
        .map_err(|e| parse_err(1, e.to_string()))?
        .clone();
    if found.is_empty() {
        return Ok(Vec::new());
    }
    if found.iter().ne(header.iter().copied()) {
        return Err(parse_err(
            1,
            format!("expected header {:?}, found {:?}", header.join(","), found),
        ));
    }
    rdr.deserialize()
        .map(|r: csv::Result<T>| {
            r.map_err(|e| {
                let line = e.position().map_or(0, |p| p.line());
                parse_err(line, e.to_string())
            })
        })
        .collect()
}

impl Directory {
    pub fn new(
        staff: Vec<StaffRecord>,
        advisors: Vec<AdvisorAssignment>,
        graph: &CampusGraph,
    ) -> Result<Self, DirectoryError> {
        let mut by_id = BTreeMap::new();
        for s in staff {
            if !graph.contains(&s.desk_node) {
                return Err(DirectoryError::DanglingDeskNode(s.staff_id));
            }
            if by_id.contains_key(&s.staff_id) {
                return Err(DirectoryError::DuplicateStaffId(s.staff_id));
            }
            by_id.insert(s.staff_id.clone(), s);
        }
        let mut by_student = BTreeMap::new();
        for a in advisors {
            if !by_id.contains_key(&a.advisor_staff_id) {
                return Err(DirectoryError::DanglingAdvisor(a.student_id));
            }
            if by_student.contains_key(&a.student_id) {
                return Err(DirectoryError::DuplicateStudentId(a.student_id));
            }
            by_student.insert(a.student_id.clone(), a);
        }
        Ok(Directory {
            staff: by_id,
            advisors: by_student,
        })
    }

    pub fn from_readers(
        staff: impl Read,
        advisors: impl Read,
        graph: &CampusGraph,
    ) -> Result<Self, DirectoryError> {
        let staff = read_csv("staff file", staff, &STAFF_HEADER)?;
        let advisors = read_csv("advisors file", advisors, &ADVISOR_HEADER)?;
        Directory::new(staff, advisors, graph)
    }

    pub fn staff(&self, staff_id: &str) -> Option<&StaffRecord> {
        self.staff.get(staff_id)
    }

    /// All staff in id order.
    pub fn all_staff(&self) -> impl Iterator<Item = &StaffRecord> {
        self.staff.values()
    }

    pub fn staff_count(&self) -> usize {
        self.staff.len()
    }

    pub fn advisor_count(&self) -> usize {
        self.advisors.len()
    }

    /// First staff member (by id) whose desk is `node`.
    pub fn staff_at_desk(&self, node: &str) -> Option<&StaffRecord> {
        self.staff.values().find(|s| s.desk_node == node)
    }

    pub fn advisor_of(&self, student_id: &str) -> Result<&StaffRecord, DirectoryError> {
        let a = self
            .advisors
            .get(student_id)
            .ok_or_else(|| DirectoryError::UnknownStudent(student_id.to_owned()))?;
        Ok(&self.staff[&a.advisor_staff_id])
    }
}

pub fn load_directory(
    staff_file: impl AsRef<Path>,
    advisors_file: impl AsRef<Path>,
    graph: &CampusGraph,
) -> Result<Directory, DirectoryError> {
    let open = |p: &Path| {
        std::fs::File::open(p).map_err(|source| DirectoryError::Io {
            file: p.display().to_string(),
            source,
        })
    };
    Directory::from_readers(
        open(staff_file.as_ref())?,
        open(advisors_file.as_ref())?,
        graph,
    )
}
