//! Request handling that does not depend on HTTP: every operation takes one
//! [`Snapshot`] and returns a response value or an [`ApiError`].

use crate::config::AppConfig;
use campus_ar_core::navgraph::{load_graph, make_instructions, re_localize, shortest_route};
use campus_ar_core::staffdir::{load_directory, parse_payload};
use campus_ar_core::{
    CampusGraph, Directory, DirectoryError, NavError, Node, RouteStep, StaffLocationPayload,
    StaffRecord,
};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Graph and directory loaded together. Handlers read exactly one snapshot per
/// request, so a reload is never observed half-applied.
#[derive(Debug)]
pub struct Snapshot {
    pub graph: CampusGraph,
    pub directory: Directory,
    /// Counts successful loads, starting at 1.
    pub generation: u64,
}

impl Snapshot {
    pub fn load(cfg: &AppConfig, generation: u64) -> Result<Snapshot, ApiError> {
        let graph = load_graph(&cfg.graph_path).map_err(ApiError::from)?;
        let directory = load_directory(&cfg.staff_path, &cfg.advisors_path, &graph)?;
        Ok(Snapshot {
            graph,
            directory,
            generation,
        })
    }
}

#[derive(Debug, Error)]
pub enum ApiError {
    #[error("{0}")]
    BadRequest(String),
    #[error("unknown node {0}")]
    UnknownNode(String),
    #[error("unknown staff member {0}")]
    UnknownStaff(String),
    #[error("unknown student {0}")]
    UnknownStudent(String),
    #[error("{0}")]
    BadPayload(String),
    #[error("payload places {node} in {building} floor {floor}, the graph does not")]
    PayloadMismatch {
        node: String,
        building: String,
        floor: i32,
    },
    #[error("no route from {from} to {to}")]
    Unreachable { from: String, to: String },
    #[error("{0}")]
    InvalidRoute(String),
    #[error("reload failed: {0}")]
    LoadFailed(String),
}

impl ApiError {
    /// Machine-readable error name used in response bodies.
    pub fn code(&self) -> &'static str {
        match self {
            ApiError::BadRequest(_) => "BadRequest",
            ApiError::UnknownNode(_) => "UnknownNode",
            ApiError::UnknownStaff(_) => "UnknownStaff",
            ApiError::UnknownStudent(_) => "UnknownStudent",
            ApiError::BadPayload(_) => "BadPayload",
            ApiError::PayloadMismatch { .. } => "PayloadMismatch",
            ApiError::Unreachable { .. } => "Unreachable",
            ApiError::InvalidRoute(_) => "InvalidRoute",
            ApiError::LoadFailed(_) => "LoadFailed",
        }
    }

    /// HTTP status: 400 malformed request, 404 unknown entity, 422 otherwise.
    pub fn status(&self) -> u16 {
        match self {
            ApiError::BadRequest(_) => 400,
            ApiError::UnknownNode(_) | ApiError::UnknownStaff(_) | ApiError::UnknownStudent(_) => {
                404
            }
            _ => 422,
        }
    }
}

impl From<NavError> for ApiError {
    fn from(e: NavError) -> Self {
        match e {
            NavError::UnknownNode(id) => ApiError::UnknownNode(id),
            NavError::Unreachable { from, to } => ApiError::Unreachable { from, to },
            NavError::InvalidPath(msg) => ApiError::InvalidRoute(msg),
            other => ApiError::LoadFailed(other.to_string()),
        }
    }
}

impl From<DirectoryError> for ApiError {
    fn from(e: DirectoryError) -> Self {
        match e {
            DirectoryError::UnknownStudent(id) => ApiError::UnknownStudent(id),
            other => ApiError::LoadFailed(other.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub error: String,
    pub detail: String,
}

impl From<&ApiError> for ErrorBody {
    fn from(e: &ApiError) -> Self {
        ErrorBody {
            error: e.code().to_owned(),
            detail: e.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdvisorResponse {
    pub student_id: String,
    pub advisor: StaffRecord,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRequest {
    pub payload: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanResponse {
    pub payload: StaffLocationPayload,
    pub node: Node,
    pub staff: Option<StaffRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RouteRequest {
    pub from_node: String,
    pub staff_id: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelocalizeRequest {
    pub route: Vec<String>,
    pub scanned: String,
    /// Destination staff member, if the caller knows it.
    #[serde(default)]
    pub staff_id: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RouteResponse {
    pub steps: Vec<RouteStep>,
    pub total_m: f64,
    /// Node ids along the route, first to last.
    pub nodes: Vec<String>,
    pub destination_staff: Option<StaffRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReloadResponse {
    pub generation: u64,
    pub nodes: usize,
    pub staff: usize,
    pub advisors: usize,
}

impl Snapshot {
    pub fn staff(&self, id: &str) -> Result<&StaffRecord, ApiError> {
        self.directory
            .staff(id)
            .ok_or_else(|| ApiError::UnknownStaff(id.to_owned()))
    }

    pub fn all_staff(&self) -> Vec<StaffRecord> {
        self.directory.all_staff().cloned().collect()
    }

    pub fn advisor(&self, student_id: &str) -> Result<AdvisorResponse, ApiError> {
        Ok(AdvisorResponse {
            student_id: student_id.to_owned(),
            advisor: self.directory.advisor_of(student_id)?.clone(),
        })
    }

    pub fn scan(&self, req: &ScanRequest) -> Result<ScanResponse, ApiError> {
        let payload = parse_payload(&req.payload).map_err(|e| ApiError::BadPayload(e.to_string()))?;
        let node = self
            .graph
            .node(&payload.node_id)
            .ok_or_else(|| ApiError::UnknownNode(payload.node_id.clone()))?;
        if node.building != payload.building || node.floor != payload.floor {
            return Err(ApiError::PayloadMismatch {
                node: payload.node_id.clone(),
                building: payload.building.clone(),
                floor: payload.floor,
            });
        }
        let staff = payload
            .staff_id
            .as_deref()
            .map(|id| self.staff(id).cloned())
            .transpose()?;
        Ok(ScanResponse {
            node: node.clone(),
            staff,
            payload,
        })
    }

    fn respond(&self, nodes: Vec<String>, staff: Option<StaffRecord>) -> Result<RouteResponse, ApiError> {
        let steps = make_instructions(&self.graph, &nodes)?;
        let total_m = self.graph.path_length(&nodes)?;
        Ok(RouteResponse {
            steps,
            total_m,
            nodes,
            destination_staff: staff,
        })
    }

    pub fn route(&self, req: &RouteRequest) -> Result<RouteResponse, ApiError> {
        let staff = self.staff(&req.staff_id)?.clone();
        let route = shortest_route(&self.graph, &req.from_node, &staff.desk_node)?;
        self.respond(route.nodes, Some(staff))
    }

    pub fn relocalize(&self, req: &RelocalizeRequest) -> Result<RouteResponse, ApiError> {
        if req.route.is_empty() {
            return Err(ApiError::BadRequest("route is empty".into()));
        }
        let staff = match &req.staff_id {
            Some(id) => Some(self.staff(id)?.clone()),
            None => self
                .directory
                .staff_at_desk(req.route.last().unwrap())
                .cloned(),
        };
        let nodes = re_localize(&self.graph, &req.route, &req.scanned)?;
        self.respond(nodes, staff)
    }

    pub fn graph_json(&self) -> serde_json::Value {
        self.graph.to_json_value()
    }
}
