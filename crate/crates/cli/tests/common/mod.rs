#![allow(dead_code)]

use axum::body::Body;
use axum::http::{Method, Request, StatusCode};
use axum::Router;
use campus_ar::{AppConfig, AppState};
use http_body_util::BodyExt;
use serde_json::Value;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use tempfile::TempDir;
use tower::ServiceExt;

pub fn testdata(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../testdata").join(name)
}

/// Which graph and staff files the live fixture directory holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    Primary,
    Alternate,
}

/// A private copy of the fixtures that reload tests may rewrite.
pub struct Fixture {
    pub dir: TempDir,
    pub config: AppConfig,
}

impl Fixture {
    pub fn new() -> Fixture {
        let dir = tempfile::tempdir().unwrap();
        std::fs::copy(testdata("advisors.csv"), dir.path().join("advisors.csv")).unwrap();
        let fx = Fixture {
            config: AppConfig {
                graph_path: dir.path().join("campus.json"),
                staff_path: dir.path().join("staff.csv"),
                advisors_path: dir.path().join("advisors.csv"),
                listen_address: "127.0.0.1:8080".into(),
                log_level: Default::default(),
            },
            dir,
        };
        fx.install(Variant::Primary);
        fx
    }

    /// Replaces the graph and staff files, each by an atomic rename.
    pub fn install(&self, v: Variant) {
        let (graph, staff) = match v {
            Variant::Primary => ("campus.json", "staff.csv"),
            Variant::Alternate => ("campus_alt.json", "staff_alt.csv"),
        };
        replace(&testdata(graph), &self.config.graph_path);
        replace(&testdata(staff), &self.config.staff_path);
    }

    pub fn state(&self) -> Arc<AppState> {
        AppState::new(self.config.clone()).unwrap()
    }

    pub fn app(&self) -> Router {
        campus_ar::router(self.state())
    }
}

fn replace(src: &Path, dst: &Path) {
    let tmp = dst.with_extension("incoming");
    std::fs::copy(src, &tmp).unwrap();
    std::fs::rename(&tmp, dst).unwrap();
}

/// Sends one request; returns the status and the body parsed as JSON.
pub async fn call(app: &Router, method: Method, uri: &str, body: Option<&str>) -> (StatusCode, Value) {
    let mut req = Request::builder().method(method).uri(uri);
    if body.is_some() {
        req = req.header("content-type", "application/json");
    }
    let req = req
        .body(body.map_or_else(Body::empty, |b| Body::from(b.to_owned())))
        .unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    let json: Value = serde_json::from_slice(&bytes)
        .unwrap_or_else(|e| panic!("{uri}: body is not JSON ({e}): {bytes:?}"));
    (status, json)
}

pub async fn get(app: &Router, uri: &str) -> (StatusCode, Value) {
    call(app, Method::GET, uri, None).await
}

pub async fn post(app: &Router, uri: &str, body: &str) -> (StatusCode, Value) {
    call(app, Method::POST, uri, Some(body)).await
}

pub fn assert_error_shape(v: &Value) {
    let obj = v.as_object().expect("error body is an object");
    assert_eq!(obj.len(), 2, "{v}");
    assert!(obj["error"].is_string() && obj["detail"].is_string(), "{v}");
}
