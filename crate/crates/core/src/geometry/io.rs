//! OFF export with a JSON sidecar for the data OFF cannot hold.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::Result;
use crate::geometry::mesh::SurfaceMesh;

#[derive(Serialize)]
struct Sidecar<'a> {
    conformal_factor: &'a [f64],
    identifications: Vec<[usize; 2]>,
    boundary_loops: &'a [Vec<usize>],
}

/// OFF text of the chart mesh (z = 0).
pub fn to_off(mesh: &SurfaceMesh) -> String {
    let mut s = String::new();
    writeln!(s, "OFF").unwrap();
    writeln!(s, "{} {} 0", mesh.vertices.len(), mesh.triangles.len()).unwrap();
    for p in &mesh.vertices {
        writeln!(s, "{:?} {:?} 0", p[0], p[1]).unwrap();
    }
    for t in &mesh.triangles {
        writeln!(s, "3 {} {} {}", t[0], t[1], t[2]).unwrap();
    }
    s
}

pub fn sidecar_json(mesh: &SurfaceMesh) -> Result<String> {
    let side = Sidecar {
        conformal_factor: &mesh.conformal_factor,
        identifications: mesh.identifications.iter().map(|&(a, b)| [a, b]).collect(),
        boundary_loops: &mesh.boundary_loops,
    };
    Ok(serde_json::to_string_pretty(&side)?)
}

/// Writes `<stem>.off` and `<stem>.json` into `dir`; returns both paths.
pub fn write_mesh(mesh: &SurfaceMesh, dir: &Path, stem: &str) -> Result<(PathBuf, PathBuf)> {
    fs::create_dir_all(dir)?;
    let off = dir.join(format!("{stem}.off"));
    let json = dir.join(format!("{stem}.json"));
    fs::write(&off, to_off(mesh))?;
    fs::write(&json, sidecar_json(mesh)?)?;
    Ok((off, json))
}
