use std::fmt::Write as _;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use super::mesh::Mesh;

/// Writes `v` records with 17 significant digits and 1-based `f` records.
pub fn write_obj<W: Write>(mesh: &Mesh, out: &mut W) -> io::Result<()> {
    let mut buf = String::with_capacity(64 * (mesh.vertex_count() + mesh.face_count()));
    for v in &mesh.vertices {
        let _ = writeln!(buf, "v {:.16e} {:.16e} {:.16e}", v.x, v.y, v.z);
    }
    for f in &mesh.faces {
        let _ = writeln!(buf, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1);
    }
    out.write_all(buf.as_bytes())
}

pub fn export_obj(mesh: &Mesh, path: impl AsRef<Path>) -> io::Result<()> {
    let mut file = io::BufWriter::new(std::fs::File::create(path)?);
    write_obj(mesh, &mut file)?;
    file.flush()
}

/// Writes `frame_0000.obj`, `frame_0001.obj`, ... into `dir`.
pub fn export_obj_sequence<'a>(
    meshes: impl IntoIterator<Item = &'a Mesh>,
    dir: impl AsRef<Path>,
) -> io::Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir)?;
    let mut paths = Vec::new();
    for (i, mesh) in meshes.into_iter().enumerate() {
        let path = dir.join(format!("frame_{i:04}.obj"));
        export_obj(mesh, &path)?;
        paths.push(path);
    }
    Ok(paths)
}
