//! CSV edge lists (`u,v,len`) with an optional JSON sidecar holding
//! [`ModelMeta`]. The sidecar sits next to the CSV with a `.json` extension.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Edge, ModelMeta, Network};

#[derive(Debug, Serialize, Deserialize)]
struct Row {
    u: u32,
    v: u32,
    len: f64,
}

pub fn sidecar_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("json")
}

pub fn write_network_csv<W: Write>(net: &Network, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for e in net.edges() {
        w.serialize(Row {
            u: e.u,
            v: e.v,
            len: e.len,
        })?;
    }
    w.flush()?;
    Ok(())
}

/// Writes the edge list and, if the network has metadata, its sidecar.
pub fn save_network(net: &Network, path: &Path) -> Result<()> {
    write_network_csv(net, BufWriter::new(File::create(path)?))?;
    if let Some(meta) = &net.meta {
        let mut f = BufWriter::new(File::create(sidecar_path(path))?);
        serde_json::to_writer(&mut f, meta)?;
        f.write_all(b"\n")?;
        f.flush()?;
    }
    Ok(())
}

pub fn read_network_csv<R: std::io::Read>(input: R, n_vertices: Option<usize>) -> Result<Network> {
    let mut r = csv::Reader::from_reader(input);
    let headers = r.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != ["u", "v", "len"] {
        return Err(Error::Invalid(format!("expected header u,v,len, got {headers:?}")));
    }
    let mut edges = Vec::new();
    for row in r.deserialize() {
        let row: Row = row?;
        edges.push(Edge {
            u: row.u,
            v: row.v,
            len: row.len,
        });
    }
    let max_id = edges.iter().map(|e| e.u.max(e.v) as usize + 1).max().unwrap_or(1);
    let n = match n_vertices {
        Some(n) if n < max_id => {
            return Err(Error::Invalid(format!("vertex id {} exceeds declared count {n}", max_id - 1)))
        }
        Some(n) => n,
        None => max_id,
    };
    Network::new(n, edges)
}

/// Loads an edge list and its sidecar (if present). The vertex count comes
/// from the sidecar's `n` when available, else from the largest id.
pub fn load_network(path: &Path) -> Result<Network> {
    let side = sidecar_path(path);
    let meta: Option<ModelMeta> = if side.exists() && side != path {
        Some(serde_json::from_reader(std::io::BufReader::new(File::open(&side)?))?)
    } else {
        None
    };
    let net = read_network_csv(File::open(path)?, meta.as_ref().and_then(|m| m.n))?;
    Ok(match meta {
        Some(m) => net.with_meta(m),
        None => net,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_with_sidecar() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("net.csv");
        let meta = ModelMeta {
            model: "euclidean".into(),
            d: Some(2),
            n: Some(3),
            seed: Some(9),
            coords: vec![0.0, 0.0, 1.0, 0.0, 3.0, 0.1],
            ..Default::default()
        };
        let net = Network::new(3, vec![Edge::new(0, 1, 1.0), Edge::new(1, 2, 0.1 + 0.2)])
            .unwrap()
            .with_meta(meta);
        save_network(&net, &path).unwrap();
        let back = load_network(&path).unwrap();
        assert_eq!(back, net);
    }

    #[test]
    fn loader_rejects_ties_and_bad_header() {
        let tied = "u,v,len\n0,1,0.5\n1,2,0.5\n";
        assert!(matches!(read_network_csv(tied.as_bytes(), None), Err(Error::TiedLengths(..))));
        let bad = "a,b,c\n0,1,0.5\n";
        assert!(read_network_csv(bad.as_bytes(), None).is_err());
    }
}
