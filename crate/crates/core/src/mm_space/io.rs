//! JSON documents for G-spaces and CSV distance matrices.

use std::collections::BTreeMap;
use std::io::Read;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{FiniteMMSpace, IsometricAction, MmError};
use crate::group_rep::json::GroupDoc;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionDoc {
    pub group: GroupDoc,
    /// Element index → image of every point.
    pub perms: BTreeMap<String, Vec<usize>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MmDoc {
    pub dist: Vec<Vec<f64>>,
    pub measure: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub action: Option<ActionDoc>,
}

fn doc_err(e: impl std::fmt::Display) -> MmError {
    MmError::Document(e.to_string())
}

pub fn load_space(text: &str) -> Result<(FiniteMMSpace, Option<IsometricAction>), MmError> {
    let doc: MmDoc = serde_json::from_str(text).map_err(doc_err)?;
    let n = doc.dist.len();
    if doc.dist.iter().any(|r| r.len() != n) {
        return Err(MmError::Document("dist must be a square array".into()));
    }
    let dist = DMatrix::from_fn(n, n, |i, j| doc.dist[i][j]);
    let mut space = FiniteMMSpace::new(dist, doc.measure)?;
    if let Some(labels) = doc.labels {
        space = space.with_labels(labels)?;
    }
    let action = match doc.action {
        None => None,
        Some(a) => {
            let (group, _) = a.group.build().map_err(doc_err)?;
            let mut perms = vec![None; group.len()];
            for (key, p) in a.perms {
                let g: usize = key.parse().map_err(|_| MmError::Document(format!("perms key {key:?} is not an index")))?;
                let slot = perms.get_mut(g).ok_or_else(|| MmError::Document(format!("element {g} out of range")))?;
                *slot = Some(p);
            }
            let perms = perms
                .into_iter()
                .enumerate()
                .map(|(g, p)| p.ok_or_else(|| MmError::Document(format!("no permutation for element {g}"))))
                .collect::<Result<Vec<_>, _>>()?;
            let act = IsometricAction::new(group, perms)?;
            act.validate_on(&space)?;
            Some(act)
        }
    };
    Ok((space, action))
}

pub fn dump_space(space: &FiniteMMSpace, action: Option<&IsometricAction>) -> Result<String, MmError> {
    let n = space.n_points();
    let action = action
        .map(|a| -> Result<ActionDoc, MmError> {
            Ok(ActionDoc {
                group: GroupDoc::from_models(a.group(), &[]).map_err(doc_err)?,
                perms: a.perms().iter().enumerate().map(|(g, p)| (g.to_string(), p.clone())).collect(),
            })
        })
        .transpose()?;
    let doc = MmDoc {
        dist: (0..n).map(|i| (0..n).map(|j| space.dist(i, j)).collect()).collect(),
        measure: space.measure().to_vec(),
        labels: space.labels().map(<[String]>::to_vec),
        action,
    };
    serde_json::to_string_pretty(&doc).map_err(doc_err)
}

/// Square distance matrix from header-less CSV.
pub fn read_dist_csv<R: Read>(reader: R) -> Result<DMatrix<f64>, MmError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(reader);
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(doc_err)?;
        rows.push(rec.iter().map(|x| x.parse::<f64>().map_err(doc_err)).collect::<Result<_, _>>()?);
    }
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(MmError::Document("distance CSV must be square".into()));
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group_rep::CompactGroupModel;

    #[test]
    fn round_trip_with_action() {
        let c4 = FiniteMMSpace::cycle(4).unwrap();
        let a = IsometricAction::new(CompactGroupModel::cyclic(2), vec![vec![0, 1, 2, 3], vec![2, 3, 0, 1]]).unwrap();
        let text = dump_space(&c4, Some(&a)).unwrap();
        let (s, b) = load_space(&text).unwrap();
        assert_eq!(s, c4);
        assert_eq!(b.unwrap().perms(), a.perms());
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(load_space(r#"{"dist": [[0]], "measure": [1], "extra": 1}"#).is_err());
    }

    #[test]
    fn csv_distances() {
        let d = read_dist_csv("0, 1, 2\n1, 0, 1\n2, 1, 0\n".as_bytes()).unwrap();
        assert!(FiniteMMSpace::new(d, vec![1.0; 3]).is_ok());
        assert!(read_dist_csv("0,1\n1\n".as_bytes()).is_err());
    }
}
