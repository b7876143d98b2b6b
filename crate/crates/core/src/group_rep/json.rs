//! JSON documents describing a group and a list of representations.
//!
//! ```json
//! {"kind": "finite", "table": [[0,1],[1,0]],
//!  "reps": [{"name": "sign", "dim": 1, "matrices": [[[1]], [[-1]]]}]}
//! {"kind": "u1", "nodes": 16, "sigma": 1.0, "reps": [{"name": "r2", "dim": 2, "weight": 2}]}
//! {"kind": "su2", "nodes": 3, "sigma": [[1,0,0],[0,1,0],[0,0,1]],
//!  "reps": [{"name": "ad", "dim": 3, "builtin": "adjoint"}]}
//! ```
//! For SU(2), `nodes` is the quadrature order.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{CompactGroupModel, GroupElement, GroupError, GroupKind, RepKind, RepresentationModel};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepDoc {
    pub name: String,
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrices: Option<Vec<Vec<Vec<f64>>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub builtin: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub irreducible: Option<bool>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupDoc {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nodes: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generators: Option<Vec<usize>>,
    #[serde(default)]
    pub reps: Vec<RepDoc>,
}

fn doc_err(msg: impl Into<String>) -> GroupError {
    GroupError::Document(msg.into())
}

fn rows_to_matrix(rows: &[Vec<f64>]) -> Result<DMatrix<f64>, GroupError> {
    let n = rows.len();
    let m = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != m) {
        return Err(doc_err("ragged matrix"));
    }
    Ok(DMatrix::from_fn(n, m, |i, j| rows[i][j]))
}

fn matrix_to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect()
}

fn parse_sigma(v: &Option<Value>, k: usize) -> Result<DMatrix<f64>, GroupError> {
    match v {
        None => Ok(DMatrix::identity(k, k)),
        Some(Value::Number(x)) => Ok(DMatrix::identity(k, k) * x.as_f64().ok_or_else(|| doc_err("bad sigma"))?),
        Some(v @ Value::Array(_)) => {
            let rows: Vec<Vec<f64>> = serde_json::from_value(v.clone()).map_err(|e| doc_err(e.to_string()))?;
            let m = rows_to_matrix(&rows)?;
            if m.shape() != (k, k) {
                return Err(doc_err(format!("sigma must be {k}×{k}")));
            }
            if (&m - m.transpose()).amax() > 0.0 {
                return Err(doc_err("sigma must be symmetric"));
            }
            Ok(m)
        }
        Some(_) => Err(doc_err("sigma must be a number or a matrix")),
    }
}

fn parse_rep(doc: &RepDoc, group: &CompactGroupModel) -> Result<RepresentationModel, GroupError> {
    let chosen = [doc.matrices.is_some(), doc.weight.is_some(), doc.builtin.is_some()];
    if chosen.iter().filter(|c| **c).count() != 1 {
        return Err(doc_err(format!("rep {}: give exactly one of matrices, weight, builtin", doc.name)));
    }
    let rep = if let Some(ms) = &doc.matrices {
        let mats = ms.iter().map(|m| rows_to_matrix(m)).collect::<Result<Vec<_>, _>>()?;
        RepresentationModel::from_matrices(doc.name.clone(), mats, doc.irreducible.unwrap_or(false))?
    } else if let Some(n) = doc.weight {
        RepresentationModel::u1_weight(n)
    } else {
        match doc.builtin.as_deref() {
            Some("adjoint") => RepresentationModel::su2_adjoint(),
            Some("spin_half") => RepresentationModel::su2_spin_half(),
            Some("trivial") => RepresentationModel::trivial(doc.dim, group.lie_dim()),
            Some(other) => return Err(doc_err(format!("unknown builtin rep {other}"))),
            None => unreachable!(),
        }
    };
    if rep.dim() != doc.dim {
        return Err(doc_err(format!("rep {}: declared dim {} but built {}", doc.name, doc.dim, rep.dim())));
    }
    let rep = rep.with_name(doc.name.clone());
    let rep = match doc.irreducible {
        Some(f) => rep.with_irreducible(f),
        None => rep,
    };
    rep.validate(group)?;
    Ok(rep)
}

impl GroupDoc {
    pub fn build(&self) -> Result<(CompactGroupModel, Vec<RepresentationModel>), GroupError> {
        let group = match self.kind.as_str() {
            "finite" => {
                let table = self.table.clone().ok_or_else(|| doc_err("finite group needs a table"))?;
                CompactGroupModel::finite(table)?
            }
            "u1" => {
                let nodes = self.nodes.ok_or_else(|| doc_err("u1 needs nodes"))?;
                let sigma = parse_sigma(&self.sigma, 1)?;
                CompactGroupModel::u1(nodes, sigma[(0, 0)])?
            }
            "su2" => {
                let order = self.nodes.ok_or_else(|| doc_err("su2 needs nodes (quadrature order)"))?;
                CompactGroupModel::su2(order, parse_sigma(&self.sigma, 3)?)?
            }
            other => return Err(doc_err(format!("unknown group kind {other}"))),
        };
        let group = match &self.generators {
            Some(g) => group.with_generators(g.clone())?,
            None => group,
        };
        let reps = self.reps.iter().map(|r| parse_rep(r, &group)).collect::<Result<Vec<_>, _>>()?;
        Ok((group, reps))
    }

    /// Document for a group and reps. Matrix reps are written out explicitly.
    pub fn from_models(group: &CompactGroupModel, reps: &[RepresentationModel]) -> Result<Self, GroupError> {
        let (kind, table, nodes, sigma) = match group.kind() {
            GroupKind::Finite => ("finite", Some(group.table().ok_or(GroupError::NoTable)?.rows().to_vec()), None, None),
            GroupKind::U1 => ("u1", None, Some(group.len()), Some(Value::from(group.sigma()[(0, 0)]))),
            GroupKind::Su2 => {
                let order = (0..).find(|l| su2_node_count(*l) >= group.len()).unwrap_or(0);
                let rows = matrix_to_rows(&group.sigma());
                ("su2", None, Some(order), Some(serde_json::to_value(rows).map_err(|e| doc_err(e.to_string()))?))
            }
        };
        let reps = reps
            .iter()
            .map(|r| {
                let mut d = RepDoc {
                    name: r.name().to_string(),
                    dim: r.dim(),
                    matrices: None,
                    weight: None,
                    builtin: None,
                    irreducible: Some(r.irreducible()),
                };
                match r.kind() {
                    RepKind::Matrices(ms) => d.matrices = Some(ms.iter().map(matrix_to_rows).collect()),
                    RepKind::U1Weight(n) => d.weight = Some(*n),
                    RepKind::Su2Adjoint => d.builtin = Some("adjoint".into()),
                    RepKind::Su2SpinHalf => d.builtin = Some("spin_half".into()),
                    RepKind::Trivial if group.kind() == GroupKind::Finite => {
                        let id = DMatrix::identity(r.dim(), r.dim());
                        d.matrices = Some(vec![matrix_to_rows(&id); group.len()]);
                    }
                    RepKind::Trivial => d.builtin = Some("trivial".into()),
                }
                d
            })
            .collect();
        Ok(Self {
            kind: kind.into(),
            table,
            nodes,
            sigma,
            generators: group.table().map(|_| group.generators().to_vec()),
            reps,
        })
    }
}

fn su2_node_count(order: usize) -> usize {
    (order + 1) * (2 * order + 2) * (2 * order + 2)
}

pub fn load_group(text: &str) -> Result<(CompactGroupModel, Vec<RepresentationModel>), GroupError> {
    let doc: GroupDoc = serde_json::from_str(text).map_err(|e| doc_err(e.to_string()))?;
    doc.build()
}

pub fn dump_group(group: &CompactGroupModel, reps: &[RepresentationModel]) -> Result<String, GroupError> {
    let doc = GroupDoc::from_models(group, reps)?;
    serde_json::to_string_pretty(&doc).map_err(|e| doc_err(e.to_string()))
}

/// Encoding of a single element: index, angle, or [w, x, y, z].
pub fn element_to_json(g: &GroupElement) -> Value {
    match g {
        GroupElement::Index(i) => Value::from(*i),
        GroupElement::Angle(t) => Value::from(*t),
        GroupElement::Quaternion(q) => Value::from(vec![q.w, q.i, q.j, q.k]),
    }
}

pub fn element_from_json(kind: GroupKind, v: &Value) -> Result<GroupElement, GroupError> {
    match kind {
        GroupKind::Finite => v
            .as_u64()
            .map(|i| GroupElement::Index(i as usize))
            .ok_or_else(|| doc_err("finite link must be an element index")),
        GroupKind::U1 => v
            .as_f64()
            .map(|t| GroupElement::Angle(super::wrap_angle(t)))
            .ok_or_else(|| doc_err("U(1) link must be an angle")),
        GroupKind::Su2 => {
            let q: Vec<f64> = serde_json::from_value(v.clone()).map_err(|e| doc_err(e.to_string()))?;
            if q.len() != 4 {
                return Err(doc_err("SU(2) link must be [w, x, y, z]"));
            }
            let quat = nalgebra::Quaternion::new(q[0], q[1], q[2], q[3]);
            if (quat.norm() - 1.0).abs() > 1e-12 {
                return Err(doc_err("SU(2) link must be a unit quaternion"));
            }
            Ok(GroupElement::Quaternion(quat))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn loads_the_three_kinds() {
        let (g, reps) = load_group(
            r#"{"kind":"finite","table":[[0,1],[1,0]],
                "reps":[{"name":"sign","dim":1,"matrices":[[[1]],[[-1]]],"irreducible":true}]}"#,
        )
        .unwrap();
        assert_eq!(g.len(), 2);
        assert!(reps[0].irreducible());
        let (g, reps) = load_group(r#"{"kind":"u1","nodes":16,"sigma":2.0,"reps":[{"name":"r2","dim":2,"weight":2}]}"#).unwrap();
        let c = crate::group_rep::casimir(&reps[0], &g).unwrap();
        assert!((c.chi - 2.0).abs() < 1e-12);
        let (g, reps) = load_group(
            r#"{"kind":"su2","nodes":1,"sigma":[[1,0,0],[0,1,0],[0,0,1]],
                "reps":[{"name":"ad","dim":3,"builtin":"adjoint"}]}"#,
        )
        .unwrap();
        assert_eq!(g.len(), 2 * 4 * 4);
        assert_eq!(reps[0].name(), "ad");
    }

    #[test]
    fn rejects_malformed_documents() {
        assert!(load_group(r#"{"kind":"finite"}"#).is_err());
        assert!(load_group(r#"{"kind":"u1","nodes":4,"colour":1}"#).is_err());
        assert!(load_group(r#"{"kind":"finite","table":[[0,1],[1,0]],"reps":[{"name":"x","dim":1,"matrices":[[[2]],[[1]]]}]}"#).is_err());
        assert!(load_group(r#"{"kind":"u1","nodes":4,"reps":[{"name":"x","dim":3,"weight":1}]}"#).is_err());
    }

    #[test]
    fn round_trip() {
        let g = crate::group_rep::CompactGroupModel::dihedral(3);
        let reps = crate::group_rep::real_irreps(&g).unwrap();
        let text = dump_group(&g, &reps).unwrap();
        let (g2, reps2) = load_group(&text).unwrap();
        assert_eq!(g2.table(), g.table());
        assert_eq!(reps2.len(), reps.len());
        let su2 = crate::group_rep::CompactGroupModel::su2(2, DMatrix::identity(3, 3)).unwrap();
        let text = dump_group(&su2, &[RepresentationModel::su2_spin_half()]).unwrap();
        let (g3, _) = load_group(&text).unwrap();
        assert_eq!(g3.len(), su2.len());
    }
}
