//! JSON and CSV formats for domains, fields, tensors and couplings.

use serde::{Deserialize, Serialize};

use crate::coupling::SigmaCoupling;
use crate::domain::{DiscreteDomain, FieldTuple, TupleSpace};
use crate::error::{Error, Result};
use crate::tensor::GridHamiltonian;

/// `{"dimension", "order", "points", "weights"?, "fields"}` with `fields[l][i]`
/// the value of `u_{l+1}` at point `i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldsDocument {
    pub dimension: usize,
    pub order: usize,
    pub points: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    pub fields: Vec<Vec<Vec<f64>>>,
}

impl FieldsDocument {
    pub fn from_fields(fields: &FieldTuple) -> Self {
        let dom = fields.domain();
        Self {
            dimension: dom.dimension(),
            order: fields.order(),
            points: dom.points().to_vec(),
            weights: (!dom.is_uniform()).then(|| dom.weights().to_vec()),
            fields: fields.to_nested(),
        }
    }

    pub fn into_fields(self) -> Result<FieldTuple> {
        if self.points.iter().any(|p| p.len() != self.dimension) {
            return Err(Error::Parse(format!(
                "points must have dimension {}",
                self.dimension
            )));
        }
        if self.fields.len() + 1 != self.order {
            return Err(Error::Parse(format!(
                "order {} needs {} fields, found {}",
                self.order,
                self.order.saturating_sub(1),
                self.fields.len()
            )));
        }
        let domain = DiscreteDomain::new(self.points, self.weights)?;
        FieldTuple::new(domain, self.fields)
    }
}

pub fn parse_fields_json(text: &str) -> Result<FieldTuple> {
    let doc: FieldsDocument = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    doc.into_fields()
}

pub fn fields_to_json(fields: &FieldTuple) -> String {
    serde_json::to_string_pretty(&FieldsDocument::from_fields(fields)).expect("serializable")
}

/// CSV with header `x1..xd,u1_1..u1_d,u2_1..`; one row per point, uniform weights.
pub fn parse_fields_csv(text: &str) -> Result<FieldTuple> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    let header: Vec<&str> = lines
        .next()
        .ok_or_else(|| Error::Parse("empty CSV".into()))?
        .split(',')
        .map(str::trim)
        .collect();
    let d = header.iter().take_while(|h| h.starts_with('x')).count();
    for (k, h) in header[..d].iter().enumerate() {
        if *h != format!("x{}", k + 1) {
            return Err(Error::Parse(format!("expected column x{}, found {h}", k + 1)));
        }
    }
    let rest = &header[d..];
    if d == 0 || rest.is_empty() || rest.len() % d != 0 {
        return Err(Error::Parse("header must be x1..xd followed by whole field blocks".into()));
    }
    let blocks = rest.len() / d;
    for (k, h) in rest.iter().enumerate() {
        let want = format!("u{}_{}", k / d + 1, k % d + 1);
        if *h != want {
            return Err(Error::Parse(format!("expected column {want}, found {h}")));
        }
    }
    let mut points = Vec::new();
    let mut fields = vec![Vec::new(); blocks];
    for (row, line) in lines.enumerate() {
        let vals: Vec<f64> = line
            .split(',')
            .map(|c| c.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Parse(format!("row {}: {e}", row + 2)))?;
        if vals.len() != header.len() {
            return Err(Error::Parse(format!(
                "row {} has {} columns, header has {}",
                row + 2,
                vals.len(),
                header.len()
            )));
        }
        points.push(vals[..d].to_vec());
        for (l, f) in fields.iter_mut().enumerate() {
            f.push(vals[d + l * d..d + (l + 1) * d].to_vec());
        }
    }
    FieldTuple::new(DiscreteDomain::uniform(points)?, fields)
}

/// Reads a fields file, choosing CSV by extension and JSON otherwise.
pub fn read_fields(path: &std::path::Path) -> Result<FieldTuple> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))?;
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
        parse_fields_csv(&text)
    } else {
        parse_fields_json(&text)
    }
}

/// `{"order", "m", "values"}` in row-major order, first index most significant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TensorDocument {
    pub order: usize,
    pub m: usize,
    pub values: Vec<f64>,
}

pub fn tensor_to_json(h: &GridHamiltonian) -> String {
    serde_json::to_string(&TensorDocument {
        order: h.order(),
        m: h.m(),
        values: h.values().to_vec(),
    })
    .expect("serializable")
}

pub fn parse_tensor_json(text: &str) -> Result<GridHamiltonian> {
    let doc: TensorDocument = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    GridHamiltonian::new(doc.m, doc.order, doc.values)
}

/// `{"order", "m", "entries": [[[t_1, .., t_N], mass], ..]}`, nonzero entries only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingDocument {
    pub order: usize,
    pub m: usize,
    pub entries: Vec<(Vec<usize>, f64)>,
}

pub fn coupling_document(c: &SigmaCoupling) -> CouplingDocument {
    CouplingDocument {
        order: c.order(),
        m: c.space().m(),
        entries: c.support(),
    }
}

pub fn coupling_to_json(c: &SigmaCoupling) -> String {
    serde_json::to_string_pretty(&coupling_document(c)).expect("serializable")
}

pub fn parse_coupling_json(text: &str, domain: &DiscreteDomain) -> Result<SigmaCoupling> {
    let doc: CouplingDocument = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    if doc.m != domain.len() {
        return Err(Error::Parse(format!(
            "coupling over {} points, domain has {}",
            doc.m,
            domain.len()
        )));
    }
    let space = TupleSpace::new(doc.m, doc.order)?;
    let mut mass = vec![0.0; space.len()];
    for (t, p) in doc.entries {
        if t.len() != doc.order || t.iter().any(|&i| i >= doc.m) {
            return Err(Error::Parse(format!("bad tuple {t:?}")));
        }
        mass[space.encode(&t)] += p;
    }
    SigmaCoupling::new(domain, doc.order, mass)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transport::diagonal_coupling;

    fn sample() -> FieldTuple {
        let dom = DiscreteDomain::uniform(vec![vec![0.0, 1.0], vec![2.0, -1.0]]).unwrap();
        FieldTuple::new(
            dom,
            vec![vec![vec![1.0, 0.5], vec![0.0, 2.0]], vec![vec![-1.0, 0.0], vec![3.0, 1.0]]],
        )
        .unwrap()
    }

    #[test]
    fn fields_json_round_trip() {
        let ft = sample();
        let back = parse_fields_json(&fields_to_json(&ft)).unwrap();
        assert_eq!(back, ft);
    }

    #[test]
    fn fields_json_errors() {
        assert!(matches!(parse_fields_json("{"), Err(Error::Parse(_))));
        let bad = r#"{"dimension":1,"order":3,"points":[[0],[1]],"fields":[[[0],[1]]]}"#;
        assert!(matches!(parse_fields_json(bad), Err(Error::Parse(_))));
    }

    #[test]
    fn csv_matches_json() {
        let csv = "x1,x2,u1_1,u1_2,u2_1,u2_2\n0,1,1,0.5,-1,0\n2,-1,0,2,3,1\n";
        assert_eq!(parse_fields_csv(csv).unwrap(), sample());
        assert!(parse_fields_csv("x1,u1_1,u2_2\n0,1,2\n").is_err());
        assert!(parse_fields_csv("x1,u1_1\n0,1,2\n").is_err());
    }

    #[test]
    fn tensor_and_coupling_round_trip() {
        let h = GridHamiltonian::from_fn(2, 3, |t| t[0] as f64 - 0.5 * t[2] as f64).unwrap();
        let back = parse_tensor_json(&tensor_to_json(&h)).unwrap();
        assert_eq!(back.values(), h.values());

        let dom = DiscreteDomain::line(&[0.0, 1.0, 2.0]).unwrap();
        let c = diagonal_coupling(&dom, 2).unwrap();
        let text = coupling_to_json(&c);
        assert!(text.contains("entries"));
        assert_eq!(parse_coupling_json(&text, &dom).unwrap(), c);
    }
}
