//! Packing certificates and their JSON form.

use std::fmt;
use std::path::Path;

use num_rational::Ratio;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::cayley::ComponentId;
use crate::error::{Error, Result};
use crate::perm::Permutation;
use crate::tree::{DiameterThreeTree, Numbering};

/// Exact fractions such as packing densities, rendered `"p/q"`.
pub type Fraction = Ratio<u64>;

pub fn format_fraction(x: &Fraction) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

pub fn parse_fraction(s: &str) -> Result<Fraction> {
    let bad = || Error::Certificate(format!("not a fraction: {s:?}"));
    let (p, q) = match s.split_once('/') {
        Some((p, q)) => (p.trim().parse().map_err(|_| bad())?, q.trim().parse().map_err(|_| bad())?),
        None => (s.trim().parse().map_err(|_| bad())?, 1),
    };
    if q == 0 {
        return Err(bad());
    }
    Ok(Fraction::new(p, q))
}

pub mod fraction_serde {
    use super::*;

    pub fn serialize<S: Serializer>(x: &Fraction, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_fraction(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Fraction, D::Error> {
        let s = String::deserialize(d)?;
        parse_fraction(&s).map_err(serde::de::Error::custom)
    }
}

mod opt_fraction_serde {
    use super::*;

    pub fn serialize<S: Serializer>(x: &Option<Fraction>, s: S) -> std::result::Result<S::Ok, S::Error> {
        match x {
            Some(x) => s.serialize_some(&format_fraction(x)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<Fraction>, D::Error> {
        Option::<String>::deserialize(d)?
            .map(|s| parse_fraction(&s).map_err(serde::de::Error::custom))
            .transpose()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SphereKind {
    OneSphere,
    DoubleSphere,
    SSphere,
}

impl fmt::Display for SphereKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SphereKind::OneSphere => "one_sphere",
            SphereKind::DoubleSphere => "double_sphere",
            SphereKind::SSphere => "s_sphere",
        })
    }
}

/// A single center, or the two adjacent centers of a double-sphere.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Center {
    Single(Permutation),
    Pair(Permutation, Permutation),
}

impl Center {
    pub fn members(&self) -> Vec<&Permutation> {
        match self {
            Center::Single(g) => vec![g],
            Center::Pair(a, b) => vec![a, b],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PackingCertificate {
    pub n: usize,
    pub r: usize,
    pub t: usize,
    pub numbering: Numbering,
    pub kind: SphereKind,
    pub centers: Vec<Center>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "opt_fraction_serde")]
    pub declared_alpha: Option<Fraction>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base_subgraph: Option<Vec<ComponentId>>,
}

impl PackingCertificate {
    pub fn one_sphere(tree: &DiameterThreeTree, centers: Vec<Permutation>) -> Self {
        PackingCertificate {
            n: tree.n(),
            r: tree.r(),
            t: tree.t(),
            numbering: tree.numbering(),
            kind: SphereKind::OneSphere,
            centers: centers.into_iter().map(Center::Single).collect(),
            declared_alpha: None,
            base_subgraph: None,
        }
    }

    pub fn double_sphere(tree: &DiameterThreeTree, pairs: Vec<(Permutation, Permutation)>) -> Self {
        PackingCertificate {
            kind: SphereKind::DoubleSphere,
            centers: pairs.into_iter().map(|(a, b)| Center::Pair(a, b)).collect(),
            ..PackingCertificate::one_sphere(tree, Vec::new())
        }
    }

    pub fn s_sphere(tree: &DiameterThreeTree, centers: Vec<Permutation>, base: Vec<ComponentId>) -> Self {
        PackingCertificate {
            kind: SphereKind::SSphere,
            base_subgraph: Some(base),
            ..PackingCertificate::one_sphere(tree, centers)
        }
    }

    pub fn with_declared_alpha(mut self, alpha: Fraction) -> Self {
        self.declared_alpha = Some(alpha);
        self
    }

    pub fn tree(&self) -> Result<DiameterThreeTree> {
        if self.n != self.r + self.t {
            return Err(Error::Certificate(format!(
                "n = {} but r + t = {}",
                self.n,
                self.r + self.t
            )));
        }
        DiameterThreeTree::build(self.r, self.t, self.numbering)
    }

    /// Every center permutation, pairs flattened.
    pub fn center_list(&self) -> Vec<&Permutation> {
        self.centers.iter().flat_map(Center::members).collect()
    }

    /// Structural checks that do not need the graph.
    pub fn check_shape(&self) -> Result<()> {
        self.tree()?;
        for c in &self.centers {
            match (self.kind, c) {
                (SphereKind::DoubleSphere, Center::Pair(..)) => {}
                (SphereKind::DoubleSphere, Center::Single(g)) => {
                    return Err(Error::Certificate(format!("double_sphere entry {g} is not a pair")))
                }
                (_, Center::Pair(a, b)) => {
                    return Err(Error::Certificate(format!(
                        "{} certificate has a pair entry [{a}, {b}]",
                        self.kind
                    )))
                }
                _ => {}
            }
            for g in c.members() {
                if g.degree() != self.n {
                    return Err(Error::DegreeMismatch(g.degree(), self.n));
                }
            }
        }
        if self.kind == SphereKind::SSphere && self.base_subgraph.is_none() {
            return Err(Error::Certificate("s_sphere certificate needs base_subgraph".into()));
        }
        if let Some(base) = &self.base_subgraph {
            for c in base {
                if c.0.len() != self.r || !c.0.is_subset_of(crate::Subset::full(self.n)) {
                    return Err(Error::Certificate(format!("bad component {c}")));
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cert: PackingCertificate = serde_json::from_str(text)?;
        cert.check_shape()?;
        Ok(cert)
    }

    pub fn load(path: &Path) -> Result<Self> {
        PackingCertificate::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json() + "\n")?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_field_order_and_round_trip() {
        let tree = DiameterThreeTree::build(3, 3, Numbering::Renumbered).unwrap();
        let cert = PackingCertificate::one_sphere(&tree, vec!["123456".parse().unwrap(), "213456".parse().unwrap()])
            .with_declared_alpha(Fraction::new(4, 5));
        let text = serde_json::to_string(&cert).unwrap();
        assert_eq!(
            text,
            r#"{"n":6,"r":3,"t":3,"numbering":"renumbered","kind":"one_sphere","centers":["123456","213456"],"declared_alpha":"4/5"}"#
        );
        assert_eq!(PackingCertificate::from_json(&text).unwrap(), cert);
    }

    #[test]
    fn shape_errors() {
        let bad_degree = r#"{"n":6,"r":3,"t":3,"numbering":"original","kind":"one_sphere","centers":["12345"]}"#;
        assert!(matches!(PackingCertificate::from_json(bad_degree), Err(Error::DegreeMismatch(5, 6))));
        let bad_pair = r#"{"n":4,"r":2,"t":2,"numbering":"original","kind":"double_sphere","centers":["1234"]}"#;
        assert!(PackingCertificate::from_json(bad_pair).is_err());
        let no_base = r#"{"n":4,"r":2,"t":2,"numbering":"original","kind":"s_sphere","centers":[]}"#;
        assert!(PackingCertificate::from_json(no_base).is_err());
        assert!(PackingCertificate::from_json("{").is_err());
        let pair = r#"{"n":4,"r":2,"t":2,"numbering":"original","kind":"double_sphere","centers":[["1234","2134"]]}"#;
        assert_eq!(PackingCertificate::from_json(pair).unwrap().center_list().len(), 2);
    }

    #[test]
    fn fractions() {
        assert_eq!(parse_fraction("10/12").unwrap(), Fraction::new(5, 6));
        assert_eq!(format_fraction(&Fraction::new(20, 24)), "5/6");
        assert!(parse_fraction("1/0").is_err());
    }
}
