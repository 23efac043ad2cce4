//! API usage graph: object nodes, member nodes, static-relation edges from an
//! object to its members, and data-dependency edges between objects.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ParseStatus, SourceUnit, CONSTRUCTOR};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MemberKind {
    Field,
    Method,
    Constructor,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GraphNode {
    Object {
        /// Index into [`SourceUnit::objects`].
        object: usize,
        type_name: String,
        variable: String,
    },
    Member {
        /// Node index of the owning object.
        owner: usize,
        owner_type: String,
        member_name: String,
        member_kind: MemberKind,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GraphEdge {
    StaticRelation { object: usize, member: usize },
    DataDependency {
        consumer: usize,
        producer: usize,
        access_point: String,
    },
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApiUsageGraph {
    /// Object nodes first, in object order, so object `i` is node `i`.
    pub nodes: Vec<GraphNode>,
    pub edges: Vec<GraphEdge>,
}

pub fn extract_usage_graph(unit: &SourceUnit) -> Result<ApiUsageGraph> {
    if unit.parse_status == ParseStatus::Failed {
        return Err(Error::GraphUnavailable);
    }
    let mut g = ApiUsageGraph::default();
    for (i, o) in unit.objects.iter().enumerate() {
        g.nodes.push(GraphNode::Object {
            object: i,
            type_name: o.type_name.clone(),
            variable: o.variable_name.clone(),
        });
    }
    for (i, o) in unit.objects.iter().enumerate() {
        let mut members: Vec<(String, MemberKind)> = Vec::new();
        if o.constructor_called {
            members.push((CONSTRUCTOR.to_string(), MemberKind::Constructor));
        }
        members.extend(o.methods_invoked.keys().map(|m| (m.clone(), MemberKind::Method)));
        members.extend(o.fields_accessed.keys().map(|f| (f.clone(), MemberKind::Field)));
        for (name, kind) in members {
            g.nodes.push(GraphNode::Member {
                owner: i,
                owner_type: o.type_name.clone(),
                member_name: name,
                member_kind: kind,
            });
            g.edges.push(GraphEdge::StaticRelation {
                object: i,
                member: g.nodes.len() - 1,
            });
        }
    }
    for d in &unit.dependencies {
        g.edges.push(GraphEdge::DataDependency {
            consumer: d.consumer,
            producer: d.producer,
            access_point: d.access_point.clone(),
        });
    }
    Ok(g)
}

impl ApiUsageGraph {
    pub fn object_count(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n, GraphNode::Object { .. }))
            .count()
    }

    pub fn object_type(&self, node: usize) -> Option<&str> {
        match self.nodes.get(node) {
            Some(GraphNode::Object { type_name, .. }) => Some(type_name),
            _ => None,
        }
    }

    pub fn dependencies(&self) -> impl Iterator<Item = (usize, usize, &str)> {
        self.edges.iter().filter_map(|e| match e {
            GraphEdge::DataDependency {
                consumer,
                producer,
                access_point,
            } => Some((*consumer, *producer, access_point.as_str())),
            _ => None,
        })
    }

    /// Checks the structural invariants: every member has exactly one
    /// static-relation edge from an existing owner object, and dependencies
    /// join two distinct objects.
    pub fn is_well_formed(&self) -> bool {
        let mut incoming = vec![0usize; self.nodes.len()];
        for e in &self.edges {
            match e {
                GraphEdge::StaticRelation { object, member } => {
                    let owner_ok = matches!(
                        self.nodes.get(*member),
                        Some(GraphNode::Member { owner, .. }) if owner == object
                    );
                    if !owner_ok || self.object_type(*object).is_none() {
                        return false;
                    }
                    incoming[*member] += 1;
                }
                GraphEdge::DataDependency {
                    consumer, producer, ..
                } => {
                    if consumer == producer
                        || self.object_type(*consumer).is_none()
                        || self.object_type(*producer).is_none()
                    {
                        return false;
                    }
                }
            }
        }
        self.nodes.iter().enumerate().all(|(i, n)| match n {
            GraphNode::Member { .. } => incoming[i] == 1,
            GraphNode::Object { .. } => true,
        })
    }

    // Stable labels: `Type@k` is the k-th object of that type in object order.
    fn labels(&self) -> Vec<String> {
        let mut per_type: BTreeMap<&str, usize> = BTreeMap::new();
        let mut labels = vec![String::new(); self.nodes.len()];
        for (i, n) in self.nodes.iter().enumerate() {
            if let GraphNode::Object { type_name, .. } = n {
                let k = per_type.entry(type_name).or_default();
                labels[i] = format!("{type_name}@{k}");
                *k += 1;
            }
        }
        for (i, n) in self.nodes.iter().enumerate() {
            if let GraphNode::Member {
                owner,
                member_name,
                member_kind,
                ..
            } = n
            {
                let suffix = if *member_kind == MemberKind::Field { "" } else { "()" };
                labels[i] = format!("{}.{member_name}{suffix}", labels[*owner]);
            }
        }
        labels
    }

    /// Canonical JSON for golden comparisons: nodes sorted by type name then
    /// label, edges sorted lexicographically.
    pub fn to_canonical_json(&self) -> String {
        #[derive(Serialize)]
        struct CNode<'a> {
            id: &'a str,
            kind: &'static str,
            type_name: &'a str,
            #[serde(skip_serializing_if = "Option::is_none")]
            variable: Option<&'a str>,
            #[serde(skip_serializing_if = "Option::is_none")]
            owner: Option<&'a str>,
            #[serde(skip_serializing_if = "Option::is_none")]
            member: Option<&'a str>,
        }
        #[derive(Serialize, PartialEq, Eq, PartialOrd, Ord)]
        struct CEdge<'a> {
            kind: &'static str,
            from: &'a str,
            to: &'a str,
            #[serde(skip_serializing_if = "Option::is_none")]
            access_point: Option<&'a str>,
        }
        #[derive(Serialize)]
        struct Canonical<'a> {
            nodes: Vec<CNode<'a>>,
            edges: Vec<CEdge<'a>>,
        }

        let labels = self.labels();
        let mut nodes: Vec<CNode> = self
            .nodes
            .iter()
            .enumerate()
            .map(|(i, n)| match n {
                GraphNode::Object {
                    type_name, variable, ..
                } => CNode {
                    id: &labels[i],
                    kind: "object",
                    type_name,
                    variable: Some(variable),
                    owner: None,
                    member: None,
                },
                GraphNode::Member {
                    owner,
                    owner_type,
                    member_name,
                    member_kind,
                } => CNode {
                    id: &labels[i],
                    kind: match member_kind {
                        MemberKind::Field => "field",
                        MemberKind::Method => "method",
                        MemberKind::Constructor => "constructor",
                    },
                    type_name: owner_type,
                    variable: None,
                    owner: Some(&labels[*owner]),
                    member: Some(member_name),
                },
            })
            .collect();
        nodes.sort_by(|a, b| (a.type_name, a.id).cmp(&(b.type_name, b.id)));
        let mut edges: Vec<CEdge> = self
            .edges
            .iter()
            .map(|e| match e {
                GraphEdge::StaticRelation { object, member } => CEdge {
                    kind: "static_relation",
                    from: &labels[*object],
                    to: &labels[*member],
                    access_point: None,
                },
                GraphEdge::DataDependency {
                    consumer,
                    producer,
                    access_point,
                } => CEdge {
                    kind: "data_dependency",
                    from: &labels[*consumer],
                    to: &labels[*producer],
                    access_point: Some(access_point),
                },
            })
            .collect();
        edges.sort();
        serde_json::to_string_pretty(&Canonical { nodes, edges }).unwrap_or_default()
    }

    /// Graphviz rendering: solid edges for static relations, dashed for data
    /// dependencies.
    pub fn to_dot(&self) -> String {
        let labels = self.labels();
        let mut out = String::from("digraph usage {\n  node [fontname=\"monospace\"];\n");
        for (i, n) in self.nodes.iter().enumerate() {
            let shape = match n {
                GraphNode::Object { .. } => "box",
                GraphNode::Member { .. } => "ellipse",
            };
            let _ = writeln!(out, "  n{i} [label=\"{}\", shape={shape}];", escape(&labels[i]));
        }
        for e in &self.edges {
            match e {
                GraphEdge::StaticRelation { object, member } => {
                    let _ = writeln!(out, "  n{object} -> n{member} [style=solid, color=darkgreen];");
                }
                GraphEdge::DataDependency {
                    consumer,
                    producer,
                    access_point,
                } => {
                    let _ = writeln!(
                        out,
                        "  n{consumer} -> n{producer} [style=dashed, label=\"{}\"];",
                        escape(access_point)
                    );
                }
            }
        }
        out.push_str("}\n");
        out
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}
