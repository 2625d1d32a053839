//! Validation results: violations are data, not errors.

use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rule {
    LoopEdge,
    NonpositiveLength,
    NonpositiveWeight,
    DanglingEndpoint,
    Tiling,
    EdgeCount,
    PieceLength,
    PieceOrder,
    Continuity,
    LeafNotConstant,
    LeafNotZero,
    ValenceTwoGlue,
    WeightedSum,
    IsolatedValue,
    MapShape,
    EndpointMismatch,
    ExpansionFactor,
    BoundaryPreimage,
    Refinement,
    NotInvariant,
    FiberNotOrbit,
    NotSurjective,
    NotHarmonic,
}

impl Rule {
    pub fn describe(self) -> &'static str {
        match self {
            Rule::LoopEdge => "loop edge",
            Rule::NonpositiveLength => "nonpositive length",
            Rule::NonpositiveWeight => "nonpositive weight",
            Rule::DanglingEndpoint => "edge endpoint is not a vertex",
            Rule::Tiling => "sub-intervals do not tile the target edge",
            Rule::EdgeCount => "form does not match the edge set",
            Rule::PieceLength => "coefficient domain differs from edge length",
            Rule::PieceOrder => "coefficient smoother than its pieces allow",
            Rule::Continuity => "values disagree at a vertex",
            Rule::LeafNotConstant => "function not locally constant at an interior leaf",
            Rule::LeafNotZero => "coefficient not locally zero at an interior leaf",
            Rule::ValenceTwoGlue => "edges do not glue smoothly through a valence-2 vertex",
            Rule::WeightedSum => "weighted outgoing sum is nonzero",
            Rule::IsolatedValue => "isolated vertex value missing or misplaced",
            Rule::MapShape => "map data has the wrong shape",
            Rule::EndpointMismatch => "edge image incompatible with vertex images",
            Rule::ExpansionFactor => "expansion factor differs from the length ratio",
            Rule::BoundaryPreimage => "non-constant near a vertex sent to the boundary, but not a boundary vertex",
            Rule::Refinement => "stored subdivision data is inconsistent",
            Rule::NotInvariant => "projection is not invariant under the action",
            Rule::FiberNotOrbit => "fiber is not a single orbit",
            Rule::NotSurjective => "projection is not surjective",
            Rule::NotHarmonic => "map is not harmonic",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Location {
    Whole,
    Vertex(usize),
    Edge(usize),
    Element(usize),
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Location::Whole => write!(f, "-"),
            Location::Vertex(v) => write!(f, "vertex {v}"),
            Location::Edge(e) => write!(f, "edge {e}"),
            Location::Element(i) => write!(f, "element {i}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub rule: Rule,
    pub location: Location,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, rule: Rule, location: Location, detail: impl Into<String>) {
        self.violations.push(Violation { rule, location, detail: detail.into() });
    }

    pub fn extend(&mut self, other: ValidationReport) {
        self.violations.extend(other.violations);
    }

    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violations(&self) -> &[Violation] {
        &self.violations
    }

    pub fn has(&self, rule: Rule) -> bool {
        self.violations.iter().any(|v| v.rule == rule)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return writeln!(f, "valid");
        }
        for v in &self.violations {
            write!(f, "{}: {}", v.location, v.rule.describe())?;
            if v.detail.is_empty() {
                writeln!(f)?;
            } else {
                writeln!(f, " ({})", v.detail)?;
            }
        }
        Ok(())
    }
}
