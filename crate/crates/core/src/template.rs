//! The 26 target-sequence templates and their reversible render/parse.
//!
//! Every template is four fields interleaved with five literals:
//! `lit0 f1 lit1 f2 lit2 f3 lit3 f4 lit4`. Rendering concatenates them;
//! parsing strips `lit0`/`lit4` and splits greedily on the first occurrence
//! of each inner literal from left to right. Clauses for multiple quads are
//! joined with `" [SSEP] "`.

use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::TemplateError;
use crate::quad::SurfaceQuad;

pub const SSEP: &str = "[SSEP]";
const SSEP_JOIN: &str = " [SSEP] ";

/// Quad element roles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Element {
    #[serde(rename = "AT")]
    AspectTerm,
    #[serde(rename = "OT")]
    OpinionTerm,
    #[serde(rename = "AC")]
    AspectCategory,
    #[serde(rename = "SP")]
    Polarity,
}

impl Element {
    /// Canonical quad order, also the order used to enumerate permutations.
    pub const ALL: [Element; 4] = [
        Element::AspectTerm,
        Element::OpinionTerm,
        Element::AspectCategory,
        Element::Polarity,
    ];

    pub fn code(self) -> &'static str {
        match self {
            Element::AspectTerm => "AT",
            Element::OpinionTerm => "OT",
            Element::AspectCategory => "AC",
            Element::Polarity => "SP",
        }
    }

    pub fn marker(self) -> &'static str {
        match self {
            Element::AspectTerm => "[AT]",
            Element::OpinionTerm => "[OT]",
            Element::AspectCategory => "[AC]",
            Element::Polarity => "[SP]",
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Element::AspectTerm => "aspect_term",
            Element::OpinionTerm => "opinion_term",
            Element::AspectCategory => "aspect_category",
            Element::Polarity => "sentiment_polarity",
        }
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TemplateKind {
    TupleStyle,
    ParaphraseStyle,
    MarkerStyle,
}

impl fmt::Display for TemplateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TemplateKind::TupleStyle => "tuple",
            TemplateKind::ParaphraseStyle => "paraphrase",
            TemplateKind::MarkerStyle => "marker",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Template {
    pub id: String,
    pub kind: TemplateKind,
    pub element_order: [Element; 4],
    /// Five literals surrounding the four fields.
    pub linking_literals: [String; 5],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementSpan {
    pub quad: usize,
    pub role: Element,
    pub start: usize,
    pub end: usize,
}

/// A rendered target with byte spans of every element and separator.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TargetSequence {
    pub text: String,
    pub element_spans: Vec<ElementSpan>,
    pub separator_spans: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ParseOutcome {
    pub quads: Vec<SurfaceQuad>,
    pub malformed: usize,
}

impl Template {
    fn tuple() -> Self {
        use Element::*;
        Template {
            id: "gas".into(),
            kind: TemplateKind::TupleStyle,
            element_order: [AspectTerm, AspectCategory, Polarity, OpinionTerm],
            linking_literals: ["(", ", ", ", ", ", ", ")"].map(String::from),
        }
    }

    fn paraphrase() -> Self {
        use Element::*;
        Template {
            id: "paraphrase".into(),
            kind: TemplateKind::ParaphraseStyle,
            element_order: [AspectCategory, Polarity, AspectTerm, OpinionTerm],
            linking_literals: ["", " is ", " because ", " is ", ""].map(String::from),
        }
    }

    fn marker(order: [Element; 4]) -> Self {
        let id = format!(
            "marker_{}",
            order.iter().map(|e| e.code()).collect::<Vec<_>>().join("_")
        );
        let linking_literals = [
            format!("{} ", order[0].marker()),
            format!(" {} ", order[1].marker()),
            format!(" {} ", order[2].marker()),
            format!(" {} ", order[3].marker()),
            String::new(),
        ];
        Template {
            id,
            kind: TemplateKind::MarkerStyle,
            element_order: order,
            linking_literals,
        }
    }

    /// Strings a field must not contain under this template.
    fn reserved_in(&self, position: usize) -> Vec<&str> {
        let mut reserved = vec![SSEP];
        if self.kind == TemplateKind::MarkerStyle {
            reserved.extend(Element::ALL.iter().map(|e| e.marker()));
        }
        // Every field but the last is terminated by the first occurrence of
        // the literal that follows it.
        if position < 3 {
            reserved.push(self.linking_literals[position + 1].as_str());
        }
        reserved
    }

    fn render_clause(
        &self,
        quad: &SurfaceQuad,
        quad_index: usize,
        out: &mut String,
        spans: &mut Vec<ElementSpan>,
    ) -> Result<(), TemplateError> {
        for (pos, role) in self.element_order.iter().enumerate() {
            let field = quad.field(*role);
            if field.is_empty()
                || field.trim() != field
                || self.reserved_in(pos).iter().any(|lit| field.contains(lit))
            {
                return Err(TemplateError::MarkerCollision {
                    template: self.id.clone(),
                    field: field.to_string(),
                });
            }
        }
        let clause_start = out.len();
        for (pos, role) in self.element_order.iter().enumerate() {
            out.push_str(&self.linking_literals[pos]);
            let start = out.len();
            out.push_str(quad.field(*role));
            spans.push(ElementSpan {
                quad: quad_index,
                role: *role,
                start,
                end: out.len(),
            });
        }
        out.push_str(&self.linking_literals[4]);

        // Suffix/prefix overlaps between a field and the next literal are not
        // caught by the containment check above.
        let roundtrip = self.parse_clause(&out[clause_start..]);
        if roundtrip.as_ref().map(|q| fields_equal(q, quad)) != Some(true) {
            return Err(TemplateError::MarkerCollision {
                template: self.id.clone(),
                field: self
                    .element_order
                    .iter()
                    .map(|r| quad.field(*r))
                    .collect::<Vec<_>>()
                    .join(" | "),
            });
        }
        Ok(())
    }

    /// Renders quads into one target sequence, one clause per quad in order.
    pub fn render(&self, quads: &[SurfaceQuad]) -> Result<TargetSequence, TemplateError> {
        if quads.is_empty() {
            return Err(TemplateError::EmptyInput);
        }
        let mut text = String::new();
        let mut element_spans = Vec::with_capacity(quads.len() * 4);
        let mut separator_spans = Vec::new();
        for (i, q) in quads.iter().enumerate() {
            if i > 0 {
                let start = text.len() + 1;
                text.push_str(SSEP_JOIN);
                separator_spans.push((start, start + SSEP.len()));
            }
            self.render_clause(q, i, &mut text, &mut element_spans)?;
        }
        Ok(TargetSequence {
            text,
            element_spans,
            separator_spans,
        })
    }

    fn parse_clause(&self, clause: &str) -> Option<SurfaceQuad> {
        let lits = &self.linking_literals;
        let clause = clause.trim();
        let mut rest = clause
            .strip_prefix(lits[0].trim_end())?
            .strip_suffix(lits[4].trim_start())?;
        if !lits[0].is_empty() {
            rest = rest.trim_start();
        }
        let mut fields: [&str; 4] = [""; 4];
        for pos in 0..3 {
            let at = rest.find(lits[pos + 1].as_str())?;
            fields[pos] = rest[..at].trim();
            rest = &rest[at + lits[pos + 1].len()..];
        }
        fields[3] = rest.trim();
        if fields.iter().any(|f| f.is_empty()) {
            return None;
        }

        let mut by_role = [""; 4];
        for (pos, role) in self.element_order.iter().enumerate() {
            by_role[*role as usize] = fields[pos];
        }
        let [x_at, x_ot, x_ac, x_sp] = by_role;
        if !matches!(x_sp, "great" | "ok" | "bad") {
            return None;
        }
        Some(SurfaceQuad::from_text(x_at, x_ot, x_ac, x_sp))
    }

    /// Parses generated text back into surface quads, dropping and counting
    /// clauses that do not match the template grammar.
    pub fn parse(&self, text: &str) -> ParseOutcome {
        let mut outcome = ParseOutcome::default();
        if text.trim().is_empty() {
            return outcome;
        }
        for clause in text.split(SSEP) {
            match self.parse_clause(clause) {
                Some(q) => outcome.quads.push(q),
                None => outcome.malformed += 1,
            }
        }
        outcome
    }

    /// Literal strings (trimmed, non-empty) that link the fields together.
    pub fn literal_tokens(&self) -> Vec<&str> {
        self.linking_literals
            .iter()
            .map(|l| l.trim())
            .filter(|l| !l.is_empty())
            .collect()
    }

    pub fn element_order_string(&self) -> String {
        self.element_order
            .iter()
            .map(|e| e.code())
            .collect::<Vec<_>>()
            .join(",")
    }
}

fn fields_equal(a: &SurfaceQuad, b: &SurfaceQuad) -> bool {
    a.x_at == b.x_at && a.x_ot == b.x_ot && a.x_ac == b.x_ac && a.x_sp == b.x_sp
}

fn permutations() -> Vec<[Element; 4]> {
    let mut out = Vec::with_capacity(24);
    for a in Element::ALL {
        for b in Element::ALL {
            for c in Element::ALL {
                for d in Element::ALL {
                    let p = [a, b, c, d];
                    let distinct = (0..4).all(|i| (i + 1..4).all(|j| p[i] != p[j]));
                    if distinct {
                        out.push(p);
                    }
                }
            }
        }
    }
    out
}

/// All 26 templates: gas, paraphrase, then the marker permutations in
/// lexicographic order of their element order (AT < OT < AC < SP).
pub fn list_templates() -> &'static [Template] {
    static REGISTRY: OnceLock<Vec<Template>> = OnceLock::new();
    REGISTRY.get_or_init(|| {
        let mut all = vec![Template::tuple(), Template::paraphrase()];
        all.extend(permutations().into_iter().map(Template::marker));
        all
    })
}

pub fn find_template(id: &str) -> Result<&'static Template, TemplateError> {
    list_templates()
        .iter()
        .find(|t| t.id == id)
        .ok_or_else(|| TemplateError::UnknownTemplate(id.to_string()))
}
