//! Sentiment quads, their surface projection, and annotated sentences.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::QuadError;

/// Surface word standing in for an implicit aspect or opinion term.
pub const IMPLICIT_SURFACE: &str = "it";

/// Sentiment polarity of a quad.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Polarity {
    Positive,
    Neutral,
    Negative,
}

impl Polarity {
    pub const ALL: [Polarity; 3] = [Polarity::Positive, Polarity::Neutral, Polarity::Negative];

    /// Word used inside target sequences.
    pub fn surface(self) -> &'static str {
        match self {
            Polarity::Positive => "great",
            Polarity::Neutral => "ok",
            Polarity::Negative => "bad",
        }
    }

    pub fn from_surface(s: &str) -> Result<Self, QuadError> {
        match s {
            "great" => Ok(Polarity::Positive),
            "ok" => Ok(Polarity::Neutral),
            "bad" => Ok(Polarity::Negative),
            other => Err(QuadError::UnknownPolaritySurface(other.to_string())),
        }
    }

    /// Label used on disk ("positive", "neutral", "negative").
    pub fn label(self) -> &'static str {
        match self {
            Polarity::Positive => "positive",
            Polarity::Neutral => "neutral",
            Polarity::Negative => "negative",
        }
    }
}

impl fmt::Display for Polarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Polarity {
    type Err = QuadError;

    /// Accepts on-disk labels, short tags and surface words, case-insensitively.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "positive" | "pos" | "great" => Ok(Polarity::Positive),
            "neutral" | "neu" | "ok" => Ok(Polarity::Neutral),
            "negative" | "neg" | "bad" => Ok(Polarity::Negative),
            _ => Err(QuadError::UnknownPolarity(s.to_string())),
        }
    }
}

impl Serialize for Polarity {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.label())
    }
}

impl<'de> Deserialize<'de> for Polarity {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// An aspect or opinion term: either a span of the sentence or implicit.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Explicit(String),
    Implicit,
}

impl Term {
    /// Builds a term from text, rejecting empty strings.
    pub fn explicit(text: impl Into<String>) -> Result<Self, QuadError> {
        let text = text.into();
        if text.trim().is_empty() {
            return Err(QuadError::EmptyTerm);
        }
        Ok(Term::Explicit(text))
    }

    pub fn is_implicit(&self) -> bool {
        matches!(self, Term::Implicit)
    }

    pub fn as_explicit(&self) -> Option<&str> {
        match self {
            Term::Explicit(s) => Some(s),
            Term::Implicit => None,
        }
    }

    fn key(&self) -> Option<String> {
        self.as_explicit().map(normalize)
    }
}

impl Serialize for Term {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Term::Explicit(t) => s.serialize_str(t),
            Term::Implicit => s.serialize_none(),
        }
    }
}

impl<'de> Deserialize<'de> for Term {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match Option::<String>::deserialize(d)? {
            None => Ok(Term::Implicit),
            Some(s) => Term::explicit(s).map_err(serde::de::Error::custom),
        }
    }
}

/// Lowercases and collapses internal whitespace.
pub fn normalize(s: &str) -> String {
    s.split_whitespace()
        .map(|w| w.to_lowercase())
        .collect::<Vec<_>>()
        .join(" ")
}

/// One (aspect term, opinion term, aspect category, sentiment polarity) annotation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SentimentQuad {
    #[serde(rename = "at")]
    pub aspect_term: Term,
    #[serde(rename = "ot")]
    pub opinion_term: Term,
    #[serde(rename = "ac")]
    pub aspect_category: String,
    #[serde(rename = "sp")]
    pub polarity: Polarity,
}

/// Normalized identity of a quad, used wherever two quads are compared.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuadKey {
    pub aspect_term: Option<String>,
    pub opinion_term: Option<String>,
    pub aspect_category: String,
    pub polarity: Polarity,
}

impl SentimentQuad {
    pub fn new(
        aspect_term: Term,
        opinion_term: Term,
        aspect_category: impl Into<String>,
        polarity: Polarity,
    ) -> Result<Self, QuadError> {
        let q = SentimentQuad {
            aspect_term,
            opinion_term,
            aspect_category: aspect_category.into(),
            polarity,
        };
        q.validate()?;
        Ok(q)
    }

    pub fn validate(&self) -> Result<(), QuadError> {
        if self.aspect_category.trim().is_empty() {
            return Err(QuadError::EmptyCategory);
        }
        for term in [&self.aspect_term, &self.opinion_term] {
            if let Term::Explicit(s) = term {
                if s.trim().is_empty() {
                    return Err(QuadError::EmptyTerm);
                }
            }
        }
        Ok(())
    }

    /// Case-insensitive, whitespace-normalized identity. Implicit equals only implicit.
    pub fn key(&self) -> QuadKey {
        QuadKey {
            aspect_term: self.aspect_term.key(),
            opinion_term: self.opinion_term.key(),
            aspect_category: normalize(&self.aspect_category),
            polarity: self.polarity,
        }
    }

    pub fn matches(&self, other: &SentimentQuad) -> bool {
        self.key() == other.key()
    }

    pub fn is_fully_explicit(&self) -> bool {
        !self.aspect_term.is_implicit() && !self.opinion_term.is_implicit()
    }
}

/// A quad after mapping every element to the words placed in a target sequence.
///
/// The implicitness flags travel with the surface values so that a literal
/// "it" in the data is never mistaken for an implicit element.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SurfaceQuad {
    pub x_at: String,
    pub x_ot: String,
    pub x_ac: String,
    pub x_sp: String,
    pub at_implicit: bool,
    pub ot_implicit: bool,
}

impl SurfaceQuad {
    /// Builds a surface quad as read back from generated text: a bare "it"
    /// in the aspect or opinion slot is taken as implicit.
    pub fn from_text(x_at: &str, x_ot: &str, x_ac: &str, x_sp: &str) -> Self {
        SurfaceQuad {
            at_implicit: x_at == IMPLICIT_SURFACE,
            ot_implicit: x_ot == IMPLICIT_SURFACE,
            x_at: x_at.to_string(),
            x_ot: x_ot.to_string(),
            x_ac: x_ac.to_string(),
            x_sp: x_sp.to_string(),
        }
    }

    pub fn field(&self, role: crate::template::Element) -> &str {
        use crate::template::Element;
        match role {
            Element::AspectTerm => &self.x_at,
            Element::OpinionTerm => &self.x_ot,
            Element::AspectCategory => &self.x_ac,
            Element::Polarity => &self.x_sp,
        }
    }
}

pub fn project(q: &SentimentQuad) -> SurfaceQuad {
    let surface = |t: &Term| match t {
        Term::Explicit(s) => s.clone(),
        Term::Implicit => IMPLICIT_SURFACE.to_string(),
    };
    SurfaceQuad {
        x_at: surface(&q.aspect_term),
        x_ot: surface(&q.opinion_term),
        x_ac: q.aspect_category.clone(),
        x_sp: q.polarity.surface().to_string(),
        at_implicit: q.aspect_term.is_implicit(),
        ot_implicit: q.opinion_term.is_implicit(),
    }
}

pub fn unproject(s: &SurfaceQuad) -> Result<SentimentQuad, QuadError> {
    let polarity = Polarity::from_surface(&s.x_sp)?;
    let term = |text: &str, implicit: bool| {
        if implicit {
            Ok(Term::Implicit)
        } else {
            Term::explicit(text)
        }
    };
    SentimentQuad::new(
        term(&s.x_at, s.at_implicit)?,
        term(&s.x_ot, s.ot_implicit)?,
        s.x_ac.clone(),
        polarity,
    )
}

/// A review sentence with its gold quads in annotation order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledSentence {
    pub id: String,
    pub text: String,
    pub quads: Vec<SentimentQuad>,
}

impl LabeledSentence {
    pub fn categories(&self) -> BTreeSet<&str> {
        self.quads
            .iter()
            .map(|q| q.aspect_category.as_str())
            .collect()
    }

    /// Explicit terms that cannot be found in the sentence after whitespace
    /// and case normalization.
    pub fn unanchored_terms(&self) -> Vec<&str> {
        let text = normalize(&self.text);
        self.quads
            .iter()
            .flat_map(|q| [&q.aspect_term, &q.opinion_term])
            .filter_map(|t| t.as_explicit())
            .filter(|t| !text.contains(&normalize(t)))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub name: String,
    pub sentences: Vec<LabeledSentence>,
}

impl Dataset {
    pub fn new(name: impl Into<String>, sentences: Vec<LabeledSentence>) -> Self {
        Dataset {
            name: name.into(),
            sentences,
        }
    }

    pub fn categories(&self) -> BTreeSet<String> {
        self.sentences
            .iter()
            .flat_map(|s| s.quads.iter().map(|q| q.aspect_category.clone()))
            .collect()
    }

    pub fn get(&self, id: &str) -> Option<&LabeledSentence> {
        self.sentences.iter().find(|s| s.id == id)
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    /// Sub-dataset with the given ids, in the order given. Unknown ids are skipped.
    pub fn subset(&self, ids: &[String]) -> Dataset {
        let index: std::collections::HashMap<&str, &LabeledSentence> =
            self.sentences.iter().map(|s| (s.id.as_str(), s)).collect();
        Dataset {
            name: self.name.clone(),
            sentences: ids
                .iter()
                .filter_map(|id| index.get(id.as_str()).map(|s| (*s).clone()))
                .collect(),
        }
    }
}
