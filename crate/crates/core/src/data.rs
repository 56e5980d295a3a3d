//! Dataset files and corpus statistics.
//!
//! Two on-disk formats are supported:
//!
//! * quad-lines: `sentence####[['at', 'ac', 'sp', 'ot'], ...]`, the layout of
//!   released ASQP corpora. `NULL` marks an implicit term and sentiment is
//!   spelled `positive`, `neutral` or `negative`. Ids are line numbers.
//! * jsonl: one `{"id"?, "text", "quads": [{"at", "ot", "ac", "sp"}]}` object
//!   per line, with `null` for implicit terms. Missing ids become line numbers.

use std::fmt;
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::DataError;
use crate::evaluation::six_decimals;
use crate::quad::{Dataset, LabeledSentence, Polarity, SentimentQuad, Term};

const SEPARATOR: &str = "####";
const NULL: &str = "NULL";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    #[default]
    QuadLines,
    Jsonl,
}

impl FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "quad-lines" => Ok(Format::QuadLines),
            "jsonl" => Ok(Format::Jsonl),
            other => Err(format!(
                "unknown format {other:?} (expected quad-lines or jsonl)"
            )),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::QuadLines => "quad-lines",
            Format::Jsonl => "jsonl",
        })
    }
}

impl Format {
    /// Guesses the format from a file extension: `.jsonl`/`.json` is jsonl.
    pub fn from_path(path: &Path) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some("jsonl") | Some("json") => Format::Jsonl,
            _ => Format::QuadLines,
        }
    }
}

fn parse_error(line: usize, column: usize, message: impl Into<String>) -> DataError {
    DataError::Parse {
        line,
        column,
        message: message.into(),
    }
}

/// Reader for the Python list-of-lists literal used by quad-lines files.
struct Literal {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    /// Column of `chars[0]` within the line, 1-based.
    base: usize,
}

impl Literal {
    fn new(src: &str, line: usize, base: usize) -> Self {
        Literal {
            chars: src.chars().collect(),
            pos: 0,
            line,
            base,
        }
    }

    fn err(&self, message: impl Into<String>) -> DataError {
        parse_error(self.line, self.base + self.pos, message)
    }

    fn skip_ws(&mut self) {
        while self.chars.get(self.pos).is_some_and(|c| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn expect(&mut self, want: char) -> Result<(), DataError> {
        self.skip_ws();
        match self.peek() {
            Some(c) if c == want => {
                self.pos += 1;
                Ok(())
            }
            Some(c) => Err(self.err(format!("expected '{want}', found '{c}'"))),
            None => Err(self.err(format!("expected '{want}', found end of line"))),
        }
    }

    fn string(&mut self) -> Result<(String, usize), DataError> {
        self.skip_ws();
        let column = self.base + self.pos;
        let quote = match self.peek() {
            Some(q @ ('\'' | '"')) => q,
            Some(c) => return Err(self.err(format!("expected a quoted string, found '{c}'"))),
            None => return Err(self.err("expected a quoted string, found end of line")),
        };
        self.pos += 1;
        let mut out = String::new();
        loop {
            match self.peek() {
                None => return Err(parse_error(self.line, column, "unterminated string")),
                Some('\\') => {
                    self.pos += 1;
                    let escaped = match self.peek() {
                        Some('n') => '\n',
                        Some('t') => '\t',
                        Some(c @ ('\\' | '\'' | '"')) => c,
                        Some(c) => return Err(self.err(format!("unsupported escape '\\{c}'"))),
                        None => return Err(parse_error(self.line, column, "unterminated string")),
                    };
                    out.push(escaped);
                    self.pos += 1;
                }
                Some(c) if c == quote => {
                    self.pos += 1;
                    return Ok((out, column));
                }
                Some(c) => {
                    out.push(c);
                    self.pos += 1;
                }
            }
        }
    }

    fn quad(&mut self) -> Result<SentimentQuad, DataError> {
        self.skip_ws();
        let close = match self.peek() {
            Some('[') => ']',
            Some('(') => ')',
            Some(c) => return Err(self.err(format!("expected '[' opening a quad, found '{c}'"))),
            None => return Err(self.err("expected '[' opening a quad, found end of line")),
        };
        self.pos += 1;
        let mut fields = Vec::with_capacity(4);
        for i in 0..4 {
            if i > 0 {
                self.expect(',')?;
            }
            fields.push(self.string()?);
        }
        self.skip_ws();
        if self.peek() == Some(',') {
            self.pos += 1;
        }
        self.expect(close)?;

        let term = |(text, col): &(String, usize)| -> Result<Term, DataError> {
            if text == NULL {
                Ok(Term::Implicit)
            } else {
                Term::explicit(text.as_str())
                    .map_err(|e| parse_error(self.line, *col, e.to_string()))
            }
        };
        let polarity: Polarity = fields[2].0.parse().map_err(|e: crate::error::QuadError| {
            parse_error(self.line, fields[2].1, e.to_string())
        })?;
        SentimentQuad::new(
            term(&fields[0])?,
            term(&fields[3])?,
            fields[1].0.clone(),
            polarity,
        )
        .map_err(|e| parse_error(self.line, fields[1].1, e.to_string()))
    }

    fn quads(&mut self) -> Result<Vec<SentimentQuad>, DataError> {
        self.expect('[')?;
        let mut out = Vec::new();
        self.skip_ws();
        if self.peek() == Some(']') {
            self.pos += 1;
        } else {
            loop {
                out.push(self.quad()?);
                self.skip_ws();
                match self.peek() {
                    Some(',') => {
                        self.pos += 1;
                        self.skip_ws();
                        if self.peek() == Some(']') {
                            self.pos += 1;
                            break;
                        }
                    }
                    Some(']') => {
                        self.pos += 1;
                        break;
                    }
                    Some(c) => return Err(self.err(format!("expected ',' or ']', found '{c}'"))),
                    None => return Err(self.err("expected ',' or ']', found end of line")),
                }
            }
        }
        self.skip_ws();
        if let Some(c) = self.peek() {
            return Err(self.err(format!("unexpected '{c}' after quad list")));
        }
        Ok(out)
    }
}

/// Parses one quad-lines record. `line` is 1-based and becomes the id.
pub fn parse_quad_line(raw: &str, line: usize) -> Result<LabeledSentence, DataError> {
    let Some((text, labels)) = raw.split_once(SEPARATOR) else {
        return Err(parse_error(
            line,
            raw.chars().count() + 1,
            "missing '####' separator",
        ));
    };
    let base = text.chars().count() + SEPARATOR.len() + 1;
    let quads = Literal::new(labels, line, base).quads()?;
    Ok(LabeledSentence {
        id: line.to_string(),
        text: text.trim().to_string(),
        quads,
    })
}

#[derive(Deserialize)]
struct JsonRecord {
    #[serde(default)]
    id: Option<serde_json::Value>,
    #[serde(default)]
    text: String,
    #[serde(default)]
    quads: Vec<SentimentQuad>,
}

#[derive(Serialize)]
struct JsonRecordOut<'a> {
    id: &'a str,
    text: &'a str,
    quads: &'a [SentimentQuad],
}

fn parse_json_line(raw: &str, line: usize) -> Result<LabeledSentence, DataError> {
    let rec: JsonRecord =
        serde_json::from_str(raw).map_err(|e| parse_error(line, e.column(), e.to_string()))?;
    let id = match rec.id {
        None | Some(serde_json::Value::Null) => line.to_string(),
        Some(serde_json::Value::String(s)) => s,
        Some(serde_json::Value::Number(n)) => n.to_string(),
        Some(other) => {
            return Err(parse_error(
                line,
                1,
                format!("id must be a string or number, got {other}"),
            ))
        }
    };
    for q in &rec.quads {
        q.validate()
            .map_err(|e| parse_error(line, 1, e.to_string()))?;
    }
    Ok(LabeledSentence {
        id,
        text: rec.text,
        quads: rec.quads,
    })
}

/// Reads a dataset. Blank lines are skipped but still count for line numbers.
pub fn read<R: BufRead>(reader: R, format: Format, name: &str) -> Result<Dataset, DataError> {
    let mut sentences = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let raw = line.trim_end_matches('\r');
        if raw.trim().is_empty() {
            continue;
        }
        let n = i + 1;
        sentences.push(match format {
            Format::QuadLines => parse_quad_line(raw, n)?,
            Format::Jsonl => parse_json_line(raw, n)?,
        });
    }
    if sentences.is_empty() {
        return Err(DataError::EmptyFile);
    }
    Ok(Dataset::new(name, sentences))
}

pub fn load(path: &Path, format: Format) -> Result<Dataset, DataError> {
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    read(BufReader::new(fs::File::open(path)?), format, &name)
}

/// Python `repr` of a string, so files stay readable by `ast.literal_eval`.
fn py_repr(s: &str) -> String {
    let quote = if s.contains('\'') && !s.contains('"') {
        '"'
    } else {
        '\''
    };
    let mut out = String::with_capacity(s.len() + 2);
    out.push(quote);
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            c if c == quote => {
                out.push('\\');
                out.push(c);
            }
            c => out.push(c),
        }
    }
    out.push(quote);
    out
}

pub fn format_quad_line(s: &LabeledSentence) -> String {
    let term = |t: &Term| py_repr(t.as_explicit().unwrap_or(NULL));
    let quads: Vec<String> = s
        .quads
        .iter()
        .map(|q| {
            format!(
                "[{}, {}, {}, {}]",
                term(&q.aspect_term),
                py_repr(&q.aspect_category),
                py_repr(q.polarity.label()),
                term(&q.opinion_term)
            )
        })
        .collect();
    format!("{}{SEPARATOR}[{}]", s.text, quads.join(", "))
}

pub fn format_json_line(s: &LabeledSentence) -> String {
    serde_json::to_string(&JsonRecordOut {
        id: &s.id,
        text: &s.text,
        quads: &s.quads,
    })
    .expect("records serialize")
}

pub fn write<W: Write>(mut w: W, d: &Dataset, format: Format) -> Result<(), DataError> {
    for s in &d.sentences {
        let line = match format {
            Format::QuadLines => format_quad_line(s),
            Format::Jsonl => format_json_line(s),
        };
        writeln!(w, "{line}")?;
    }
    Ok(())
}

pub fn save(path: &Path, d: &Dataset, format: Format) -> Result<(), DataError> {
    let mut buf = Vec::new();
    write(&mut buf, d, format)?;
    fs::write(path, buf)?;
    Ok(())
}

/// Corpus statistics in the layout of the usual dataset summary table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DatasetStats {
    pub num_sentences: usize,
    pub num_words: usize,
    #[serde(serialize_with = "six_decimals")]
    pub words_per_sentence: f64,
    pub ea_eo: usize,
    pub ia_eo: usize,
    pub ea_io: usize,
    pub ia_io: usize,
    pub num_quads: usize,
    #[serde(serialize_with = "six_decimals")]
    pub quads_per_sentence: f64,
    pub num_categories: usize,
    /// Quads per category.
    #[serde(serialize_with = "six_decimals")]
    pub mean_instances_per_category: f64,
}

pub const STATS_HEADER: &str = "#S\t#W\t#W/S\tEA&EO\tIA&EO\tEA&IO\tIA&IO\t#Q\t#Q/S\t#C\t#M(C)";

impl DatasetStats {
    pub fn tsv_row(&self) -> String {
        format!(
            "{}\t{}\t{:.6}\t{}\t{}\t{}\t{}\t{}\t{:.6}\t{}\t{:.6}",
            self.num_sentences,
            self.num_words,
            self.words_per_sentence,
            self.ea_eo,
            self.ia_eo,
            self.ea_io,
            self.ia_io,
            self.num_quads,
            self.quads_per_sentence,
            self.num_categories,
            self.mean_instances_per_category
        )
    }
}

pub fn stats(d: &Dataset) -> Result<DatasetStats, DataError> {
    if d.is_empty() {
        return Err(DataError::EmptyDataset);
    }
    let num_sentences = d.len();
    let num_words = d
        .sentences
        .iter()
        .map(|s| s.text.split_whitespace().count())
        .sum();
    let (mut ea_eo, mut ia_eo, mut ea_io, mut ia_io) = (0, 0, 0, 0);
    for q in d.sentences.iter().flat_map(|s| &s.quads) {
        match (q.aspect_term.is_implicit(), q.opinion_term.is_implicit()) {
            (false, false) => ea_eo += 1,
            (true, false) => ia_eo += 1,
            (false, true) => ea_io += 1,
            (true, true) => ia_io += 1,
        }
    }
    let num_quads = ea_eo + ia_eo + ea_io + ia_io;
    let num_categories = d.categories().len();
    Ok(DatasetStats {
        num_sentences,
        num_words,
        words_per_sentence: num_words as f64 / num_sentences as f64,
        ea_eo,
        ia_eo,
        ea_io,
        ia_io,
        num_quads,
        quads_per_sentence: num_quads as f64 / num_sentences as f64,
        num_categories,
        mean_instances_per_category: if num_categories == 0 {
            0.0
        } else {
            num_quads as f64 / num_categories as f64
        },
    })
}

/// Inclusive instance-count range; `None` as the upper end is unbounded.
pub type Bucket = (usize, Option<usize>);

/// Number of categories whose quad count falls in each bucket. Buckets must
/// be contiguous, start at 1 and reach the largest category.
pub fn category_histogram(d: &Dataset, buckets: &[Bucket]) -> Result<Vec<usize>, DataError> {
    let mut per_category: std::collections::BTreeMap<&str, usize> = Default::default();
    for q in d.sentences.iter().flat_map(|s| &s.quads) {
        *per_category.entry(q.aspect_category.as_str()).or_default() += 1;
    }
    let max = per_category.values().copied().max().unwrap_or(0);

    let Some(first) = buckets.first() else {
        return Err(DataError::InvalidBuckets("no buckets".into()));
    };
    if first.0 != 1 {
        return Err(DataError::InvalidBuckets(format!(
            "first bucket starts at {}, not 1",
            first.0
        )));
    }
    for (i, (lo, hi)) in buckets.iter().enumerate() {
        match hi {
            Some(h) if h < lo => {
                return Err(DataError::InvalidBuckets(format!(
                    "bucket {lo}-{h} is reversed"
                )));
            }
            None if i + 1 != buckets.len() => {
                return Err(DataError::InvalidBuckets(
                    "only the last bucket may be open".into(),
                ));
            }
            _ => {}
        }
        if let Some((next_lo, _)) = buckets.get(i + 1) {
            let h = hi.expect("checked above");
            if *next_lo != h + 1 {
                return Err(DataError::InvalidBuckets(format!(
                    "gap or overlap between {h} and {next_lo}"
                )));
            }
        }
    }
    if let (_, Some(h)) = buckets[buckets.len() - 1] {
        if h < max {
            return Err(DataError::InvalidBuckets(format!(
                "buckets end at {h} but a category has {max} instances"
            )));
        }
    }

    let mut counts = vec![0; buckets.len()];
    for n in per_category.values() {
        let idx = buckets
            .iter()
            .position(|(lo, hi)| n >= lo && hi.is_none_or(|h| *n <= h))
            .expect("buckets cover 1..=max");
        counts[idx] += 1;
    }
    Ok(counts)
}

/// Parses `1-50,51-100,101-` style bucket lists.
pub fn parse_buckets(spec: &str) -> Result<Vec<Bucket>, DataError> {
    spec.split(',')
        .map(|part| {
            let part = part.trim();
            let bad = || DataError::InvalidBuckets(format!("cannot read bucket {part:?}"));
            let (lo, hi) = part.split_once('-').ok_or_else(bad)?;
            let lo = lo.trim().parse().map_err(|_| bad())?;
            let hi = match hi.trim() {
                "" => None,
                h => Some(h.parse().map_err(|_| bad())?),
            };
            Ok((lo, hi))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn read_str(s: &str, format: Format) -> Result<Dataset, DataError> {
        read(s.as_bytes(), format, "t")
    }

    #[test]
    fn reads_a_quad_line() {
        let d = read_str(
            "The room is clean.####[['room', 'room_overall', 'positive', 'clean']]\n",
            Format::QuadLines,
        )
        .unwrap();
        assert_eq!(d.len(), 1);
        let s = &d.sentences[0];
        assert_eq!(s.id, "1");
        assert_eq!(s.text, "The room is clean.");
        assert_eq!(s.quads[0].polarity, Polarity::Positive);
        assert_eq!(s.quads[0].aspect_term, Term::Explicit("room".into()));
        assert_eq!(s.quads[0].opinion_term, Term::Explicit("clean".into()));
    }

    #[test]
    fn null_is_implicit() {
        let d = read_str(
            "So dirty .####[['NULL', 'hotel', 'negative', \"so dirty\"], ('x', 'a', 'neutral', 'NULL',)]",
            Format::QuadLines,
        )
        .unwrap();
        let q = &d.sentences[0].quads;
        assert_eq!(q[0].aspect_term, Term::Implicit);
        assert_eq!(q[1].opinion_term, Term::Implicit);
    }

    #[test]
    fn malformed_nesting_reports_position() {
        let err = read_str(
            "ok line####[]\nbad .####[['a', 'b', 'positive', 'c']",
            Format::QuadLines,
        )
        .unwrap_err();
        match err {
            DataError::Parse { line, column, .. } => {
                assert_eq!(line, 2);
                assert_eq!(column, 38);
            }
            other => panic!("{other:?}"),
        }
        let err = read_str("x####[['a', 'b', 'great!', 'c']]", Format::QuadLines).unwrap_err();
        assert!(
            matches!(
                err,
                DataError::Parse {
                    line: 1,
                    column: 18,
                    ..
                }
            ),
            "{err:?}"
        );
        assert!(matches!(
            read_str("no separator", Format::QuadLines),
            Err(DataError::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn empty_input() {
        assert!(matches!(
            read_str("\n  \n", Format::QuadLines),
            Err(DataError::EmptyFile)
        ));
        assert!(matches!(
            read_str("", Format::Jsonl),
            Err(DataError::EmptyFile)
        ));
    }

    #[test]
    fn jsonl_ids_and_nulls() {
        let d = read_str(
            "{\"text\":\"a\",\"quads\":[{\"at\":null,\"ot\":\"nice\",\"ac\":\"hotel\",\"sp\":\"positive\"}]}\n\n{\"id\":7,\"text\":\"b\",\"quads\":[]}",
            Format::Jsonl,
        )
        .unwrap();
        assert_eq!(d.sentences[0].id, "1");
        assert_eq!(d.sentences[1].id, "7");
        assert_eq!(d.sentences[0].quads[0].aspect_term, Term::Implicit);
        assert!(matches!(
            read_str("{\"text\": 3}", Format::Jsonl),
            Err(DataError::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn python_repr_quoting() {
        assert_eq!(py_repr("it's"), "\"it's\"");
        assert_eq!(py_repr("a\\b"), "'a\\\\b'");
        assert_eq!(py_repr("both ' \""), "'both \\' \"'");
    }

    #[test]
    fn single_explicit_quad_stats() {
        let d = read_str(
            "The room is clean .####[['room', 'room_overall', 'positive', 'clean']]",
            Format::QuadLines,
        )
        .unwrap();
        let s = stats(&d).unwrap();
        assert_eq!((s.ea_eo, s.ia_eo, s.ea_io, s.ia_io), (1, 0, 0, 0));
        assert_eq!(s.num_words, 5);
        assert_eq!(
            s.tsv_row().split('\t').count(),
            STATS_HEADER.split('\t').count()
        );
    }

    #[test]
    fn histogram() {
        let d = read_str(
            "a####[['x', 'c1', 'positive', 'y'], ['x', 'c1', 'positive', 'z'], ['x', 'c1', 'positive', 'w']]\nb####[['x', 'c2', 'negative', 'y']]",
            Format::QuadLines,
        )
        .unwrap();
        assert_eq!(category_histogram(&d, &[(1, Some(50))]).unwrap(), vec![2]);
        assert_eq!(
            category_histogram(&d, &[(1, Some(2)), (3, None)]).unwrap(),
            vec![1, 1]
        );
        for bad in [
            vec![(1, Some(2)), (4, None)],
            vec![(2, None)],
            vec![(1, Some(2))],
            vec![(1, None), (2, None)],
            vec![],
        ] {
            assert!(
                matches!(
                    category_histogram(&d, &bad),
                    Err(DataError::InvalidBuckets(_))
                ),
                "{bad:?}"
            );
        }
        assert_eq!(
            parse_buckets("1-50, 51-").unwrap(),
            vec![(1, Some(50)), (51, None)]
        );
        assert!(parse_buckets("1..5").is_err());
    }

    fn arb_text() -> impl Strategy<Value = String> {
        "[a-zA-Z'\"\\\\ .,!é]{1,12}".prop_filter("non-blank", |s| !s.trim().is_empty())
    }

    fn arb_term() -> impl Strategy<Value = Term> {
        prop_oneof![
            1 => Just(Term::Implicit),
            3 => arb_text().prop_filter("not the NULL marker", |s| s != NULL).prop_map(Term::Explicit),
        ]
    }

    fn arb_quad() -> impl Strategy<Value = SentimentQuad> {
        (
            arb_term(),
            arb_term(),
            arb_text(),
            prop::sample::select(Polarity::ALL.to_vec()),
        )
            .prop_map(|(at, ot, ac, sp)| SentimentQuad::new(at, ot, ac, sp).unwrap())
    }

    fn arb_dataset() -> impl Strategy<Value = Dataset> {
        prop::collection::vec(
            (
                arb_text()
                    .prop_map(|s| s.trim().to_string())
                    .prop_filter("non-blank", |s| !s.is_empty()),
                prop::collection::vec(arb_quad(), 0..4),
            ),
            1..6,
        )
        .prop_map(|rows| {
            Dataset::new(
                "t",
                rows.into_iter()
                    .enumerate()
                    .map(|(i, (text, quads))| LabeledSentence {
                        id: (i + 1).to_string(),
                        text,
                        quads,
                    })
                    .collect(),
            )
        })
    }

    proptest! {
        #[test]
        fn save_load_roundtrip(d in arb_dataset()) {
            for format in [Format::QuadLines, Format::Jsonl] {
                let mut buf = Vec::new();
                write(&mut buf, &d, format).unwrap();
                let back = read(buf.as_slice(), format, "t").unwrap();
                prop_assert_eq!(&back, &d);
            }
        }

        #[test]
        fn quadrants_sum_to_quads(d in arb_dataset()) {
            let s = stats(&d).unwrap();
            prop_assert_eq!(s.ea_eo + s.ia_eo + s.ea_io + s.ia_io, s.num_quads);
            prop_assert!((s.words_per_sentence * s.num_sentences as f64 - s.num_words as f64).abs() < 1e-9);
        }
    }
}
