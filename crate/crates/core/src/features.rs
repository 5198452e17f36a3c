//! Ternary phonological feature tables.
//!
//! A table maps phone labels to ternary vectors over a fixed, ordered list of
//! feature names (`+` present, `0` not applicable, `-` absent). The bundled
//! table is a 21-feature PanPhon snapshot; user tables in the same TSV layout
//! are accepted too.
//!
//! Binarization expands every ternary value into two indicator slots, so a
//! table with `n` features yields binary vectors of length `2n`:
//! `+ -> (1, 0)`, `0 -> (0, 0)`, `- -> (0, 1)`.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// The bundled PanPhon snapshot (TSV, 21 features).
pub const BUNDLED_TABLE_TSV: &str = include_str!("../data/panphon_features.tsv");

#[derive(Debug, Error)]
pub enum FeatureError {
    #[error("feature table is empty")]
    EmptyTable,
    #[error("duplicate phone label {0:?} (line {1})")]
    DuplicatePhone(String, usize),
    #[error("line {line}: expected {expected} feature values, found {found}")]
    ArityMismatch {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: invalid feature value {value:?}")]
    InvalidValue { line: usize, value: String },
    #[error("line {0}: empty phone label")]
    EmptyLabel(usize),
    #[error("unknown phone {0:?}")]
    UnknownPhone(String),
    #[error("unknown feature {0:?}")]
    UnknownFeature(String),
    #[error("i/o error reading feature table: {0}")]
    Io(#[from] std::io::Error),
}

/// One ternary feature value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Ternary {
    Minus,
    Zero,
    Plus,
}

impl Ternary {
    pub fn as_i8(self) -> i8 {
        match self {
            Ternary::Minus => -1,
            Ternary::Zero => 0,
            Ternary::Plus => 1,
        }
    }

    pub fn from_i8(v: i8) -> Option<Self> {
        match v {
            -1 => Some(Ternary::Minus),
            0 => Some(Ternary::Zero),
            1 => Some(Ternary::Plus),
            _ => None,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Ternary::Minus => '-',
            Ternary::Zero => '0',
            Ternary::Plus => '+',
        }
    }
}

impl FromStr for Ternary {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "+" | "+1" | "1" => Ok(Ternary::Plus),
            "0" => Ok(Ternary::Zero),
            "-" | "-1" | "\u{2212}" => Ok(Ternary::Minus),
            _ => Err(()),
        }
    }
}

/// A phone's ternary feature vector, index-aligned with [`FeatureTable::features`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TernaryVector(pub Vec<Ternary>);

impl TernaryVector {
    pub fn from_i8(values: &[i8]) -> Option<Self> {
        values
            .iter()
            .map(|&v| Ternary::from_i8(v))
            .collect::<Option<Vec<_>>>()
            .map(TernaryVector)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> Ternary {
        self.0[i]
    }

    pub fn to_i8(&self) -> Vec<i8> {
        self.0.iter().map(|t| t.as_i8()).collect()
    }
}

/// Binarized feature vector: two indicator slots per ternary feature.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BinaryFeatureVector(pub Vec<u8>);

impl BinaryFeatureVector {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_f32(&self) -> Vec<f32> {
        self.0.iter().map(|&b| b as f32).collect()
    }
}

/// Expand a ternary vector into its binary form.
pub fn extend(t: &TernaryVector) -> BinaryFeatureVector {
    let mut out = Vec::with_capacity(2 * t.len());
    for v in &t.0 {
        let pair = match v {
            Ternary::Plus => [1, 0],
            Ternary::Zero => [0, 0],
            Ternary::Minus => [0, 1],
        };
        out.extend_from_slice(&pair);
    }
    BinaryFeatureVector(out)
}

/// Integer difference of two binary vectors, entries in {-1, 0, 1}.
pub fn binary_delta(a: &BinaryFeatureVector, b: &BinaryFeatureVector) -> Vec<i8> {
    a.0.iter()
        .zip(&b.0)
        .map(|(&x, &y)| x as i8 - y as i8)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PhoneClass {
    Consonant,
    Vowel,
}

impl fmt::Display for PhoneClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PhoneClass::Consonant => "consonant",
            PhoneClass::Vowel => "vowel",
        })
    }
}

impl FromStr for PhoneClass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "consonant" | "cons" | "c" => Ok(PhoneClass::Consonant),
            "vowel" | "v" => Ok(PhoneClass::Vowel),
            other => Err(format!("unknown phone class {other:?}")),
        }
    }
}

/// Phone label -> ternary vector, over an ordered feature list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureTable {
    features: Vec<String>,
    rows: BTreeMap<String, TernaryVector>,
}

impl FeatureTable {
    /// Build a table from in-memory rows, validating arity.
    pub fn new(
        features: Vec<String>,
        rows: impl IntoIterator<Item = (String, TernaryVector)>,
    ) -> Result<Self, FeatureError> {
        let mut map = BTreeMap::new();
        for (i, (label, vector)) in rows.into_iter().enumerate() {
            if label.is_empty() {
                return Err(FeatureError::EmptyLabel(i + 1));
            }
            if vector.len() != features.len() {
                return Err(FeatureError::ArityMismatch {
                    line: i + 1,
                    expected: features.len(),
                    found: vector.len(),
                });
            }
            if map.contains_key(&label) {
                return Err(FeatureError::DuplicatePhone(label, i + 1));
            }
            map.insert(label, vector);
        }
        if map.is_empty() || features.is_empty() {
            return Err(FeatureError::EmptyTable);
        }
        Ok(FeatureTable {
            features,
            rows: map,
        })
    }

    /// The bundled PanPhon snapshot.
    pub fn bundled() -> Self {
        load_feature_table(BUNDLED_TABLE_TSV.as_bytes()).expect("bundled feature table is valid")
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self, FeatureError> {
        let file = std::fs::File::open(path.as_ref())?;
        load_feature_table(file)
    }

    pub fn features(&self) -> &[String] {
        &self.features
    }

    pub fn n_features(&self) -> usize {
        self.features.len()
    }

    pub fn feature_index(&self, name: &str) -> Result<usize, FeatureError> {
        self.features
            .iter()
            .position(|f| f == name)
            .ok_or_else(|| FeatureError::UnknownFeature(name.to_string()))
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn contains(&self, phone: &str) -> bool {
        self.rows.contains_key(phone)
    }

    pub fn phones(&self) -> impl Iterator<Item = &str> {
        self.rows.keys().map(String::as_str)
    }

    pub fn rows(&self) -> impl Iterator<Item = (&str, &TernaryVector)> {
        self.rows.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn ternary(&self, phone: &str) -> Result<&TernaryVector, FeatureError> {
        self.rows
            .get(phone)
            .ok_or_else(|| FeatureError::UnknownPhone(phone.to_string()))
    }

    pub fn binary(&self, phone: &str) -> Result<BinaryFeatureVector, FeatureError> {
        self.ternary(phone).map(extend)
    }

    pub fn value(&self, phone: &str, feature: usize) -> Result<Ternary, FeatureError> {
        Ok(self.ternary(phone)?.get(feature))
    }

    /// `extend(h_a) - extend(h_b)`.
    pub fn feature_delta(&self, a: &str, b: &str) -> Result<Vec<i8>, FeatureError> {
        Ok(binary_delta(&self.binary(a)?, &self.binary(b)?))
    }

    /// Number of features on which the two phones' ternary values differ.
    pub fn phonological_distance(&self, a: &str, b: &str) -> Result<usize, FeatureError> {
        let (ta, tb) = (self.ternary(a)?, self.ternary(b)?);
        Ok(ta.0.iter().zip(&tb.0).filter(|(x, y)| x != y).count())
    }

    /// Vowel iff `+syl`; everything else is a consonant. Syllabic consonants
    /// such as [l̩] therefore land in the vowel class (see [`Self::is_syllabic_consonant`]).
    pub fn phone_class(&self, phone: &str) -> Result<PhoneClass, FeatureError> {
        let t = self.ternary(phone)?;
        match self.features.iter().position(|f| f == "syl") {
            Some(i) if t.get(i) == Ternary::Plus => Ok(PhoneClass::Vowel),
            _ => Ok(PhoneClass::Consonant),
        }
    }

    /// `+syl` and `+cons`: classed as a vowel but worth flagging in reports.
    pub fn is_syllabic_consonant(&self, phone: &str) -> Result<bool, FeatureError> {
        let t = self.ternary(phone)?;
        let syl = self.features.iter().position(|f| f == "syl");
        let cons = self.features.iter().position(|f| f == "cons");
        Ok(matches!((syl, cons), (Some(s), Some(c))
            if t.get(s) == Ternary::Plus && t.get(c) == Ternary::Plus))
    }

    /// Serialize back to the TSV layout accepted by [`load_feature_table`].
    pub fn write_tsv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        write!(w, "ipa")?;
        for f in &self.features {
            write!(w, "\t{f}")?;
        }
        writeln!(w)?;
        for (label, v) in &self.rows {
            write!(w, "{label}")?;
            for t in &v.0 {
                write!(w, "\t{}", t.symbol())?;
            }
            writeln!(w)?;
        }
        Ok(())
    }

    /// Restrict the table to the given phones.
    pub fn subset<'a>(
        &self,
        phones: impl IntoIterator<Item = &'a str>,
    ) -> Result<FeatureTable, FeatureError> {
        let rows = phones
            .into_iter()
            .map(|p| Ok((p.to_string(), self.ternary(p)?.clone())))
            .collect::<Result<Vec<_>, FeatureError>>()?;
        FeatureTable::new(self.features.clone(), rows)
    }
}

/// Parse a TSV feature table: a header row (first cell names the label column,
/// the rest are feature names) and one row per phone. Lines starting with `#`
/// and blank lines are ignored.
pub fn load_feature_table<R: Read>(source: R) -> Result<FeatureTable, FeatureError> {
    let reader = BufReader::new(source);
    let mut features: Option<Vec<String>> = None;
    let mut rows: BTreeMap<String, TernaryVector> = BTreeMap::new();

    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        let line = line.trim_end_matches(['\r', '\n']);
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let mut cells = line.split('\t');
        let first = cells.next().unwrap_or_default();
        let Some(features) = features.as_ref() else {
            features = Some(cells.map(|c| c.trim().to_string()).collect());
            continue;
        };
        let label = first.trim();
        if label.is_empty() {
            return Err(FeatureError::EmptyLabel(lineno));
        }
        let values = cells
            .map(|c| {
                c.trim()
                    .parse::<Ternary>()
                    .map_err(|_| FeatureError::InvalidValue {
                        line: lineno,
                        value: c.to_string(),
                    })
            })
            .collect::<Result<Vec<_>, _>>()?;
        if values.len() != features.len() {
            return Err(FeatureError::ArityMismatch {
                line: lineno,
                expected: features.len(),
                found: values.len(),
            });
        }
        if rows.contains_key(label) {
            return Err(FeatureError::DuplicatePhone(label.to_string(), lineno));
        }
        rows.insert(label.to_string(), TernaryVector(values));
    }

    let features = features.ok_or(FeatureError::EmptyTable)?;
    if rows.is_empty() || features.is_empty() {
        return Err(FeatureError::EmptyTable);
    }
    Ok(FeatureTable { features, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const TOY: &str = "ipa\tvoi\tlab\tnas\n\
                       b\t+\t+\t-\n\
                       p\t-\t+\t-\n\
                       d\t+\t-\t-\n\
                       t\t-\t-\t-\n";

    #[test]
    fn bundled_table_has_21_features() {
        let t = FeatureTable::bundled();
        assert_eq!(t.n_features(), 21);
        assert!(t.len() > 6000);
    }

    #[test]
    fn b_row_matches_panphon() {
        let t = FeatureTable::bundled();
        let b = t.ternary("b").unwrap();
        let voi = t.feature_index("voi").unwrap();
        let lab = t.feature_index("lab").unwrap();
        let nas = t.feature_index("nas").unwrap();
        let ant = t.feature_index("ant").unwrap();
        let tense = t.feature_index("tense").unwrap();
        assert_eq!(b.get(voi), Ternary::Plus);
        assert_eq!(b.get(lab), Ternary::Plus);
        assert_eq!(b.get(nas), Ternary::Minus);
        assert_eq!(b.get(ant), Ternary::Plus);
        assert_eq!(b.get(tense), Ternary::Zero);
    }

    #[test]
    fn empty_stream_is_rejected() {
        assert!(matches!(
            load_feature_table("".as_bytes()),
            Err(FeatureError::EmptyTable)
        ));
        assert!(matches!(
            load_feature_table("ipa\tvoi\n".as_bytes()),
            Err(FeatureError::EmptyTable)
        ));
    }

    #[test]
    fn duplicate_phone_is_rejected() {
        let src = "ipa\tvoi\np\t-\np\t+\n";
        assert!(matches!(
            load_feature_table(src.as_bytes()),
            Err(FeatureError::DuplicatePhone(p, 3)) if p == "p"
        ));
    }

    #[test]
    fn arity_and_value_errors() {
        let src = "ipa\tvoi\tlab\np\t-\n";
        assert!(matches!(
            load_feature_table(src.as_bytes()),
            Err(FeatureError::ArityMismatch { expected: 2, found: 1, .. })
        ));
        let src = "ipa\tvoi\np\tx\n";
        assert!(matches!(
            load_feature_table(src.as_bytes()),
            Err(FeatureError::InvalidValue { .. })
        ));
    }

    #[test]
    fn comments_are_skipped() {
        let src = format!("# header comment\n{TOY}# trailing\n");
        let t = load_feature_table(src.as_bytes()).unwrap();
        assert_eq!(t.len(), 4);
    }

    #[test]
    fn extend_single_values() {
        let cases = [(1i8, [1u8, 0u8]), (0, [0, 0]), (-1, [0, 1])];
        for (v, want) in cases {
            let t = TernaryVector::from_i8(&[v]).unwrap();
            assert_eq!(extend(&t).0, want.to_vec());
        }
        let zeros = TernaryVector::from_i8(&[0; 21]).unwrap();
        assert_eq!(extend(&zeros).0, vec![0u8; 42]);
    }

    #[test]
    fn extend_is_injective_on_pairs() {
        let vals = [-1i8, 0, 1];
        let mut seen = std::collections::HashSet::new();
        for a in vals {
            for b in vals {
                let t = TernaryVector::from_i8(&[a, b]).unwrap();
                assert!(seen.insert(extend(&t).0));
            }
        }
        assert_eq!(seen.len(), 9);
    }

    #[test]
    fn delta_p_b_is_voicing_only() {
        let t = FeatureTable::bundled();
        let delta = t.feature_delta("p", "b").unwrap();
        let voi = t.feature_index("voi").unwrap();
        // Hand-read rows: p and b differ only in voi (p: -, b: +).
        // extend(-) - extend(+) = (0,1) - (1,0) = (-1, 1).
        for (i, &d) in delta.iter().enumerate() {
            if i == 2 * voi {
                assert_eq!(d, -1);
            } else if i == 2 * voi + 1 {
                assert_eq!(d, 1);
            } else {
                assert_eq!(d, 0, "coordinate {i}");
            }
        }
        assert_eq!(t.phonological_distance("p", "b").unwrap(), 1);
        assert_eq!(t.phonological_distance("p", "p").unwrap(), 0);
        assert!(t.feature_delta("p", "p").unwrap().iter().all(|&d| d == 0));
    }

    #[test]
    fn distance_p_d_counts_differing_rows() {
        let t = FeatureTable::bundled();
        // p vs d: voi (- vs +), cor (- vs +), distr (0 vs -), lab (+ vs -).
        assert_eq!(t.phonological_distance("p", "d").unwrap(), 4);
        assert_eq!(t.phonological_distance("d", "p").unwrap(), 4);
    }

    #[test]
    fn unknown_phone_errors() {
        let t = FeatureTable::bundled();
        assert!(matches!(
            t.feature_delta("p", "nope"),
            Err(FeatureError::UnknownPhone(_))
        ));
        assert!(t.phonological_distance("nope", "p").is_err());
        assert!(t.phone_class("nope").is_err());
    }

    #[test]
    fn vowel_consonant_classes() {
        let t = FeatureTable::bundled();
        assert_eq!(t.phone_class("i").unwrap(), PhoneClass::Vowel);
        assert_eq!(t.phone_class("b").unwrap(), PhoneClass::Consonant);
        assert_eq!(t.phone_class("l\u{329}").unwrap(), PhoneClass::Vowel);
        assert!(t.is_syllabic_consonant("l\u{329}").unwrap());
        assert!(!t.is_syllabic_consonant("a").unwrap());
        for p in t.phones().take(500) {
            assert!(t.phone_class(p).is_ok());
        }
    }

    #[test]
    fn tsv_round_trip() {
        let t = load_feature_table(TOY.as_bytes()).unwrap();
        let mut buf = Vec::new();
        t.write_tsv(&mut buf).unwrap();
        let back = load_feature_table(buf.as_slice()).unwrap();
        assert_eq!(t, back);
    }

    fn ternary_strategy(n: usize) -> impl Strategy<Value = Vec<i8>> {
        proptest::collection::vec(-1i8..=1, n)
    }

    proptest! {
        #[test]
        fn extend_injective(a in ternary_strategy(21), b in ternary_strategy(21)) {
            let ta = TernaryVector::from_i8(&a).unwrap();
            let tb = TernaryVector::from_i8(&b).unwrap();
            let d = binary_delta(&extend(&ta), &extend(&tb));
            prop_assert_eq!(d.iter().all(|&x| x == 0), a == b);
            prop_assert!(d.iter().all(|&x| (-1..=1).contains(&x)));
        }

        #[test]
        fn distance_is_a_metric(
            a in ternary_strategy(8), b in ternary_strategy(8), c in ternary_strategy(8)
        ) {
            let names: Vec<String> = (0..8).map(|i| format!("f{i}")).collect();
            let mut rows = vec![("a".to_string(), TernaryVector::from_i8(&a).unwrap())];
            rows.push(("b".into(), TernaryVector::from_i8(&b).unwrap()));
            rows.push(("c".into(), TernaryVector::from_i8(&c).unwrap()));
            let t = FeatureTable::new(names, rows).unwrap();
            let d = |x: &str, y: &str| t.phonological_distance(x, y).unwrap();
            prop_assert_eq!(d("a", "b"), d("b", "a"));
            prop_assert_eq!(d("a", "b") == 0, a == b);
            prop_assert!(d("a", "c") <= d("a", "b") + d("b", "c"));
            let delta_ab = t.feature_delta("a", "b").unwrap();
            let delta_ba = t.feature_delta("b", "a").unwrap();
            prop_assert!(delta_ab.iter().zip(&delta_ba).all(|(x, y)| *x == -*y));
        }
    }
}
