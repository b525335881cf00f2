//! JSON file formats.
//!
//! Words are written in the text syntax of [`Word::parse`]. Letters are
//! referred to by name; forbidden triples reference generators by index.
//!
//! ```json
//! {"rank": 1, "alphabet": ["0", "1"], "forbidden": [["1", "1", 0]]}
//! ```

use serde::{Deserialize, Serialize};

use crate::coding::{CodingInstance, CosetData, PatternCoding};
use crate::error::{Error, Result};
use crate::freegroup::Word;
use crate::ksat::{InputFormula, Literal};
use crate::tileset::{Letter, NNInstance, Triple};

/// A nearest-neighbour instance. `generators` defaults to the free
/// generators.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub rank: usize,
    pub alphabet: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generators: Option<Vec<String>>,
    pub forbidden: Vec<(String, String, usize)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<String>,
    /// Letters equivalent to a seed of the source instance, after a
    /// compilation.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed_set: Option<Vec<String>>,
}

fn letter_index(alphabet: &[String], name: &str, field: &str) -> Result<Letter> {
    alphabet
        .iter()
        .position(|l| l == name)
        .ok_or_else(|| Error::invalid(field, format!("unknown letter `{name}`")))
}

pub fn parse_words(rank: usize, texts: &[String]) -> Result<Vec<Word>> {
    texts.iter().map(|t| Word::parse(rank, t)).collect()
}

/// Splits `"w1;w2"` into words.
pub fn parse_word_list(rank: usize, text: &str) -> Result<Vec<Word>> {
    text.split(';')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| Word::parse(rank, s))
        .collect()
}

impl InstanceFile {
    pub fn to_instance(&self) -> Result<(NNInstance, Option<Letter>)> {
        let generators = match &self.generators {
            Some(g) => parse_words(self.rank, g)?,
            None if self.rank == 0 => return Err(Error::invalid("rank", "rank must be at least 1")),
            None => Word::free_generators(self.rank),
        };
        let forbidden = self
            .forbidden
            .iter()
            .map(|(a, b, s)| {
                Ok(Triple::new(
                    letter_index(&self.alphabet, a, "forbidden")?,
                    letter_index(&self.alphabet, b, "forbidden")?,
                    *s,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        let inst = NNInstance::new(self.rank, self.alphabet.clone(), generators, forbidden)?;
        let seed = self
            .seed
            .as_deref()
            .map(|s| letter_index(&self.alphabet, s, "seed"))
            .transpose()?;
        Ok((inst, seed))
    }

    pub fn from_instance(inst: &NNInstance) -> Self {
        let name = |a: Letter| inst.letter_name(a).to_string();
        InstanceFile {
            rank: inst.rank(),
            alphabet: inst.alphabet().to_vec(),
            generators: Some(inst.generators().iter().map(Word::to_string).collect()),
            forbidden: inst
                .forbidden()
                .iter()
                .map(|t| (name(t.from), name(t.to), t.generator))
                .collect(),
            seed: None,
            seed_set: None,
        }
    }
}

/// A pattern-coding instance; each coding lists `[word, letter]` pairs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodingFile {
    pub rank: usize,
    pub alphabet: Vec<String>,
    pub codings: Vec<Vec<(String, String)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<String>,
}

impl CodingFile {
    pub fn to_instance(&self) -> Result<(CodingInstance, Option<Letter>)> {
        let codings = self
            .codings
            .iter()
            .map(|c| {
                let entries = c
                    .iter()
                    .map(|(w, a)| Ok((Word::parse(self.rank, w)?, letter_index(&self.alphabet, a, "codings")?)))
                    .collect::<Result<Vec<_>>>()?;
                PatternCoding::new(entries)
            })
            .collect::<Result<Vec<_>>>()?;
        let inst = CodingInstance::new(self.rank, self.alphabet.clone(), codings)?;
        let seed = self
            .seed
            .as_deref()
            .map(|s| letter_index(&self.alphabet, s, "seed"))
            .transpose()?;
        Ok((inst, seed))
    }

    pub fn from_instance(inst: &CodingInstance) -> Self {
        CodingFile {
            rank: inst.rank(),
            alphabet: inst.alphabet().to_vec(),
            codings: inst
                .codings()
                .iter()
                .map(|c| {
                    c.entries()
                        .iter()
                        .map(|(w, a)| (w.to_string(), inst.alphabet()[*a].clone()))
                        .collect()
                })
                .collect(),
            seed: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LiteralFile {
    pub w: String,
    #[serde(default)]
    pub neg: bool,
}

/// A k-CNF over group cells together with the subgroup generators.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormulaFile {
    pub rank: usize,
    pub k: usize,
    pub clauses: Vec<Vec<LiteralFile>>,
    pub subgroup: Vec<String>,
}

impl FormulaFile {
    pub fn to_formula(&self) -> Result<(InputFormula, Vec<Word>)> {
        let clauses = self
            .clauses
            .iter()
            .map(|c| {
                c.iter()
                    .map(|l| {
                        Ok(Literal {
                            word: Word::parse(self.rank, &l.w)?,
                            negated: l.neg,
                        })
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let formula = InputFormula::new(self.rank, self.k, clauses)?;
        Ok((formula, parse_words(self.rank, &self.subgroup)?))
    }

    pub fn from_formula(formula: &InputFormula, subgroup: &[Word]) -> Self {
        FormulaFile {
            rank: formula.rank(),
            k: formula.k(),
            clauses: formula
                .clauses()
                .iter()
                .map(|c| {
                    c.iter()
                        .map(|l| LiteralFile {
                            w: l.word.to_string(),
                            neg: l.negated,
                        })
                        .collect()
                })
                .collect(),
            subgroup: subgroup.iter().map(Word::to_string).collect(),
        }
    }
}

/// A finite-index subgroup with a right transversal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CosetsFile {
    pub subgroup: Vec<String>,
    pub representatives: Vec<String>,
}

impl CosetsFile {
    pub fn to_cosets(&self, rank: usize) -> Result<CosetData> {
        CosetData::new(
            rank,
            parse_words(rank, &self.subgroup)?,
            parse_words(rank, &self.representatives)?,
        )
    }
}

/// Reads and parses a JSON file.
pub fn read_json<T: for<'de> Deserialize<'de>>(path: &str) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::invalid("file", format!("cannot read `{path}`: {e}")))?;
    serde_json::from_str(&text).map_err(|e| Error::invalid("file", format!("`{path}`: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instance_round_trip() {
        let text = r#"{"rank": 1, "alphabet": ["0", "1"], "forbidden": [["1", "1", 0]], "seed": "1"}"#;
        let file: InstanceFile = serde_json::from_str(text).unwrap();
        let (inst, seed) = file.to_instance().unwrap();
        assert_eq!(seed, Some(1));
        assert!(inst.forbids(Triple::new(1, 1, 0)));
        let back = InstanceFile::from_instance(&inst);
        assert_eq!(back.to_instance().unwrap().0, inst);
        assert_eq!(back.generators, Some(vec!["t".to_string()]));
    }

    #[test]
    fn rejects_bad_files() {
        let bad = [
            r#"{"rank": 1, "alphabet": ["0"], "forbidden": [["2", "0", 0]]}"#,
            r#"{"rank": 1, "alphabet": ["0"], "forbidden": [["0", "0", 1]]}"#,
            r#"{"rank": 1, "alphabet": ["0"], "forbidden": [], "seed": "x"}"#,
            r#"{"rank": 2, "alphabet": ["0"], "generators": ["a", "a"], "forbidden": []}"#,
            r#"{"rank": 2, "alphabet": ["0"], "generators": ["z"], "forbidden": []}"#,
            r#"{"rank": 0, "alphabet": ["0"], "forbidden": []}"#,
        ];
        for text in bad {
            let file: InstanceFile = serde_json::from_str(text).unwrap();
            assert!(file.to_instance().unwrap_err().is_invalid(), "{text}");
        }
        assert!(serde_json::from_str::<InstanceFile>(r#"{"rank": 1, "alphabet": [], "forbidden": [], "extra": 1}"#).is_err());
    }

    #[test]
    fn coding_and_formula_files() {
        let text = r#"{"rank": 2, "alphabet": ["x", "y"], "codings": [[["", "x"], ["a b", "y"]]]}"#;
        let file: CodingFile = serde_json::from_str(text).unwrap();
        let (inst, _) = file.to_instance().unwrap();
        assert_eq!(inst.codings()[0].entries()[1], (Word::parse(2, "a b").unwrap(), 1));
        assert_eq!(CodingFile::from_instance(&inst).to_instance().unwrap().0, inst);

        let text = r#"{"rank": 1, "k": 2, "clauses": [[{"w": "t"}, {"w": "", "neg": true}]], "subgroup": ["t t"]}"#;
        let file: FormulaFile = serde_json::from_str(text).unwrap();
        let (f, h) = file.to_formula().unwrap();
        assert_eq!(h, vec![Word::t_power(2)]);
        assert!(f.clauses()[0][1].negated);
        assert_eq!(FormulaFile::from_formula(&f, &h), file);
    }
}
