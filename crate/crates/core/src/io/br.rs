//! Reader and writer for the classic text format of single-container
//! packing instances: a header with the instance count, then per instance
//! a number/seed line, container dimensions, the number of item types,
//! and one line per type with dimensions, per-dimension vertical
//! orientation flags, and a count.

use crate::model::{Instance, Item, Uld, UldType, Z};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum BrError {
    #[error("line {line}: expected {expected}, got `{got}`")]
    Malformed {
        line: usize,
        expected: &'static str,
        got: String,
    },
    #[error("line {line}: instance count mismatch (header said {expected})")]
    CountMismatch { line: usize, expected: usize },
    #[error("line {line}: no dimension is allowed to be vertical")]
    NoVerticalDimension { line: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct BrItemType {
    pub dims: [i64; 3],
    /// Per dimension: may this dimension be the vertical one?
    pub vertical: [bool; 3],
    pub count: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BrInstance {
    pub number: u32,
    pub seed: i64,
    pub container: [i64; 3],
    pub types: Vec<BrItemType>,
}

struct Lines<'a> {
    tokens: Vec<(usize, Vec<&'a str>)>,
    pos: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Lines<'a> {
        let tokens = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split_whitespace().collect::<Vec<_>>()))
            .filter(|(_, t)| !t.is_empty())
            .collect();
        Lines { tokens, pos: 0 }
    }

    fn next(&mut self, expected: &'static str) -> Result<(usize, &[&'a str]), BrError> {
        let (line, toks) = self.tokens.get(self.pos).ok_or(BrError::Malformed {
            line: usize::MAX,
            expected,
            got: "<eof>".into(),
        })?;
        self.pos += 1;
        Ok((*line, toks))
    }
}

fn ints(line: usize, toks: &[&str], expected: &'static str) -> Result<Vec<i64>, BrError> {
    toks.iter()
        .map(|t| {
            t.parse::<i64>().map_err(|_| BrError::Malformed {
                line,
                expected,
                got: t.to_string(),
            })
        })
        .collect()
}

/// Parse a whole instance file.
pub fn parse_br(text: &str) -> Result<Vec<BrInstance>, BrError> {
    let mut lines = Lines::new(text);
    let (hline, htoks) = lines.next("instance count")?;
    let header = ints(hline, htoks, "instance count")?;
    if header.len() != 1 || header[0] < 0 {
        return Err(BrError::Malformed {
            line: hline,
            expected: "a single instance count",
            got: htoks.join(" "),
        });
    }
    let expected = header[0] as usize;
    let mut instances = Vec::with_capacity(expected);
    for _ in 0..expected {
        let (nline, ntoks) = lines.next("instance number and seed")?;
        let nums = ints(nline, ntoks, "instance number and seed")?;
        let (number, seed) = match nums.as_slice() {
            [n, s] => (*n as u32, *s),
            [s] => (instances.len() as u32 + 1, *s),
            _ => {
                return Err(BrError::Malformed {
                    line: nline,
                    expected: "instance number and seed",
                    got: ntoks.join(" "),
                })
            }
        };
        let (cline, ctoks) = lines.next("container dimensions")?;
        let dims = ints(cline, ctoks, "container dimensions")?;
        let [l, w, h] = dims.as_slice() else {
            return Err(BrError::Malformed {
                line: cline,
                expected: "three container dimensions",
                got: ctoks.join(" "),
            });
        };
        let (jline, jtoks) = lines.next("type count")?;
        let jn = ints(jline, jtoks, "type count")?;
        if jn.len() != 1 || jn[0] < 1 {
            return Err(BrError::Malformed {
                line: jline,
                expected: "a single type count",
                got: jtoks.join(" "),
            });
        }
        let mut types = Vec::with_capacity(jn[0] as usize);
        for _ in 0..jn[0] {
            let (tline, ttoks) = lines.next("item type line")?;
            let vals = ints(tline, ttoks, "item type line")?;
            // With or without a leading type id.
            let vals: &[i64] = match vals.len() {
                8 => &vals[1..],
                7 => &vals,
                _ => {
                    return Err(BrError::Malformed {
                        line: tline,
                        expected: "7 or 8 fields (dims, flags, count)",
                        got: ttoks.join(" "),
                    })
                }
            };
            let t = BrItemType {
                dims: [vals[0], vals[2], vals[4]],
                vertical: [vals[1] != 0, vals[3] != 0, vals[5] != 0],
                count: vals[6] as u32,
            };
            if t.vertical == [false, false, false] {
                return Err(BrError::NoVerticalDimension { line: tline });
            }
            types.push(t);
        }
        instances.push(BrInstance {
            number,
            seed,
            container: [*l, *w, *h],
            types,
        });
    }
    Ok(instances)
}

/// Serialize instances back into the text format (with type ids).
pub fn write_br(instances: &[BrInstance]) -> String {
    let mut out = String::new();
    out.push_str(&format!("{}\n", instances.len()));
    for inst in instances {
        out.push_str(&format!("{} {}\n", inst.number, inst.seed));
        out.push_str(&format!(
            "{} {} {}\n",
            inst.container[0], inst.container[1], inst.container[2]
        ));
        out.push_str(&format!("{}\n", inst.types.len()));
        for (ti, t) in inst.types.iter().enumerate() {
            out.push_str(&format!(
                "{} {} {} {} {} {} {} {}\n",
                ti + 1,
                t.dims[0],
                i64::from(t.vertical[0]),
                t.dims[1],
                i64::from(t.vertical[1]),
                t.dims[2],
                i64::from(t.vertical[2]),
                t.count
            ));
        }
    }
    out
}

/// Orientation-flag mapping: all three dimensions vertical means the item
/// is tiltable; otherwise it is not tiltable at all and keeps (or is
/// pre-tilted to) an allowed vertical dimension, preferring the natural
/// height. Items are always rotatable in this format. Weights are zero
/// and the single container type is unconstrained in weight.
pub fn br_to_instance(br: &BrInstance, name: impl Into<String>) -> Instance {
    let mut items = Vec::new();
    for (ti, t) in br.types.iter().enumerate() {
        let tiltable = t.vertical == [true, true, true];
        let size = if tiltable || t.vertical[Z] {
            t.dims
        } else if t.vertical[0] {
            [t.dims[1], t.dims[2], t.dims[0]]
        } else {
            [t.dims[0], t.dims[2], t.dims[1]]
        };
        for n in 0..t.count {
            items.push(Item {
                id: format!("t{}-{}", ti + 1, n + 1),
                size,
                weight: 0,
                rotatable: true,
                tiltable,
                stackable: true,
            });
        }
    }
    let uld = Uld::cuboid("container", br.container, i64::MAX / 4)
        .expect("cuboid container is always valid");
    Instance {
        name: name.into(),
        items,
        ulds: vec![UldType {
            uld,
            count: Some(1),
        }],
        packing: Default::default(),
        algo: Default::default(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "\
1
1 2502505
587 233 220
3
1 108 1 76 1 30 1 40
2 110 1 43 1 25 1 33
3 92 1 81 1 55 1 39
";

    #[test]
    fn parses_the_canonical_layout() {
        let instances = parse_br(SAMPLE).unwrap();
        assert_eq!(instances.len(), 1);
        let inst = &instances[0];
        assert_eq!(inst.seed, 2502505);
        assert_eq!(inst.container, [587, 233, 220]);
        assert_eq!(inst.types.len(), 3);
        assert_eq!(inst.types[0].dims, [108, 76, 30]);
        assert_eq!(inst.types[0].count, 40);
    }

    #[test]
    fn round_trips_through_the_serializer() {
        let instances = parse_br(SAMPLE).unwrap();
        let text = write_br(&instances);
        assert_eq!(parse_br(&text).unwrap(), instances);
    }

    #[test]
    fn expansion_counts_items() {
        let instances = parse_br(SAMPLE).unwrap();
        let inst = br_to_instance(&instances[0], "x");
        assert_eq!(inst.items.len(), 40 + 33 + 39);
        assert_eq!(inst.ulds.len(), 1);
        assert_eq!(inst.ulds[0].uld.bounding_box, [587, 233, 220]);
    }

    #[test]
    fn flag_mapping_follows_the_tilt_rule() {
        let parse_type = |flags: [i64; 3]| {
            let text = format!(
                "1\n1 7\n100 100 100\n1\n1 10 {} 20 {} 30 {} 1\n",
                flags[0], flags[1], flags[2]
            );
            let br = parse_br(&text).unwrap();
            br_to_instance(&br[0], "x").items[0].clone()
        };
        // All three: tiltable.
        let it = parse_type([1, 1, 1]);
        assert!(it.tiltable && it.rotatable);
        assert_eq!(it.size, [10, 20, 30]);
        // Only the height: fixed height, rotatable.
        let it = parse_type([0, 0, 1]);
        assert!(!it.tiltable && it.rotatable);
        assert_eq!(it.size, [10, 20, 30]);
        // Two allowed including the height: not tiltable, natural height.
        let it = parse_type([1, 0, 1]);
        assert!(!it.tiltable);
        assert_eq!(it.size, [10, 20, 30]);
        // Height not allowed: pre-tilted to the first allowed dimension.
        let it = parse_type([1, 0, 0]);
        assert!(!it.tiltable);
        assert_eq!(it.size, [20, 30, 10]);
        assert_eq!(it.size[Z], 10);
    }

    #[test]
    fn malformed_line_reports_its_number() {
        let text = "1\n1 7\n100 100\n";
        match parse_br(text) {
            Err(BrError::Malformed { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected malformed error, got {other:?}"),
        }
    }

    #[test]
    fn header_mismatch_is_detected() {
        let text = "2\n1 7\n100 100 100\n1\n1 10 1 20 1 30 1 1\n";
        assert!(parse_br(text).is_err());
    }
}
