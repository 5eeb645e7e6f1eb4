//! FCIDUMP ingestion.
//!
//! Two-electron entries are chemists' notation `(ij|kl)` with 1-based
//! indices; every one of the eight real-orbital images is filled.

use std::collections::HashMap;

use crate::error::{Error, Result};

/// Tolerance for conflicting duplicate entries in a file.
const CONFLICT_TOLERANCE: f64 = 1e-8;
/// Tolerance for the stored-tensor symmetry check.
const SYMMETRY_TOLERANCE: f64 = 1e-10;

/// One- and two-electron integrals over spatial orbitals, in Hartree.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegralSet {
    n_spatial: usize,
    n_electrons: usize,
    ms2: i64,
    one_body: Vec<f64>,
    two_body: Vec<f64>,
    e_nuclear: f64,
    point_group_note: String,
}

impl IntegralSet {
    /// All-zero integrals; fill with [`IntegralSet::set_one_body`] and
    /// [`IntegralSet::set_two_body`].
    pub fn zeros(n_spatial: usize, n_electrons: usize) -> Result<Self> {
        if n_spatial == 0 {
            return Err(Error::OrbitalMap(
                "need at least one spatial orbital".into(),
            ));
        }
        if n_electrons > 2 * n_spatial {
            return Err(Error::OrbitalMap(format!(
                "{n_electrons} electrons do not fit in {n_spatial} spatial orbitals"
            )));
        }
        Ok(IntegralSet {
            n_spatial,
            n_electrons,
            ms2: (n_electrons % 2) as i64,
            one_body: vec![0.0; n_spatial * n_spatial],
            two_body: vec![0.0; n_spatial.pow(4)],
            e_nuclear: 0.0,
            point_group_note: String::new(),
        })
    }

    pub fn n_spatial(&self) -> usize {
        self.n_spatial
    }

    pub fn n_electrons(&self) -> usize {
        self.n_electrons
    }

    pub fn ms2(&self) -> i64 {
        self.ms2
    }

    pub fn e_nuclear(&self) -> f64 {
        self.e_nuclear
    }

    pub fn set_e_nuclear(&mut self, value: f64) {
        self.e_nuclear = value;
    }

    pub fn point_group_note(&self) -> &str {
        &self.point_group_note
    }

    #[inline]
    pub fn one_body(&self, p: usize, q: usize) -> f64 {
        self.one_body[p * self.n_spatial + q]
    }

    /// Chemists' notation `(pq|rs)`.
    #[inline]
    pub fn two_body(&self, p: usize, q: usize, r: usize, s: usize) -> f64 {
        let n = self.n_spatial;
        self.two_body[((p * n + q) * n + r) * n + s]
    }

    /// Sets `h_pq` and `h_qp`.
    pub fn set_one_body(&mut self, p: usize, q: usize, value: f64) {
        let n = self.n_spatial;
        self.one_body[p * n + q] = value;
        self.one_body[q * n + p] = value;
    }

    /// Sets `(pq|rs)` and its seven symmetric images.
    pub fn set_two_body(&mut self, p: usize, q: usize, r: usize, s: usize, value: f64) {
        for (a, b, c, d) in eightfold(p, q, r, s) {
            let n = self.n_spatial;
            self.two_body[((a * n + b) * n + c) * n + d] = value;
        }
    }

    /// Checks the symmetry invariants of the stored tensors.
    pub fn validate(&self) -> Result<()> {
        let n = self.n_spatial;
        for p in 0..n {
            for q in 0..n {
                let (a, b) = (self.one_body(p, q), self.one_body(q, p));
                if (a - b).abs() > SYMMETRY_TOLERANCE {
                    return Err(Error::Asymmetric {
                        site: format!("h[{p},{q}]"),
                        a,
                        b,
                    });
                }
                for r in 0..n {
                    for s in 0..n {
                        let v = self.two_body(p, q, r, s);
                        for (i, j, k, l) in eightfold(p, q, r, s) {
                            let w = self.two_body(i, j, k, l);
                            if (v - w).abs() > SYMMETRY_TOLERANCE {
                                return Err(Error::Asymmetric {
                                    site: format!("({p}{q}|{r}{s}) vs ({i}{j}|{k}{l})"),
                                    a: v,
                                    b: w,
                                });
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

fn eightfold(p: usize, q: usize, r: usize, s: usize) -> [(usize, usize, usize, usize); 8] {
    [
        (p, q, r, s),
        (q, p, r, s),
        (p, q, s, r),
        (q, p, s, r),
        (r, s, p, q),
        (s, r, p, q),
        (r, s, q, p),
        (s, r, q, p),
    ]
}

fn parse_header(text: &str, first_line: usize) -> Result<HashMap<String, Vec<String>>> {
    let body = text.trim();
    let body = body
        .strip_prefix('&')
        .or_else(|| body.strip_prefix('$'))
        .unwrap_or(body);
    let body = body
        .get(..3)
        .filter(|head| head.eq_ignore_ascii_case("FCI"))
        .map(|_| &body[3..])
        .ok_or_else(|| Error::Fcidump {
            line: first_line,
            msg: "header must start with &FCI".into(),
        })?;

    let mut fields: HashMap<String, Vec<String>> = HashMap::new();
    let mut current: Option<String> = None;
    for token in body.split([',', '\n', '\r']) {
        let token = token.trim();
        if token.is_empty() {
            continue;
        }
        if let Some((key, value)) = token.split_once('=') {
            let key = key.trim().to_ascii_uppercase();
            let entry = fields.entry(key.clone()).or_default();
            let value = value.trim();
            if !value.is_empty() {
                entry.extend(value.split_whitespace().map(str::to_string));
            }
            current = Some(key);
        } else if let Some(key) = &current {
            fields
                .get_mut(key)
                .expect("current key inserted")
                .extend(token.split_whitespace().map(str::to_string));
        } else {
            return Err(Error::Fcidump {
                line: first_line,
                msg: format!("unexpected header token {token:?}"),
            });
        }
    }
    Ok(fields)
}

fn header_int(fields: &HashMap<String, Vec<String>>, key: &str, line: usize) -> Result<i64> {
    let values = fields.get(key).ok_or_else(|| Error::Fcidump {
        line,
        msg: format!("header is missing {key}"),
    })?;
    let [value] = &values[..] else {
        return Err(Error::Fcidump {
            line,
            msg: format!("{key} must have exactly one value"),
        });
    };
    value.parse().map_err(|_| Error::Fcidump {
        line,
        msg: format!("{key} = {value:?} is not an integer"),
    })
}

fn parse_value(token: &str, line: usize) -> Result<f64> {
    token
        .replace(['D', 'd'], "E")
        .parse()
        .map_err(|_| Error::Fcidump {
            line,
            msg: format!("bad numeric value {token:?}"),
        })
}

/// Parses an FCIDUMP document.
pub fn parse_fcidump(text: &str) -> Result<IntegralSet> {
    let lines: Vec<&str> = text.lines().collect();
    let start = lines
        .iter()
        .position(|l| !l.trim().is_empty())
        .ok_or_else(|| Error::Fcidump {
            line: 1,
            msg: "empty input".into(),
        })?;
    let end = lines[start..]
        .iter()
        .position(|l| {
            let t = l.trim().to_ascii_uppercase();
            t.contains("&END") || t.contains("$END") || t == "/"
        })
        .map(|i| start + i)
        .ok_or_else(|| Error::Fcidump {
            line: start + 1,
            msg: "unterminated header (no &END or /)".into(),
        })?;

    let mut header_text = lines[start..=end].join("\n");
    for terminator in ["&END", "&end", "$END", "$end"] {
        header_text = header_text.replace(terminator, "");
    }
    let header_text = header_text.trim_end().trim_end_matches('/');
    let fields = parse_header(header_text, start + 1)?;
    let norb = header_int(&fields, "NORB", start + 1)?;
    let nelec = header_int(&fields, "NELEC", start + 1)?;
    let ms2 = header_int(&fields, "MS2", start + 1)?;
    if norb <= 0 || nelec < 0 || nelec > 2 * norb {
        return Err(Error::Fcidump {
            line: start + 1,
            msg: format!("inconsistent header NORB={norb} NELEC={nelec}"),
        });
    }
    let n = norb as usize;
    let mut ints = IntegralSet::zeros(n, nelec as usize).map_err(|e| Error::Fcidump {
        line: start + 1,
        msg: e.to_string(),
    })?;
    ints.ms2 = ms2;
    let mut note = Vec::new();
    for key in ["ORBSYM", "ISYM"] {
        if let Some(v) = fields.get(key) {
            note.push(format!("{key}={}", v.join(",")));
        }
    }
    ints.point_group_note = note.join(" ");

    let mut one_seen = vec![false; n * n];
    let mut two_seen = vec![false; n.pow(4)];
    let mut scalar_seen = false;

    for (offset, raw) in lines[end + 1..].iter().enumerate() {
        let line_no = end + 2 + offset;
        let raw = raw.trim();
        if raw.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = raw.split_whitespace().collect();
        if tokens.len() != 5 {
            return Err(Error::Fcidump {
                line: line_no,
                msg: format!("expected `value i j k l`, got {raw:?}"),
            });
        }
        let value = parse_value(tokens[0], line_no)?;
        let mut idx = [0usize; 4];
        for (slot, tok) in idx.iter_mut().zip(&tokens[1..]) {
            let v: usize = tok.parse().map_err(|_| Error::Fcidump {
                line: line_no,
                msg: format!("bad index {tok:?}"),
            })?;
            if v > n {
                return Err(Error::IndexOutOfRange { index: v, limit: n });
            }
            *slot = v;
        }
        match idx {
            [0, 0, 0, 0] => {
                if scalar_seen && (ints.e_nuclear - value).abs() > CONFLICT_TOLERANCE {
                    return Err(Error::Asymmetric {
                        site: format!("scalar (line {line_no})"),
                        a: ints.e_nuclear,
                        b: value,
                    });
                }
                scalar_seen = true;
                ints.e_nuclear = value;
            }
            // Orbital energies; not needed.
            [_, 0, 0, 0] => {}
            [i, j, 0, 0] if i > 0 && j > 0 => {
                let (p, q) = (i - 1, j - 1);
                for (a, b) in [(p, q), (q, p)] {
                    let k = a * n + b;
                    if one_seen[k] && (ints.one_body[k] - value).abs() > CONFLICT_TOLERANCE {
                        return Err(Error::Asymmetric {
                            site: format!("h[{i},{j}] (line {line_no})"),
                            a: ints.one_body[k],
                            b: value,
                        });
                    }
                }
                one_seen[p * n + q] = true;
                one_seen[q * n + p] = true;
                ints.set_one_body(p, q, value);
            }
            [i, j, k, l] if i > 0 && j > 0 && k > 0 && l > 0 => {
                let (p, q, r, s) = (i - 1, j - 1, k - 1, l - 1);
                for (a, b, c, d) in eightfold(p, q, r, s) {
                    let key = ((a * n + b) * n + c) * n + d;
                    if two_seen[key] && (ints.two_body[key] - value).abs() > CONFLICT_TOLERANCE {
                        return Err(Error::Asymmetric {
                            site: format!("({i}{j}|{k}{l}) (line {line_no})"),
                            a: ints.two_body[key],
                            b: value,
                        });
                    }
                }
                for (a, b, c, d) in eightfold(p, q, r, s) {
                    two_seen[((a * n + b) * n + c) * n + d] = true;
                }
                ints.set_two_body(p, q, r, s, value);
            }
            _ => {
                return Err(Error::Fcidump {
                    line: line_no,
                    msg: format!("unrecognised index pattern {idx:?}"),
                })
            }
        }
    }
    Ok(ints)
}
