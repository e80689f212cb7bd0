//! Text formats for vertices, orbit indexes and certificates, integer
//! scaling of costs, the asymmetric-to-symmetric doubling transform and
//! TSPLIB files.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use thiserror::Error;

use crate::exact::{Int, Rational};
use crate::gap::{CostVector, GapCertificate};
use crate::polytope::{component_histogram, is_member, NodeSet, PolytopeError, RowId, SolutionPoint};
use crate::symmetry::{canonical, OrbitRecord, Perm};

pub const VERTEX_HEADER: &str = "asep-vertex 1";
pub const INDEX_HEADER: &str = "asep-orbit-index 1";
pub const CERTIFICATE_HEADER: &str = "asep-certificate 1";
pub const INDEX_FILE: &str = "index.txt";

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("point violates {0}")]
    NotMember(RowId),
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
}

fn parse_err(line: usize, message: impl Into<String>) -> IoError {
    IoError::Parse {
        line,
        message: message.into(),
    }
}

/// Writes through a temporary file in the same directory, then renames.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), IoError> {
    let file_err = |source| IoError::File {
        path: path.to_path_buf(),
        source,
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir).map_err(file_err)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(file_err)?;
    tmp.write_all(contents).map_err(file_err)?;
    tmp.persist(path).map_err(|e| file_err(e.error))?;
    Ok(())
}

fn read(path: &Path) -> Result<String, IoError> {
    fs::read_to_string(path).map_err(|source| IoError::File {
        path: path.to_path_buf(),
        source,
    })
}

/// Lines with their 1-based numbers, blank lines and `#` comments dropped.
struct Lines<'a> {
    inner: std::iter::Peekable<Box<dyn Iterator<Item = (usize, &'a str)> + 'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Lines<'a> {
        let it: Box<dyn Iterator<Item = (usize, &'a str)> + 'a> = Box::new(
            text.lines()
                .enumerate()
                .map(|(i, l)| (i + 1, l.trim()))
                .filter(|(_, l)| !l.is_empty() && !l.starts_with('#')),
        );
        Lines {
            inner: it.peekable(),
            last: 0,
        }
    }

    fn next(&mut self) -> Result<(usize, &'a str), IoError> {
        match self.inner.next() {
            Some((n, l)) => {
                self.last = n;
                Ok((n, l))
            }
            None => Err(parse_err(self.last + 1, "unexpected end of file")),
        }
    }

    fn peek_word(&mut self) -> Option<&'a str> {
        self.inner.peek().map(|(_, l)| l.split_whitespace().next().unwrap_or(""))
    }

    fn expect(&mut self, want: &str) -> Result<usize, IoError> {
        let (n, l) = self.next()?;
        if l != want {
            return Err(parse_err(n, format!("expected `{want}`, found `{l}`")));
        }
        Ok(n)
    }

    /// A `key value...` line; returns the line number and the rest.
    fn field(&mut self, key: &str) -> Result<(usize, &'a str), IoError> {
        let (n, l) = self.next()?;
        let (k, rest) = l.split_once(' ').unwrap_or((l, ""));
        if k != key {
            return Err(parse_err(n, format!("expected field `{key}`, found `{k}`")));
        }
        Ok((n, rest.trim()))
    }

    fn end(&mut self) -> Result<(), IoError> {
        if let Some((n, l)) = self.inner.next() {
            return Err(parse_err(n, format!("trailing content `{l}`")));
        }
        Ok(())
    }
}

fn parse_num<T: FromStr>(line: usize, s: &str, what: &str) -> Result<T, IoError> {
    s.parse().map_err(|_| parse_err(line, format!("invalid {what} `{s}`")))
}

fn parse_opt<T: FromStr>(line: usize, s: &str, what: &str) -> Result<Option<T>, IoError> {
    if s == "-" {
        Ok(None)
    } else {
        parse_num(line, s, what).map(Some)
    }
}

fn fmt_opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map_or_else(|| "-".to_string(), T::to_string)
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(T::to_string).collect::<Vec<_>>().join(" ")
}

fn parse_fractions(line: usize, s: &str, len: usize) -> Result<Vec<Rational>, IoError> {
    let v: Vec<Rational> = s
        .split_whitespace()
        .map(|t| parse_num(line, t, "fraction"))
        .collect::<Result<_, _>>()?;
    if v.len() != len {
        return Err(parse_err(line, format!("expected {len} values, found {}", v.len())));
    }
    Ok(v)
}

fn make_point(line: usize, n: usize, x: Vec<Rational>) -> Result<SolutionPoint, IoError> {
    let p = SolutionPoint::new(n, x).map_err(|e| parse_err(line, e.to_string()))?;
    is_member(&p).map_err(IoError::NotMember)?;
    Ok(p)
}

/// A vertex with optional bookkeeping.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexFile {
    pub point: SolutionPoint,
    pub gap: Option<Rational>,
    pub orbit_size: Option<u128>,
    pub stabilizer_order: Option<usize>,
    /// Operations that produced the point, oldest first.
    pub provenance: Vec<String>,
}

impl VertexFile {
    pub fn new(point: SolutionPoint) -> VertexFile {
        VertexFile {
            point,
            gap: None,
            orbit_size: None,
            stabilizer_order: None,
            provenance: Vec::new(),
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let p = &self.point;
        writeln!(s, "{VERTEX_HEADER}").unwrap();
        writeln!(s, "n {}", p.n()).unwrap();
        writeln!(s, "gap {}", fmt_opt(&self.gap)).unwrap();
        writeln!(s, "orbit_size {}", fmt_opt(&self.orbit_size)).unwrap();
        writeln!(s, "stabilizer_order {}", fmt_opt(&self.stabilizer_order)).unwrap();
        for step in &self.provenance {
            writeln!(s, "step {step}").unwrap();
        }
        writeln!(s, "x").unwrap();
        for ((i, j), v) in p.arc_index().arcs().zip(p.values()) {
            writeln!(s, "{v} # {i}->{j}").unwrap();
        }
        writeln!(s, "end").unwrap();
        s
    }

    pub fn parse(text: &str) -> Result<VertexFile, IoError> {
        let mut lines = Lines::new(text);
        lines.expect(VERTEX_HEADER)?;
        let (ln, v) = lines.field("n")?;
        let n: usize = parse_num(ln, v, "node count")?;
        if !(2..=crate::polytope::MAX_NODES).contains(&n) {
            return Err(parse_err(ln, format!("node count {n} out of range")));
        }
        let (ln, v) = lines.field("gap")?;
        let gap = parse_opt(ln, v, "gap")?;
        let (ln, v) = lines.field("orbit_size")?;
        let orbit_size = parse_opt(ln, v, "orbit size")?;
        let (ln, v) = lines.field("stabilizer_order")?;
        let stabilizer_order = parse_opt(ln, v, "stabilizer order")?;
        let mut provenance = Vec::new();
        while lines.peek_word() == Some("step") {
            let (_, v) = lines.field("step")?;
            provenance.push(v.to_string());
        }
        let start = lines.expect("x")?;
        let m = n * (n - 1);
        let mut x = Vec::with_capacity(m);
        for _ in 0..m {
            let (ln, l) = lines.next()?;
            let tok = l.split('#').next().unwrap_or("").trim();
            if tok == "end" {
                return Err(parse_err(ln, format!("expected {m} values, found {}", x.len())));
            }
            x.push(parse_num(ln, tok, "fraction")?);
        }
        lines.expect("end")?;
        lines.end()?;
        Ok(VertexFile {
            point: make_point(start, n, x)?,
            gap,
            orbit_size,
            stabilizer_order,
            provenance,
        })
    }
}

pub fn save_vertex(path: &Path, v: &VertexFile) -> Result<(), IoError> {
    write_atomic(path, v.to_text().as_bytes())
}

pub fn load_vertex(path: &Path) -> Result<VertexFile, IoError> {
    VertexFile::parse(&read(path)?)
}

fn perm_images(p: &Perm) -> String {
    p.images().iter().map(usize::to_string).collect::<Vec<_>>().join(",")
}

fn orbit_text(s: &mut String, r: &OrbitRecord) {
    let p = &r.representative;
    writeln!(s, "orbit").unwrap();
    writeln!(s, "key {}", r.key).unwrap();
    writeln!(s, "n {}", p.n()).unwrap();
    writeln!(s, "x {}", join(p.values())).unwrap();
    writeln!(s, "orbit_size {}", r.orbit_size).unwrap();
    writeln!(s, "stabilizer_order {}", r.stabilizer_order).unwrap();
    let gens: Vec<String> = r.generators.iter().map(perm_images).collect();
    writeln!(s, "generators {}", if gens.is_empty() { "-".into() } else { gens.join(" ") }).unwrap();
    writeln!(s, "gap {}", fmt_opt(&r.gap)).unwrap();
    writeln!(s, "tight_sets {}", r.tight_sets).unwrap();
    writeln!(s, "zero_count {}", r.zero_count).unwrap();
    writeln!(s, "neighborhood_size {}", fmt_opt(&r.neighborhood_size)).unwrap();
    writeln!(s, "end").unwrap();
}

fn parse_orbit(lines: &mut Lines<'_>) -> Result<OrbitRecord, IoError> {
    let (key_line, key) = lines.field("key")?;
    let key = key.to_string();
    let (ln, v) = lines.field("n")?;
    let n: usize = parse_num(ln, v, "node count")?;
    if !(2..=crate::polytope::MAX_NODES).contains(&n) {
        return Err(parse_err(ln, format!("node count {n} out of range")));
    }
    let (ln, v) = lines.field("x")?;
    let representative = make_point(ln, n, parse_fractions(ln, v, n * (n - 1))?)?;
    let (ln, v) = lines.field("orbit_size")?;
    let orbit_size = parse_num(ln, v, "orbit size")?;
    let (ln, v) = lines.field("stabilizer_order")?;
    let stabilizer_order = parse_num(ln, v, "stabilizer order")?;
    let (ln, v) = lines.field("generators")?;
    let mut generators = Vec::new();
    if v != "-" {
        for g in v.split_whitespace() {
            let images: Vec<usize> = g
                .split(',')
                .map(|t| parse_num(ln, t, "permutation image"))
                .collect::<Result<_, _>>()?;
            generators.push(Perm::new(images).map_err(|e| parse_err(ln, e.to_string()))?);
        }
    }
    let (ln, v) = lines.field("gap")?;
    let gap = parse_opt(ln, v, "gap")?;
    let (ln, v) = lines.field("tight_sets")?;
    let tight_sets = parse_num(ln, v, "tight set count")?;
    let (ln, v) = lines.field("zero_count")?;
    let zero_count = parse_num(ln, v, "zero count")?;
    let (ln, v) = lines.field("neighborhood_size")?;
    let neighborhood_size = parse_opt(ln, v, "neighborhood size")?;
    lines.expect("end")?;
    if canonical(&representative).key() != key {
        return Err(parse_err(key_line, "key does not match the representative"));
    }
    Ok(OrbitRecord {
        key,
        histogram: component_histogram(&representative),
        representative,
        orbit_size,
        stabilizer_order,
        generators,
        gap,
        tight_sets,
        zero_count,
        neighborhood_size,
    })
}

/// Orbit records sorted by key.
pub fn orbit_index_text(records: &[OrbitRecord]) -> String {
    let mut sorted: Vec<&OrbitRecord> = records.iter().collect();
    sorted.sort_by(|a, b| a.key.cmp(&b.key));
    let mut s = String::new();
    writeln!(s, "{INDEX_HEADER}").unwrap();
    writeln!(s, "count {}", sorted.len()).unwrap();
    for r in sorted {
        orbit_text(&mut s, r);
    }
    s
}

pub fn parse_orbit_index(text: &str) -> Result<Vec<OrbitRecord>, IoError> {
    let mut lines = Lines::new(text);
    lines.expect(INDEX_HEADER)?;
    let (ln, v) = lines.field("count")?;
    let count: usize = parse_num(ln, v, "count")?;
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        lines.expect("orbit")?;
        out.push(parse_orbit(&mut lines)?);
    }
    lines.end()?;
    Ok(out)
}

/// Writes `dir/index.txt`.
pub fn save_orbit_index(dir: &Path, records: &[OrbitRecord]) -> Result<(), IoError> {
    write_atomic(&dir.join(INDEX_FILE), orbit_index_text(records).as_bytes())
}

pub fn load_orbit_index(dir: &Path) -> Result<Vec<OrbitRecord>, IoError> {
    parse_orbit_index(&read(&dir.join(INDEX_FILE))?)
}

pub fn certificate_text(c: &GapCertificate) -> String {
    let x = &c.vertex;
    let mut s = String::new();
    writeln!(s, "{CERTIFICATE_HEADER}").unwrap();
    writeln!(s, "key {}", canonical(x).key()).unwrap();
    writeln!(s, "n {}", x.n()).unwrap();
    writeln!(s, "gap {}", c.gap_value).unwrap();
    writeln!(s, "ig {}", c.ig_value).unwrap();
    writeln!(s, "x {}", join(x.values())).unwrap();
    writeln!(s, "c {}", join(c.costs.values())).unwrap();
    writeln!(s, "y_out {}", join(&c.y_out)).unwrap();
    writeln!(s, "y_in {}", join(&c.y_in)).unwrap();
    let d: Vec<String> = c.d.iter().map(|(set, v)| format!("{}:{v}", set.bits())).collect();
    writeln!(s, "d {}", if d.is_empty() { "-".into() } else { d.join(" ") }).unwrap();
    writeln!(s, "rows {} {}", c.tour_rows, c.triangle_rows).unwrap();
    writeln!(s, "end").unwrap();
    s
}

pub fn parse_certificate(text: &str) -> Result<GapCertificate, IoError> {
    let mut lines = Lines::new(text);
    lines.expect(CERTIFICATE_HEADER)?;
    lines.field("key")?;
    let (ln, v) = lines.field("n")?;
    let n: usize = parse_num(ln, v, "node count")?;
    if !(2..=crate::polytope::MAX_NODES).contains(&n) {
        return Err(parse_err(ln, format!("node count {n} out of range")));
    }
    let m = n * (n - 1);
    let (ln, v) = lines.field("gap")?;
    let gap_value: Rational = parse_num(ln, v, "gap")?;
    let (ln, v) = lines.field("ig")?;
    let ig_value = parse_num(ln, v, "integrality gap")?;
    let (ln, v) = lines.field("x")?;
    let vertex = make_point(ln, n, parse_fractions(ln, v, m)?)?;
    let (ln, v) = lines.field("c")?;
    let costs = CostVector::new(n, parse_fractions(ln, v, m)?).map_err(|e| parse_err(ln, e.to_string()))?;
    let (ln, v) = lines.field("y_out")?;
    let y_out = parse_fractions(ln, v, n)?;
    let (ln, v) = lines.field("y_in")?;
    let y_in = parse_fractions(ln, v, n)?;
    let (ln, v) = lines.field("d")?;
    let mut d = Vec::new();
    if v != "-" {
        for tok in v.split_whitespace() {
            let (bits, val) = tok
                .split_once(':')
                .ok_or_else(|| parse_err(ln, format!("invalid multiplier `{tok}`")))?;
            d.push((NodeSet(parse_num(ln, bits, "set")?), parse_num(ln, val, "fraction")?));
        }
    }
    let (ln, v) = lines.field("rows")?;
    let counts: Vec<usize> = v
        .split_whitespace()
        .map(|t| parse_num(ln, t, "row count"))
        .collect::<Result<_, _>>()?;
    if counts.len() != 2 {
        return Err(parse_err(ln, "expected two row counts"));
    }
    lines.expect("end")?;
    lines.end()?;
    Ok(GapCertificate {
        vertex,
        costs,
        y_out,
        y_in,
        d,
        gap_value,
        ig_value,
        tour_rows: counts[0],
        triangle_rows: counts[1],
    })
}

pub fn save_certificate(path: &Path, c: &GapCertificate) -> Result<(), IoError> {
    write_atomic(path, certificate_text(c).as_bytes())
}

pub fn load_certificate(path: &Path) -> Result<GapCertificate, IoError> {
    parse_certificate(&read(path)?)
}

/// Integer asymmetric instance; the diagonal is zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AtspInstance {
    pub n: usize,
    pub costs: Vec<Vec<Int>>,
    /// Common denominator the rational costs were multiplied by.
    pub scale: Int,
}

impl AtspInstance {
    /// Optimum of the scaled instance when the source costs have tour
    /// value 1, as gap certificates do.
    pub fn claimed_optimum(&self) -> &Int {
        &self.scale
    }

    pub fn max_entry(&self) -> Int {
        self.costs.iter().flatten().max().cloned().unwrap_or(Int::ZERO)
    }

    pub fn cost_vector(&self) -> CostVector {
        matrix_costs(&self.costs)
    }
}

fn matrix_costs(w: &[Vec<Int>]) -> CostVector {
    let n = w.len();
    let c = (0..n)
        .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
        .map(|(i, j)| Rational::from(w[i][j].clone()))
        .collect();
    CostVector::new(n, c).expect("integer instances are nonnegative")
}

pub fn scale_to_integers(c: &CostVector) -> AtspInstance {
    let n = c.n();
    let scale = c.values().iter().fold(Int::ONE, |acc, v| acc.lcm(v.denom()));
    let mut costs = vec![vec![Int::ZERO; n]; n];
    for i in 0..n {
        for j in (0..n).filter(|&j| j != i) {
            let v = c.get(i, j);
            costs[i][j] = (v.numer() * &scale).div_exact(v.denom());
        }
    }
    AtspInstance { n, costs, scale }
}

/// Symmetric instance on `2n` nodes: originals `0..n`, copies `n..2n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StspInstance {
    pub source_n: usize,
    pub weights: Vec<Vec<Int>>,
    pub big_m: Int,
    pub infinity: Int,
}

impl StspInstance {
    pub fn dimension(&self) -> usize {
        self.weights.len()
    }

    pub fn is_symmetric(&self) -> bool {
        let d = self.dimension();
        (0..d).all(|i| (0..d).all(|j| self.weights[i][j] == self.weights[j][i]))
    }

    pub fn cost_vector(&self) -> CostVector {
        matrix_costs(&self.weights)
    }

    /// `n · M`, the amount by which the symmetric optimum exceeds the
    /// asymmetric one.
    pub fn offset(&self) -> Int {
        &Int::from(self.source_n) * &self.big_m
    }
}

/// Node-doubling transform. The copy of `i` is joined to original `j` at
/// cost `c_ij`, each node to its own copy at `-M`, and original-original or
/// copy-copy pairs at infinity; every entry is then shifted by `+M`.
pub fn to_stsp(a: &AtspInstance) -> StspInstance {
    let n = a.n;
    let big_m = &(&Int::from(n) * &a.max_entry()) + &Int::ONE;
    let total: Int = a.costs.iter().flatten().cloned().sum();
    let infinity = &Int::from(2) * &(&(&Int::from(n) * &big_m) + &total);
    let blocked = &infinity + &big_m;
    let mut w = vec![vec![blocked; 2 * n]; 2 * n];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                w[i][n + i] = Int::ZERO;
                w[n + i][i] = Int::ZERO;
            } else {
                let v = &a.costs[i][j] + &big_m;
                w[n + i][j] = v.clone();
                w[j][n + i] = v;
            }
        }
    }
    for (k, row) in w.iter_mut().enumerate() {
        row[k] = Int::ZERO;
    }
    StspInstance {
        source_n: n,
        weights: w,
        big_m,
        infinity,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TsplibKind {
    Tsp,
    Atsp,
}

/// A FULL_MATRIX instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tsplib {
    pub name: String,
    pub kind: TsplibKind,
    pub comments: Vec<String>,
    pub weights: Vec<Vec<Int>>,
}

impl Tsplib {
    pub fn from_atsp(name: &str, a: &AtspInstance) -> Tsplib {
        Tsplib {
            name: name.to_string(),
            kind: TsplibKind::Atsp,
            comments: vec![format!("scale {}", a.scale), format!("optimum {}", a.claimed_optimum())],
            weights: a.costs.clone(),
        }
    }

    pub fn from_stsp(name: &str, s: &StspInstance) -> Tsplib {
        Tsplib {
            name: name.to_string(),
            kind: TsplibKind::Tsp,
            comments: vec![
                format!("doubled from {} nodes", s.source_n),
                format!("M {}", s.big_m),
                format!("infinity {}", s.infinity),
                format!("offset {}", s.offset()),
            ],
            weights: s.weights.clone(),
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "NAME: {}", self.name).unwrap();
        let kind = match self.kind {
            TsplibKind::Tsp => "TSP",
            TsplibKind::Atsp => "ATSP",
        };
        writeln!(s, "TYPE: {kind}").unwrap();
        for c in &self.comments {
            writeln!(s, "COMMENT: {c}").unwrap();
        }
        writeln!(s, "DIMENSION: {}", self.weights.len()).unwrap();
        writeln!(s, "EDGE_WEIGHT_TYPE: EXPLICIT").unwrap();
        writeln!(s, "EDGE_WEIGHT_FORMAT: FULL_MATRIX").unwrap();
        writeln!(s, "EDGE_WEIGHT_SECTION").unwrap();
        for row in &self.weights {
            writeln!(s, "{}", join(row)).unwrap();
        }
        writeln!(s, "EOF").unwrap();
        s
    }

    /// Reads the subset of TSPLIB written by [`Tsplib::to_text`].
    pub fn parse(text: &str) -> Result<Tsplib, IoError> {
        let mut name = String::new();
        let mut kind = None;
        let mut comments = Vec::new();
        let mut dim: Option<usize> = None;
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
        let mut last = 0;
        loop {
            let Some((ln, l)) = lines.next() else {
                return Err(parse_err(last + 1, "missing EDGE_WEIGHT_SECTION"));
            };
            last = ln;
            if l.is_empty() {
                continue;
            }
            if l == "EDGE_WEIGHT_SECTION" {
                break;
            }
            let (k, v) = l
                .split_once(':')
                .ok_or_else(|| parse_err(ln, format!("expected `KEY: value`, found `{l}`")))?;
            let v = v.trim();
            match k.trim() {
                "NAME" => name = v.to_string(),
                "TYPE" => {
                    kind = Some(match v {
                        "TSP" => TsplibKind::Tsp,
                        "ATSP" => TsplibKind::Atsp,
                        _ => return Err(parse_err(ln, format!("unsupported TYPE `{v}`"))),
                    })
                }
                "COMMENT" => comments.push(v.to_string()),
                "DIMENSION" => dim = Some(parse_num(ln, v, "dimension")?),
                "EDGE_WEIGHT_TYPE" if v == "EXPLICIT" => {}
                "EDGE_WEIGHT_FORMAT" if v == "FULL_MATRIX" => {}
                other => return Err(parse_err(ln, format!("unsupported field `{other}: {v}`"))),
            }
        }
        let kind = kind.ok_or_else(|| parse_err(last, "missing TYPE"))?;
        let d = dim.ok_or_else(|| parse_err(last, "missing DIMENSION"))?;
        let mut values = Vec::with_capacity(d * d);
        let mut saw_eof = false;
        for (ln, l) in lines {
            last = ln;
            if l == "EOF" {
                saw_eof = true;
                break;
            }
            for t in l.split_whitespace() {
                let v: Int = parse_num(ln, t, "weight")?;
                if v.is_negative() {
                    return Err(parse_err(ln, format!("negative weight {v}")));
                }
                values.push(v);
            }
        }
        if values.len() != d * d {
            return Err(parse_err(last, format!("expected {} weights, found {}", d * d, values.len())));
        }
        if !saw_eof {
            return Err(parse_err(last, "missing EOF"));
        }
        let weights = values.chunks(d).map(<[Int]>::to_vec).collect();
        Ok(Tsplib {
            name,
            kind,
            comments,
            weights,
        })
    }
}

pub fn write_tsplib(path: &Path, t: &Tsplib) -> Result<(), IoError> {
    write_atomic(path, t.to_text().as_bytes())
}

pub fn read_tsplib(path: &Path) -> Result<Tsplib, IoError> {
    Tsplib::parse(&read(path)?)
}
