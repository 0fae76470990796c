//! Paths as port sequences, their types and values, and the two orders used
//! by the agents: paths of one type in lexicographic order, and all paths in
//! increasing (value, type, path) order.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::graph::Port;
use crate::scalar::{value_checked, ExactScalar};
use crate::Value;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PathError {
    #[error("a path needs at least one port")]
    Empty,
    #[error("port numbers start at 1")]
    ZeroPort,
    #[error("path {0} is never enumerated in strict mode")]
    NotEnumerated(Path),
}

/// A nonempty sequence of positive port numbers.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Path(Vec<Port>);

impl Path {
    pub fn new(ports: Vec<Port>) -> Result<Self, PathError> {
        if ports.is_empty() {
            return Err(PathError::Empty);
        }
        if ports.contains(&0) {
            return Err(PathError::ZeroPort);
        }
        Ok(Path(ports))
    }

    pub fn ports(&self) -> &[Port] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn path_type(&self) -> PathType {
        type_of(self)
    }

    pub fn into_ports(self) -> Vec<Port> {
        self.0
    }
}

impl TryFrom<&[Port]> for Path {
    type Error = PathError;
    fn try_from(ports: &[Port]) -> Result<Self, PathError> {
        Path::new(ports.to_vec())
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_ports(f, &self.0)
    }
}

pub(crate) fn write_ports(f: &mut impl fmt::Write, ports: &[Port]) -> fmt::Result {
    f.write_char('(')?;
    for (i, p) in ports.iter().enumerate() {
        if i > 0 {
            f.write_char(',')?;
        }
        write!(f, "{p}")?;
    }
    f.write_char(')')
}

/// `(max port, length)`. The derived order is the lexicographic order on types.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PathType {
    pub max_port: Port,
    pub len: u64,
}

impl PathType {
    pub fn new(max_port: Port, len: u64) -> Self {
        assert!(
            max_port >= 1 && len >= 1,
            "path types are pairs of positive integers"
        );
        PathType { max_port, len }
    }

    pub fn value(&self) -> Value {
        value(self.max_port, self.len)
    }

    /// Number of paths of this type: `m^len - (m - 1)^len`.
    pub fn path_count(&self) -> Value {
        let len = self.len as u32;
        BigUint::from(self.max_port).pow(len) - BigUint::from(self.max_port - 1).pow(len)
    }
}

impl fmt::Display for PathType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.max_port, self.len)
    }
}

/// Which types the global enumeration covers.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum EnumMode {
    /// Every type, including the all-ones types `(1, len)`.
    #[default]
    Fixed,
    /// Only types with max port at least 2. All-ones paths are never tried.
    Strict,
}

impl EnumMode {
    pub fn min_port(self) -> Port {
        match self {
            EnumMode::Fixed => 1,
            EnumMode::Strict => 2,
        }
    }
}

impl fmt::Display for EnumMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EnumMode::Fixed => "fixed",
            EnumMode::Strict => "strict",
        })
    }
}

impl std::str::FromStr for EnumMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "fixed" => Ok(EnumMode::Fixed),
            "strict" => Ok(EnumMode::Strict),
            other => Err(format!("unknown mode `{other}` (expected fixed or strict)")),
        }
    }
}

/// `y * 2^y * x^y`, exactly.
pub fn value(x: u64, y: u64) -> Value {
    value_checked(x, y).expect("arbitrary precision never overflows")
}

pub fn type_of(path: &Path) -> PathType {
    let max = *path.0.iter().max().expect("paths are nonempty");
    PathType::new(max, path.0.len() as u64)
}

/// All types of value exactly `j`, in lexicographic order. Found by testing,
/// for every length `y` with `y * 2^y <= j`, whether `j / (y * 2^y)` is an
/// exact `y`-th power.
pub fn phase_types(j: &Value, mode: EnumMode) -> Vec<PathType> {
    let mut out = Vec::new();
    let mut y: u64 = 1;
    loop {
        let scale = BigUint::from(y) << y as usize;
        if &(&scale * BigUint::from(mode.min_port()).pow(y as u32)) > j {
            break;
        }
        if (j % &scale).is_zero() {
            let q = j / &scale;
            let x = q.nth_root(y as u32);
            if x.pow(y as u32) == q {
                let x = u64::try_from(&x).expect("root of a phase value fits in u64");
                if x >= mode.min_port() {
                    out.push(PathType::new(x, y));
                }
            }
        }
        y += 1;
    }
    out.sort();
    out
}

/// The paths of type `(max_port, len)` in lexicographic order.
pub fn paths_of_type(max_port: Port, len: u64) -> TypePaths {
    TypePaths::new(PathType::new(max_port, len))
}

#[derive(Clone, Debug)]
pub struct TypePaths {
    max: Port,
    next: Option<Vec<Port>>,
}

impl TypePaths {
    pub fn new(ty: PathType) -> Self {
        let mut first = vec![1; ty.len as usize];
        *first.last_mut().unwrap() = ty.max_port;
        TypePaths {
            max: ty.max_port,
            next: Some(first),
        }
    }
}

impl Iterator for TypePaths {
    type Item = Path;

    fn next(&mut self) -> Option<Path> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        // Odometer step over {1..max}; the smallest sequence at or after it
        // that uses `max` is obtained by raising its last entry to `max`.
        if let Some(i) = succ.iter().rposition(|&p| p < self.max) {
            succ[i] += 1;
            succ[i + 1..].iter_mut().for_each(|p| *p = 1);
            if !succ.contains(&self.max) {
                *succ.last_mut().unwrap() = self.max;
            }
            self.next = Some(succ);
        }
        Some(Path(current))
    }
}

/// The total order on paths: by value of type, then type, then path.
pub fn compare_star(a: &Path, b: &Path) -> Ordering {
    let (ta, tb) = (type_of(a), type_of(b));
    if ta == tb {
        return a.0.cmp(&b.0);
    }
    ta.value()
        .cmp(&tb.value())
        .then(ta.cmp(&tb))
        .then_with(|| a.0.cmp(&b.0))
}

/// One entry of a [`TypeStream`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeEntry<T> {
    pub ty: PathType,
    pub value: T,
}

/// All types in increasing (value, type) order, merged from one stream per
/// path length.
///
/// Values are carried in `T`. Types whose value does not fit in `T` are
/// never yielded; once every representable type has been produced the
/// stream ends and [`TypeStream::overflowed`] reports it. Over `BigUint` the
/// stream is infinite (or ends only because of a port bound).
#[derive(Clone, Debug)]
pub struct TypeStream<T: ExactScalar = Value> {
    mode: EnumMode,
    max_port: Option<Port>,
    heap: BinaryHeap<Reverse<(T, Port, u64)>>,
    overflowed: bool,
}

impl<T: ExactScalar> TypeStream<T> {
    pub fn new(mode: EnumMode) -> Self {
        Self::bounded(mode, None)
    }

    /// Only types whose max port is at most `max_port`.
    pub fn bounded(mode: EnumMode, max_port: Option<Port>) -> Self {
        let mut s = TypeStream {
            mode,
            max_port,
            heap: BinaryHeap::new(),
            overflowed: false,
        };
        if s.port_allowed(mode.min_port()) {
            s.push(mode.min_port(), 1);
        }
        s
    }

    pub fn overflowed(&self) -> bool {
        self.overflowed
    }

    fn port_allowed(&self, x: Port) -> bool {
        self.max_port.is_none_or(|m| x <= m)
    }

    fn push(&mut self, x: Port, y: u64) -> bool {
        match value_checked::<T>(x, y) {
            Some(v) => {
                self.heap.push(Reverse((v, x, y)));
                true
            }
            None => {
                self.overflowed = true;
                false
            }
        }
    }
}

impl<T: ExactScalar> Iterator for TypeStream<T> {
    type Item = TypeEntry<T>;

    fn next(&mut self) -> Option<TypeEntry<T>> {
        let Reverse((value, x, y)) = self.heap.pop()?;
        if x < Port::MAX && self.port_allowed(x + 1) {
            self.push(x + 1, y);
        }
        // Length y + 1 starts strictly after the first type of length y.
        if x == self.mode.min_port() {
            self.push(x, y + 1);
        }
        Some(TypeEntry {
            ty: PathType::new(x, y),
            value,
        })
    }
}

/// Every finite path exactly once, in [`compare_star`] order.
#[derive(Clone, Debug)]
pub struct GlobalPaths {
    types: TypeStream<Value>,
    current: Option<(TypeEntry<Value>, TypePaths)>,
}

pub fn global_paths(mode: EnumMode) -> GlobalPaths {
    GlobalPaths {
        types: TypeStream::new(mode),
        current: None,
    }
}

impl GlobalPaths {
    /// Next path together with its type and the value of that type.
    pub fn next_with_type(&mut self) -> Option<(Path, PathType, Value)> {
        loop {
            if let Some((entry, paths)) = &mut self.current {
                if let Some(p) = paths.next() {
                    return Some((p, entry.ty, entry.value.clone()));
                }
            }
            let entry = self.types.next()?;
            let paths = TypePaths::new(entry.ty);
            self.current = Some((entry, paths));
        }
    }
}

impl Iterator for GlobalPaths {
    type Item = Path;
    fn next(&mut self) -> Option<Path> {
        self.next_with_type().map(|(p, _, _)| p)
    }
}

/// 1-based position of `path` in `global_paths(mode)`, by counting.
pub fn index_of_path(path: &Path, mode: EnumMode) -> Result<Value, PathError> {
    let ty = type_of(path);
    if ty.max_port < mode.min_port() {
        return Err(PathError::NotEnumerated(path.clone()));
    }
    Ok(paths_before_type(ty, mode) + rank_within_type(path) + BigUint::one())
}

/// Number of enumerated paths whose type precedes `ty`.
pub fn paths_before_type(ty: PathType, mode: EnumMode) -> Value {
    let target = ty.value();
    let lo = mode.min_port();
    let mut total = BigUint::zero();
    let mut y: u64 = 1;
    loop {
        let scale = BigUint::from(y) << y as usize;
        if &scale * BigUint::from(lo).pow(y as u32) > target {
            break;
        }
        // largest x with value(x, y) <= target, then drop it if it does not precede ty
        let root = (&target / &scale).nth_root(y as u32);
        let mut top = u64::try_from(&root).expect("port fits in u64");
        if top >= lo && value(top, y) == target && (top, y) >= (ty.max_port, ty.len) {
            top -= 1;
        }
        if top >= lo {
            let e = y as u32;
            total += BigUint::from(top).pow(e) - BigUint::from(lo - 1).pow(e);
        }
        y += 1;
    }
    total
}

/// Number of paths of the same type lexicographically before `path`.
pub fn rank_within_type(path: &Path) -> Value {
    let ty = type_of(path);
    let m = ty.max_port;
    let n = path.len();
    let mut rank = BigUint::zero();
    let mut seen_max = false;
    for (i, &p) in path.ports().iter().enumerate() {
        let rest = (n - i - 1) as u32;
        let completions = if seen_max {
            BigUint::from(m).pow(rest)
        } else {
            BigUint::from(m).pow(rest) - BigUint::from(m - 1).pow(rest)
        };
        rank += completions * BigUint::from(p - 1);
        seen_max |= p == m;
    }
    rank
}

/// 1-based position of `path` in `global_paths(mode)`, by scanning. Gives up
/// after `limit` paths.
pub fn index_by_scan(path: &Path, mode: EnumMode, limit: u64) -> Option<u64> {
    global_paths(mode)
        .take(limit as usize)
        .position(|p| &p == path)
        .map(|i| i as u64 + 1)
}
