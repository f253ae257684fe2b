//! Generator maps and their action on state spaces.

mod parse;

use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use parse::{parse_map, parse_map_list};

use crate::error::{Error, Result};
use crate::numtheory::{pow_mod, proper_divisor_sums};
use crate::ringspace::{SpaceKind, State, StateSpace};

/// One generator map.
#[derive(Debug, Clone, PartialEq)]
pub enum MapExpr {
    /// `a*x + b`
    Affine {
        a: i64,
        b: i64,
    },
    /// `x^exp + c`
    PowerPlus {
        exp: u32,
        c: i64,
    },
    /// `base^x`
    Exp {
        base: u64,
    },
    /// `σ(x) - x`, the sum of proper divisors.
    Dickson,
    /// `x^2 + A` for a row-major 2x2 matrix `A`.
    MatQuad([i64; 4]),
    /// Formal derivative.
    PolyDeriv,
    PolySquare,
    /// Adds a fixed polynomial, lowest degree first.
    PolyAddConst(Vec<i64>),
    /// Elementary cellular automaton with a Wolfram rule number.
    CaRule(u8),
    /// Uniform random permutation determined by the seed.
    Perm(u64),
    /// `floor(x^(1+epsilon)) + shift`
    WsMap {
        epsilon: f64,
        shift: i64,
    },
}

fn write_tail(f: &mut fmt::Formatter<'_>, c: i64) -> fmt::Result {
    match c.cmp(&0) {
        std::cmp::Ordering::Greater => write!(f, "+{c}"),
        std::cmp::Ordering::Less => write!(f, "-{}", c.unsigned_abs()),
        std::cmp::Ordering::Equal => Ok(()),
    }
}

fn join<T: ToString>(items: &[T]) -> String {
    items
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

impl fmt::Display for MapExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MapExpr::Affine { a, b } => {
                if *a == 1 {
                    f.write_str("x")?;
                } else {
                    write!(f, "{a}x")?;
                }
                write_tail(f, *b)
            }
            MapExpr::PowerPlus { exp, c } => {
                write!(f, "x^{exp}")?;
                write_tail(f, *c)
            }
            MapExpr::Exp { base } => write!(f, "{base}^x"),
            MapExpr::Dickson => f.write_str("sigma"),
            MapExpr::MatQuad(m) => write!(f, "matquad:{}", join(m)),
            MapExpr::PolyDeriv => f.write_str("deriv"),
            MapExpr::PolySquare => f.write_str("square"),
            MapExpr::PolyAddConst(c) => write!(f, "addc:{}", join(c)),
            MapExpr::CaRule(r) => write!(f, "ca:{r}"),
            MapExpr::Perm(seed) => write!(f, "perm:{seed}"),
            MapExpr::WsMap { epsilon, shift } => write!(f, "ws:{epsilon}:{shift}"),
        }
    }
}

/// Comma-separated textual form accepted by [`parse_map_list`].
pub fn format_map_list(maps: &[MapExpr]) -> String {
    join(maps)
}

/// One step of an elementary cellular automaton with periodic boundary.
///
/// Cell `i` of the row is bit `width - 1 - i` of `bits`, so the leftmost cell
/// is the most significant bit. The new cell is bit `4*left + 2*center + right`
/// of `rule`.
pub fn ca_step(rule: u8, bits: u64, width: u32) -> u64 {
    assert!((3..=63).contains(&width), "width must be in 3..=63");
    let mask = (1u64 << width) - 1;
    let bits = bits & mask;
    // Bit j of `left` holds the left neighbour of bit j, i.e. bit j+1.
    let left = (bits >> 1) | ((bits & 1) << (width - 1));
    let right = ((bits << 1) & mask) | (bits >> (width - 1));
    let mut out = 0;
    for j in 0..width {
        let code = ((left >> j) & 1) << 2 | ((bits >> j) & 1) << 1 | ((right >> j) & 1);
        out |= u64::from((rule >> code) & 1) << j;
    }
    out
}

/// Uniform permutation of `0..n` drawn by Fisher-Yates from a ChaCha8 stream.
pub fn random_permutation(n: u64, seed: u64) -> Vec<u32> {
    let n = u32::try_from(n).expect("permutation size fits in u32");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut perm: Vec<u32> = (0..n).collect();
    perm.shuffle(&mut rng);
    perm
}

fn reduce(v: i64, n: u64) -> u64 {
    v.rem_euclid(n as i64) as u64
}

fn mat_mul(x: &[u64; 4], y: &[u64; 4], n: u64) -> [u64; 4] {
    [
        (x[0] * y[0] + x[1] * y[2]) % n,
        (x[0] * y[1] + x[1] * y[3]) % n,
        (x[2] * y[0] + x[3] * y[2]) % n,
        (x[2] * y[1] + x[3] * y[3]) % n,
    ]
}

fn mat_pow(m: &[u64; 4], mut e: u32, n: u64) -> [u64; 4] {
    let mut acc = [1 % n, 0, 0, 1 % n];
    let mut base = *m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mat_mul(&acc, &base, n);
        }
        base = mat_mul(&base, &base, n);
        e >>= 1;
    }
    acc
}

fn poly_mul(f: &[u64], g: &[u64], n: u64) -> Vec<u64> {
    let k = f.len();
    let mut out = vec![0u64; k];
    for (i, &fi) in f.iter().enumerate().filter(|(_, &c)| c != 0) {
        for (j, &gj) in g.iter().take(k - i).enumerate() {
            out[i + j] = (out[i + j] + fi * gj) % n;
        }
    }
    out
}

fn poly_pow(f: &[u64], mut e: u32, n: u64) -> Vec<u64> {
    let mut acc = vec![0u64; f.len()];
    acc[0] = 1 % n;
    let mut base = f.to_vec();
    while e > 0 {
        if e & 1 == 1 {
            acc = poly_mul(&acc, &base, n);
        }
        base = poly_mul(&base, &base, n);
        e >>= 1;
    }
    acc
}

fn ws_image(r: u64, epsilon: f64, shift: i64, n: u64) -> u64 {
    let v = (r as f64).powf(1.0 + epsilon).floor();
    let base = if v < 9.007_199_254_740_992e15 {
        (v as u64) % n
    } else {
        v.rem_euclid(n as f64) as u64
    };
    (base + reduce(shift, n)) % n
}

/// Sentinel for "no image inside the space" in image tables.
pub const NO_IMAGE: u32 = u32::MAX;

/// A map bound to a space, with any lookup tables it needs precomputed.
#[derive(Debug, Clone)]
pub struct CompiledMap {
    expr: MapExpr,
    space: StateSpace,
    table: Option<Vec<u32>>,
}

impl CompiledMap {
    pub fn new(expr: &MapExpr, space: &StateSpace) -> Result<Self> {
        check_applicable(expr, space)?;
        let n = space.modulus();
        let table = match expr {
            MapExpr::Perm(seed) => Some(random_permutation(space.size(), *seed)),
            MapExpr::Dickson => Some(
                proper_divisor_sums(n as usize)
                    .into_iter()
                    .map(|s| (s % n) as u32)
                    .collect(),
            ),
            _ => None,
        };
        Ok(CompiledMap {
            expr: expr.clone(),
            space: space.clone(),
            table,
        })
    }

    pub fn expr(&self) -> &MapExpr {
        &self.expr
    }

    /// Index of the image of the state at `index`, or `None` when the image
    /// escapes a restricted subspace.
    pub fn image(&self, index: u64) -> Option<u64> {
        let space = &self.space;
        let n = space.modulus();
        if let MapExpr::Perm(_) = self.expr {
            return Some(u64::from(
                self.table.as_ref().expect("perm table")[index as usize],
            ));
        }
        match space.kind() {
            k if k.is_residue() => {
                let r = space.residue_at(index);
                let y = match &self.expr {
                    MapExpr::Affine { a, b } => (reduce(*a, n) * r + reduce(*b, n)) % n,
                    MapExpr::PowerPlus { exp, c } => {
                        (pow_mod(r, u64::from(*exp), n) + reduce(*c, n)) % n
                    }
                    MapExpr::Exp { base } => pow_mod(*base, r, n),
                    MapExpr::Dickson => {
                        u64::from(self.table.as_ref().expect("sigma table")[r as usize])
                    }
                    MapExpr::WsMap { epsilon, shift } => ws_image(r, *epsilon, *shift, n),
                    _ => unreachable!("checked at compile time"),
                };
                space.index_of_residue(y)
            }
            SpaceKind::Mat2(_) | SpaceKind::UpperTri2(_) => {
                let m = space.matrix_at(index);
                let y = match &self.expr {
                    MapExpr::Affine { a, b } => {
                        let (a, b) = (reduce(*a, n), reduce(*b, n));
                        [
                            (a * m[0] + b) % n,
                            a * m[1] % n,
                            a * m[2] % n,
                            (a * m[3] + b) % n,
                        ]
                    }
                    MapExpr::PowerPlus { exp, c } => {
                        let mut p = mat_pow(&m, *exp, n);
                        let c = reduce(*c, n);
                        p[0] = (p[0] + c) % n;
                        p[3] = (p[3] + c) % n;
                        p
                    }
                    MapExpr::MatQuad(a) => {
                        let sq = mat_mul(&m, &m, n);
                        std::array::from_fn(|i| (sq[i] + reduce(a[i], n)) % n)
                    }
                    _ => unreachable!("checked at compile time"),
                };
                space.index_of_matrix(&y)
            }
            SpaceKind::PolyQuot(_, k) => {
                let mut f = vec![0u64; k as usize];
                space.unpack(index, &mut f);
                let g = match &self.expr {
                    MapExpr::Affine { a, b } => {
                        let a = reduce(*a, n);
                        let mut g: Vec<u64> = f.iter().map(|&c| a * c % n).collect();
                        g[0] = (g[0] + reduce(*b, n)) % n;
                        g
                    }
                    MapExpr::PowerPlus { exp, c } => {
                        let mut g = poly_pow(&f, *exp, n);
                        g[0] = (g[0] + reduce(*c, n)) % n;
                        g
                    }
                    MapExpr::PolyDeriv => {
                        let mut g = vec![0u64; f.len()];
                        for i in 1..f.len() {
                            g[i - 1] = (i as u64 % n) * f[i] % n;
                        }
                        g
                    }
                    MapExpr::PolySquare => poly_mul(&f, &f, n),
                    MapExpr::PolyAddConst(add) => {
                        let mut g = f.clone();
                        // Terms of degree >= k vanish in the quotient.
                        for (gi, &ai) in g.iter_mut().zip(add) {
                            *gi = (*gi + reduce(ai, n)) % n;
                        }
                        g
                    }
                    _ => unreachable!("checked at compile time"),
                };
                Some(space.pack(&g))
            }
            SpaceKind::BitVec(w) => match self.expr {
                MapExpr::CaRule(rule) => Some(ca_step(rule, index, w)),
                _ => unreachable!("checked at compile time"),
            },
            _ => unreachable!(),
        }
    }

    /// Image of every index, with [`NO_IMAGE`] for escapes.
    pub fn image_table(&self) -> Vec<u32> {
        (0..self.space.size())
            .map(|i| self.image(i).map_or(NO_IMAGE, |j| j as u32))
            .collect()
    }
}

fn check_applicable(expr: &MapExpr, space: &StateSpace) -> Result<()> {
    let kind = space.kind();
    let ok = match expr {
        MapExpr::Perm(_) => true,
        MapExpr::Affine { .. } | MapExpr::PowerPlus { .. } => !matches!(kind, SpaceKind::BitVec(_)),
        MapExpr::Exp { .. } | MapExpr::Dickson | MapExpr::WsMap { .. } => kind.is_residue(),
        MapExpr::MatQuad(a) => match kind {
            SpaceKind::Mat2(_) => true,
            SpaceKind::UpperTri2(n) => reduce(a[2], n) == 0,
            _ => false,
        },
        MapExpr::PolyDeriv | MapExpr::PolySquare | MapExpr::PolyAddConst(_) => {
            matches!(kind, SpaceKind::PolyQuot(..))
        }
        MapExpr::CaRule(_) => matches!(kind, SpaceKind::BitVec(w) if w >= 3),
    };
    let ok = ok
        && match expr {
            MapExpr::WsMap { epsilon, .. } => epsilon.is_finite() && *epsilon >= 0.0,
            _ => true,
        };
    if ok {
        Ok(())
    } else {
        Err(Error::Inapplicable {
            map: expr.to_string(),
            space: space.to_string(),
        })
    }
}

/// Applies `expr` to a single state. `Ok(None)` means the image escapes the
/// restricted subspace and contributes no edge.
pub fn apply(expr: &MapExpr, space: &StateSpace, state: &State) -> Result<Option<State>> {
    let index = space.index_of(state)?;
    let compiled = CompiledMap::new(expr, space)?;
    compiled.image(index).map(|j| space.state_at(j)).transpose()
}

/// A nonempty list of maps acting on one space.
#[derive(Debug, Clone, PartialEq)]
pub struct MapFamily {
    maps: Vec<MapExpr>,
    space: StateSpace,
}

impl MapFamily {
    pub fn new(maps: Vec<MapExpr>, space: StateSpace) -> Result<Self> {
        if maps.is_empty() {
            return Err(Error::InvalidArgument(
                "a map family needs at least one map".into(),
            ));
        }
        for m in &maps {
            check_applicable(m, &space)?;
        }
        Ok(MapFamily { maps, space })
    }

    /// Parses a comma-separated map list onto `space`.
    pub fn parse(maps: &str, space: StateSpace) -> Result<Self> {
        MapFamily::new(parse_map_list(maps)?, space)
    }

    pub fn maps(&self) -> &[MapExpr] {
        &self.maps
    }

    pub fn space(&self) -> &StateSpace {
        &self.space
    }

    pub fn compile(&self) -> Result<Vec<CompiledMap>> {
        self.maps
            .iter()
            .map(|m| CompiledMap::new(m, &self.space))
            .collect()
    }
}

impl fmt::Display for MapFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}} on {}", format_map_list(&self.maps), self.space)
    }
}

/// Parameters for [`preset`]: the modulus and, for polynomial rings, the
/// truncation degree.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PresetParams {
    pub n: u64,
    pub k: u32,
}

impl PresetParams {
    pub fn n(n: u64) -> Self {
        PresetParams { n, k: 6 }
    }
}

pub const PRESET_NAMES: &[&str] = &[
    "collatz", "artin", "fermat", "pierpont", "dickson", "dickson+", "polyring",
];

/// Named map families.
///
/// | name       | maps                          | space            |
/// |------------|-------------------------------|------------------|
/// | `collatz`  | `2x`, `3x+1`                  | `Z_n`            |
/// | `artin`    | `2x`                          | nonzero residues |
/// | `fermat`   | `x^2`                         | nonzero residues |
/// | `pierpont` | `x^2`, `x^3`                  | nonzero residues |
/// | `dickson`  | `σ(x)-x`                      | `Z_n`            |
/// | `dickson+` | `σ(x)-x`, `x+1`               | `Z_n`            |
/// | `polyring` | `f'`, `f^2`, `f+x^4+x^3+x^2+x+1` | `Z_n[x]/(x^k)` |
pub fn preset(name: &str, params: PresetParams) -> Result<MapFamily> {
    let PresetParams { n, k } = params;
    let (maps, kind) = match name {
        "collatz" => (
            vec![
                MapExpr::Affine { a: 2, b: 0 },
                MapExpr::Affine { a: 3, b: 1 },
            ],
            SpaceKind::Zn(n),
        ),
        "artin" => (
            vec![MapExpr::Affine { a: 2, b: 0 }],
            SpaceKind::ZnNonzero(n),
        ),
        "fermat" => (
            vec![MapExpr::PowerPlus { exp: 2, c: 0 }],
            SpaceKind::ZnNonzero(n),
        ),
        "pierpont" => (
            vec![
                MapExpr::PowerPlus { exp: 2, c: 0 },
                MapExpr::PowerPlus { exp: 3, c: 0 },
            ],
            SpaceKind::ZnNonzero(n),
        ),
        "dickson" => (vec![MapExpr::Dickson], SpaceKind::Zn(n)),
        "dickson+" => (
            vec![MapExpr::Dickson, MapExpr::Affine { a: 1, b: 1 }],
            SpaceKind::Zn(n),
        ),
        "polyring" => (
            vec![
                MapExpr::PolyDeriv,
                MapExpr::PolySquare,
                MapExpr::PolyAddConst(vec![1, 1, 1, 1, 1]),
            ],
            SpaceKind::PolyQuot(n, k),
        ),
        other => return Err(Error::UnknownPreset(other.to_string())),
    };
    MapFamily::new(maps, StateSpace::new(kind)?)
}
