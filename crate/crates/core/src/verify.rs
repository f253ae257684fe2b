//! Executable checks of connectivity and triangle claims.
//!
//! Each check builds graphs through [`graphcore`](crate::graphcore) and
//! measures them through [`metrics`](crate::metrics); the expected outcome
//! comes from [`numtheory`](crate::numtheory) alone. Sweeps run in parallel and
//! are merged in parameter order, so verdicts are deterministic.

use std::fmt;

use rayon::prelude::*;

use crate::error::Result;
use crate::graphcore::{build_graph, GraphSpec};
use crate::mapfamily::{preset, MapExpr, MapFamily, PresetParams};
use crate::metrics::{components, triangle_count};
use crate::numtheory::{
    double_smooth_set, factorize, is_fermat_prime, is_one_plus_smooth_prime, is_power_of_two,
    is_prime, is_primitive_root, primes_up_to, smooth_set,
};
use crate::ringspace::{SpaceKind, StateSpace};

/// Odd primes up to 103 whose doubling graph on the nonzero residues is connected.
pub const ARTIN_CONNECTED_TO_103: &[u64] = &[3, 5, 11, 13, 19, 29, 37, 53, 59, 61, 67, 83, 101];
/// Odd primes up to 103 whose doubling graph on the nonzero residues is disconnected.
pub const ARTIN_DISCONNECTED_TO_103: &[u64] = &[7, 17, 23, 31, 41, 43, 47, 71, 73, 79, 89, 97, 103];
pub const PIERPONT_TO_577: &[u64] = &[
    2, 3, 5, 7, 13, 17, 19, 37, 73, 97, 109, 163, 193, 257, 433, 487, 577,
];
/// Primes `p <= 101` with `p - 1` of the form `2^t 5^u`.
pub const POWER_PAIR_2_5_TO_101: &[u64] = &[2, 3, 5, 11, 17, 41, 101];
/// Euler characteristics of the squaring graph on `Z_n`, `n = 1..=23`.
pub const EULER_X2_TO_23: &[i64] = &[
    1, 2, 2, 2, 2, 4, 3, 2, 3, 4, 2, 4, 3, 6, 4, 2, 2, 6, 3, 4, 6, 4, 2,
];
/// Moduli up to 260 where `x^5` on `Z_n` has exactly three components.
pub const X5_THREE_COMPONENTS_TO_260: &[u64] = &[3, 4, 11, 251];

/// One cell of the affine connectivity table: for `T(x) = a x + b` on `Z_n`,
/// the connected moduli are the `primes`-smooth numbers, or their doubles
/// too when `double` is set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AffineCell {
    pub a: i64,
    pub b: i64,
    pub primes: &'static [u64],
    pub double: bool,
}

const fn cell(a: i64, b: i64, primes: &'static [u64], double: bool) -> AffineCell {
    AffineCell {
        a,
        b,
        primes,
        double,
    }
}

pub const AFFINE_TABLE: &[AffineCell] = &[
    cell(2, 0, &[2], false),
    cell(2, 1, &[2], false),
    cell(3, 0, &[3], false),
    cell(3, 1, &[3], true),
    cell(3, 2, &[3], false),
    cell(4, 0, &[2], false),
    cell(4, 1, &[2, 3], false),
    cell(4, 2, &[2, 3], false),
    cell(4, 3, &[2], false),
    cell(5, 0, &[5], false),
    cell(5, 1, &[2, 5], false),
    cell(5, 2, &[5], false),
    cell(5, 3, &[2, 5], false),
    cell(5, 4, &[5], false),
    cell(6, 0, &[2, 3], false),
    cell(6, 1, &[2, 3, 5], false),
    cell(6, 2, &[2, 3, 5], false),
    cell(6, 3, &[2, 3, 5], false),
    cell(6, 4, &[2, 3, 5], false),
    cell(6, 5, &[2, 3], false),
    cell(7, 0, &[7], false),
    cell(7, 1, &[3, 7], true),
    cell(7, 2, &[3, 7], false),
    cell(7, 3, &[7], true),
    cell(7, 4, &[3, 7], false),
    cell(7, 5, &[3, 7], true),
    cell(7, 6, &[7], false),
    cell(8, 0, &[2], false),
    cell(8, 1, &[2, 7], false),
    cell(8, 2, &[2, 7], false),
    cell(8, 3, &[2, 7], false),
    cell(8, 4, &[2, 7], false),
    cell(8, 5, &[2, 7], false),
    cell(8, 6, &[2, 7], false),
];

pub const CLAIM_IDS: &[&str] = &[
    "lemma1",
    "artin",
    "fermat",
    "collatz-triangles",
    "pierpont",
    "power-pair",
    "affine-table",
    "collatz-connected",
    "matrix-example",
];

/// Outcome of one claim over a tested range.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub claim_id: String,
    pub tested_range: String,
    pub agreements: usize,
    /// Parameters where computation and prediction differ.
    pub disagreements: Vec<String>,
    pub passed: bool,
}

impl Verdict {
    pub fn new(claim_id: &str, tested_range: String, checks: Vec<Check>) -> Self {
        let mut agreements = 0;
        let mut disagreements = Vec::new();
        for c in checks {
            if c.agrees {
                agreements += 1;
            } else {
                disagreements.push(c.param);
            }
        }
        let passed = disagreements.is_empty();
        Verdict {
            claim_id: claim_id.to_string(),
            tested_range,
            agreements,
            disagreements,
            passed,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} range={} agree={} disagree=[{}] {}",
            self.claim_id,
            self.tested_range,
            self.agreements,
            self.disagreements.join(","),
            if self.passed { "PASS" } else { "FAIL" }
        )
    }
}

/// A single parameter's comparison.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub param: String,
    pub agrees: bool,
}

impl Check {
    pub fn new(param: impl fmt::Display, agrees: bool) -> Self {
        Check {
            param: param.to_string(),
            agrees,
        }
    }
}

fn component_count(kind: SpaceKind, maps: Vec<MapExpr>) -> Result<usize> {
    let family = MapFamily::new(maps, StateSpace::new(kind)?)?;
    Ok(components(&build_graph(&GraphSpec::new(family))?).count)
}

fn family_components(family: MapFamily) -> Result<usize> {
    Ok(components(&build_graph(&GraphSpec::new(family))?).count)
}

fn sweep<F>(params: Vec<u64>, check: F) -> Result<Vec<Check>>
where
    F: Fn(u64) -> Result<Check> + Sync + Send,
{
    params.into_par_iter().map(check).collect()
}

fn affine(a: i64, b: i64) -> MapExpr {
    MapExpr::Affine { a, b }
}

fn power(exp: u32) -> MapExpr {
    MapExpr::PowerPlus { exp, c: 0 }
}

fn list_check(label: &str, computed: &[u64], expected: &[u64]) -> Check {
    let agrees = computed == expected;
    if agrees {
        Check::new(label, true)
    } else {
        Check::new(format!("{label}:got{computed:?}"), false)
    }
}

/// `{2x}` on `Z_n` is connected iff `n` is a power of two.
pub fn verify_lemma1(n_max: u64) -> Result<Verdict> {
    let checks = sweep((2..=n_max).collect(), |n| {
        let connected = component_count(SpaceKind::Zn(n), vec![affine(2, 0)])? == 1;
        Ok(Check::new(n, connected == is_power_of_two(n)))
    })?;
    Ok(Verdict::new("lemma1", format!("2..={n_max}"), checks))
}

/// `{2x}` on the nonzero residues is connected iff `n` is a power of two or a
/// prime with 2 as a primitive root. Also compares the odd primes up to 103
/// against the published connected and disconnected lists.
pub fn verify_artin(p_max: u64) -> Result<Verdict> {
    let predicted =
        |n: u64| is_power_of_two(n) || (is_prime(n) && is_primitive_root(2, n).unwrap_or(false));
    let connected: Vec<bool> = (2..=p_max)
        .into_par_iter()
        .map(|n| Ok(component_count(SpaceKind::ZnNonzero(n), vec![affine(2, 0)])? == 1))
        .collect::<Result<_>>()?;
    let mut checks: Vec<Check> = (2..=p_max)
        .zip(&connected)
        .map(|(n, &c)| Check::new(n, c == predicted(n)))
        .collect();
    let odd_primes = (3..=p_max.min(103)).filter(|&n| is_prime(n));
    let (conn, disc): (Vec<u64>, Vec<u64>) = odd_primes.partition(|&p| connected[(p - 2) as usize]);
    let cut = |list: &[u64]| -> Vec<u64> { list.iter().copied().filter(|&p| p <= p_max).collect() };
    checks.push(list_check(
        "connected-list",
        &conn,
        &cut(ARTIN_CONNECTED_TO_103),
    ));
    checks.push(list_check(
        "disconnected-list",
        &disc,
        &cut(ARTIN_DISCONNECTED_TO_103),
    ));
    Ok(Verdict::new("artin", format!("2..={p_max}"), checks))
}

/// `{x^2}` on the nonzero residues is connected iff `n = 2` or `n` is a
/// Fermat prime. When 59 is in range, also checks that the squaring graph on
/// all of `Z_59` has three components.
pub fn verify_fermat(n_max: u64, extras: &[u64]) -> Result<Verdict> {
    let mut params: Vec<u64> = (2..=n_max).chain(extras.iter().copied()).collect();
    params.sort_unstable();
    params.dedup();
    let mut checks = sweep(params, |n| {
        let connected = component_count(SpaceKind::ZnNonzero(n), vec![power(2)])? == 1;
        Ok(Check::new(n, connected == (n == 2 || is_fermat_prime(n))))
    })?;
    if n_max >= 59 {
        let c = component_count(SpaceKind::Zn(59), vec![power(2)])?;
        checks.push(Check::new("G59-components=3", c == 3));
    }
    let range = if extras.is_empty() {
        format!("2..={n_max}")
    } else {
        let e: Vec<String> = extras.iter().map(u64::to_string).collect();
        format!("2..={n_max}+{}", e.join("+"))
    };
    Ok(Verdict::new("fermat", range, checks))
}

/// The collatz family has exactly `expected` triangles on `Z_p` for every
/// prime `above < p <= p_max`.
fn prime_triangles(maps: &[MapExpr], above: u64, p_max: u64, expected: u64) -> Result<Vec<Check>> {
    let primes: Vec<u64> = primes_up_to(p_max)
        .into_iter()
        .filter(|&p| p > above)
        .collect();
    sweep(primes, |p| {
        let family = MapFamily::new(maps.to_vec(), StateSpace::new(SpaceKind::Zn(p))?)?;
        let t = triangle_count(&build_graph(&GraphSpec::new(family))?);
        Ok(Check::new(p, t == expected))
    })
}

/// Exactly four triangles for every prime `17 < p <= p_max`, and six at 13.
/// Primes up to 17 other than 13 are outside the claim.
pub fn verify_collatz_triangles(p_max: u64) -> Result<Verdict> {
    let maps = preset("collatz", PresetParams::n(13))?.maps().to_vec();
    let mut checks = prime_triangles(&maps, 17, p_max, 4)?;
    let at13 = triangle_count(&build_graph(&GraphSpec::new(preset(
        "collatz",
        PresetParams::n(13),
    )?))?);
    checks.insert(0, Check::new("13:6", at13 == 6));
    Ok(Verdict::new(
        "collatz-triangles",
        format!("primes 17<p<={p_max} and n=13"),
        checks,
    ))
}

/// Triangle counts for other affine pairs on prime moduli. These are
/// observations rather than propositions.
pub fn verify_triangle_remark(
    maps: &str,
    above: u64,
    p_max: u64,
    expected: u64,
) -> Result<Verdict> {
    let parsed = crate::mapfamily::parse_map_list(maps)?;
    let checks = prime_triangles(&parsed, above, p_max, expected)?;
    Ok(Verdict::new(
        &format!("remark-triangles[{maps}]={expected}"),
        format!("primes {above}<p<={p_max}"),
        checks,
    ))
}

/// `{x^a, x^b}` on the nonzero residues is connected iff `n` is prime with
/// `n - 1` smooth over `primes`.
pub fn verify_power_pair(a: u32, b: u32, primes: &[u64], n_max: u64) -> Result<Verdict> {
    let checks = power_pair_checks(a, b, primes, n_max)?;
    let p: Vec<String> = primes.iter().map(u64::to_string).collect();
    Ok(Verdict::new(
        &format!("power-pair[x^{a},x^{b};{}]", p.join(",")),
        format!("2..={n_max}"),
        checks,
    ))
}

fn power_pair_checks(a: u32, b: u32, primes: &[u64], n_max: u64) -> Result<Vec<Check>> {
    sweep((2..=n_max).collect(), |n| {
        let connected = component_count(SpaceKind::ZnNonzero(n), vec![power(a), power(b)])? == 1;
        Ok(Check::new(
            n,
            connected == is_one_plus_smooth_prime(n, primes),
        ))
    })
}

/// Pierpont primes are exactly the moduli where `{x^2, x^3}` connects the
/// nonzero residues; the connected moduli up to 577 must match the list.
pub fn verify_pierpont(n_max: u64) -> Result<Verdict> {
    let mut checks = power_pair_checks(2, 3, &[2, 3], n_max)?;
    let limit = n_max.min(577);
    let connected: Vec<u64> = (2..=limit)
        .into_par_iter()
        .map(|n| {
            let fam = preset("pierpont", PresetParams::n(n))?;
            Ok((family_components(fam)? == 1).then_some(n))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    let expected: Vec<u64> = PIERPONT_TO_577
        .iter()
        .copied()
        .filter(|&p| p <= limit)
        .collect();
    checks.push(list_check("pierpont-list", &connected, &expected));
    Ok(Verdict::new("pierpont", format!("2..={n_max}"), checks))
}

/// Moduli `1..=n_max` where `{a x + b}` on `Z_n` is connected.
pub fn affine_locus(a: i64, b: i64, n_max: u64) -> Result<Vec<u64>> {
    let flags: Vec<bool> = (1..=n_max)
        .into_par_iter()
        .map(|n| Ok(component_count(SpaceKind::Zn(n), vec![affine(a, b)])? == 1))
        .collect::<Result<_>>()?;
    Ok((1..=n_max)
        .zip(flags)
        .filter(|&(_, c)| c)
        .map(|(n, _)| n)
        .collect())
}

fn lemma2_checks(n_max: u64) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for a in 2..=8i64 {
        let allowed: Vec<u64> = factorize(a as u64)
            .primes()
            .chain(factorize(a as u64 - 1).primes())
            .collect();
        for b in 0..a {
            let outside: Vec<u64> = affine_locus(a, b, n_max)?
                .into_iter()
                .filter(|&n| !factorize(n).is_smooth_over(&allowed))
                .collect();
            let label = format!("lemma2[{a}x+{b}]");
            checks.push(if outside.is_empty() {
                Check::new(label, true)
            } else {
                Check::new(format!("{label}:{outside:?}"), false)
            });
        }
    }
    Ok(checks)
}

/// Every connected modulus of `{a x + b}`, `2 <= a <= 8`, `0 <= b < a`, has
/// only prime factors dividing `a` or `a - 1`.
pub fn verify_lemma2(n_max: u64) -> Result<Verdict> {
    Ok(Verdict::new(
        "lemma2",
        format!("1..={n_max}"),
        lemma2_checks(n_max)?,
    ))
}

/// Each table cell's connectivity locus equals its predicted smooth set, and
/// the containment holds for every `(a, b)` with `a <= 8`.
pub fn verify_affine_table(n_max: u64) -> Result<Verdict> {
    let mut checks = Vec::new();
    for c in AFFINE_TABLE {
        let locus = affine_locus(c.a, c.b, n_max)?;
        let predicted = if c.double {
            double_smooth_set(c.primes, n_max)?
        } else {
            smooth_set(c.primes, n_max)?
        };
        let label = format!("{}x+{}", c.a, c.b);
        if locus == predicted.members {
            checks.push(Check::new(label, true));
        } else {
            let extra: Vec<u64> = locus
                .iter()
                .copied()
                .filter(|n| !predicted.contains(*n))
                .collect();
            let missing: Vec<u64> = predicted
                .members
                .iter()
                .copied()
                .filter(|n| locus.binary_search(n).is_err())
                .collect();
            checks.push(Check::new(
                format!("{label}:extra{extra:?}:missing{missing:?}"),
                false,
            ));
        }
    }
    checks.extend(lemma2_checks(n_max)?);
    Ok(Verdict::new("affine-table", format!("1..={n_max}"), checks))
}

/// Reports every `n` where `{2x, 3x+1}` on `Z_n` is disconnected.
pub fn verify_collatz_connected(n_max: u64) -> Result<Verdict> {
    let checks = sweep((2..=n_max).collect(), |n| {
        Ok(Check::new(
            n,
            family_components(preset("collatz", PresetParams::n(n))?)? == 1,
        ))
    })?;
    Ok(Verdict::new(
        "collatz-connected",
        format!("2..={n_max}"),
        checks,
    ))
}

/// Quadratic maps on 2x2 matrix rings.
pub fn verify_matrix_example() -> Result<Verdict> {
    let connected = component_count(SpaceKind::Mat2(5), vec![MapExpr::MatQuad([1, 2, 2, 4])])? == 1;
    let m2 = component_count(SpaceKind::Mat2(2), vec![power(2)])?;
    let ut5 = component_count(SpaceKind::UpperTri2(5), vec![power(2)])?;
    let checks = vec![
        Check::new("mat2:5[x^2+[[1,2],[2,4]]]connected", connected),
        Check::new(format!("mat2:2[x^2]components={m2}>=2"), m2 >= 2),
        Check::new(format!("ut2:5[x^2]components={ut5}>=2"), ut5 >= 2),
    ];
    Ok(Verdict::new("matrix-example", "fixed".into(), checks))
}
