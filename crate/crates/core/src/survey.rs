//! Parameter sweeps: connectivity loci, the elementary-CA rule-pair grid,
//! Euler characteristic sequences, and random-permutation censuses.

use std::fmt::{self, Write as _};

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graphcore::{build_from_images, build_graph, GraphSpec};
use crate::mapfamily::{CompiledMap, MapExpr, MapFamily};
use crate::metrics::{
    clustering, components, euler_characteristic, lambda_coefficient, path_stats, CompensatedSum,
    NuEstimator,
};
use crate::numtheory::{first_primes, is_primitive_root};
use crate::ringspace::{SpaceKind, SpaceTemplate, StateSpace};

pub const CA_MIN_WIDTH: u32 = 3;
pub const CA_MAX_WIDTH: u32 = 20;

/// A family whose space depends on one integer parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilyTemplate {
    pub space: SpaceTemplate,
    pub maps: Vec<MapExpr>,
}

impl FamilyTemplate {
    pub fn new(space: SpaceTemplate, maps: Vec<MapExpr>) -> Self {
        FamilyTemplate { space, maps }
    }

    pub fn at(&self, n: u64) -> Result<MapFamily> {
        MapFamily::new(self.maps.clone(), self.space.at(n)?)
    }

    /// Smallest parameter at which every map applies, searching a short
    /// window above the space's own minimum.
    pub fn min_param(&self) -> Option<u64> {
        let start = self.space.min_param();
        (start..start + 64).find(|&n| self.at(n).is_ok())
    }
}

/// Sweep parameter: a modulus or width, or a pair of CA rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Param {
    N(u64),
    RulePair(u8, u8),
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Param::N(n) => write!(f, "{n}"),
            Param::RulePair(a, b) => write!(f, "{a}:{b}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocusRecord {
    pub param: Param,
    pub components: usize,
    pub connected: bool,
}

/// Per-parameter connectivity, sorted by parameter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocusResult {
    pub records: Vec<LocusRecord>,
}

impl LocusResult {
    pub fn connected_params(&self) -> Vec<Param> {
        self.records
            .iter()
            .filter(|r| r.connected)
            .map(|r| r.param)
            .collect()
    }

    /// Moduli with a connected graph; rule pairs are skipped.
    pub fn connected_moduli(&self) -> Vec<u64> {
        self.connected_params()
            .into_iter()
            .filter_map(|p| match p {
                Param::N(n) => Some(n),
                Param::RulePair(..) => None,
            })
            .collect()
    }

    /// `param,components,connected` rows after `# ` prefixed comment lines.
    pub fn to_csv(&self, comments: &[String]) -> String {
        let mut out = comment_block(comments);
        out.push_str("param,components,connected\n");
        for r in &self.records {
            writeln!(
                out,
                "{},{},{}",
                r.param,
                r.components,
                u8::from(r.connected)
            )
            .unwrap();
        }
        out
    }

    /// Plain PBM of a rule-pair grid, row `a`, column `b`; black marks a
    /// connected pair. Comments follow the magic number, and each 256-pixel
    /// row spans four 64-character lines.
    pub fn to_pbm(&self, comments: &[String]) -> Result<String> {
        let mut grid = vec![false; 256 * 256];
        for r in &self.records {
            match r.param {
                Param::RulePair(a, b) => grid[a as usize * 256 + b as usize] = r.connected,
                Param::N(_) => {
                    return Err(Error::InvalidArgument(
                        "PBM output needs a rule-pair grid".into(),
                    ))
                }
            }
        }
        let mut out = String::from("P1\n");
        out.push_str(&comment_block(comments));
        out.push_str("256 256\n");
        for row in grid.chunks(256) {
            for line in row.chunks(64) {
                out.extend(line.iter().map(|&c| if c { '1' } else { '0' }));
                out.push('\n');
            }
        }
        Ok(out)
    }
}

fn comment_block(comments: &[String]) -> String {
    comments.iter().map(|c| format!("# {c}\n")).collect()
}

/// Component count of each family instance in `params`, in ascending order.
pub fn connectivity_locus(
    template: &FamilyTemplate,
    params: impl IntoIterator<Item = u64>,
) -> Result<LocusResult> {
    let mut params: Vec<u64> = params.into_iter().collect();
    params.sort_unstable();
    params.dedup();
    let records = params
        .into_par_iter()
        .map(|n| {
            let g = build_graph(&GraphSpec::new(template.at(n)?))?;
            let c = components(&g).count;
            Ok(LocusRecord {
                param: Param::N(n),
                components: c,
                connected: c == 1,
            })
        })
        .collect::<Result<_>>()?;
    Ok(LocusResult { records })
}

/// Connectivity of `{ca:a, ca:b}` on width-`width` bit vectors for all
/// 65536 ordered rule pairs.
pub fn ca_mandelbrot(width: u32) -> Result<LocusResult> {
    if !(CA_MIN_WIDTH..=CA_MAX_WIDTH).contains(&width) {
        return Err(Error::InvalidArgument(format!(
            "CA width {width} outside {CA_MIN_WIDTH}..={CA_MAX_WIDTH}"
        )));
    }
    let space = StateSpace::new(SpaceKind::BitVec(width))?;
    let size = space.size() as usize;
    let tables: Vec<Vec<u32>> = (0..=255u8)
        .into_par_iter()
        .map(|r| Ok(CompiledMap::new(&MapExpr::CaRule(r), &space)?.image_table()))
        .collect::<Result<_>>()?;
    // The graph of {a, b} equals that of {b, a}; compute the upper triangle.
    let upper: Vec<(u8, u8, usize)> = (0..=255u8)
        .flat_map(|a| (a..=255u8).map(move |b| (a, b)))
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(a, b)| {
            let g = build_from_images(size, &[&tables[a as usize], &tables[b as usize]]);
            (a, b, components(&g).count)
        })
        .collect();
    let mut counts = vec![0usize; 256 * 256];
    for (a, b, c) in upper {
        counts[a as usize * 256 + b as usize] = c;
        counts[b as usize * 256 + a as usize] = c;
    }
    let records = counts
        .into_iter()
        .enumerate()
        .map(|(i, c)| LocusRecord {
            param: Param::RulePair((i / 256) as u8, (i % 256) as u8),
            components: c,
            connected: c == 1,
        })
        .collect();
    Ok(LocusResult { records })
}

/// Euler characteristic of `{x^2}` on `Z_n` for `n = 1..=n_max`.
pub fn euler_sequence(n_max: u64) -> Result<Vec<i64>> {
    (1..=n_max)
        .into_par_iter()
        .map(|n| {
            let fam = MapFamily::new(
                vec![MapExpr::PowerPlus { exp: 2, c: 0 }],
                StateSpace::new(SpaceKind::Zn(n))?,
            )?;
            Ok(euler_characteristic(&build_graph(&GraphSpec::new(fam))?))
        })
        .collect()
}

/// Length-cluster coefficient of a family's graph, `None` when undefined.
pub fn family_lambda(family: MapFamily, estimator: NuEstimator) -> Result<Option<f64>> {
    let g = build_graph(&GraphSpec::new(family))?;
    let Some(mu) = path_stats(&g).mu else {
        return Ok(None);
    };
    Ok(lambda_coefficient(mu, clustering(&g).select(estimator)))
}

/// Lambda values of random two-permutation graphs on `Z_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct LambdaCensus {
    pub n: u64,
    pub seed: u64,
    pub estimator: NuEstimator,
    /// Per-trial lambda, `None` where undefined.
    pub lambdas: Vec<Option<f64>>,
    /// Over defined trials; `None` if there are none.
    pub mean: Option<f64>,
    /// Sample standard deviation; `None` with fewer than two defined trials.
    pub std_dev: Option<f64>,
    pub undefined: usize,
}

impl LambdaCensus {
    pub fn defined(&self) -> usize {
        self.lambdas.len() - self.undefined
    }

    pub fn to_csv(&self, comments: &[String]) -> String {
        let mut out = comment_block(comments);
        out.push_str("trial,lambda\n");
        for (i, l) in self.lambdas.iter().enumerate() {
            writeln!(out, "{i},{}", l.map_or("NA".to_string(), sig9)).unwrap();
        }
        let opt = |v: Option<f64>| v.map_or("NA".to_string(), sig9);
        writeln!(
            out,
            "# mean={} std={} defined={} undefined={}",
            opt(self.mean),
            opt(self.std_dev),
            self.defined(),
            self.undefined
        )
        .unwrap();
        out
    }
}

/// Nine significant digits in positional notation.
pub fn sig9(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (8 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

/// Runs `trials` graphs `{perm:s, perm:t}` on `Z_n`, with every `(s, t)`
/// drawn from a ChaCha stream seeded by `seed`.
pub fn permutation_lambda(
    n: u64,
    trials: usize,
    seed: u64,
    estimator: NuEstimator,
) -> Result<LambdaCensus> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be positive".into()));
    }
    let space = StateSpace::new(SpaceKind::Zn(n))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let seeds: Vec<(u64, u64)> = (0..trials)
        .map(|_| (rng.next_u64(), rng.next_u64()))
        .collect();
    let lambdas: Vec<Option<f64>> = seeds
        .into_par_iter()
        .map(|(s, t)| {
            let fam = MapFamily::new(vec![MapExpr::Perm(s), MapExpr::Perm(t)], space.clone())?;
            family_lambda(fam, estimator)
        })
        .collect::<Result<_>>()?;
    let defined: Vec<f64> = lambdas.iter().flatten().copied().collect();
    let undefined = lambdas.len() - defined.len();
    let (mean, std_dev) = mean_std(&defined);
    Ok(LambdaCensus {
        n,
        seed,
        estimator,
        lambdas,
        mean,
        std_dev,
        undefined,
    })
}

fn mean_std(xs: &[f64]) -> (Option<f64>, Option<f64>) {
    if xs.is_empty() {
        return (None, None);
    }
    let k = xs.len() as f64;
    let mean = xs.iter().copied().collect::<CompensatedSum>().total() / k;
    let std = (xs.len() >= 2).then(|| {
        let ss: CompensatedSum = xs.iter().map(|x| (x - mean) * (x - mean)).collect();
        (ss.total() / (k - 1.0)).sqrt()
    });
    (Some(mean), std)
}

/// Share of the odd primes among the first `prime_count` primes that have 2
/// as a primitive root.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArtinCensus {
    pub odd_primes: usize,
    pub count: usize,
    pub fraction: f64,
}

pub fn artin_census(prime_count: usize) -> Result<ArtinCensus> {
    let primes = first_primes(prime_count);
    let odd: Vec<u64> = primes.into_iter().filter(|&p| p > 2).collect();
    if odd.is_empty() {
        return Err(Error::InvalidArgument(
            "census needs at least one odd prime".into(),
        ));
    }
    let count = odd
        .par_iter()
        .map(|&p| is_primitive_root(2, p).map(usize::from))
        .sum::<Result<usize>>()?;
    Ok(ArtinCensus {
        odd_primes: odd.len(),
        count,
        fraction: count as f64 / odd.len() as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mapfamily::parse_map_list;
    use crate::verify::EULER_X2_TO_23;

    #[test]
    fn euler_prefix() {
        assert_eq!(euler_sequence(23).unwrap(), EULER_X2_TO_23);
    }

    #[test]
    fn x5_three_components() {
        let t = FamilyTemplate::new(SpaceTemplate::Zn, parse_map_list("x^5").unwrap());
        let locus = connectivity_locus(&t, 1..=260).unwrap();
        let three: Vec<u64> = locus
            .records
            .iter()
            .filter(|r| r.components == 3)
            .filter_map(|r| match r.param {
                Param::N(n) => Some(n),
                _ => None,
            })
            .collect();
        assert_eq!(three, crate::verify::X5_THREE_COMPONENTS_TO_260);
    }

    #[test]
    fn template_minimum_respects_maps() {
        let ca = FamilyTemplate::new(SpaceTemplate::BitVec, parse_map_list("ca:30").unwrap());
        assert_eq!(ca.min_param(), Some(3));
        let from2 = FamilyTemplate::new(SpaceTemplate::ZnFromTwo, parse_map_list("x^2").unwrap());
        assert_eq!(from2.min_param(), Some(3));
    }

    #[test]
    fn locus_csv() {
        let t = FamilyTemplate::new(SpaceTemplate::Zn, parse_map_list("2x").unwrap());
        let locus = connectivity_locus(&t, [4, 2, 3]).unwrap();
        assert_eq!(locus.connected_moduli(), vec![2, 4]);
        assert_eq!(
            locus.to_csv(&["hdr".into()]),
            "# hdr\nparam,components,connected\n2,1,1\n3,2,0\n4,1,1\n"
        );
        assert!(locus.to_pbm(&[]).is_err());
    }

    #[test]
    fn ca_grid_is_symmetric() {
        let grid = ca_mandelbrot(4).unwrap();
        assert_eq!(grid.records.len(), 65536);
        let at = |a: usize, b: usize| grid.records[a * 256 + b].components;
        for (a, b) in [(0, 255), (30, 110), (90, 204), (7, 200)] {
            assert_eq!(at(a, b), at(b, a));
        }
        // identity rule pairs yield 16 isolated states
        assert_eq!(at(204, 204), 16);
        let pbm = grid.to_pbm(&["x".into()]).unwrap();
        assert!(pbm.starts_with("P1\n# x\n256 256\n"));
        assert_eq!(pbm.lines().count(), 3 + 256 * 4);
        assert!(ca_mandelbrot(2).is_err());
        assert!(ca_mandelbrot(21).is_err());
    }

    #[test]
    fn permutation_census_is_reproducible() {
        let a = permutation_lambda(500, 6, 9, NuEstimator::Transitivity).unwrap();
        let b = permutation_lambda(500, 6, 9, NuEstimator::Transitivity).unwrap();
        assert_eq!(a.to_csv(&[]), b.to_csv(&[]));
        assert_eq!(a.lambdas.len(), 6);
        assert!(a.to_csv(&[]).lines().last().unwrap().starts_with("# mean="));
    }

    #[test]
    fn identity_family_has_undefined_lambda() {
        let fam = MapFamily::parse("x", "zn:5".parse().unwrap()).unwrap();
        assert_eq!(family_lambda(fam, NuEstimator::Transitivity).unwrap(), None);
    }

    #[test]
    fn mean_and_deviation() {
        let (m, s) = mean_std(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, Some(2.5));
        assert!((s.unwrap() - 1.2909944487358056).abs() < 1e-15);
        assert_eq!(mean_std(&[]), (None, None));
        assert_eq!(mean_std(&[3.0]).1, None);
    }

    #[test]
    fn significant_digits() {
        assert_eq!(sig9(0.8069959081), "0.806995908");
        assert_eq!(sig9(12.5), "12.5000000");
        assert_eq!(sig9(123456789012.0), "123456789012");
    }

    #[test]
    fn artin_small_census() {
        // odd primes among the first 10: 3..29, with 2 primitive for 3,5,11,13,19,29
        let c = artin_census(10).unwrap();
        assert_eq!((c.odd_primes, c.count), (9, 6));
        assert!(artin_census(1).is_err());
    }
}
