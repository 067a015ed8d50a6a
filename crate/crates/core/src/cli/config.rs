//! `key = value` experiment files with `[section]` headers.
//!
//! Top level: `kind`, `resolution`, `mass_fraction`, `distances`, `seed`,
//! `record_timings`, `heights`, `base`, `output`.
//! Domain sections (`[source]`, `[target]`, `[lower]`, `[upper]`): `shape`,
//! `lo`, `hi`, `center`, `radius`, `axes`, `angle`, `density`, `density_a`,
//! `density_b`, `density_axis`, `density_center`.

use std::collections::BTreeMap;
use std::fmt;

use crate::geometry::{ConvexDomain, Density};

const TOP_KEYS: [&str; 9] = [
    "kind",
    "output",
    "resolution",
    "mass_fraction",
    "distances",
    "seed",
    "record_timings",
    "heights",
    "base",
];
const DOMAIN_KEYS: [&str; 12] = [
    "shape",
    "lo",
    "hi",
    "center",
    "radius",
    "axes",
    "angle",
    "density",
    "density_a",
    "density_b",
    "density_axis",
    "density_center",
];
const SECTIONS: [&str; 4] = ["source", "target", "lower", "upper"];

/// A configuration problem, always naming the offending key.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn err<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Partial,
    Sweep,
    TwoTarget,
    TwoTargetSweep,
    Sections,
}

impl Kind {
    pub fn as_str(self) -> &'static str {
        match self {
            Kind::Partial => "partial",
            Kind::Sweep => "sweep",
            Kind::TwoTarget => "two_target",
            Kind::TwoTargetSweep => "two_target_sweep",
            Kind::Sections => "sections",
        }
    }

    fn parse(s: &str) -> Result<Self, ConfigError> {
        Ok(match s {
            "partial" => Kind::Partial,
            "sweep" => Kind::Sweep,
            "two_target" => Kind::TwoTarget,
            "two_target_sweep" => Kind::TwoTargetSweep,
            "sections" => Kind::Sections,
            _ => return err(format!("kind: unknown kind `{s}`")),
        })
    }

    fn sections(self) -> &'static [&'static str] {
        match self {
            Kind::TwoTarget | Kind::TwoTargetSweep => &["source", "lower", "upper"],
            _ => &["source", "target"],
        }
    }
}

#[derive(Clone, Debug)]
pub struct DomainSpec {
    pub domain: ConvexDomain,
    pub density: Density,
}

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub kind: Kind,
    pub resolution: usize,
    /// Absent for the balanced two-target kinds.
    pub mass_fraction: Option<f64>,
    pub distances: Vec<f64>,
    pub seed: u64,
    pub record_timings: bool,
    pub heights: Vec<f64>,
    pub base: Option<Vec<f64>>,
    /// Output directory, relative to the config file.
    pub output: Option<String>,
    /// Keyed by section name.
    pub domains: BTreeMap<String, DomainSpec>,
    /// Normalized `section -> key -> value` echo; the top level is `""`.
    pub echo: BTreeMap<String, BTreeMap<String, String>>,
}

impl ExperimentConfig {
    pub fn domain(&self, name: &str) -> &DomainSpec {
        &self.domains[name]
    }

    pub fn dim(&self) -> usize {
        self.domain("source").domain.dim()
    }
}

type RawSections = BTreeMap<String, BTreeMap<String, String>>;

fn read_raw(text: &str) -> Result<RawSections, ConfigError> {
    let mut out: RawSections = BTreeMap::new();
    out.insert(String::new(), BTreeMap::new());
    let mut section = String::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split(['#', ';']).next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let lineno = no + 1;
        if let Some(rest) = line.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| ConfigError(format!("line {lineno}: unterminated section header")))?
                .trim();
            if !SECTIONS.contains(&name) {
                return err(format!("line {lineno}: unknown section [{name}]"));
            }
            if out.contains_key(name) {
                return err(format!("line {lineno}: duplicate section [{name}]"));
            }
            section = name.to_string();
            out.insert(section.clone(), BTreeMap::new());
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| ConfigError(format!("line {lineno}: expected `key = value`")))?;
        let (key, value) = (key.trim(), value.trim());
        let allowed: &[&str] = if section.is_empty() {
            &TOP_KEYS
        } else {
            &DOMAIN_KEYS
        };
        if !allowed.contains(&key) {
            return err(match section.as_str() {
                "" => format!("unknown key `{key}`"),
                s => format!("unknown key `{key}` in [{s}]"),
            });
        }
        let map = out.get_mut(&section).expect("section inserted");
        if map.insert(key.to_string(), value.to_string()).is_some() {
            return err(format!("{key}: given twice"));
        }
    }
    Ok(out)
}

fn number(key: &str, v: &str) -> Result<f64, ConfigError> {
    match v.parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        _ => err(format!("{key}: expected a finite number, got `{v}`")),
    }
}

fn list(key: &str, v: &str) -> Result<Vec<f64>, ConfigError> {
    let items: Vec<&str> = v
        .trim_start_matches('(')
        .trim_end_matches(')')
        .split(',')
        .map(str::trim)
        .collect();
    if items.iter().any(|s| s.is_empty()) {
        return err(format!("{key}: expected a comma-separated list of numbers"));
    }
    items.into_iter().map(|s| number(key, s)).collect()
}

struct Fields<'a> {
    section: &'a str,
    map: &'a BTreeMap<String, String>,
}

impl Fields<'_> {
    fn name(&self, key: &str) -> String {
        if self.section.is_empty() {
            key.to_string()
        } else {
            format!("{}.{key}", self.section)
        }
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.map.get(key).map(String::as_str)
    }

    fn require(&self, key: &str) -> Result<&str, ConfigError> {
        self.get(key)
            .ok_or_else(|| ConfigError(format!("{}: missing", self.name(key))))
    }

    fn number(&self, key: &str) -> Result<Option<f64>, ConfigError> {
        self.get(key)
            .map(|v| number(&self.name(key), v))
            .transpose()
    }

    fn list(&self, key: &str) -> Result<Option<Vec<f64>>, ConfigError> {
        self.get(key).map(|v| list(&self.name(key), v)).transpose()
    }

    fn forbid(&self, keys: &[&str], why: &str) -> Result<(), ConfigError> {
        for k in keys {
            if self.map.contains_key(*k) {
                return err(format!("{}: not used {why}", self.name(k)));
            }
        }
        Ok(())
    }
}

fn parse_domain(f: &Fields) -> Result<ConvexDomain, ConfigError> {
    let shape = f.require("shape")?;
    let bad = |e: crate::Error| ConfigError(format!("{}: {e}", f.name("shape")));
    let why = format!("by shape {shape}");
    match shape {
        "interval" => {
            f.forbid(&["center", "radius", "axes", "angle"], &why)?;
            let lo = f
                .number("lo")?
                .ok_or_else(|| ConfigError(format!("{}: missing", f.name("lo"))))?;
            let hi = f
                .number("hi")?
                .ok_or_else(|| ConfigError(format!("{}: missing", f.name("hi"))))?;
            if !(lo < hi) {
                return err(format!("{}: must exceed lo", f.name("hi")));
            }
            ConvexDomain::interval(lo, hi).map_err(bad)
        }
        "box" => {
            f.forbid(&["center", "radius", "axes", "angle"], &why)?;
            let lo = f
                .list("lo")?
                .ok_or_else(|| ConfigError(format!("{}: missing", f.name("lo"))))?;
            let hi = f
                .list("hi")?
                .ok_or_else(|| ConfigError(format!("{}: missing", f.name("hi"))))?;
            if lo.len() != hi.len() || !(1..=3).contains(&lo.len()) {
                return err(format!(
                    "{}: needs 1 to 3 coordinates, matching lo",
                    f.name("hi")
                ));
            }
            if lo.iter().zip(&hi).any(|(a, b)| !(a < b)) {
                return err(format!(
                    "{}: must exceed lo in every coordinate",
                    f.name("hi")
                ));
            }
            ConvexDomain::cuboid(&lo, &hi).map_err(bad)
        }
        "ball" => {
            f.forbid(&["lo", "hi", "axes", "angle"], &why)?;
            let c = f
                .list("center")?
                .ok_or_else(|| ConfigError(format!("{}: missing", f.name("center"))))?;
            let r = f
                .number("radius")?
                .ok_or_else(|| ConfigError(format!("{}: missing", f.name("radius"))))?;
            if !(1..=3).contains(&c.len()) {
                return err(format!("{}: needs 1 to 3 coordinates", f.name("center")));
            }
            if !(r > 0.0) {
                return err(format!("{}: must be positive", f.name("radius")));
            }
            ConvexDomain::ball(&c, r).map_err(bad)
        }
        "ellipse" => {
            f.forbid(&["lo", "hi", "radius"], &why)?;
            let c = f
                .list("center")?
                .ok_or_else(|| ConfigError(format!("{}: missing", f.name("center"))))?;
            let axes = f
                .list("axes")?
                .ok_or_else(|| ConfigError(format!("{}: missing", f.name("axes"))))?;
            let angle = f.number("angle")?.unwrap_or(0.0);
            if c.len() != 2 {
                return err(format!("{}: ellipses are 2-D", f.name("center")));
            }
            if axes.len() != 2 || axes.iter().any(|&a| !(a > 0.0)) {
                return err(format!("{}: needs two positive semi-axes", f.name("axes")));
            }
            ConvexDomain::ellipse_axes(&[c[0], c[1]], [axes[0], axes[1]], angle).map_err(bad)
        }
        _ => err(format!("{}: unknown shape `{shape}`", f.name("shape"))),
    }
}

fn parse_density(f: &Fields, dim: usize) -> Result<Density, ConfigError> {
    let kind = f.get("density").unwrap_or("uniform");
    let a = f.number("density_a")?.unwrap_or(1.0);
    let why = format!("by density {kind}");
    let density = match kind {
        "uniform" => {
            f.forbid(&["density_b", "density_axis", "density_center"], &why)?;
            Density::Uniform(a)
        }
        "linear" => {
            f.forbid(&["density_center"], &why)?;
            let b = f.number("density_b")?.unwrap_or(0.0);
            let axis = match f.get("density_axis") {
                None => 0,
                Some(v) => match v.parse::<usize>() {
                    Ok(k) if k < dim => k,
                    _ => {
                        return err(format!(
                            "{}: expected an axis below {dim}",
                            f.name("density_axis")
                        ))
                    }
                },
            };
            Density::Linear { a, b, axis }
        }
        "radial" => {
            f.forbid(&["density_axis"], &why)?;
            let b = f.number("density_b")?.unwrap_or(0.0);
            let center = f.list("density_center")?.unwrap_or_else(|| vec![0.0; dim]);
            if center.len() != dim {
                return err(format!(
                    "{}: needs {dim} coordinates",
                    f.name("density_center")
                ));
            }
            Density::Radial { a, b, center }
        }
        _ => return err(format!("{}: unknown density `{kind}`", f.name("density"))),
    };
    Ok(density)
}

/// Parses and validates a configuration.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let raw = read_raw(text)?;
    let top = Fields {
        section: "",
        map: &raw[""],
    };
    let kind = Kind::parse(top.require("kind")?)?;
    let why = format!("by kind {}", kind.as_str());

    for s in SECTIONS {
        if raw.contains_key(s) && !kind.sections().contains(&s) {
            return err(format!("[{s}]: not used {why}"));
        }
    }
    let mut domains = BTreeMap::new();
    for &s in kind.sections() {
        let map = raw
            .get(s)
            .ok_or_else(|| ConfigError(format!("[{s}]: missing section")))?;
        let f = Fields { section: s, map };
        let domain = parse_domain(&f)?;
        let density = parse_density(&f, domain.dim())?;
        domains.insert(s.to_string(), DomainSpec { domain, density });
    }
    let dim = domains["source"].domain.dim();
    for (name, d) in &domains {
        if d.domain.dim() != dim {
            return err(format!(
                "{name}.shape: dimension {} differs from the source's {dim}",
                d.domain.dim()
            ));
        }
    }

    let resolution = match top.get("resolution") {
        None => 32,
        Some(v) => match v.parse::<usize>() {
            Ok(r) if (8..=128).contains(&r) => r,
            _ => {
                return err(format!(
                    "resolution: expected an integer in [8, 128], got `{v}`"
                ))
            }
        },
    };

    let balanced = matches!(kind, Kind::TwoTarget | Kind::TwoTargetSweep);
    let mass_fraction = if balanced {
        top.forbid(&["mass_fraction"], &why)?;
        None
    } else {
        let m = top
            .number("mass_fraction")?
            .ok_or_else(|| ConfigError("mass_fraction: missing".into()))?;
        if !(m > 0.0 && m <= 1.0) {
            return err(format!("mass_fraction: must lie in (0, 1], got {m}"));
        }
        Some(m)
    };

    let swept = matches!(kind, Kind::Sweep | Kind::TwoTargetSweep);
    let distances = if swept {
        let d = top
            .list("distances")?
            .ok_or_else(|| ConfigError("distances: missing".into()))?;
        if d.iter().any(|&x| !(x > 0.0)) {
            return err("distances: must be positive");
        }
        if d.windows(2).any(|w| !(w[0] < w[1])) {
            return err("distances: must be strictly increasing");
        }
        d
    } else {
        top.forbid(&["distances"], &why)?;
        Vec::new()
    };

    let (heights, base) = if kind == Kind::Sections {
        let h = top
            .list("heights")?
            .unwrap_or_else(|| vec![0.1, 0.05, 0.025]);
        if h.iter().any(|&x| !(x > 0.0)) {
            return err("heights: must be positive");
        }
        let base = top.list("base")?;
        if base.as_ref().is_some_and(|b| b.len() != dim) {
            return err(format!("base: needs {dim} coordinates"));
        }
        (h, base)
    } else {
        top.forbid(&["heights", "base"], &why)?;
        (Vec::new(), None)
    };

    let seed = match top.get("seed") {
        None => 0,
        Some(v) => v.parse::<u64>().map_err(|_| {
            ConfigError(format!("seed: expected a non-negative integer, got `{v}`"))
        })?,
    };
    let record_timings = match top.get("record_timings") {
        None | Some("false") => false,
        Some("true") => true,
        Some(v) => return err(format!("record_timings: expected true or false, got `{v}`")),
    };

    Ok(ExperimentConfig {
        kind,
        resolution,
        mass_fraction,
        distances,
        seed,
        record_timings,
        heights,
        base,
        output: top.get("output").map(str::to_string),
        domains,
        echo: raw,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const FACING: &str = "kind = partial\nresolution = 64\nmass_fraction = 0.5\n\n[source]\nshape = interval\nlo = -1\nhi = 0\n\n[target]\nshape = interval\nlo = 2\nhi = 3\n";

    #[test]
    fn facing_halves() {
        let c = parse_config(FACING).unwrap();
        assert_eq!(c.kind, Kind::Partial);
        assert_eq!(c.resolution, 64);
        assert_eq!(c.mass_fraction, Some(0.5));
        assert_eq!(c.dim(), 1);
        assert_eq!(c.domain("source").density, Density::Uniform(1.0));
    }

    #[test]
    fn errors_name_the_key() {
        let cases = [
            (FACING.replace("0.5", "1.5"), "mass_fraction"),
            (FACING.replace("= 64", "= 4"), "resolution"),
            (format!("{FACING}colour = red\n"), "colour"),
            (
                FACING.replace("lo = 2", "lo = 2\nradius = 1"),
                "target.radius",
            ),
            (
                FACING.replace("kind = partial", "kind = sweep\ndistances = 4, 2"),
                "distances",
            ),
            (FACING.replace("hi = 3", "hi = x"), "target.hi"),
        ];
        for (text, key) in cases {
            let e = parse_config(&text).unwrap_err();
            assert!(e.0.contains(key), "{e} should name {key}");
        }
    }

    #[test]
    fn comments_and_lists() {
        let text = "# sweep\nkind = sweep ; inline\nmass_fraction = 0.3\ndistances = (4, 8, 16)\n[source]\nshape = box\nlo = 0, 0\nhi = 1, 1\ndensity = linear\ndensity_a = 1\ndensity_b = 0.5\ndensity_axis = 1\n[target]\nshape = ball\ncenter = 0, 0\nradius = 0.5\n";
        let c = parse_config(text).unwrap();
        assert_eq!(c.distances, vec![4.0, 8.0, 16.0]);
        assert_eq!(
            c.domain("source").density,
            Density::Linear {
                a: 1.0,
                b: 0.5,
                axis: 1
            }
        );
        assert_eq!(c.dim(), 2);
    }
}
