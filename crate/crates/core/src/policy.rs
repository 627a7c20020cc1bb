//! Deletion policies: which corner and which half survive at each level of
//! the construction. Every policy yields a fundamental domain, because the
//! three corners of a residual are images of each other under the group.
//!
//! Policies are looked up by name in a [`PolicyRegistry`]. A spec string is
//! either a bare name (`default`) or `name:args` (`pattern:312/fs`).

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{Apex, Side};

pub trait DeletionPolicy: Send + Sync + fmt::Debug {
    /// Spec string that resolves back to this policy.
    fn spec(&self) -> String;

    /// Apex of the corner kept at `level` (levels start at 1).
    fn corner(&self, level: u32) -> Apex;

    fn half(&self, level: u32) -> Side;
}

pub type Policy = Arc<dyn DeletionPolicy>;

/// One level's choice, as recorded in JSON output.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Choice {
    pub level: u32,
    pub apex: Apex,
    pub half: Side,
}

pub fn choices(policy: &dyn DeletionPolicy, levels: u32) -> Vec<Choice> {
    (1..=levels)
        .map(|level| Choice {
            level,
            apex: policy.corner(level),
            half: policy.half(level),
        })
        .collect()
}

/// Keeps the apex-3 corner and its first half at every level.
#[derive(Debug, Clone, Copy, Default)]
pub struct DefaultPolicy;

impl DeletionPolicy for DefaultPolicy {
    fn spec(&self) -> String {
        "default".into()
    }
    fn corner(&self, _level: u32) -> Apex {
        Apex::THIRD
    }
    fn half(&self, _level: u32) -> Side {
        Side::First
    }
}

/// Apex-3 corner, second half: the reflection of the default domain.
#[derive(Debug, Clone, Copy, Default)]
pub struct MirrorPolicy;

impl DeletionPolicy for MirrorPolicy {
    fn spec(&self) -> String {
        "mirror".into()
    }
    fn corner(&self, _level: u32) -> Apex {
        Apex::THIRD
    }
    fn half(&self, _level: u32) -> Side {
        Side::Second
    }
}

/// Cycles the kept corner through apexes 3, 1, 2 and alternates halves,
/// producing a spiralling domain.
#[derive(Debug, Clone, Copy, Default)]
pub struct RotatePolicy;

impl DeletionPolicy for RotatePolicy {
    fn spec(&self) -> String {
        "rotate".into()
    }
    fn corner(&self, level: u32) -> Apex {
        [Apex::THIRD, Apex::FIRST, Apex::SECOND][((level - 1) % 3) as usize]
    }
    fn half(&self, level: u32) -> Side {
        if level % 2 == 1 {
            Side::First
        } else {
            Side::Second
        }
    }
}

/// Cycles through explicit apex and half sequences, e.g. `312/fs`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternPolicy {
    corners: Vec<Apex>,
    halves: Vec<Side>,
}

impl PatternPolicy {
    pub fn new(corners: Vec<Apex>, halves: Vec<Side>) -> Result<PatternPolicy> {
        if corners.is_empty() || halves.is_empty() {
            return Err(Error::InvalidArgument(
                "pattern policy needs at least one apex and one half".into(),
            ));
        }
        Ok(PatternPolicy { corners, halves })
    }

    pub fn parse(args: &str) -> Result<PatternPolicy> {
        let bad = || Error::Parse(format!("pattern must look like `312/fs`, got {args:?}"));
        let (apexes, halves) = args.split_once('/').ok_or_else(bad)?;
        let corners = apexes
            .chars()
            .map(|c| {
                c.to_digit(10)
                    .ok_or_else(bad)
                    .and_then(|d| Apex::new(d as u8))
            })
            .collect::<Result<Vec<_>>>()?;
        let halves = halves
            .chars()
            .map(|c| match c {
                'f' => Ok(Side::First),
                's' => Ok(Side::Second),
                _ => Err(bad()),
            })
            .collect::<Result<Vec<_>>>()?;
        PatternPolicy::new(corners, halves)
    }
}

impl DeletionPolicy for PatternPolicy {
    fn spec(&self) -> String {
        let apexes: String = self.corners.iter().map(|a| a.get().to_string()).collect();
        let halves: String = self
            .halves
            .iter()
            .map(|h| match h {
                Side::First => 'f',
                Side::Second => 's',
            })
            .collect();
        format!("pattern:{apexes}/{halves}")
    }
    fn corner(&self, level: u32) -> Apex {
        self.corners[(level as usize - 1) % self.corners.len()]
    }
    fn half(&self, level: u32) -> Side {
        self.halves[(level as usize - 1) % self.halves.len()]
    }
}

pub type PolicyFactory = fn(Option<&str>) -> Result<Policy>;

struct Entry {
    summary: &'static str,
    factory: PolicyFactory,
}

/// Name-keyed table of policy constructors.
pub struct PolicyRegistry {
    entries: BTreeMap<&'static str, Entry>,
}

fn no_args(name: &str, args: Option<&str>) -> Result<()> {
    match args {
        Some(a) => Err(Error::InvalidArgument(format!(
            "policy {name:?} takes no arguments, got {a:?}"
        ))),
        None => Ok(()),
    }
}

impl PolicyRegistry {
    pub fn empty() -> PolicyRegistry {
        PolicyRegistry {
            entries: BTreeMap::new(),
        }
    }

    pub fn builtin() -> PolicyRegistry {
        let mut reg = PolicyRegistry::empty();
        reg.register("default", "apex 3, first half, every level", |args| {
            no_args("default", args)?;
            Ok(Arc::new(DefaultPolicy))
        });
        reg.register("mirror", "apex 3, second half, every level", |args| {
            no_args("mirror", args)?;
            Ok(Arc::new(MirrorPolicy))
        });
        reg.register("rotate", "apex cycles 3,1,2; halves alternate", |args| {
            no_args("rotate", args)?;
            Ok(Arc::new(RotatePolicy))
        });
        reg.register(
            "pattern",
            "pattern:<apexes>/<halves>, e.g. pattern:312/fs",
            |args| {
                let args = args.ok_or_else(|| {
                    Error::InvalidArgument(
                        "pattern policy needs arguments, e.g. pattern:312/fs".into(),
                    )
                })?;
                Ok(Arc::new(PatternPolicy::parse(args)?))
            },
        );
        reg
    }

    pub fn register(&mut self, name: &'static str, summary: &'static str, factory: PolicyFactory) {
        self.entries.insert(name, Entry { summary, factory });
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.entries.keys().copied()
    }

    pub fn describe(&self) -> Vec<(&'static str, &'static str)> {
        self.entries.iter().map(|(k, e)| (*k, e.summary)).collect()
    }

    pub fn resolve(&self, spec: &str) -> Result<Policy> {
        let (name, args) = match spec.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (spec, None),
        };
        let entry = self.entries.get(name).ok_or_else(|| Error::Unknown {
            kind: "policy",
            name: name.to_string(),
            known: self.names().collect::<Vec<_>>().join(", "),
        })?;
        (entry.factory)(args)
    }
}

impl Default for PolicyRegistry {
    fn default() -> Self {
        PolicyRegistry::builtin()
    }
}

pub fn default_policy() -> Policy {
    Arc::new(DefaultPolicy)
}

/// Resolves a spec string against the built-in registry.
pub fn resolve(spec: &str) -> Result<Policy> {
    PolicyRegistry::builtin().resolve(spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_round_trip_through_their_spec() {
        let reg = PolicyRegistry::builtin();
        for spec in ["default", "mirror", "rotate", "pattern:312/fs"] {
            let p = reg.resolve(spec).unwrap();
            assert_eq!(p.spec(), spec);
        }
    }

    #[test]
    fn unknown_and_malformed_specs() {
        let reg = PolicyRegistry::builtin();
        assert!(matches!(reg.resolve("nope"), Err(Error::Unknown { .. })));
        assert!(reg.resolve("default:x").is_err());
        assert!(reg.resolve("pattern").is_err());
        assert!(reg.resolve("pattern:4/f").is_err());
        assert!(reg.resolve("pattern:3/x").is_err());
        assert!(reg.resolve("pattern:/f").is_err());
    }

    #[test]
    fn pattern_cycles() {
        let p = PatternPolicy::parse("31/fss").unwrap();
        let apexes: Vec<u8> = (1..=4).map(|l| p.corner(l).get()).collect();
        assert_eq!(apexes, vec![3, 1, 3, 1]);
        let halves: Vec<Side> = (1..=4).map(|l| p.half(l)).collect();
        assert_eq!(
            halves,
            vec![Side::First, Side::Second, Side::Second, Side::First]
        );
    }

    #[test]
    fn custom_registration() {
        let mut reg = PolicyRegistry::empty();
        reg.register("only-mirror", "test", |_| Ok(Arc::new(MirrorPolicy)));
        assert_eq!(reg.names().collect::<Vec<_>>(), vec!["only-mirror"]);
        assert_eq!(reg.resolve("only-mirror").unwrap().half(1), Side::Second);
    }
}
