//! The example corpus shipped with the crate, embedded at compile time.

use crate::depgraph::DependencyGraph;
use crate::term::{parse, DispersionSpec, Parsed, SourceKind, TermSystem};

/// A named corpus file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Entry {
    pub name: &'static str,
    pub text: &'static str,
}

macro_rules! entry {
    ($name:literal) => {
        Entry {
            name: $name,
            text: include_str!(concat!("../corpus/", $name, ".tf")),
        }
    };
}

/// All corpus files in name order.
pub const ENTRIES: &[Entry] = &[
    entry!("cascade"),
    entry!("clique2"),
    entry!("collision"),
    entry!("constant"),
    entry!("cycle3"),
    entry!("diamond"),
    entry!("diamond_embedding"),
    entry!("fg"),
    entry!("fixpoint"),
    entry!("identity"),
    entry!("index_coding"),
    entry!("lone_source"),
    entry!("mixed"),
    entry!("nested"),
    entry!("one_eq"),
    entry!("padded_diamond"),
    entry!("projection"),
    entry!("r1_constant_arg"),
    entry!("r1_nested"),
    entry!("r1_proj"),
    entry!("shared"),
    entry!("shared_sub"),
    entry!("single_f"),
    entry!("source_star"),
    entry!("three_cycle_sys"),
    entry!("two_cycle"),
    entry!("two_cycle_sys"),
];

pub fn get(name: &str) -> Option<&'static str> {
    ENTRIES.iter().find(|e| e.name == name).map(|e| e.text)
}

fn parsed() -> impl Iterator<Item = (&'static str, Parsed)> {
    ENTRIES.iter().map(|e| {
        let p = parse(e.text, None).unwrap_or_else(|err| panic!("corpus file {}: {err}", e.name));
        (e.name, p)
    })
}

pub fn names(kind: SourceKind) -> Vec<&'static str> {
    parsed()
        .filter(|(_, p)| p.kind() == kind)
        .map(|(n, _)| n)
        .collect()
}

pub fn dispersions() -> Vec<(&'static str, DispersionSpec)> {
    parsed()
        .filter_map(|(n, p)| match p {
            Parsed::Dispersion(t) => Some((n, t)),
            _ => None,
        })
        .collect()
}

pub fn systems() -> Vec<(&'static str, TermSystem)> {
    parsed()
        .filter_map(|(n, p)| match p {
            Parsed::System(s) => Some((n, s)),
            _ => None,
        })
        .collect()
}

pub fn graphs() -> Vec<(&'static str, DependencyGraph)> {
    parsed()
        .filter_map(|(n, p)| match p {
            Parsed::Graph(g) => Some((n, g)),
            _ => None,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_file_parses() {
        assert_eq!(parsed().count(), ENTRIES.len());
        assert!(get("diamond").is_some());
        assert!(get("missing").is_none());
    }

    #[test]
    fn kinds_partition_the_corpus() {
        let total = dispersions().len() + systems().len() + graphs().len();
        assert_eq!(total, ENTRIES.len());
    }
}
